#pragma once

#include "pfbe/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pfbe {

/// One benchmark configuration, read from a JSON object:
///
///   {"problem": "synthetic", "n": 10, "p": 10, "c": 1.0, "seed": 7,
///    "solver": "spg", "eta": 1.0, "alpha": 100.0, "gtol": 1e-7,
///    "max_iter": 10000, "gda_step_grid": [[1, 1], [3, 1]],
///    "output": "results.csv", "repeats": 1}
///
/// Only "problem" and "solver" are required. eta/alpha default to the
/// envelope defaults (η = min{1, 1/(2L)}, α = max{1, 2/(ημ)}).
struct RunConfig {
    std::string problem = "synthetic"; ///< synthetic | example1
    long n = 10, p = 10;
    double c = 1.0;
    std::uint64_t seed = 0;
    std::string solver = "spg"; ///< spg | subgda | gda
    std::optional<double> eta, alpha;
    double gtol = 1e-7;
    long max_iter = 10000;
    std::vector<std::pair<int, int>> gda_step_grid = default_step_grid();
    std::string output;
    int repeats = 1;

    bool operator==(const RunConfig &) const = default;

    /// Throws ConfigError on unknown problem or solver and bad values.
    void validate() const;

    std::string to_json() const;
    static RunConfig from_json(const std::string &text);
    /// A file holds one config object or an array of them.
    static std::vector<RunConfig> load_file(const std::string &path);
};

struct RunRow {
    std::string solver;
    long n = 0, p = 0;
    double c = 0;
    std::uint64_t seed = 0;
    int repeat = 0;
    SolveResult result;
    Certificate cert;
    double eta = 0, alpha = 0;
    double step_x = 0, step_y = 0; ///< GDA: the selected grid steps
};

/// Envelope parameters a config resolves to for its problem.
EnvelopeConfig resolve_envelope(const RunConfig &cfg, const MinimaxProblem &mm);

/// Solve one configuration `repeats` times. Timing covers the solver call
/// only. Throws ConfigError for invalid configs.
std::vector<RunRow> run(const RunConfig &cfg);

/// Run every config, ordered by (n, p, c, solver, seed). Runs execute in
/// parallel when `exec` allows; the rows are identical either way.
std::vector<RunRow> sweep(std::vector<RunConfig> configs, Execution exec = Execution::parallel);

inline constexpr const char *kCsvHeader = "solver,n,p,c,seed,fval,iter,stat,feas,time_s";

std::string csv_row(const RunRow &row);
void write_csv(std::ostream &out, const std::vector<RunRow> &rows);
/// Human-readable aligned table.
void write_table(std::ostream &out, const std::vector<RunRow> &rows);

/// True when any row ended in a line-search failure.
bool any_step_failure(const std::vector<RunRow> &rows);

} // namespace pfbe
