#include "pfbe/bench.hpp"

#include "pfbe/lagrangian.hpp"
#include "pfbe/problems.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace pfbe {

using nlohmann::json;

void RunConfig::validate() const {
    if (problem != "synthetic" && problem != "example1")
        throw ConfigError("unknown problem '" + problem + "'");
    if (solver != "spg" && solver != "subgda" && solver != "gda")
        throw ConfigError("unknown solver '" + solver + "'");
    if (problem == "synthetic" && (n < 1 || p < 1 || !(c > 0)))
        throw ConfigError("synthetic problem needs n, p >= 1 and c > 0");
    if (eta && !(*eta > 0))
        throw ConfigError("eta must be positive");
    if (alpha && !(*alpha >= 1))
        throw ConfigError("alpha must be at least 1");
    if (!(gtol >= 0))
        throw ConfigError("gtol must be nonnegative");
    if (max_iter < 0)
        throw ConfigError("max_iter must be nonnegative");
    if (repeats < 1)
        throw ConfigError("repeats must be positive");
    if (gda_step_grid.empty())
        throw ConfigError("gda_step_grid must not be empty");
    for (const auto &[a1, a2] : gda_step_grid)
        if (a1 <= 0)
            throw ConfigError("gda_step_grid entries need a1 > 0");
}

std::string RunConfig::to_json() const {
    json j;
    j["problem"] = problem;
    j["n"] = n;
    j["p"] = p;
    j["c"] = c;
    j["seed"] = seed;
    j["solver"] = solver;
    if (eta)
        j["eta"] = *eta;
    if (alpha)
        j["alpha"] = *alpha;
    j["gtol"] = gtol;
    j["max_iter"] = max_iter;
    j["gda_step_grid"] = json::array();
    for (const auto &[a1, a2] : gda_step_grid)
        j["gda_step_grid"].push_back({a1, a2});
    j["output"] = output;
    j["repeats"] = repeats;
    return j.dump(2);
}

namespace {

const std::set<std::string> kKeys = {"problem", "n",        "p",             "c",
                                     "seed",    "solver",   "eta",           "alpha",
                                     "gtol",    "max_iter", "gda_step_grid", "output",
                                     "repeats"};

RunConfig from_object(const json &j) {
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    for (const auto &item : j.items())
        if (!kKeys.count(item.key()))
            throw ConfigError("unknown config key '" + item.key() + "'");
    if (!j.contains("problem") || !j.contains("solver"))
        throw ConfigError("config needs 'problem' and 'solver'");

    RunConfig cfg;
    try {
        cfg.problem = j.at("problem").get<std::string>();
        cfg.solver = j.at("solver").get<std::string>();
        if (j.contains("n"))
            cfg.n = j["n"].get<long>();
        if (j.contains("p"))
            cfg.p = j["p"].get<long>();
        if (j.contains("c"))
            cfg.c = j["c"].get<double>();
        if (j.contains("seed")) {
            if (!j["seed"].is_number_unsigned())
                throw ConfigError("seed must be a nonnegative integer");
            cfg.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("eta") && !j["eta"].is_null())
            cfg.eta = j["eta"].get<double>();
        if (j.contains("alpha") && !j["alpha"].is_null())
            cfg.alpha = j["alpha"].get<double>();
        if (j.contains("gtol"))
            cfg.gtol = j["gtol"].get<double>();
        if (j.contains("max_iter"))
            cfg.max_iter = j["max_iter"].get<long>();
        if (j.contains("gda_step_grid")) {
            cfg.gda_step_grid.clear();
            for (const auto &pair : j["gda_step_grid"]) {
                if (!pair.is_array() || pair.size() != 2)
                    throw ConfigError("gda_step_grid entries must be [a1, a2] pairs");
                cfg.gda_step_grid.emplace_back(pair[0].get<int>(), pair[1].get<int>());
            }
        }
        if (j.contains("output"))
            cfg.output = j["output"].get<std::string>();
        if (j.contains("repeats"))
            cfg.repeats = j["repeats"].get<int>();
    } catch (const json::exception &e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json parse_text(const std::string &text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

} // namespace

RunConfig RunConfig::from_json(const std::string &text) { return from_object(parse_text(text)); }

std::vector<RunConfig> RunConfig::load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const json j = parse_text(buf.str());
    std::vector<RunConfig> out;
    if (j.is_array()) {
        for (const auto &item : j)
            out.push_back(from_object(item));
    } else {
        out.push_back(from_object(j));
    }
    return out;
}

EnvelopeConfig resolve_envelope(const RunConfig &cfg, const MinimaxProblem &mm) {
    if (!cfg.eta && !cfg.alpha)
        return EnvelopeConfig::theorem_default(mm);
    const double eta = cfg.eta ? *cfg.eta : EnvelopeConfig::theorem_default(mm).eta();
    const double alpha = cfg.alpha ? *cfg.alpha : EnvelopeConfig::min_alpha(eta, mm.mu());
    try {
        return EnvelopeConfig(mm, eta, alpha);
    } catch (const PreconditionViolation &e) {
        throw ConfigError(e.what());
    }
}

std::vector<RunRow> run(const RunConfig &cfg) {
    cfg.validate();
    const CoupledProblem problem =
        cfg.problem == "example1"
            ? make_example1()
            : make_synthetic(cfg.n, cfg.p, cfg.c, cfg.seed);
    const LiftedProblem lifted = lift(problem);
    const EnvelopeConfig env = resolve_envelope(cfg, lifted.mm);
    const StartPoint start = default_start(problem);
    const Vec z0 = lifted.join(start.x, start.lambda);

    SolverConfig scfg;
    scfg.gtol = cfg.gtol;
    scfg.max_iter = cfg.max_iter;

    std::vector<RunRow> rows;
    for (int rep = 0; rep < cfg.repeats; ++rep) {
        RunRow row;
        row.solver = cfg.solver;
        row.n = problem.n();
        row.p = problem.p();
        row.c = cfg.problem == "example1" ? 0.0 : cfg.c;
        row.seed = cfg.seed;
        row.repeat = rep;
        row.eta = env.eta();
        row.alpha = env.alpha();
        if (cfg.solver == "spg") {
            row.result = solve_spg(lifted.mm, env, scfg, z0, start.y);
        } else if (cfg.solver == "subgda") {
            row.result = solve_subgda(lifted.mm, env, scfg, z0, start.y);
        } else {
            // time_s is the selected run's own solve time, not the grid search.
            auto sel = select_gda_steps(lifted.mm, env, scfg, z0, start.y, cfg.gda_step_grid,
                                        Execution::serial);
            row.result = std::move(sel.result);
            row.step_x = sel.step_x;
            row.step_y = sel.step_y;
        }
        const Vec x = lifted.x_part(row.result.x);
        row.result.feas = feasibility_mcc(problem, x, row.result.y);
        row.cert = certify(lifted, env, row.result.x, row.result.y, row.result.grad_norm0);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<RunRow> sweep(std::vector<RunConfig> configs, Execution exec) {
    for (const auto &cfg : configs)
        cfg.validate();
    std::stable_sort(configs.begin(), configs.end(), [](const RunConfig &a, const RunConfig &b) {
        return std::tie(a.n, a.p, a.c, a.solver, a.seed) <
               std::tie(b.n, b.p, b.c, b.solver, b.seed);
    });
    std::vector<std::vector<RunRow>> parts(configs.size());
    for_each_index(
        configs.size(), [&](std::size_t i) { parts[i] = run(configs[i]); }, exec,
        thread_cap_from_env());
    std::vector<RunRow> rows;
    for (auto &part : parts)
        for (auto &row : part)
            rows.push_back(std::move(row));
    return rows;
}

std::string csv_row(const RunRow &row) {
    const auto &r = row.result;
    return fmt::format("{},{},{},{},{},{:.2e},{},{:.2e},{:.2e},{:.4f}", row.solver, row.n, row.p,
                       row.c, row.seed, r.fval, r.iter, r.stat, r.feas, r.wall_time);
}

void write_csv(std::ostream &out, const std::vector<RunRow> &rows) {
    out << kCsvHeader << '\n';
    for (const auto &row : rows)
        out << csv_row(row) << '\n';
}

void write_table(std::ostream &out, const std::vector<RunRow> &rows) {
    fmt::print(out, "{:<8} {:>5} {:>5} {:>6} {:>6} {:>10} {:>6} {:>9} {:>9} {:>8}\n", "solver",
               "n", "p", "c", "seed", "fval", "iter", "stat", "feas", "time_s");
    for (const auto &row : rows) {
        const auto &r = row.result;
        fmt::print(out, "{:<8} {:>5} {:>5} {:>6} {:>6} {:>10.2e} {:>6} {:>9.2e} {:>9.2e} {:>8.3f}\n",
                   row.solver, row.n, row.p, row.c, row.seed, r.fval, r.iter, r.stat, r.feas,
                   r.wall_time);
    }
}

bool any_step_failure(const std::vector<RunRow> &rows) {
    return std::any_of(rows.begin(), rows.end(),
                       [](const RunRow &r) { return r.result.step_failure; });
}

} // namespace pfbe
