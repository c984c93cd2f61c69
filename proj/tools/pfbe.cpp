// pfbe: run benchmark configs, sweep a directory of them, or self-check.

#include "pfbe/bench.hpp"
#include "pfbe/checks.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kConfigError = 1, kStepFailure = 2;

// CSV goes to `path` when given, otherwise after the table on stdout.
int emit(const std::vector<pfbe::RunRow> &rows, const std::string &path) {
    pfbe::write_table(std::cout, rows);
    if (path.empty()) {
        std::cout << '\n';
        pfbe::write_csv(std::cout, rows);
    } else {
        std::ostringstream buf;
        pfbe::write_csv(buf, rows);
        std::ofstream out(path);
        if (!(out << buf.str())) {
            std::cerr << "error: cannot write '" << path << "'\n";
            return kConfigError;
        }
    }
    return pfbe::any_step_failure(rows) ? kStepFailure : kOk;
}

int cmd_run(const std::string &config, std::string out) {
    const auto configs = pfbe::RunConfig::load_file(config);
    if (out.empty() && configs.size() == 1)
        out = configs.front().output;
    std::vector<pfbe::RunRow> rows;
    for (const auto &cfg : configs)
        for (auto &row : pfbe::run(cfg))
            rows.push_back(std::move(row));
    return emit(rows, out);
}

int cmd_sweep(const std::string &dir, const std::string &out) {
    if (!fs::is_directory(dir))
        throw pfbe::ConfigError("not a directory: '" + dir + "'");
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    // Parse everything first so a bad file produces no partial output.
    std::vector<pfbe::RunConfig> configs;
    for (const auto &file : files)
        for (auto &cfg : pfbe::RunConfig::load_file(file.string()))
            configs.push_back(std::move(cfg));
    return emit(pfbe::sweep(std::move(configs)), out);
}

int cmd_check() {
    int failed = 0;
    pfbe::run_all_checks([&](const pfbe::CheckResult &r) {
        std::cout << pfbe::format_check(r) << std::endl;
        failed += r.passed ? 0 : 1;
    });
    std::cout << (failed ? "some checks failed\n" : "all checks passed\n");
    return failed ? 1 : 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Penalty-envelope minimax solvers: benchmark runner and self-check"};
    app.require_subcommand(1);

    std::string config, config_dir, out;
    auto *run = app.add_subcommand("run", "Solve the configs in a JSON file");
    run->add_option("--config", config, "JSON config (object or array of objects)")->required();
    run->add_option("--out", out, "CSV output path (default: config 'output' or stdout)");

    auto *sweep = app.add_subcommand("sweep", "Solve every *.json config in a directory");
    sweep->add_option("--config-dir", config_dir, "Directory of JSON configs")->required();
    sweep->add_option("--out", out, "CSV output path (default: stdout)");

    auto *check = app.add_subcommand("check", "Run the diagnostics and invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*run)
            return cmd_run(config, out);
        if (*sweep)
            return cmd_sweep(config_dir, out);
        if (*check)
            return cmd_check();
    } catch (const pfbe::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}
