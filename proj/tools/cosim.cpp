// cosim command-line front end: simulate / analyze / report / calibrate /
// score-pool. Exit codes: 0 success, 1 configuration error, 2 backend
// failure, 3 partial data.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "cosim/runner.hpp"
#include "cosim/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitBackend = 2;
constexpr int kExitPartial = 3;

std::vector<int> parse_seed_list(const std::string& csv) {
    std::vector<int> seeds;
    std::string token;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!token.empty()) seeds.push_back(std::stoi(token));
            token.clear();
        } else {
            token += c;
        }
    }
    return seeds;
}

void apply_overrides(cosim::RunConfig& cfg, const std::string& seeds, const std::string& arm,
                     const std::string& backend) {
    if (!seeds.empty()) cfg.seeds = parse_seed_list(seeds);
    if (!arm.empty()) cfg.arm = arm;
    if (!backend.empty()) cfg.backend_kind = backend;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"community misinformation resilience simulator"};
    app.set_version_flag("--version", std::string("cosim ") + cosim::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_path, seeds, arm, backend;
    std::vector<std::string> log_paths;
    std::string log_dir, trajectories, metrics_csv, pool_path;
    bool svg = false;

    auto* sim = app.add_subcommand("simulate", "run the configured sweep");
    sim->add_option("--config", config_path, "run configuration file")->required();
    sim->add_option("--out", out_path, "output directory (overrides config)");
    sim->add_option("--seeds", seeds, "comma-separated seed list (overrides config)");
    sim->add_option("--arm", arm, "intervention arm (overrides config)");
    sim->add_option("--backend", backend, "backend kind: reference|remote (overrides config)");

    auto* ana = app.add_subcommand("analyze", "compute metrics from run logs or trajectories");
    ana->add_option("--logs", log_paths, "run log files (jsonl)");
    ana->add_option("--log-dir", log_dir, "directory of run log files");
    ana->add_option("--trajectories", trajectories, "trajectory csv instead of logs");
    ana->add_option("--out", out_path, "output metrics csv")->required();

    auto* rep = app.add_subcommand("report", "resilience map and intervention deltas");
    rep->add_option("--metrics", metrics_csv, "metrics csv from analyze")->required();
    rep->add_option("--out", out_path, "output directory")->required();
    rep->add_flag("--svg", svg, "emit the resilience-map scatter as SVG");

    auto* cal = app.add_subcommand("calibrate", "run the persona calibration loop");
    cal->add_option("--config", config_path, "run configuration file")->required();
    cal->add_option("--out", out_path, "output directory (overrides config)");
    cal->add_option("--backend", backend, "backend kind: reference|remote (overrides config)");

    auto* sp = app.add_subcommand("score-pool", "score claim credibility through a backend");
    sp->add_option("--pool", pool_path, "claim pool file")->required();
    sp->add_option("--out", out_path, "scored pool output file")->required();
    sp->add_option("--config", config_path, "run configuration (for the remote backend)");
    sp->add_option("--backend", backend, "backend kind: reference|remote");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            cosim::RunConfig cfg = cosim::load_config(config_path);
            apply_overrides(cfg, seeds, arm, backend);
            const auto outcome = cosim::cmd_simulate(
                cfg, out_path.empty() ? std::nullopt
                                      : std::optional<cosim::fs::path>(out_path));
            print_warnings(outcome.warnings);
            std::cout << outcome.log_files.size() << " run log(s) written to "
                      << outcome.out_dir.string() << "\n";
            return kExitOk;
        }
        if (ana->parsed()) {
            if (!trajectories.empty()) {
                const auto outcome = cosim::cmd_analyze_trajectories(trajectories, out_path);
                print_warnings(outcome.warnings);
                std::cout << outcome.rows.size() << " metric row(s) written to "
                          << outcome.csv.string() << "\n";
                return outcome.rows.empty() ? kExitPartial : kExitOk;
            }
            std::vector<cosim::fs::path> inputs(log_paths.begin(), log_paths.end());
            if (!log_dir.empty()) {
                for (const auto& entry : cosim::fs::directory_iterator(log_dir))
                    if (entry.path().extension() == ".jsonl") inputs.push_back(entry.path());
                std::sort(inputs.begin(), inputs.end());
            }
            const auto outcome = cosim::cmd_analyze(inputs, out_path);
            print_warnings(outcome.warnings);
            std::cout << outcome.rows.size() << " metric row(s) written to "
                      << outcome.csv.string() << "\n";
            if (outcome.rows.empty()) return kExitPartial;  // every input failed to parse
            return kExitOk;
        }
        if (rep->parsed()) {
            const auto outcome = cosim::cmd_report(metrics_csv, out_path, svg);
            std::cout << "report written to " << outcome.report_json.string() << "\n";
            for (const auto& p : outcome.svg_files)
                std::cout << "scatter written to " << p.string() << "\n";
            return kExitOk;
        }
        if (cal->parsed()) {
            cosim::RunConfig cfg = cosim::load_config(config_path);
            apply_overrides(cfg, "", "", backend);
            const auto outcome = cosim::cmd_calibrate(
                cfg, out_path.empty() ? std::nullopt
                                      : std::optional<cosim::fs::path>(out_path));
            std::cout << "calibration report written to " << outcome.report_json.string()
                      << " (selected iteration " << outcome.result.selected_iteration << ")\n";
            return kExitOk;
        }
        if (sp->parsed()) {
            cosim::RunConfig cfg;
            if (!config_path.empty()) cfg = cosim::load_config(config_path);
            if (!backend.empty()) cfg.backend_kind = backend;
            auto be = cosim::make_backend(cfg);
            const auto outcome = cosim::cmd_score_pool(pool_path, *be, out_path);
            print_warnings(outcome.warnings);
            std::cout << outcome.scored << " claim(s) scored into " << outcome.out_path.string()
                      << "\n";
            return outcome.failed > 0 ? kExitPartial : kExitOk;
        }
    } catch (const cosim::BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const cosim::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
