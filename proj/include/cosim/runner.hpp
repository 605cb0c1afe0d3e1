#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cosim/calibration.hpp"
#include "cosim/config.hpp"
#include "cosim/engine.hpp"
#include "cosim/metrics.hpp"
#include "cosim/reference_backend.hpp"
#include "cosim/remote_backend.hpp"
#include "cosim/report.hpp"

namespace cosim {

namespace fs = std::filesystem;

inline std::unique_ptr<AgentBackend> make_backend(const RunConfig& cfg) {
    if (cfg.backend_kind == "reference") return std::make_unique<ReferenceBackend>();
    return std::make_unique<RemoteChatBackend>(cfg.remote);
}

/// Pick the run's claim: by id when configured, otherwise the first claim
/// that survives the credibility filter.
inline Claim select_claim(const RunConfig& cfg) {
    const std::vector<Claim> pool = load_pool(cfg.resolve(cfg.pool_path));
    if (!cfg.claim_id.empty()) {
        for (const auto& c : pool)
            if (c.id == cfg.claim_id) return c;
        throw ConfigError("claim id not found in pool: " + cfg.claim_id);
    }
    const std::vector<Claim> retained = filter_pool(pool);
    if (retained.empty()) throw ConfigError("no claim passes the credibility filter");
    return retained.front();
}

// ---------------------------------------------------------------------------
// CSV helpers (simple unquoted fields)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOutcome {
    fs::path out_dir;
    std::vector<fs::path> log_files;
    fs::path trajectories_csv;
    fs::path manifest;
    std::vector<std::string> warnings;
};

/// Run the configured sweep: one log per (community, seed, arm). Seed streams
/// derive from (master_seed, community, seed); the intervention arm never
/// enters a derivation, so arms share community, graph, and exposure draws.
inline SimulateOutcome cmd_simulate(const RunConfig& cfg,
                                    std::optional<fs::path> out_override = std::nullopt) {
    cfg.validate();
    const std::string hash = config_hash(cfg);
    std::unique_ptr<AgentBackend> backend = make_backend(cfg);
    backend->preflight();
    const Claim claim = select_claim(cfg);
    const PersonaTemplate tmpl = load_persona_template(cfg.resolve(cfg.template_path));
    const std::vector<BackgroundAttrs> backgrounds = load_backgrounds(cfg.resolve(cfg.backgrounds_path));
    InterventionArm arm;
    arm.kind = arm_from_name(cfg.arm);
    arm.start_round = cfg.intervention_start_round;

    SimulateOutcome outcome;
    outcome.out_dir = out_override.value_or(fs::path(cfg.output_dir));
    fs::create_directories(outcome.out_dir);

    std::ostringstream traj_csv;
    traj_csv << "# cosim=" << kVersion << " config=" << hash << "\n";
    traj_csv << "community,backend,seed,arm";
    for (int t = 0; t <= cfg.rounds; ++t) traj_csv << ",tau" << t;
    traj_csv << "\n";

    for (const CommunitySpec& spec : cfg.communities) {
        for (int seed_index : cfg.seeds) {
            const std::uint64_t run_seed =
                derive_seed(cfg.master_seed, {"run", spec.id, std::to_string(seed_index)});
            const Community community =
                build_community(spec.id, profile_by_name(spec.aot_profile),
                                profile_by_name(spec.pi_profile), cfg.n, backgrounds, tmpl, run_seed);
            const SocialGraph graph =
                watts_strogatz(cfg.n, cfg.graph_k, cfg.graph_p_rewire, run_seed);

            ExposureSchedule schedule;
            schedule.n = cfg.n;
            if (cfg.rho > 0.0) {
                Rng rng = derive_rng(run_seed, {"exposure", spec.id});
                schedule = schedule_exposure(cfg.n, cfg.rho, cfg.rounds, rng);
            }
            SimulationRun sim(community, graph, claim, schedule, arm, *backend);
            RunMeta meta;
            meta.seed = static_cast<std::uint64_t>(seed_index);
            meta.rho = cfg.rho;
            meta.config_hash = hash;
            RunResult result = sim.run(cfg.rounds, meta);

            const std::string stem =
                spec.id + "_s" + std::to_string(seed_index) + "_" + arm_name(arm.kind);
            const fs::path log_path = outcome.out_dir / (stem + ".jsonl");
            save_log(log_path, result.log);
            outcome.log_files.push_back(log_path);
            for (const auto& w : result.warnings) outcome.warnings.push_back(stem + ": " + w);

            traj_csv << spec.id << ',' << result.log.meta.backend_id << ',' << seed_index << ','
                     << arm_name(arm.kind);
            for (double v : result.trajectory.values) traj_csv << ',' << format_double(v, 9);
            traj_csv << "\n";
        }
    }

    outcome.trajectories_csv = outcome.out_dir / "trajectories.csv";
    write_text_file(outcome.trajectories_csv, traj_csv.str());
    write_text_file(outcome.out_dir / "config.json", config_to_json(cfg).dump(2) + "\n");

    nlohmann::ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["config_hash"] = hash;
    manifest["artifacts"] = nlohmann::ordered_json::array();
    auto add_artifact = [&](const fs::path& p) {
        manifest["artifacts"].push_back(
            {{"path", p.filename().string()}, {"fnv64", hex64(fnv1a64(read_text_file(p)))}});
    };
    for (const auto& p : outcome.log_files) add_artifact(p);
    add_artifact(outcome.trajectories_csv);
    add_artifact(outcome.out_dir / "config.json");
    outcome.manifest = outcome.out_dir / "manifest.json";
    write_text_file(outcome.manifest, manifest.dump(2) + "\n");
    return outcome;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct MetricsRow {
    std::string community;
    std::string backend;
    std::uint64_t seed = 0;
    std::string arm;
    size_t n = 0;
    int rounds = 0;
    double exposure = 0.0;
    double robustness = 0.0;
    double recovery = 0.0;
    int peak_round = 0;
    std::optional<double> query_generation;
    std::optional<double> deny_gain;
    std::optional<double> support_release;
};

inline const char* kMetricsCsvColumns =
    "community,backend,seed,arm,n,rounds,exposure,robustness,recovery,peak_round,"
    "query_generation,deny_gain,support_release";

struct AnalyzeOutcome {
    fs::path csv;
    std::vector<MetricsRow> rows;
    size_t skipped = 0;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string metrics_csv_text(const std::vector<MetricsRow>& rows,
                                    const std::string& input_hash) {
    std::ostringstream out;
    out << "# cosim=" << kVersion << " inputs=" << input_hash << "\n";
    out << kMetricsCsvColumns << "\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? format_double(*v, 6) : std::string();
    };
    for (const auto& r : rows) {
        out << r.community << ',' << r.backend << ',' << r.seed << ',' << r.arm << ',' << r.n << ','
            << r.rounds << ',' << format_double(r.exposure, 6) << ','
            << format_double(r.robustness, 6) << ',' << format_double(r.recovery, 6) << ','
            << r.peak_round << ',' << opt(r.query_generation) << ',' << opt(r.deny_gain) << ','
            << opt(r.support_release) << "\n";
    }
    return out.str();
}

}  // namespace detail

inline MetricsRow analyze_log(const RunLog& log) {
    const TrustTrajectory traj = trajectory_from_log(log);
    MetricsRow row;
    row.community = log.meta.community_id;
    row.backend = log.meta.backend_id;
    row.seed = log.meta.seed;
    row.arm = log.meta.arm;
    row.n = log.meta.n;
    row.rounds = log.meta.rounds;
    row.exposure = exposure_score(traj);
    row.robustness = 100.0 - row.exposure;
    row.recovery = recovery(traj);
    const MechanismMetrics m = mechanism_metrics(log, traj);
    row.peak_round = m.peak_round;
    row.query_generation = m.query_generation;
    row.deny_gain = m.deny_gain;
    row.support_release = m.support_release;
    return row;
}

/// Analyze JSONL run logs into one metrics row each. Corrupt logs are
/// skipped with a warning; the caller decides whether all-failed is fatal.
inline AnalyzeOutcome cmd_analyze(const std::vector<fs::path>& log_paths, const fs::path& out_csv) {
    if (log_paths.empty()) throw ConfigError("analyze: no input logs");
    AnalyzeOutcome outcome;
    std::uint64_t input_hash = 0xcbf29ce484222325ull;
    for (const auto& path : log_paths) {
        try {
            const RunLog log = load_log(path);
            outcome.rows.push_back(analyze_log(log));
            input_hash = fnv1a64(path.filename().string(), input_hash);
        } catch (const std::exception& e) {
            outcome.skipped += 1;
            outcome.warnings.push_back("skipping " + path.string() + ": " + e.what());
        }
    }
    const std::string text = detail::metrics_csv_text(outcome.rows, hex64(input_hash));
    write_text_file(out_csv, text);
    outcome.csv = out_csv;
    return outcome;
}

/// Analyze a trajectory CSV (community,backend,seed,arm,tau0..tauT) into
/// score-only metrics rows. This is the path reference trajectories take.
inline AnalyzeOutcome cmd_analyze_trajectories(const fs::path& traj_csv, const fs::path& out_csv) {
    AnalyzeOutcome outcome;
    const std::vector<std::string> lines = split_lines(read_text_file(traj_csv));
    bool header_seen = false;
    size_t tau_columns = 0;
    for (const std::string& line : lines) {
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> fields = detail::csv_fields(line);
        if (!header_seen) {
            if (fields.size() < 5 || fields[0] != "community")
                throw ConfigError("trajectory csv: unexpected header");
            tau_columns = fields.size() - 4;
            header_seen = true;
            continue;
        }
        try {
            if (fields.size() != tau_columns + 4)
                throw ConfigError("wrong field count");
            TrustTrajectory traj;
            traj.t_rounds = static_cast<int>(tau_columns) - 1;
            for (size_t k = 4; k < fields.size(); ++k) traj.values.push_back(std::stod(fields[k]));
            MetricsRow row;
            row.community = fields[0];
            row.backend = fields[1];
            row.seed = static_cast<std::uint64_t>(std::stoull(fields[2]));
            row.arm = fields[3];
            row.rounds = traj.t_rounds;
            row.exposure = exposure_score(traj);
            row.robustness = 100.0 - row.exposure;
            row.recovery = recovery(traj);
            row.peak_round = peak_round(traj);
            outcome.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            outcome.skipped += 1;
            outcome.warnings.push_back("skipping trajectory row: " + std::string(e.what()));
        }
    }
    if (!header_seen) throw ConfigError("trajectory csv: missing header");
    const std::string input_hash = hex64(fnv1a64(traj_csv.filename().string()));
    write_text_file(out_csv, detail::metrics_csv_text(outcome.rows, input_hash));
    outcome.csv = out_csv;
    return outcome;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct BackendReport {
    std::string backend;
    ResilienceMap map;
    bool degenerate_single = false;  // only one community: no normalization range
    std::vector<ArmMovement> movements;
};

struct ReportOutcome {
    fs::path report_json;
    std::vector<fs::path> svg_files;
    std::vector<BackendReport> backends;
};

inline std::vector<MetricsRow> read_metrics_csv(const fs::path& csv) {
    std::vector<MetricsRow> rows;
    bool header_seen = false;
    for (const std::string& line : split_lines(read_text_file(csv))) {
        if (line.empty() || line[0] == '#') continue;
        const auto fields = detail::csv_fields(line);
        if (!header_seen) {
            if (detail::csv_fields(kMetricsCsvColumns).size() != fields.size() ||
                fields[0] != "community")
                throw ConfigError("metrics csv: schema mismatch");
            header_seen = true;
            continue;
        }
        if (fields.size() != detail::csv_fields(kMetricsCsvColumns).size())
            throw ConfigError("metrics csv: schema mismatch");
        MetricsRow r;
        r.community = fields[0];
        r.backend = fields[1];
        r.seed = static_cast<std::uint64_t>(std::stoull(fields[2]));
        r.arm = fields[3];
        r.n = static_cast<size_t>(std::stoull(fields[4]));
        r.rounds = std::stoi(fields[5]);
        r.exposure = std::stod(fields[6]);
        r.robustness = std::stod(fields[7]);
        r.recovery = std::stod(fields[8]);
        r.peak_round = std::stoi(fields[9]);
        if (!fields[10].empty()) r.query_generation = std::stod(fields[10]);
        if (!fields[11].empty()) r.deny_gain = std::stod(fields[11]);
        if (!fields[12].empty()) r.support_release = std::stod(fields[12]);
        rows.push_back(std::move(r));
    }
    if (!header_seen) throw ConfigError("metrics csv: missing header");
    return rows;
}

/// Build the resilience-map ranking (control rows, seed-averaged per
/// community) and per-arm movement vectors, per backend.
inline ReportOutcome cmd_report(const fs::path& metrics_csv, const fs::path& out_dir,
                                bool emit_svg = false) {
    const std::vector<MetricsRow> rows = read_metrics_csv(metrics_csv);
    if (rows.empty()) throw ConfigError("report: metrics csv has no rows");
    fs::create_directories(out_dir);

    std::set<std::string> backend_names;
    for (const auto& r : rows) backend_names.insert(r.backend);

    ReportOutcome outcome;
    nlohmann::ordered_json report;
    report["version"] = kVersion;
    report["source"] = metrics_csv.filename().string();
    report["backends"] = nlohmann::ordered_json::array();

    for (const std::string& backend : backend_names) {
        BackendReport br;
        br.backend = backend;

        // seed-averaged control scores per community
        std::map<std::string, std::pair<double, double>> sums;
        std::map<std::string, size_t> counts;
        for (const auto& r : rows) {
            if (r.backend != backend || r.arm != "control") continue;
            sums[r.community].first += r.robustness;
            sums[r.community].second += r.recovery;
            counts[r.community] += 1;
        }
        std::vector<ResilienceScore> scores;
        for (const auto& [community, sum] : sums) {
            ResilienceScore s;
            s.community_id = community;
            s.backend_id = backend;
            s.robustness = sum.first / static_cast<double>(counts[community]);
            s.recovery = sum.second / static_cast<double>(counts[community]);
            s.exposure = 100.0 - s.robustness;
            scores.push_back(std::move(s));
        }
        if (scores.empty()) continue;
        if (scores.size() == 1) {
            // degenerate: one community, no normalization range
            br.degenerate_single = true;
            MapEntry e;
            e.community_id = scores[0].community_id;
            e.robustness = scores[0].robustness;
            e.recovery = scores[0].recovery;
            e.robustness_norm = e.recovery_norm = e.composite = 0.5;
            e.rank = 1;
            br.map.ranking.push_back(e);
            br.map.robustness_median = scores[0].robustness;
            br.map.recovery_median = scores[0].recovery;
            br.map.degenerate_robustness = br.map.degenerate_recovery = true;
        } else {
            br.map = resilience_map(scores);
        }

        // movement vectors: treated minus control per (community, seed)
        std::map<std::pair<std::string, std::uint64_t>, const MetricsRow*> control_rows;
        for (const auto& r : rows)
            if (r.backend == backend && r.arm == "control") control_rows[{r.community, r.seed}] = &r;
        std::map<std::pair<std::string, std::string>, ArmMovement> movement;
        for (const auto& r : rows) {
            if (r.backend != backend || r.arm == "control") continue;
            auto it = control_rows.find({r.community, r.seed});
            if (it == control_rows.end()) continue;
            ArmMovement& mv = movement[{r.community, r.arm}];
            mv.community_id = r.community;
            mv.arm = r.arm;
            mv.d_robustness += r.robustness - it->second->robustness;
            mv.d_recovery += r.recovery - it->second->recovery;
            mv.runs += 1;
        }
        for (auto& [_, mv] : movement) {
            mv.d_robustness /= static_cast<double>(mv.runs);
            mv.d_recovery /= static_cast<double>(mv.runs);
            br.movements.push_back(mv);
        }

        nlohmann::ordered_json jb;
        jb["backend"] = backend;
        jb["degenerate_single"] = br.degenerate_single;
        jb["map"] = resilience_map_to_json(br.map);
        jb["movements"] = nlohmann::ordered_json::array();
        for (const auto& mv : br.movements)
            jb["movements"].push_back({{"community", mv.community_id},
                                       {"arm", mv.arm},
                                       {"d_robustness", mv.d_robustness},
                                       {"d_recovery", mv.d_recovery},
                                       {"runs", mv.runs}});
        report["backends"].push_back(std::move(jb));

        if (emit_svg && !br.map.ranking.empty()) {
            const fs::path svg_path = out_dir / ("resilience_map_" + backend + ".svg");
            write_text_file(svg_path, resilience_map_svg(br.map));
            outcome.svg_files.push_back(svg_path);
        }
        outcome.backends.push_back(std::move(br));
    }
    if (outcome.backends.empty()) throw ConfigError("report: no control rows to rank");

    outcome.report_json = out_dir / "report.json";
    write_text_file(outcome.report_json, report.dump(2) + "\n");
    return outcome;
}

// ---------------------------------------------------------------------------
// calibrate / score-pool
// ---------------------------------------------------------------------------

struct CalibrateOutcome {
    fs::path report_json;
    CalibrationResult result;
    AlignmentReport alignment;
};

inline CalibrateOutcome cmd_calibrate(const RunConfig& cfg,
                                      std::optional<fs::path> out_override = std::nullopt) {
    const std::vector<DiagnosticItem> items = load_questionnaire(cfg.resolve(cfg.questionnaire_path));
    const PersonaTemplate initial = load_persona_template(cfg.resolve(cfg.template_path));
    const std::vector<BackgroundAttrs> backgrounds = load_backgrounds(cfg.resolve(cfg.backgrounds_path));
    std::unique_ptr<AgentBackend> backend = make_backend(cfg);
    backend->preflight();

    const std::vector<TraitTargets> cohort = grid_targets(cfg.calibration_agents_per_cell);
    CalibrateOutcome outcome;
    outcome.result = calibrate(initial, cohort, items, *backend, cfg.calibration_iterations,
                               backgrounds, backend->concurrency());
    outcome.alignment = alignment_metrics(cohort, outcome.result.realized);

    auto align_json = [](const AlignmentMetrics& m) {
        return nlohmann::ordered_json{
            {"rmse", m.rmse}, {"mae", m.mae}, {"accuracy", m.accuracy}, {"macro_f1", m.macro_f1}};
    };
    nlohmann::ordered_json report;
    report["version"] = kVersion;
    report["config_hash"] = config_hash(cfg);
    report["backend"] = backend->name();
    report["cohort_size"] = cohort.size();
    report["per_iteration_loss"] = outcome.result.per_iteration_loss;
    report["selected_iteration"] = outcome.result.selected_iteration;
    report["alignment"] = {{"aot", align_json(outcome.alignment.aot)},
                           {"pi", align_json(outcome.alignment.pi)}};
    report["selected_template"] = outcome.result.selected_template.body;

    const fs::path out_dir = out_override.value_or(fs::path(cfg.output_dir));
    fs::create_directories(out_dir);
    outcome.report_json = out_dir / "calibration_report.json";
    write_text_file(outcome.report_json, report.dump(2) + "\n");
    return outcome;
}

struct ScorePoolOutcome {
    fs::path out_path;
    size_t scored = 0;
    size_t failed = 0;  // per-claim scoring errors (claim left unscored)
    std::vector<std::string> warnings;
};

/// Score every claim in a pool through the backend and write the scored pool
/// (per-backend score recorded, average recomputed). A claim whose score
/// cannot be parsed is left unscored and reported; the rest proceed.
inline ScorePoolOutcome cmd_score_pool(const fs::path& pool_path, AgentBackend& backend,
                                       const fs::path& out_path) {
    std::vector<Claim> pool = load_pool(pool_path);
    backend.preflight();
    ScorePoolOutcome outcome;
    for (Claim& claim : pool) {
        CredibilityResult r;
        try {
            r = backend.score_claim(claim);
        } catch (const BackendError& e) {
            outcome.failed += 1;
            outcome.warnings.push_back("claim " + claim.id + ": " + e.what());
            continue;
        }
        if (r.out_of_range)
            outcome.warnings.push_back("claim " + claim.id + ": backend score out of [0,10], clamped");
        claim.credibility_scores[backend.name()] = r.score;
        claim.recompute_avg();
        claim.sync_raw();
        outcome.scored += 1;
    }
    if (outcome.scored == 0 && outcome.failed > 0)
        throw BackendError("score-pool: every claim failed to score");
    save_pool(out_path, pool);
    outcome.out_path = out_path;
    return outcome;
}

}  // namespace cosim
