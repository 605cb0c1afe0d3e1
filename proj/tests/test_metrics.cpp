#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cosim/metrics.hpp"
#include "cosim/runner.hpp"

using namespace cosim;

#ifndef COSIM_ASSETS_DIR
#define COSIM_ASSETS_DIR "assets"
#endif

namespace {

TrustTrajectory traj_of(std::vector<double> values) {
    TrustTrajectory t;
    t.t_rounds = static_cast<int>(values.size()) - 1;
    t.values = std::move(values);
    return t;
}

/// Independent area oracle: dense Riemann midpoint sum over the
/// piecewise-linear interpolant of the sampled trajectory.
double riemann_exposure(const TrustTrajectory& traj, size_t subdivisions = 10000) {
    const size_t t_rounds = traj.values.size() - 1;
    double area = 0.0;
    const double h = static_cast<double>(t_rounds) / static_cast<double>(subdivisions);
    for (size_t k = 0; k < subdivisions; ++k) {
        const double x = (static_cast<double>(k) + 0.5) * h;
        const size_t seg = std::min(t_rounds - 1, static_cast<size_t>(x));
        const double frac = x - static_cast<double>(seg);
        const double y = traj.values[seg] * (1.0 - frac) + traj.values[seg + 1] * frac;
        area += y * h;
    }
    return 100.0 * area / static_cast<double>(t_rounds);
}

RunLog synthetic_log(const std::vector<std::vector<Stance>>& stances_per_round) {
    RunLog log;
    log.meta.community_id = "S";
    log.meta.claim_id = "c";
    log.meta.backend_id = "test";
    log.meta.arm = "control";
    log.meta.rounds = static_cast<int>(stances_per_round.size());
    size_t n = 0;
    for (const auto& round : stances_per_round) n = std::max(n, round.size());
    log.meta.n = n;
    for (int t = 1; t <= log.meta.rounds; ++t) {
        const auto& round = stances_per_round[static_cast<size_t>(t - 1)];
        for (size_t i = 0; i < n; ++i) {
            RoundRecord r;
            r.agent_id = static_cast<int>(i);
            r.t = t;
            if (i < round.size()) {
                r.decision = Decision::post_only;
                r.message = "m";
                r.stance = round[i];
            }
            log.records.push_back(std::move(r));
        }
    }
    return log;
}

}  // namespace

TEST_CASE("exposure trivial cases") {
    REQUIRE(exposure_score(traj_of({0, 0, 0, 0})) == 0.0);
    REQUIRE(exposure_score(traj_of(std::vector<double>(11, 1.0))) == 100.0);
    // linear ramp 0 -> tau_max over T: trapezoid of a line is exact, so 50
    std::vector<double> ramp;
    for (int t = 0; t <= 10; ++t) ramp.push_back(t / 10.0);
    REQUIRE(exposure_score(traj_of(ramp)) == Catch::Approx(50.0).margin(1e-12));
    REQUIRE(robustness(traj_of(ramp)) == Catch::Approx(50.0).margin(1e-12));
    REQUIRE(robustness(traj_of({0, 0, 0})) == 100.0);
}

TEST_CASE("exposure matches the dense Riemann oracle on random trajectories") {
    Rng rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> values;
        const int t_rounds = 2 + static_cast<int>(rng.uniform_below(12));
        for (int t = 0; t <= t_rounds; ++t) values.push_back(rng.uniform01());
        const TrustTrajectory traj = traj_of(values);
        REQUIRE(exposure_score(traj) == Catch::Approx(riemann_exposure(traj)).margin(1e-9));
    }
}

TEST_CASE("exposure rejects invalid inputs") {
    REQUIRE_THROWS_AS(exposure_score(traj_of({0.5})), ConfigError);
    REQUIRE_THROWS_AS(exposure_score(traj_of({0, 1}), 0.0), ConfigError);
    REQUIRE_THROWS_AS(exposure_score(traj_of({0, 1}), -1.0), ConfigError);
}

TEST_CASE("recovery formula cases") {
    // peak equals the final value: no correction happened
    REQUIRE(recovery(traj_of({0.0, 0.3, 0.6})) == 0.0);
    // worked case: tau0=0.2, peak=0.8, tauT=0.5
    const double r = recovery(traj_of({0.2, 0.8, 0.5}));
    REQUIRE(r == Catch::Approx(100.0 * 0.3 / (0.6 + 1e-6)).margin(1e-12));
    REQUIRE(std::abs(r - 49.99992) < 1e-4);
    // flat trajectory: numerator 0, epsilon guards the division
    REQUIRE(recovery(traj_of({0.4, 0.4, 0.4})) == 0.0);
}

TEST_CASE("recovery is invariant under uniform rescaling within 1e-3") {
    const std::vector<double> base = {0.1, 0.5, 0.8, 0.6, 0.4};
    const double r0 = recovery(traj_of(base));
    for (double scale : {0.1, 0.5, 1.0}) {
        std::vector<double> scaled;
        for (double v : base) scaled.push_back(v * scale);
        REQUIRE(std::abs(recovery(traj_of(scaled)) - r0) < 1e-3);
    }
}

TEST_CASE("peak_round picks the earliest maximum") {
    REQUIRE(peak_round(traj_of({0, 0.2, 0.6, 0.6, 0.4})) == 2);
    REQUIRE(peak_round(traj_of({0, 0.1, 0.2, 0.3})) == 3);  // monotone: final round
    REQUIRE(peak_round(traj_of({0.5, 0.5, 0.5})) == 0);     // all equal: round 0
}

TEST_CASE("stance shares count the counting oracle") {
    // 10 posts: 4 support, 3 deny, 2 query, 1 comment
    const RunLog log = synthetic_log({{Stance::support, Stance::support, Stance::deny,
                                       Stance::query},
                                      {Stance::support, Stance::support, Stance::deny,
                                       Stance::query},
                                      {Stance::deny, Stance::comment}});
    const StanceShares s = stance_shares(log, round_range(1, 3));
    REQUIRE(s.support == Catch::Approx(40.0));
    REQUIRE(s.deny == Catch::Approx(30.0));
    REQUIRE(s.query == Catch::Approx(20.0));
    REQUIRE(s.comment == Catch::Approx(10.0));
    REQUIRE(s.support + s.deny + s.query + s.comment == Catch::Approx(100.0).margin(1e-9));
    REQUIRE_FALSE(s.empty_denominator);

    const RunLog single = synthetic_log({{Stance::query}});
    const StanceShares q = stance_shares(single, round_range(1, 1));
    REQUIRE(q.query == 100.0);
    REQUIRE(q.support == 0.0);

    // empty denominator flagged, all zero
    const RunLog silent = synthetic_log({{}});
    const StanceShares z = stance_shares(silent, round_range(1, 1));
    REQUIRE(z.empty_denominator);
    REQUIRE(z.support + z.deny + z.query + z.comment == 0.0);

    REQUIRE_THROWS_AS(stance_shares(log, std::set<int>{}), ConfigError);
}

TEST_CASE("mechanism metrics split at the trust peak") {
    // peak at round 2 of 4: pre = rounds 1..2 all query, post = 3..4 all deny
    const RunLog log = synthetic_log({{Stance::query, Stance::query},
                                      {Stance::query, Stance::query},
                                      {Stance::deny, Stance::deny},
                                      {Stance::deny, Stance::deny}});
    const TrustTrajectory traj = traj_of({0.0, 0.4, 0.8, 0.5, 0.3});
    const MechanismMetrics m = mechanism_metrics(log, traj);
    REQUIRE(m.peak_round == 2);
    REQUIRE(m.query_generation == Catch::Approx(100.0));
    REQUIRE(m.deny_gain.has_value());
    REQUIRE(*m.deny_gain == Catch::Approx(100.0));
    REQUIRE(m.support_release.has_value());
    REQUIRE(*m.support_release == Catch::Approx(0.0));
}

TEST_CASE("identical pre and post distributions give zero gains") {
    const RunLog log = synthetic_log({{Stance::support, Stance::deny},
                                      {Stance::support, Stance::deny},
                                      {Stance::support, Stance::deny},
                                      {Stance::support, Stance::deny}});
    const TrustTrajectory traj = traj_of({0.0, 0.4, 0.8, 0.5, 0.3});
    const MechanismMetrics m = mechanism_metrics(log, traj);
    REQUIRE(*m.deny_gain == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(*m.support_release == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("post-peak metrics are absent when the peak is the final round") {
    const RunLog log = synthetic_log({{Stance::query}, {Stance::query}});
    const TrustTrajectory traj = traj_of({0.0, 0.2, 0.6});
    const MechanismMetrics m = mechanism_metrics(log, traj);
    REQUIRE(m.peak_round == 2);
    REQUIRE_FALSE(m.deny_gain.has_value());
    REQUIRE_FALSE(m.support_release.has_value());
}

TEST_CASE("resilience map ranks the published reference scores") {
    // the Qwen3-4B column of the shipped reference table
    std::vector<ResilienceScore> scores;
    auto add = [&](const char* id, double rob, double rec) {
        ResilienceScore s;
        s.community_id = id;
        s.backend_id = "qwen3-4b";
        s.robustness = rob;
        s.recovery = rec;
        s.exposure = 100.0 - rob;
        scores.push_back(s);
    };
    add("G01", 37.69, 2.79);
    add("G02", 50.30, 8.24);
    add("G03", 45.90, 0.58);
    add("G04", 49.36, 1.23);
    add("G05", 52.82, 13.58);
    add("G06", 56.31, 20.25);
    add("G07", 53.74, 3.48);
    add("G08", 55.83, 5.29);
    add("G09", 55.11, 18.89);
    add("G10", 58.03, 23.26);
    add("G11", 56.09, 4.65);
    add("G12", 57.83, 18.41);
    add("G13", 52.12, 14.79);
    add("G14", 55.71, 18.18);
    add("G15", 53.98, 2.88);
    add("G16", 55.18, 4.95);

    const ResilienceMap map = resilience_map(scores);
    REQUIRE(map.ranking.front().community_id == "G10");
    REQUIRE(map.ranking.front().composite == Catch::Approx(1.0));
    REQUIRE(map.ranking.back().community_id == "G01");

    // ranking is invariant under a positive affine transform of robustness
    std::vector<ResilienceScore> transformed = scores;
    for (auto& s : transformed) s.robustness = 3.0 * s.robustness + 11.0;
    const ResilienceMap map2 = resilience_map(transformed);
    for (size_t i = 0; i < map.ranking.size(); ++i)
        REQUIRE(map2.ranking[i].community_id == map.ranking[i].community_id);
}

TEST_CASE("degenerate dimensions normalize to 0.5 and tie by community id") {
    std::vector<ResilienceScore> scores(2);
    scores[0].community_id = "B";
    scores[1].community_id = "A";
    scores[0].robustness = scores[1].robustness = 50.0;
    scores[0].recovery = scores[1].recovery = 10.0;
    const ResilienceMap map = resilience_map(scores);
    REQUIRE(map.degenerate_robustness);
    REQUIRE(map.degenerate_recovery);
    REQUIRE(map.ranking[0].composite == 0.5);
    REQUIRE(map.ranking[0].community_id == "A");  // tie broken by id
    REQUIRE(map.ranking[1].community_id == "B");

    REQUIRE_THROWS_AS(resilience_map({scores[0]}), ConfigError);
}

TEST_CASE("intervention delta of identical logs is zero") {
    const RunLog log = synthetic_log({{Stance::query, Stance::support},
                                      {Stance::query, Stance::support},
                                      {Stance::deny, Stance::comment}});
    // give records a trust profile so the trajectory is nontrivial
    RunLog control = log;
    for (auto& r : control.records) r.trust = 0.1 * r.t;
    const InterventionDelta d = intervention_delta(control, control);
    for (Stance s : all_stances()) {
        REQUIRE(d.pre_shift(s) == 0.0);
        if (d.has_post_window) REQUIRE(d.post_shift(s) == 0.0);
    }
    REQUIRE(d.d_robustness == 0.0);
    REQUIRE(d.d_recovery == 0.0);

    RunLog other = control;
    other.meta.seed = 99;
    REQUIRE_THROWS_AS(intervention_delta(control, other), ConfigError);
}

TEST_CASE("cell-level mechanisms partition the community by trait bands") {
    ReferenceBackend be;
    const Claim claim = Claim::make("c", "claim", "health", 2024, {{"m", 8.0}}, "ev", "src", 0.5);
    const Community c = build_community("G06", profile_by_name("aot_center"),
                                        profile_by_name("pi_center"), 40,
                                        default_background_pool(), default_persona_template(), 3);
    const SocialGraph g = watts_strogatz(40, 6, 0.1, 3);
    const auto res = run_simulation(c, g, claim, 6, 0.2, {}, be, 3);
    const auto cells = mechanism_metrics_by_cell(res.log, c, res.trajectory);
    size_t total_agents = 0;
    for (const auto& cell : cells) {
        total_agents += cell.agents;
        REQUIRE(cell.aot_band >= 0);
        REQUIRE(cell.aot_band < kTraitBands);
    }
    REQUIRE(total_agents == 40);
}
