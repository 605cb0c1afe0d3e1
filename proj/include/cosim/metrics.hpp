#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cosim/engine.hpp"

namespace cosim {

// ---------------------------------------------------------------------------
// Trajectory scores
// ---------------------------------------------------------------------------

/// Normalized area under the trust trajectory on a 0..100 scale, trapezoidal
/// rule with unit step.
inline double exposure_score(const TrustTrajectory& traj, double tau_max = 1.0) {
    if (tau_max <= 0.0) throw ConfigError("exposure_score: tau_max must be positive");
    if (traj.values.size() < 2) throw ConfigError("exposure_score: trajectory needs >= 2 points");
    const size_t t_rounds = traj.values.size() - 1;
    double area = 0.0;
    for (size_t t = 0; t + 1 < traj.values.size(); ++t)
        area += 0.5 * (traj.values[t] + traj.values[t + 1]);
    return 100.0 * area / (static_cast<double>(t_rounds) * tau_max);
}

inline double robustness(const TrustTrajectory& traj, double tau_max = 1.0) {
    return 100.0 - exposure_score(traj, tau_max);
}

/// Earliest round attaining the trajectory maximum.
inline int peak_round(const TrustTrajectory& traj) {
    if (traj.values.empty()) throw ConfigError("peak_round: empty trajectory");
    size_t best = 0;
    for (size_t t = 1; t < traj.values.size(); ++t)
        if (traj.values[t] > traj.values[best]) best = t;
    return static_cast<int>(best);
}

/// Fraction of the misinformation-induced trust rise corrected by the final
/// round, on a 0..100 scale. The epsilon guard keeps the flat case at 0.
inline double recovery(const TrustTrajectory& traj, double epsilon = 1e-6) {
    if (traj.values.size() < 2) throw ConfigError("recovery: trajectory needs >= 2 points");
    const double peak = traj.values[static_cast<size_t>(peak_round(traj))];
    const double tau0 = traj.values.front();
    const double tauT = traj.values.back();
    return 100.0 * (peak - tauT) / (peak - tau0 + epsilon);
}

/// Robustness/recovery pair for one run.
struct ResilienceScore {
    std::string community_id;
    std::string backend_id;
    std::uint64_t seed = 0;
    double robustness = 0.0;
    double recovery = 0.0;
    double exposure = 0.0;
};

inline ResilienceScore resilience_from_trajectory(const TrustTrajectory& traj,
                                                  std::string community_id,
                                                  std::string backend_id, std::uint64_t seed,
                                                  double tau_max = 1.0, double epsilon = 1e-6) {
    ResilienceScore s;
    s.community_id = std::move(community_id);
    s.backend_id = std::move(backend_id);
    s.seed = seed;
    s.exposure = exposure_score(traj, tau_max);
    s.robustness = 100.0 - s.exposure;
    s.recovery = recovery(traj, epsilon);
    return s;
}

// ---------------------------------------------------------------------------
// Stance aggregation
// ---------------------------------------------------------------------------

/// Percent share of each stance among posted records in the given rounds.
/// Shares sum to 100 unless the denominator is empty.
struct StanceShares {
    double support = 0.0;
    double deny = 0.0;
    double query = 0.0;
    double comment = 0.0;
    bool empty_denominator = true;

    double of(Stance s) const {
        switch (s) {
            case Stance::support: return support;
            case Stance::deny: return deny;
            case Stance::query: return query;
            case Stance::comment: return comment;
        }
        return 0.0;
    }
};

inline StanceShares stance_shares(const RunLog& log, const std::set<int>& rounds) {
    if (rounds.empty()) throw ConfigError("stance_shares: empty round set");
    size_t counts[4] = {0, 0, 0, 0};
    size_t total = 0;
    for (const auto& r : log.records) {
        if (!r.stance || rounds.count(r.t) == 0) continue;
        counts[static_cast<size_t>(*r.stance)] += 1;
        total += 1;
    }
    StanceShares shares;
    if (total == 0) return shares;  // all-zero, flagged
    shares.empty_denominator = false;
    shares.support = 100.0 * static_cast<double>(counts[0]) / static_cast<double>(total);
    shares.deny = 100.0 * static_cast<double>(counts[1]) / static_cast<double>(total);
    shares.query = 100.0 * static_cast<double>(counts[2]) / static_cast<double>(total);
    shares.comment = 100.0 * static_cast<double>(counts[3]) / static_cast<double>(total);
    return shares;
}

inline std::set<int> round_range(int lo, int hi) {
    std::set<int> rounds;
    for (int t = lo; t <= hi; ++t) rounds.insert(t);
    return rounds;
}

// ---------------------------------------------------------------------------
// Mechanism metrics
// ---------------------------------------------------------------------------

/// Pre/post-peak stance mechanism summary. The post-peak quantities are
/// absent (not zero) when the trust peak falls on the final round, and
/// query_generation is flagged when no posts exist pre-peak.
struct MechanismMetrics {
    double query_generation = 0.0;          // query share over rounds 1..peak
    std::optional<double> deny_gain;        // post-peak deny share minus pre-peak
    std::optional<double> support_release;  // pre-peak support share minus post-peak
    int peak_round = 0;
    bool pre_window_empty = true;
};

inline MechanismMetrics mechanism_metrics(const RunLog& log, const TrustTrajectory& traj) {
    const int p = cosim::peak_round(traj);
    const int t_rounds = traj.t_rounds;
    MechanismMetrics m;
    m.peak_round = p;
    StanceShares pre;
    if (p >= 1) pre = stance_shares(log, round_range(1, p));
    m.query_generation = pre.query;
    m.pre_window_empty = pre.empty_denominator;
    if (p < t_rounds) {
        const StanceShares post = stance_shares(log, round_range(p + 1, t_rounds));
        m.deny_gain = post.deny - pre.deny;
        m.support_release = pre.support - post.support;
    }
    return m;
}

/// Cell-level mechanism metrics: agents grouped into AOT-band x PI-band
/// cells (the same five intervals as the persona bands) before aggregation.
struct CellMechanism {
    int aot_band = 0;
    int pi_band = 0;
    size_t agents = 0;
    MechanismMetrics metrics;
};

inline std::vector<CellMechanism> mechanism_metrics_by_cell(const RunLog& log,
                                                            const Community& community,
                                                            const TrustTrajectory& traj) {
    if (community.size() != log.meta.n)
        throw ConfigError("mechanism_metrics_by_cell: community does not match log");
    std::vector<CellMechanism> cells;
    for (int a = 0; a < kTraitBands; ++a) {
        for (int p = 0; p < kTraitBands; ++p) {
            std::vector<int> members;
            for (size_t i = 0; i < community.size(); ++i) {
                if (trait_band_index(community.agents[i].aot) == a &&
                    trait_band_index(community.agents[i].pi) == p)
                    members.push_back(static_cast<int>(i));
            }
            if (members.empty()) continue;
            RunLog sub;
            sub.meta = log.meta;
            sub.meta.n = members.size();
            std::set<int> member_set(members.begin(), members.end());
            for (const auto& r : log.records)
                if (member_set.count(r.agent_id)) sub.records.push_back(r);
            CellMechanism cell;
            cell.aot_band = a;
            cell.pi_band = p;
            cell.agents = members.size();
            cell.metrics = mechanism_metrics(sub, traj);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

// ---------------------------------------------------------------------------
// Resilience map
// ---------------------------------------------------------------------------

struct MapEntry {
    std::string community_id;
    double robustness = 0.0;
    double recovery = 0.0;
    double robustness_norm = 0.0;
    double recovery_norm = 0.0;
    double composite = 0.0;
    int rank = 0;
};

struct ResilienceMap {
    std::vector<MapEntry> ranking;  // descending composite, ties by community id
    double robustness_median = 0.0;
    double recovery_median = 0.0;
    bool degenerate_robustness = false;  // all equal, normalized to 0.5
    bool degenerate_recovery = false;
};

namespace detail {
inline double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}
}  // namespace detail

/// Min-max normalize both dimensions across the input scores, rank by the
/// mean of the two normalized values, and report median split thresholds.
inline ResilienceMap resilience_map(const std::vector<ResilienceScore>& scores) {
    if (scores.size() < 2) throw ConfigError("resilience_map: need at least 2 scores");
    double rob_min = scores[0].robustness, rob_max = scores[0].robustness;
    double rec_min = scores[0].recovery, rec_max = scores[0].recovery;
    for (const auto& s : scores) {
        rob_min = std::min(rob_min, s.robustness);
        rob_max = std::max(rob_max, s.robustness);
        rec_min = std::min(rec_min, s.recovery);
        rec_max = std::max(rec_max, s.recovery);
    }
    ResilienceMap map;
    map.degenerate_robustness = rob_max - rob_min <= 0.0;
    map.degenerate_recovery = rec_max - rec_min <= 0.0;

    std::vector<double> robs, recs;
    for (const auto& s : scores) {
        MapEntry e;
        e.community_id = s.community_id;
        e.robustness = s.robustness;
        e.recovery = s.recovery;
        e.robustness_norm = map.degenerate_robustness
                                ? 0.5
                                : (s.robustness - rob_min) / (rob_max - rob_min);
        e.recovery_norm =
            map.degenerate_recovery ? 0.5 : (s.recovery - rec_min) / (rec_max - rec_min);
        e.composite = 0.5 * (e.robustness_norm + e.recovery_norm);
        map.ranking.push_back(std::move(e));
        robs.push_back(s.robustness);
        recs.push_back(s.recovery);
    }
    std::sort(map.ranking.begin(), map.ranking.end(), [](const MapEntry& a, const MapEntry& b) {
        if (a.composite != b.composite) return a.composite > b.composite;
        return a.community_id < b.community_id;
    });
    for (size_t i = 0; i < map.ranking.size(); ++i) map.ranking[i].rank = static_cast<int>(i) + 1;
    map.robustness_median = detail::median_of(robs);
    map.recovery_median = detail::median_of(recs);
    return map;
}

// ---------------------------------------------------------------------------
// Intervention deltas
// ---------------------------------------------------------------------------

/// Treated-minus-control stance shifts in the pre/post-peak windows (windows
/// aligned on the control trajectory's peak) plus score deltas from each
/// arm's own trajectory.
struct InterventionDelta {
    int control_peak = 0;
    StanceShares pre_control, pre_treated;
    StanceShares post_control, post_treated;  // meaningful only if has_post_window
    bool has_post_window = false;
    double d_robustness = 0.0;
    double d_recovery = 0.0;

    double pre_shift(Stance s) const { return pre_treated.of(s) - pre_control.of(s); }
    double post_shift(Stance s) const { return post_treated.of(s) - post_control.of(s); }
};

inline InterventionDelta intervention_delta(const RunLog& control, const RunLog& treated,
                                            double tau_max = 1.0, double epsilon = 1e-6) {
    if (control.meta.community_id != treated.meta.community_id ||
        control.meta.claim_id != treated.meta.claim_id || control.meta.seed != treated.meta.seed)
        throw ConfigError("intervention_delta: control and treated runs do not match");

    const TrustTrajectory control_traj = trajectory_from_log(control);
    const TrustTrajectory treated_traj = trajectory_from_log(treated);
    InterventionDelta d;
    d.control_peak = peak_round(control_traj);
    if (d.control_peak >= 1) {
        const auto pre = round_range(1, d.control_peak);
        d.pre_control = stance_shares(control, pre);
        d.pre_treated = stance_shares(treated, pre);
    }
    if (d.control_peak < control_traj.t_rounds) {
        const auto post = round_range(d.control_peak + 1, control_traj.t_rounds);
        d.post_control = stance_shares(control, post);
        d.post_treated = stance_shares(treated, post);
        d.has_post_window = true;
    }
    d.d_robustness = robustness(treated_traj, tau_max) - robustness(control_traj, tau_max);
    d.d_recovery = recovery(treated_traj, epsilon) - recovery(control_traj, epsilon);
    return d;
}

}  // namespace cosim
