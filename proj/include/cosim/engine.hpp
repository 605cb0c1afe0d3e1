#pragma once

#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosim/backend.hpp"
#include "cosim/claims.hpp"
#include "cosim/interventions.hpp"
#include "cosim/network.hpp"
#include "cosim/parallel.hpp"
#include "cosim/persona.hpp"
#include "cosim/version.hpp"

namespace cosim {

/// One agent's output for one round. `stance` is present iff the agent
/// posted this round.
struct RoundRecord {
    int agent_id = 0;
    int t = 0;
    bool exposed = false;
    double trust = 0.0;
    std::string opinion;
    Emotion emotion = Emotion::none;
    Decision decision = Decision::none;
    std::string message;
    std::optional<Stance> stance;
    InterventionSignal intervention;  // kind == empty when no signal was delivered
};

struct RunMeta {
    std::string community_id;
    std::string claim_id;
    std::uint64_t seed = 0;
    std::string backend_id;
    std::string arm;
    size_t n = 0;
    int rounds = 0;
    double rho = 0.1;
    double tau_baseline = 0.0;
    std::string config_hash;
};

/// Complete run log: metadata plus one record per agent per round, ordered
/// by (t, agent_id).
struct RunLog {
    RunMeta meta;
    std::vector<RoundRecord> records;

    const RoundRecord& at(int t, int agent_id) const {
        const size_t idx = static_cast<size_t>(t - 1) * meta.n + static_cast<size_t>(agent_id);
        return records.at(idx);
    }
};

/// Community-mean trust per round; index 0 is the pre-shock baseline.
struct TrustTrajectory {
    std::vector<double> values;
    size_t n = 0;
    int t_rounds = 0;
};

inline TrustTrajectory trajectory_from_log(const RunLog& log) {
    TrustTrajectory traj;
    traj.n = log.meta.n;
    traj.t_rounds = log.meta.rounds;
    traj.values.assign(static_cast<size_t>(log.meta.rounds) + 1, 0.0);
    traj.values[0] = log.meta.tau_baseline;
    std::vector<size_t> counts(static_cast<size_t>(log.meta.rounds) + 1, 0);
    for (const auto& r : log.records) {
        traj.values[static_cast<size_t>(r.t)] += r.trust;
        counts[static_cast<size_t>(r.t)] += 1;
    }
    for (size_t t = 1; t < traj.values.size(); ++t) {
        if (counts[t] != log.meta.n) throw ConfigError("run log: missing records at round " + std::to_string(t));
        traj.values[t] /= static_cast<double>(log.meta.n);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Peer context
// ---------------------------------------------------------------------------

/// Messages agent i observes at round t: the public posts of its neighbors
/// from round t-1, tagged with the source id, in ascending neighbor order.
/// `prev_round` must be indexed by agent id.
inline std::vector<PeerMessage> peer_context(const std::vector<RoundRecord>& prev_round,
                                             const SocialGraph& g, int agent_id) {
    std::vector<PeerMessage> peers;
    for (int j : g.neighbors(agent_id)) {
        const RoundRecord& r = prev_round.at(static_cast<size_t>(j));
        if (r.decision != Decision::post_only) continue;
        PeerMessage m;
        m.source_id = j;
        m.text = r.message;
        m.stance = r.stance.value_or(Stance::comment);
        m.poster_trust = r.trust;
        peers.push_back(std::move(m));
    }
    return peers;
}

// ---------------------------------------------------------------------------
// Simulation run
// ---------------------------------------------------------------------------

struct RunResult {
    RunLog log;
    TrustTrajectory trajectory;
    std::vector<std::string> warnings;
};

namespace detail {

struct AgentState {
    double prev_trust = 0.0;
    bool ever_above = false;  // trust exceeded the deny threshold at some earlier round
    std::string history_summary;
    std::string intervention_history;
    std::string prev_opinion;
    Emotion prev_emotion = Emotion::none;
};

}  // namespace detail

/// Round-synchronous simulation: every agent at round t observes only round
/// t-1 messages; a barrier ends each round. The deny-threshold memory and
/// trust carry-over live here, not in the backend, so backends stay
/// stateless.
class SimulationRun {
public:
    /// `deny_threshold` feeds the trust_ever_above context flag (whether the
    /// agent's trust previously exceeded the denial level).
    SimulationRun(const Community& community, const SocialGraph& graph, const Claim& claim,
                  const ExposureSchedule& schedule, InterventionArm arm, AgentBackend& backend,
                  double deny_threshold = 0.30)
        : community_(community),
          graph_(graph),
          claim_(claim),
          schedule_(schedule),
          arm_(arm),
          backend_(backend),
          deny_threshold_(deny_threshold) {
        if (graph_.node_count() != community_.size())
            throw ConfigError("graph node count does not match community size");
        if (arm_.kind != ArmKind::none) arm_.validate_against(claim_);
        states_.resize(community_.size());
        exposed_ever_.assign(community_.size(), 0);
        reached_.assign(community_.size(), 0);
        if (arm_.kind == ArmKind::persuasion) {
            persuasion_evidence_free_ = claim_.gold_evidence.empty();
            persuasion_text_ = backend_.generate_persuasion(claim_, !persuasion_evidence_free_);
            if (persuasion_evidence_free_)
                warnings_.push_back("persuasion arm: claim '" + claim_.id +
                                    "' has no gold evidence, using evidence-free form");
        }
    }

    /// Execute rounds 1..t_rounds and return the full log and trajectory.
    RunResult run(int t_rounds, RunMeta meta) {
        meta.community_id = community_.id;
        meta.claim_id = claim_.id;
        meta.backend_id = backend_.name();
        meta.arm = arm_name(arm_.kind);
        meta.n = community_.size();
        meta.rounds = t_rounds;
        meta.tau_baseline = 0.0;

        RunLog log;
        log.meta = meta;
        log.records.reserve(static_cast<size_t>(t_rounds) * community_.size());
        std::vector<RoundRecord> prev_round = baseline_round();
        for (int t = 1; t <= t_rounds; ++t) {
            std::vector<RoundRecord> round = step_round(t, prev_round);
            log.records.insert(log.records.end(), round.begin(), round.end());
            prev_round = std::move(round);
        }

        RunResult result;
        result.trajectory = trajectory_from_log(log);
        result.log = std::move(log);
        result.warnings = warnings_;
        return result;
    }

    /// Advance one round given the previous round's records (indexed by
    /// agent id). Exposed-ever and reached sets update at the end, after all
    /// agents acted on the previous state.
    std::vector<RoundRecord> step_round(int t, const std::vector<RoundRecord>& prev_round) {
        const size_t n = community_.size();
        std::vector<RoundRecord> round(n);
        std::vector<std::string> new_histories(n);
        std::mutex warn_mutex;

        // reached-set update for source warnings: direct exposure this round,
        // or a peer post authored by an agent exposed in an earlier round
        std::vector<char> reached_now = reached_;
        if (arm_.kind == ArmKind::source_warning) {
            for (size_t i = 0; i < n; ++i) {
                if (schedule_exposed(static_cast<int>(i), t)) reached_now[i] = 1;
                if (reached_now[i]) continue;
                for (int j : graph_.neighbors(static_cast<int>(i))) {
                    const RoundRecord& r = prev_round[static_cast<size_t>(j)];
                    if (r.decision == Decision::post_only && exposed_ever_[static_cast<size_t>(j)]) {
                        reached_now[i] = 1;
                        break;
                    }
                }
            }
        }

        detail::for_each_agent(n, backend_.concurrency(), [&](size_t i) {
            const int agent_id = static_cast<int>(i);
            const PersonaSpec& persona = community_.agents[i];
            detail::AgentState& st = states_[i];

            RoundRecord rec;
            rec.agent_id = agent_id;
            rec.t = t;

            std::optional<ExposurePayload> exposure;
            if (schedule_exposed(agent_id, t)) {
                exposure = ExposurePayload{claim_.content, kSpreaderId};
                rec.exposed = true;
            }
            std::vector<PeerMessage> peers = peer_context(prev_round, graph_, agent_id);

            InterventionSignal signal =
                make_signal(agent_id, t, exposure.has_value(), reached_now[i] != 0, st);
            rec.intervention = signal;

            // new messages as the agent sees them this round
            std::vector<std::string> new_messages;
            if (exposure)
                new_messages.push_back(std::to_string(exposure->source_id) + ": " + exposure->content);
            for (const auto& m : peers)
                new_messages.push_back(std::to_string(m.source_id) + ": " + m.text);

            SummaryPair summaries;
            try {
                summaries = backend_.summarize(st.history_summary, new_messages);
            } catch (const BackendError& e) {
                summaries.updated_history = st.history_summary;
                summaries.round_only.clear();
                std::lock_guard<std::mutex> lock(warn_mutex);
                warnings_.push_back("summarize failed for agent " + std::to_string(agent_id) +
                                    " at round " + std::to_string(t) + ": " + e.what());
            }

            RespondContext ctx;
            ctx.persona = &persona;
            ctx.claim = &claim_;
            ctx.agent_id = agent_id;
            ctx.round = t;
            ctx.exposure = exposure;
            ctx.peers = peers;
            ctx.signal = signal;
            ctx.history_summary = st.history_summary;
            ctx.round_summary = summaries.round_only;
            ctx.prev_trust = st.prev_trust;
            ctx.trust_ever_above = st.ever_above;
            ctx.intervention_history = st.intervention_history;
            if (!signal.empty()) {
                if (!ctx.intervention_history.empty()) ctx.intervention_history += "\n";
                ctx.intervention_history += "[round " + std::to_string(t) + "] " + signal.text;
            }

            ResponseTuple reply;
            bool respond_failed = false;
            try {
                reply = backend_.respond(ctx);
                reply.enforce_invariants();
            } catch (const BackendError& e) {
                respond_failed = true;
                reply = ResponseTuple{};
                reply.trust = st.prev_trust;  // carry forward
                std::lock_guard<std::mutex> lock(warn_mutex);
                warnings_.push_back("respond failed for agent " + std::to_string(agent_id) +
                                    " at round " + std::to_string(t) + ": " + e.what());
            }

            rec.trust = reply.trust;
            rec.opinion = reply.opinion;
            rec.emotion = reply.emotion;
            rec.decision = reply.decision;
            rec.message = reply.post_text;
            if (reply.decision == Decision::post_only) {
                if (reply.stance_hint) {
                    rec.stance = reply.stance_hint;
                } else {
                    try {
                        rec.stance = backend_.classify_stance(reply.post_text, claim_);
                    } catch (const BackendError& e) {
                        rec.stance = Stance::comment;
                        std::lock_guard<std::mutex> lock(warn_mutex);
                        warnings_.push_back("stance classification failed for agent " +
                                            std::to_string(agent_id) + " at round " +
                                            std::to_string(t) + ": " + e.what() +
                                            " (recorded as comment)");
                    }
                }
            }
            (void)respond_failed;

            round[i] = std::move(rec);
            new_histories[i] = std::move(summaries.updated_history);
        });

        // barrier: commit per-agent state only after the whole round resolved
        for (size_t i = 0; i < n; ++i) {
            detail::AgentState& st = states_[i];
            const RoundRecord& rec = round[i];
            st.prev_trust = rec.trust;
            if (rec.trust > deny_threshold_) st.ever_above = true;
            st.history_summary = std::move(new_histories[i]);
            st.prev_opinion = rec.opinion;
            st.prev_emotion = rec.emotion;
            if (!rec.intervention.empty()) {
                if (!st.intervention_history.empty()) st.intervention_history += "\n";
                st.intervention_history +=
                    "[round " + std::to_string(t) + "] " + rec.intervention.text;
            }
            if (rec.exposed) exposed_ever_[i] = 1;
        }
        if (arm_.kind == ArmKind::source_warning) reached_ = std::move(reached_now);
        return round;
    }

private:
    std::vector<RoundRecord> baseline_round() const {
        // synthetic round-0 state: all agents silent at the baseline trust
        std::vector<RoundRecord> prev(community_.size());
        for (size_t i = 0; i < prev.size(); ++i) {
            prev[i].agent_id = static_cast<int>(i);
            prev[i].t = 0;
        }
        return prev;
    }

    bool schedule_exposed(int agent_id, int t) const {
        return !schedule_.rounds.empty() && schedule_.exposed(agent_id, t);
    }

    InterventionSignal make_signal(int agent_id, int t, bool exposed, bool reached,
                                   const detail::AgentState& st) {
        if (arm_.kind == ArmKind::none || t < arm_.start_round)
            return InterventionSignal::none(agent_id, t);
        switch (arm_.kind) {
            case ArmKind::accuracy_prompt:
                return accuracy_prompt_signal(claim_, agent_id, t, exposed);
            case ArmKind::persuasion: {
                InterventionSignal s = InterventionSignal::none(agent_id, t);
                if (exposed) {
                    s.kind = SignalKind::persuasion;
                    s.text = persuasion_text_;
                }
                return s;
            }
            case ArmKind::fact_check: {
                FactCheckContext ctx;
                ctx.persona = &community_.agents[static_cast<size_t>(agent_id)];
                ctx.claim = &claim_;
                ctx.history_summary = st.history_summary;
                ctx.opinion = st.prev_opinion;
                ctx.emotion = st.prev_emotion;
                ctx.prev_trust = st.prev_trust;
                bool failed = false;
                InterventionSignal s = fact_check_signal(claim_, agent_id, t, ctx, backend_, &failed);
                if (failed)
                    warnings_.push_back("fact-check decision failed for agent " +
                                        std::to_string(agent_id) + " at round " + std::to_string(t) +
                                        " (treated as declined)");
                return s;
            }
            case ArmKind::source_warning:
                return source_warning_signal(claim_, agent_id, t, reached);
            case ArmKind::none: break;
        }
        return InterventionSignal::none(agent_id, t);
    }

    const Community& community_;
    const SocialGraph& graph_;
    const Claim& claim_;
    const ExposureSchedule& schedule_;
    InterventionArm arm_;
    AgentBackend& backend_;
    double deny_threshold_;

    std::vector<detail::AgentState> states_;
    std::vector<char> exposed_ever_;
    std::vector<char> reached_;
    std::string persuasion_text_;
    bool persuasion_evidence_free_ = false;
    std::vector<std::string> warnings_;
};

/// Convenience wrapper: build the schedule, run all rounds, return log and
/// trajectory. rho = 0 is the no-stimulus variant (no agent is ever exposed).
inline RunResult run_simulation(const Community& community, const SocialGraph& graph,
                                const Claim& claim, int t_rounds, double rho,
                                InterventionArm arm, AgentBackend& backend, std::uint64_t seed,
                                const std::string& config_hash = {}) {
    ExposureSchedule schedule;
    schedule.n = community.size();
    if (rho > 0.0) {
        Rng rng = derive_rng(seed, {"exposure", community.id});
        schedule = schedule_exposure(community.size(), rho, t_rounds, rng);
    }
    SimulationRun sim(community, graph, claim, schedule, arm, backend);
    RunMeta meta;
    meta.seed = seed;
    meta.rho = rho;
    meta.config_hash = config_hash;
    return sim.run(t_rounds, meta);
}

// ---------------------------------------------------------------------------
// JSONL log serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json record_to_json(const RoundRecord& r) {
    nlohmann::ordered_json j;
    j["agent_id"] = r.agent_id;
    j["t"] = r.t;
    j["exposed"] = r.exposed;
    j["trust"] = r.trust;
    j["opinion"] = r.opinion;
    j["emotion"] = emotion_name(r.emotion);
    j["decision"] = decision_name(r.decision);
    j["message"] = r.message;
    if (r.stance) j["stance"] = stance_name(*r.stance);
    if (!r.intervention.empty())
        j["intervention"] = {{"kind", signal_kind_name(r.intervention.kind)},
                             {"text", r.intervention.text}};
    return j;
}

inline RoundRecord record_from_json(const nlohmann::ordered_json& j) {
    RoundRecord r;
    r.agent_id = j.at("agent_id").get<int>();
    r.t = j.at("t").get<int>();
    r.exposed = j.at("exposed").get<bool>();
    r.trust = j.at("trust").get<double>();
    r.opinion = j.at("opinion").get<std::string>();
    const auto emotion = emotion_from_name(j.at("emotion").get<std::string>());
    if (!emotion) throw ConfigError("run log: unknown emotion label");
    r.emotion = *emotion;
    r.decision = j.at("decision").get<std::string>() == "post_only" ? Decision::post_only
                                                                    : Decision::none;
    r.message = j.at("message").get<std::string>();
    if (j.contains("stance")) {
        const auto stance = stance_from_name(j.at("stance").get<std::string>());
        if (!stance) throw ConfigError("run log: unknown stance label");
        r.stance = stance;
    }
    if (j.contains("intervention")) {
        r.intervention.kind = signal_kind_from_name(j.at("intervention").at("kind").get<std::string>());
        r.intervention.text = j.at("intervention").at("text").get<std::string>();
        r.intervention.target = r.agent_id;
        r.intervention.round = r.t;
    }
    return r;
}

inline std::string log_to_jsonl(const RunLog& log) {
    nlohmann::ordered_json meta;
    meta["type"] = "run_meta";
    meta["version"] = kVersion;
    meta["community"] = log.meta.community_id;
    meta["claim"] = log.meta.claim_id;
    meta["seed"] = log.meta.seed;
    meta["backend"] = log.meta.backend_id;
    meta["arm"] = log.meta.arm;
    meta["n"] = log.meta.n;
    meta["rounds"] = log.meta.rounds;
    meta["rho"] = log.meta.rho;
    meta["tau_baseline"] = log.meta.tau_baseline;
    meta["config_hash"] = log.meta.config_hash;

    std::ostringstream out;
    out << meta.dump() << '\n';
    for (const auto& r : log.records) out << record_to_json(r).dump() << '\n';
    return out.str();
}

inline RunLog log_from_jsonl(const std::string& text) {
    RunLog log;
    bool have_meta = false;
    for (const std::string& line : split_lines(text)) {
        if (line.empty()) continue;
        nlohmann::ordered_json j = nlohmann::ordered_json::parse(line);
        if (!have_meta) {
            if (j.value("type", std::string()) != "run_meta")
                throw ConfigError("run log: first line must be the run_meta header");
            log.meta.community_id = j.at("community").get<std::string>();
            log.meta.claim_id = j.at("claim").get<std::string>();
            log.meta.seed = j.at("seed").get<std::uint64_t>();
            log.meta.backend_id = j.at("backend").get<std::string>();
            log.meta.arm = j.at("arm").get<std::string>();
            log.meta.n = j.at("n").get<size_t>();
            log.meta.rounds = j.at("rounds").get<int>();
            log.meta.rho = j.at("rho").get<double>();
            log.meta.tau_baseline = j.at("tau_baseline").get<double>();
            log.meta.config_hash = j.value("config_hash", std::string());
            have_meta = true;
            continue;
        }
        log.records.push_back(record_from_json(j));
    }
    if (!have_meta) throw ConfigError("run log: empty file");
    return log;
}

inline void save_log(const std::filesystem::path& path, const RunLog& log) {
    write_text_file(path, log_to_jsonl(log));
}

inline RunLog load_log(const std::filesystem::path& path) {
    return log_from_jsonl(read_text_file(path));
}

}  // namespace cosim
