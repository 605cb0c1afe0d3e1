#pragma once

#include <optional>
#include <string>

#include "cosim/backend.hpp"
#include "cosim/signal.hpp"

namespace cosim {

/// The four intervention arms plus the control condition.
enum class ArmKind { none, accuracy_prompt, persuasion, fact_check, source_warning };

inline const char* arm_name(ArmKind k) {
    switch (k) {
        case ArmKind::none: return "control";
        case ArmKind::accuracy_prompt: return "accuracy_prompt";
        case ArmKind::persuasion: return "persuasion";
        case ArmKind::fact_check: return "fact_check";
        case ArmKind::source_warning: return "source_warning";
    }
    return "control";
}

inline ArmKind arm_from_name(const std::string& name) {
    if (name == "control" || name == "none") return ArmKind::none;
    if (name == "accuracy_prompt") return ArmKind::accuracy_prompt;
    if (name == "persuasion") return ArmKind::persuasion;
    if (name == "fact_check") return ArmKind::fact_check;
    if (name == "source_warning") return ArmKind::source_warning;
    throw ConfigError("unknown intervention arm: " + name);
}

/// Arm configuration. The arm is active from start_round through the final
/// round; signals are never produced before start_round.
struct InterventionArm {
    ArmKind kind = ArmKind::none;
    int start_round = 1;

    /// Arm-level preconditions checked once per run, before any round.
    void validate_against(const Claim& claim) const {
        if (kind == ArmKind::source_warning && claim.source.empty())
            throw ConfigError("source_warning arm: claim '" + claim.id +
                              "' carries no source identity");
        if (kind == ArmKind::fact_check && claim.gold_evidence.empty())
            throw ConfigError("fact_check arm: claim '" + claim.id + "' carries no gold evidence");
    }
};

inline constexpr const char* kAccuracyCue =
    "Caution: this claim may be false. Consider its accuracy before reacting.";

/// Warning cue attached to the exposure payload of directly exposed agents.
inline InterventionSignal accuracy_prompt_signal(const Claim&, int agent_id, int t, bool exposed) {
    InterventionSignal s = InterventionSignal::none(agent_id, t);
    if (!exposed) return s;
    s.kind = SignalKind::accuracy_prompt;
    s.text = kAccuracyCue;
    return s;
}

/// Corrective persuasive message for directly exposed agents. The message is
/// evidence-grounded when the claim carries gold evidence; otherwise it falls
/// back to the evidence-free form (the caller logs the fallback).
inline InterventionSignal persuasion_signal(const Claim& claim, int agent_id, int t, bool exposed,
                                            AgentBackend& backend,
                                            bool* used_evidence_free = nullptr) {
    InterventionSignal s = InterventionSignal::none(agent_id, t);
    if (used_evidence_free) *used_evidence_free = false;
    if (!exposed) return s;
    const bool grounded = !claim.gold_evidence.empty();
    if (!grounded && used_evidence_free) *used_evidence_free = true;
    s.kind = SignalKind::persuasion;
    s.text = backend.generate_persuasion(claim, grounded);
    return s;
}

inline std::string fact_check_offer_text(const Claim&) {
    return "A fact-checking service is available for this claim. You may request a summary "
           "of verification evidence.";
}

inline std::string fact_check_evidence_text(const Claim& claim) {
    return "Fact-check result: " + claim.gold_evidence;
}

/// Two-phase fact check: announce availability, let the agent decide, and
/// deliver evidence only on an affirmative request. A decision that cannot
/// be obtained counts as a declination.
inline InterventionSignal fact_check_signal(const Claim& claim, int agent_id, int t,
                                            const FactCheckContext& ctx, AgentBackend& backend,
                                            bool* decision_failed = nullptr) {
    InterventionSignal s = InterventionSignal::none(agent_id, t);
    s.kind = SignalKind::fact_check_offer;
    s.text = fact_check_offer_text(claim);
    if (decision_failed) *decision_failed = false;
    bool wants = false;
    try {
        wants = backend.decide_fact_check(ctx).requested;
    } catch (const BackendError&) {
        if (decision_failed) *decision_failed = true;
    }
    if (wants) {
        s.kind = SignalKind::fact_check_evidence;
        s.text = fact_check_evidence_text(claim);
    }
    return s;
}

/// Identity revelation for agents the claim has reached, directly or through
/// peer posts.
inline InterventionSignal source_warning_signal(const Claim& claim, int agent_id, int t,
                                                bool received_claim) {
    InterventionSignal s = InterventionSignal::none(agent_id, t);
    if (!received_claim) return s;
    if (claim.source.empty())
        throw ConfigError("source_warning: claim '" + claim.id + "' carries no source identity");
    s.kind = SignalKind::source_warning;
    s.text = "Source warning: the account spreading this claim has been identified as " +
             claim.source + ".";
    return s;
}

}  // namespace cosim
