#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cosim/claims.hpp"
#include "cosim/persona.hpp"
#include "cosim/signal.hpp"

namespace cosim {

// ---------------------------------------------------------------------------
// Stance and response vocabulary
// ---------------------------------------------------------------------------

/// Behavioral stance of a public post toward the claim, following rumour
/// stance-detection conventions.
enum class Stance { support, deny, query, comment };

inline const char* stance_name(Stance s) {
    switch (s) {
        case Stance::support: return "support";
        case Stance::deny: return "deny";
        case Stance::query: return "query";
        case Stance::comment: return "comment";
    }
    return "comment";
}

inline std::optional<Stance> stance_from_name(const std::string& name) {
    if (name == "support") return Stance::support;
    if (name == "deny") return Stance::deny;
    if (name == "query") return Stance::query;
    if (name == "comment") return Stance::comment;
    return std::nullopt;
}

inline const std::array<Stance, 4>& all_stances() {
    static const std::array<Stance, 4> s = {Stance::support, Stance::deny, Stance::query,
                                            Stance::comment};
    return s;
}

enum class Emotion { joy, anger, fear, sadness, disgust, surprise, none };

inline const char* emotion_name(Emotion e) {
    switch (e) {
        case Emotion::joy: return "joy";
        case Emotion::anger: return "anger";
        case Emotion::fear: return "fear";
        case Emotion::sadness: return "sadness";
        case Emotion::disgust: return "disgust";
        case Emotion::surprise: return "surprise";
        case Emotion::none: return "none";
    }
    return "none";
}

inline std::optional<Emotion> emotion_from_name(const std::string& name) {
    for (Emotion e : {Emotion::joy, Emotion::anger, Emotion::fear, Emotion::sadness,
                      Emotion::disgust, Emotion::surprise, Emotion::none})
        if (name == emotion_name(e)) return e;
    return std::nullopt;
}

enum class Decision { post_only, none };

inline const char* decision_name(Decision d) { return d == Decision::post_only ? "post_only" : "none"; }

/// One agent-round response. `stance_hint` is filled only by deterministic
/// backends that derive the stance alongside the post, letting the engine
/// skip the annotation call.
struct ResponseTuple {
    double trust = 0.0;
    std::string opinion;
    Emotion emotion = Emotion::none;
    std::string emotion_reason;
    Decision decision = Decision::none;
    std::string post_text;
    std::optional<Stance> stance_hint;

    void enforce_invariants() {
        trust = clamp01(trust);
        if (decision == Decision::none) {
            post_text.clear();
            stance_hint.reset();
        }
    }
};

/// A neighbor's previous-round public message. The stance label and the
/// poster's trust at posting time travel with the message for deterministic
/// backends; remote backends only ever see the "source_id: text" rendering.
struct PeerMessage {
    int source_id = 0;
    std::string text;
    Stance stance = Stance::comment;
    double poster_trust = 0.0;
};

// ---------------------------------------------------------------------------
// Backend call contexts
// ---------------------------------------------------------------------------

/// Everything an agent observes in one round, plus the slice of engine state
/// a deterministic backend needs (previous trust and whether trust ever
/// exceeded the denial threshold).
struct RespondContext {
    const PersonaSpec* persona = nullptr;
    const Claim* claim = nullptr;
    int agent_id = 0;
    int round = 0;
    std::optional<ExposurePayload> exposure;
    std::vector<PeerMessage> peers;
    InterventionSignal signal;
    std::string history_summary;
    std::string round_summary;
    std::string intervention_history;
    double prev_trust = 0.0;
    bool trust_ever_above = false;
};

struct SummaryPair {
    std::string updated_history;
    std::string round_only;
};

struct FactCheckContext {
    const PersonaSpec* persona = nullptr;
    const Claim* claim = nullptr;
    std::string history_summary;
    std::string opinion;
    Emotion emotion = Emotion::none;
    double prev_trust = 0.0;
};

struct FactCheckDecision {
    bool requested = false;
    std::string reason;
};

struct TemplateRevisionContext {
    double target_aot = 0.5;
    double target_pi = 0.5;
    double observed_aot = 0.5;
    double observed_pi = 0.5;
    std::string current_template;
};

struct CredibilityResult {
    double score = 0.0;  // clamped to [0,10]
    std::string reason;
    bool out_of_range = false;
};

/// One diagnostic questionnaire item. Options A..E are ordered by ascending
/// target trait level.
struct DiagnosticItem {
    std::string scenario_text;
    std::string question_text;
    TraitKind target_trait = TraitKind::AOT;
    std::array<std::string, 5> options;
};

// ---------------------------------------------------------------------------
// Backend interface
// ---------------------------------------------------------------------------

/// The pluggable agent model. Every operation either returns a well-formed
/// result or throws BackendError after exhausting its retry budget; there
/// are no partial results. `respond` is the only operation that produces
/// trust values.
class AgentBackend {
public:
    virtual ~AgentBackend() = default;

    virtual std::string name() const = 0;

    /// Maximum number of in-flight calls the engine may issue concurrently.
    virtual size_t concurrency() const { return 1; }

    /// Cheap reachability check run before a sweep starts; throws
    /// BackendError when the backend cannot serve calls at all.
    virtual void preflight() {}

    virtual ResponseTuple respond(const RespondContext& ctx) = 0;

    virtual SummaryPair summarize(const std::string& history_summary,
                                  const std::vector<std::string>& new_messages) = 0;

    virtual Stance classify_stance(const std::string& message, const Claim& claim) = 0;

    virtual FactCheckDecision decide_fact_check(const FactCheckContext& ctx) = 0;

    virtual std::string revise_template(const TemplateRevisionContext& ctx) = 0;

    virtual CredibilityResult score_claim(const Claim& claim) = 0;

    /// Corrective persuasive message for the persuasion intervention.
    /// Evidence-grounded variants must stay within the claim's gold evidence.
    virtual std::string generate_persuasion(const Claim& claim, bool evidence_grounded) = 0;

    /// Answer one diagnostic item as the given persona; returns a letter in
    /// A..E. `item_index` is the item's position in the questionnaire and is
    /// carried in error reports.
    virtual char answer_diagnostic(const PersonaSpec& persona, const DiagnosticItem& item,
                                   size_t item_index) = 0;
};

}  // namespace cosim
