#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cosim/backend.hpp"

namespace cosim {

/// How one signal kind couples into the trust update: `uptake_gate` scales
/// any direct-exposure uptake delivered in the same round, `decay_scale`
/// scales the corrective decay of existing trust.
struct SignalCoupling {
    double uptake_gate = 1.0;
    double decay_scale = 0.0;
};

/// Tunable constants of the deterministic agent model. Defaults are the
/// model's reference values; overriding them is a configuration concern,
/// not an intervention (interventions only ever add context signals).
struct ReferenceParams {
    double conformity = 0.3;          // weight of the pull toward peer-implied trust
    double support_threshold = 0.65;  // trust at or above which posts support
    double deny_threshold = 0.30;     // trust at or below which posts deny (after a prior rise)
    double query_aot = 0.5;           // minimum AOT for questioning rather than commenting
    double fact_check_lo = 0.3;       // open fact-check request window on previous trust
    double fact_check_hi = 0.65;

    // corrective decay per signaled round: decay_scale * (base + aot_coef*a) * trust.
    // The base makes corrections land on incurious agents too; the AOT term
    // makes open-minded agents accept them faster.
    double decay_base = 0.3;
    double decay_aot = 0.7;

    // per-arm couplings, ordered by corrective strength: persuasion decays
    // hardest, the availability-only offer and the empty signal do nothing,
    // a source warning acts weakly and only on agents already carrying trust
    SignalCoupling accuracy_coupling{0.5, 0.8};
    SignalCoupling persuasion_coupling{0.6, 2.5};
    SignalCoupling fact_check_evidence_coupling{0.6, 1.5};
    SignalCoupling source_warning_coupling{0.75, 0.4};
};

/// Deterministic trait-driven agent model. It plays the role of an LLM
/// backbone for desk-scale verification: pure, reproducible, and monotone in
/// the directions the simulation is meant to probe (higher AOT resists
/// uptake, ideological alignment amplifies it, corrective signals decay it).
class ReferenceBackend : public AgentBackend {
public:
    explicit ReferenceBackend(ReferenceParams params = {}) : params_(params) {}

    std::string name() const override { return "reference"; }

    const ReferenceParams& params() const { return params_; }

    ResponseTuple respond(const RespondContext& ctx) override {
        const PersonaSpec& agent = *ctx.persona;
        const double prev = ctx.prev_trust;
        const SignalCoupling coupling = signal_coupling(ctx.signal.kind, prev);

        double trust = prev;
        if (ctx.exposure) {
            const double alignment = 1.0 - std::abs(agent.pi - ctx.claim->valence);
            const double gullibility = (1.0 - agent.aot) * (0.5 + 0.5 * alignment);
            trust += coupling.uptake_gate * gullibility * (ctx.claim->avg_credibility / 10.0) *
                     (1.0 - prev);
        }
        if (!ctx.peers.empty()) {
            double implied = 0.0;
            for (const PeerMessage& m : ctx.peers) implied += implied_trust(m);
            implied /= static_cast<double>(ctx.peers.size());
            trust += params_.conformity * (implied - prev);
        }
        trust -= coupling.decay_scale * (params_.decay_base + params_.decay_aot * agent.aot) * prev;
        trust = clamp01(trust);

        ResponseTuple out;
        out.trust = trust;
        const bool posts = ctx.exposure.has_value() || !ctx.peers.empty();
        out.decision = posts ? Decision::post_only : Decision::none;
        if (posts) {
            const Stance stance = stance_for(trust, agent.aot, ctx.trust_ever_above);
            out.stance_hint = stance;
            out.post_text = post_text_for(stance);
            out.emotion = emotion_for(stance);
        }
        out.opinion = "current trust in the claim is about " + format_double(trust, 2);
        out.enforce_invariants();
        return out;
    }

    SummaryPair summarize(const std::string& history_summary,
                          const std::vector<std::string>& new_messages) override {
        SummaryPair out;
        std::string round;
        for (const auto& m : new_messages) {
            if (!round.empty()) round += " | ";
            round += m;
        }
        out.round_only = tail(round, 800);
        if (history_summary.empty()) out.updated_history = tail(round, 2000);
        else if (round.empty()) out.updated_history = tail(history_summary, 2000);
        else out.updated_history = tail(history_summary + " | " + round, 2000);
        return out;
    }

    Stance classify_stance(const std::string& message, const Claim&) override {
        if (message.empty()) return Stance::comment;
        for (const char* kw : {"false", "fake", "debunk", "refut", "not true", "misinformation"})
            if (contains_ci(message, kw)) return Stance::deny;
        if (message.find('?') != std::string::npos) return Stance::query;
        for (const char* kw : {"source", "verify", "is this real", "proof"})
            if (contains_ci(message, kw)) return Stance::query;
        for (const char* kw : {"true", "believe", "pay attention", "share this", "spread the word"})
            if (contains_ci(message, kw)) return Stance::support;
        return Stance::comment;
    }

    FactCheckDecision decide_fact_check(const FactCheckContext& ctx) override {
        FactCheckDecision d;
        d.requested = ctx.persona->aot >= params_.query_aot && ctx.prev_trust > params_.fact_check_lo &&
                      ctx.prev_trust < params_.fact_check_hi;
        d.reason = d.requested ? "uncertain about the claim and inclined to verify"
                               : "no verification demand at the current trust level";
        return d;
    }

    std::string revise_template(const TemplateRevisionContext& ctx) override {
        return ctx.current_template;  // identity optimizer
    }

    std::string generate_persuasion(const Claim& claim, bool evidence_grounded) override {
        if (evidence_grounded) {
            return "Verification notice: the claim \"" + claim.content +
                   "\" is false. " + claim.gold_evidence +
                   " Please stop sharing it; continued spreading risks real harm.";
        }
        return "Verification notice: the claim \"" + claim.content +
               "\" is disputed and likely misleading. Please reconsider before sharing it "
               "further.";
    }

    CredibilityResult score_claim(const Claim& claim) override {
        // content-hash rubric: stable pseudo-assessment with 2-decimal scores
        const double frac =
            static_cast<double>(fnv1a64(claim.content) % 1000000ull) / 1000000.0;
        CredibilityResult r;
        r.score = std::round(frac * 1000.0) / 100.0;
        r.reason = "content-hash rubric score";
        return r;
    }

    char answer_diagnostic(const PersonaSpec& persona, const DiagnosticItem& item,
                           size_t) override {
        const double value = item.target_trait == TraitKind::AOT ? persona.aot : persona.pi;
        return static_cast<char>('A' + trait_band_index(value));
    }

private:
    static std::string tail(const std::string& s, size_t max_chars) {
        if (s.size() <= max_chars) return s;
        return s.substr(s.size() - max_chars);
    }

    /// Trust a peer message implies: support=1, deny=0, query=0.5, and a
    /// comment reveals the poster's own trust at posting time.
    static double implied_trust(const PeerMessage& m) {
        switch (m.stance) {
            case Stance::support: return 1.0;
            case Stance::deny: return 0.0;
            case Stance::query: return 0.5;
            case Stance::comment: return m.poster_trust;
        }
        return m.poster_trust;
    }

    SignalCoupling signal_coupling(SignalKind kind, double prev_trust) const {
        switch (kind) {
            case SignalKind::accuracy_prompt: return params_.accuracy_coupling;
            case SignalKind::persuasion: return params_.persuasion_coupling;
            case SignalKind::fact_check_evidence: return params_.fact_check_evidence_coupling;
            case SignalKind::source_warning:
                // a revealed source only moves agents that already carry trust
                return prev_trust > 0.0 ? params_.source_warning_coupling : SignalCoupling{};
            case SignalKind::fact_check_offer:
            case SignalKind::empty: return SignalCoupling{};
        }
        return SignalCoupling{};
    }

    Stance stance_for(double trust, double aot, bool ever_above) const {
        if (trust >= params_.support_threshold) return Stance::support;
        if (trust <= params_.deny_threshold && ever_above) return Stance::deny;
        return aot >= params_.query_aot ? Stance::query : Stance::comment;
    }

    static const char* post_text_for(Stance s) {
        switch (s) {
            case Stance::support: return "This matches what I have been hearing, people should pay attention.";
            case Stance::deny: return "This claim is false, the verification checks already debunked it.";
            case Stance::query: return "Does anyone have a reliable source for this claim?";
            case Stance::comment: return "People keep talking about this story today.";
        }
        return "";
    }

    static Emotion emotion_for(Stance s) {
        switch (s) {
            case Stance::support: return Emotion::surprise;
            case Stance::deny: return Emotion::anger;
            case Stance::query: return Emotion::fear;
            case Stance::comment: return Emotion::none;
        }
        return Emotion::none;
    }

    ReferenceParams params_;
};

}  // namespace cosim
