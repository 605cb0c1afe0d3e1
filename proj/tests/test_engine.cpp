#include <catch2/catch_amalgamated.hpp>

#include <mutex>
#include <set>

#include "cosim/engine.hpp"
#include "cosim/metrics.hpp"
#include "cosim/reference_backend.hpp"

using namespace cosim;

namespace {

Claim test_claim(double credibility = 8.7, double valence = 0.5) {
    return Claim::make("C07", "the dam has cracked", "disaster", 2024, {{"m", credibility}},
                       "inspection bulletin refutes it", "account X", valence);
}

Community small_community(const std::string& id, const char* aot, const char* pi, size_t n,
                          std::uint64_t seed) {
    return build_community(id, profile_by_name(aot), profile_by_name(pi), n,
                           default_background_pool(), default_persona_template(), seed);
}

/// Delegating wrapper that records what each respond call observed.
class RecordingBackend : public AgentBackend {
public:
    explicit RecordingBackend(AgentBackend& inner) : inner_(inner) {}
    struct Observation {
        int agent_id;
        int round;
        std::vector<PeerMessage> peers;
    };
    std::vector<Observation> observations;

    std::string name() const override { return inner_.name(); }
    ResponseTuple respond(const RespondContext& ctx) override {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            observations.push_back({ctx.agent_id, ctx.round, ctx.peers});
        }
        return inner_.respond(ctx);
    }
    SummaryPair summarize(const std::string& h, const std::vector<std::string>& m) override {
        return inner_.summarize(h, m);
    }
    Stance classify_stance(const std::string& m, const Claim& c) override {
        return inner_.classify_stance(m, c);
    }
    FactCheckDecision decide_fact_check(const FactCheckContext& ctx) override {
        return inner_.decide_fact_check(ctx);
    }
    std::string revise_template(const TemplateRevisionContext& ctx) override {
        return inner_.revise_template(ctx);
    }
    CredibilityResult score_claim(const Claim& c) override { return inner_.score_claim(c); }
    std::string generate_persuasion(const Claim& c, bool g) override {
        return inner_.generate_persuasion(c, g);
    }
    char answer_diagnostic(const PersonaSpec& p, const DiagnosticItem& i, size_t k) override {
        return inner_.answer_diagnostic(p, i, k);
    }

private:
    AgentBackend& inner_;
    std::mutex mutex_;
};

/// Backend that fails respond() for one agent id.
class FlakyBackend : public ReferenceBackend {
public:
    explicit FlakyBackend(int broken_agent) : broken_(broken_agent) {}
    ResponseTuple respond(const RespondContext& ctx) override {
        if (ctx.agent_id == broken_)
            throw BackendError("synthetic failure");
        return ReferenceBackend::respond(ctx);
    }

private:
    int broken_;
};

}  // namespace

TEST_CASE("peer_context returns only previous-round posters among neighbors") {
    const SocialGraph g = watts_strogatz(10, 4, 0.0, 1);
    std::vector<RoundRecord> prev(10);
    for (int i = 0; i < 10; ++i) {
        prev[static_cast<size_t>(i)].agent_id = i;
        prev[static_cast<size_t>(i)].t = 1;
    }
    prev[1].decision = Decision::post_only;
    prev[1].message = "claim looks fake";
    prev[1].stance = Stance::deny;
    prev[1].trust = 0.2;
    prev[5].decision = Decision::post_only;  // not a neighbor of 0 on the ring
    prev[5].message = "unrelated";
    prev[5].stance = Stance::comment;

    const auto peers = peer_context(prev, g, 0);
    REQUIRE(peers.size() == 1);
    REQUIRE(peers[0].source_id == 1);
    REQUIRE(peers[0].text == "claim looks fake");
    REQUIRE(peers[0].stance == Stance::deny);
    REQUIRE(peers[0].poster_trust == 0.2);

    // exhaustive: a non-neighbor post never appears in anyone's context
    for (int i = 0; i < 10; ++i) {
        const auto ctx = peer_context(prev, g, i);
        const auto& neigh = g.neighbors(i);
        for (const auto& m : ctx)
            REQUIRE(std::binary_search(neigh.begin(), neigh.end(), m.source_id));
    }

    // nobody posted: empty context
    std::vector<RoundRecord> silent(10);
    for (int i = 0; i < 10; ++i) silent[static_cast<size_t>(i)].agent_id = i;
    REQUIRE(peer_context(silent, g, 0).empty());
}

TEST_CASE("single exposed agent gains trust at round 1") {
    ReferenceBackend be;
    const Claim claim = test_claim();
    const Community c = small_community("solo", "aot_center", "pi_center", 1, 3);
    const SocialGraph g(1, {});
    const auto res = run_simulation(c, g, claim, 3, 1.0, {}, be, 3);
    REQUIRE(res.trajectory.values[0] == 0.0);
    REQUIRE(res.trajectory.values[1] > 0.0);
}

TEST_CASE("rho = 0 leaves the trajectory at the baseline") {
    ReferenceBackend be;
    const Claim claim = test_claim();
    const Community c = small_community("quiet", "aot_center", "pi_center", 20, 5);
    const SocialGraph g = watts_strogatz(20, 4, 0.1, 5);
    const auto res = run_simulation(c, g, claim, 10, 0.0, {}, be, 5);
    for (double v : res.trajectory.values) REQUIRE(v == 0.0);
    for (const auto& r : res.log.records) {
        REQUIRE(r.decision == Decision::none);
        REQUIRE_FALSE(r.stance.has_value());
    }
}

TEST_CASE("two runs with the same seed produce byte-identical logs") {
    ReferenceBackend be;
    const Claim claim = test_claim();
    const Community c = small_community("G06", "aot_center", "pi_center", 40, 11);
    const SocialGraph g = watts_strogatz(40, 6, 0.1, 11);
    const auto a = run_simulation(c, g, claim, 10, 0.1, {}, be, 11);
    const auto b = run_simulation(c, g, claim, 10, 0.1, {}, be, 11);
    REQUIRE(log_to_jsonl(a.log) == log_to_jsonl(b.log));
}

TEST_CASE("every agent emits exactly one record per round, in order") {
    ReferenceBackend be;
    const Claim claim = test_claim();
    const Community c = small_community("G01", "aot_low", "pi_liberal", 15, 2);
    const SocialGraph g = watts_strogatz(15, 4, 0.1, 2);
    const auto res = run_simulation(c, g, claim, 6, 0.2, {}, be, 2);
    REQUIRE(res.log.records.size() == 15 * 6);
    size_t idx = 0;
    for (int t = 1; t <= 6; ++t) {
        for (int agent = 0; agent < 15; ++agent) {
            REQUIRE(res.log.records[idx].t == t);
            REQUIRE(res.log.records[idx].agent_id == agent);
            ++idx;
        }
    }
}

TEST_CASE("round synchrony: respond never sees same-round messages") {
    ReferenceBackend inner;
    RecordingBackend spy(inner);
    const Claim claim = test_claim();
    const Community c = small_community("sync", "aot_center", "pi_center", 12, 8);
    const SocialGraph g = watts_strogatz(12, 4, 0.2, 8);

    ExposureSchedule sched;
    Rng rng = derive_rng(8, {"exposure", "sync"});
    sched = schedule_exposure(12, 0.25, 5, rng);
    SimulationRun sim(c, g, claim, sched, {}, spy);
    RunMeta meta;
    meta.seed = 8;
    const auto res = sim.run(5, meta);

    // reconstruct who posted at each round from the log, then check each
    // observation only contains posters from the immediately preceding round
    std::map<int, std::set<int>> posters;  // round -> poster ids
    for (const auto& r : res.log.records)
        if (r.decision == Decision::post_only) posters[r.t].insert(r.agent_id);
    for (const auto& obs : spy.observations) {
        for (const auto& m : obs.peers) {
            REQUIRE(posters[obs.round - 1].count(m.source_id) == 1);
        }
    }
}

TEST_CASE("stance present iff the agent posted") {
    ReferenceBackend be;
    const Claim claim = test_claim();
    const Community c = small_community("G05", "aot_center", "pi_liberal", 30, 4);
    const SocialGraph g = watts_strogatz(30, 6, 0.1, 4);
    const auto res = run_simulation(c, g, claim, 8, 0.1, {}, be, 4);
    for (const auto& r : res.log.records) {
        REQUIRE(r.stance.has_value() == (r.decision == Decision::post_only));
        if (r.decision == Decision::none) REQUIRE(r.message.empty());
        REQUIRE(r.trust >= 0.0);
        REQUIRE(r.trust <= 1.0);
    }
}

TEST_CASE("a failing agent falls back to decision=none with trust carried forward") {
    FlakyBackend be(3);
    const Claim claim = test_claim();
    const Community c = small_community("flaky", "aot_center", "pi_center", 10, 6);
    const SocialGraph g = watts_strogatz(10, 4, 0.1, 6);
    const auto res = run_simulation(c, g, claim, 5, 0.5, {}, be, 6);
    REQUIRE_FALSE(res.warnings.empty());
    for (int t = 1; t <= 5; ++t) {
        const RoundRecord& r = res.log.at(t, 3);
        REQUIRE(r.decision == Decision::none);
        REQUIRE(r.trust == 0.0);  // carried forward from the zero baseline
    }
    // the rest of the community still runs
    bool someone_posted = false;
    for (const auto& r : res.log.records)
        if (r.decision == Decision::post_only) someone_posted = true;
    REQUIRE(someone_posted);
}

TEST_CASE("log JSONL round-trip is byte-identical") {
    ReferenceBackend be;
    const Claim claim = test_claim();
    const Community c = small_community("G10", "aot_high", "pi_center", 25, 9);
    const SocialGraph g = watts_strogatz(25, 4, 0.1, 9);
    InterventionArm arm;
    arm.kind = ArmKind::accuracy_prompt;
    const auto res = run_simulation(c, g, claim, 6, 0.2, arm, be, 9);
    const std::string once = log_to_jsonl(res.log);
    const RunLog parsed = log_from_jsonl(once);
    REQUIRE(log_to_jsonl(parsed) == once);
    REQUIRE(parsed.meta.community_id == "G10");
    REQUIRE(parsed.meta.arm == "accuracy_prompt");
}

TEST_CASE("trajectory values stay in [0,1] across profiles and seeds") {
    ReferenceBackend be;
    const Claim claim = test_claim();
    for (const char* aot : {"aot_low", "aot_polarized"}) {
        for (const char* pi : {"pi_center", "pi_polarized"}) {
            for (std::uint64_t seed : {1ull, 2ull}) {
                const Community c = small_community("sweep", aot, pi, 30, seed);
                const SocialGraph g = watts_strogatz(30, 6, 0.1, seed);
                const auto res = run_simulation(c, g, claim, 10, 0.1, {}, be, seed);
                for (double v : res.trajectory.values) {
                    REQUIRE(v >= 0.0);
                    REQUIRE(v <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("memory summaries accumulate chronologically") {
    ReferenceBackend inner;
    const Claim claim = test_claim();
    const Community c = small_community("mem", "aot_center", "pi_center", 5, 13);
    const SocialGraph g = watts_strogatz(5, 2, 0.0, 13);
    ExposureSchedule sched;
    Rng rng(13);
    sched = schedule_exposure(5, 1.0, 3, rng);  // everyone exposed every round
    SimulationRun sim(c, g, claim, sched, {}, inner);
    RunMeta meta;
    auto res = sim.run(3, meta);
    // with rho=1 everyone posts every round; records exist for all 3 rounds
    REQUIRE(res.log.records.size() == 15);
    for (const auto& r : res.log.records) REQUIRE(r.decision == Decision::post_only);
}
