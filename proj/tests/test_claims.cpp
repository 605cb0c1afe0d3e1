#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cosim/claims.hpp"

using namespace cosim;

#ifndef COSIM_ASSETS_DIR
#define COSIM_ASSETS_DIR "assets"
#endif

namespace {
const std::string kAssets = COSIM_ASSETS_DIR;

Claim mini_claim(const std::string& id, double score) {
    return Claim::make(id, "claim body " + id, "society", 2024, {{"m", score}}, "evidence", "src");
}
}  // namespace

TEST_CASE("desk pool loads with twelve valid claims across six domains") {
    const auto pool = load_pool(kAssets + "/claims_pool.json");
    REQUIRE(pool.size() == 12);
    std::set<std::string> domains;
    for (const auto& c : pool) {
        c.validate();
        domains.insert(c.domain);
        REQUIRE(c.credibility_scores.size() == 4);
    }
    REQUIRE(domains.size() == 6);
    // credibility strata of the desk pool: 4 in (6.0,7.0), 5 in [7.0,8.0], 3 above
    int low = 0, mid = 0, high = 0;
    for (const auto& c : pool) {
        if (c.avg_credibility < 7.0) low++;
        else if (c.avg_credibility <= 8.0) mid++;
        else high++;
    }
    REQUIRE(low == 4);
    REQUIRE(mid == 5);
    REQUIRE(high == 3);
}

TEST_CASE("pool round-trip is byte-identical and preserves unknown fields") {
    const std::string extra = R"([{"id":"X1","content":"c","domain":"life","year":2020,
      "credibility_scores":{"m":7.0},"avg_credibility":7.0,"gold_evidence":"e","source":"s",
      "valence":0.5,"annotator_note":"keep me"}])";
    const auto pool = pool_from_json_text(extra);
    const std::string once = pool_to_json_text(pool);
    const std::string twice = pool_to_json_text(pool_from_json_text(once));
    REQUIRE(once == twice);
    REQUIRE(once.find("annotator_note") != std::string::npos);
    REQUIRE(once.find("keep me") != std::string::npos);
}

TEST_CASE("avg_credibility must match the score mean") {
    const std::string bad = R"([{"id":"X1","content":"c","credibility_scores":{"m":7.0},
      "avg_credibility":6.0}])";
    REQUIRE_THROWS_AS(pool_from_json_text(bad), ConfigError);
}

TEST_CASE("filter_pool keeps strictly-above-threshold claims in order") {
    const std::vector<Claim> pool = {mini_claim("a", 5.9), mini_claim("b", 6.0),
                                     mini_claim("c", 6.1)};
    const auto kept = filter_pool(pool);
    REQUIRE(kept.size() == 1);
    REQUIRE(kept[0].id == "c");
    // idempotent and order-preserving
    const std::vector<Claim> pool2 = {mini_claim("z", 9.0), mini_claim("y", 8.0),
                                      mini_claim("x", 7.0)};
    const auto kept2 = filter_pool(pool2);
    REQUIRE(kept2.size() == 3);
    REQUIRE(kept2[0].id == "z");
    REQUIRE(filter_pool(kept2).size() == 3);
}

TEST_CASE("exposure schedule draws exact-size sets") {
    Rng rng(4);
    const auto sched = schedule_exposure(200, 0.1, 10, rng);
    REQUIRE(sched.rounds.size() == 10);
    for (const auto& e : sched.rounds) {
        REQUIRE(e.size() == 20);
        for (int id : e) {
            REQUIRE(id >= 0);
            REQUIRE(id < 200);
        }
        REQUIRE(std::is_sorted(e.begin(), e.end()));
        REQUIRE(std::adjacent_find(e.begin(), e.end()) == e.end());
    }
}

TEST_CASE("ceiling applies at small n") {
    Rng rng(4);
    const auto sched = schedule_exposure(5, 0.1, 3, rng);
    for (const auto& e : sched.rounds) REQUIRE(e.size() == 1);
}

TEST_CASE("schedule is deterministic under seed and rejects rho <= 0") {
    Rng a(9), b(9);
    REQUIRE(schedule_exposure(50, 0.2, 5, a).rounds == schedule_exposure(50, 0.2, 5, b).rounds);
    Rng c(9);
    REQUIRE_THROWS_AS(schedule_exposure(50, 0.0, 5, c), ConfigError);
    REQUIRE_THROWS_AS(schedule_exposure(50, -0.1, 5, c), ConfigError);
}

TEST_CASE("per-agent inclusion frequency concentrates at rho") {
    // lighter version of the acceptance check: 2000 rounds at n=100
    Rng rng(11);
    const auto sched = schedule_exposure(100, 0.1, 2000, rng);
    std::vector<int> hits(100, 0);
    for (const auto& e : sched.rounds)
        for (int id : e) hits[static_cast<size_t>(id)] += 1;
    const double sigma = std::sqrt(0.1 * 0.9 / 2000.0);
    for (int h : hits) {
        const double freq = h / 2000.0;
        REQUIRE(std::abs(freq - 0.1) < 4.0 * sigma);
    }
}

TEST_CASE("exposure input delivers the claim only to scheduled agents") {
    const Claim claim = mini_claim("r", 8.0);
    Rng rng(2);
    const auto sched = schedule_exposure(10, 0.3, 4, rng);
    for (int t = 1; t <= 4; ++t) {
        for (int agent = 0; agent < 10; ++agent) {
            const auto payload = exposure_input(claim, agent, t, sched);
            if (sched.exposed(agent, t)) {
                REQUIRE(payload.has_value());
                REQUIRE(payload->content == claim.content);
                REQUIRE(payload->source_id == kSpreaderId);
            } else {
                REQUIRE_FALSE(payload.has_value());
            }
        }
    }
    REQUIRE_THROWS_AS(exposure_input(claim, 0, 5, sched), ConfigError);
}

TEST_CASE("rho = 1 exposes every agent every round") {
    const Claim claim = mini_claim("r", 8.0);
    Rng rng(2);
    const auto sched = schedule_exposure(7, 1.0, 2, rng);
    for (int t = 1; t <= 2; ++t)
        for (int agent = 0; agent < 7; ++agent)
            REQUIRE(exposure_input(claim, agent, t, sched).has_value());
}
