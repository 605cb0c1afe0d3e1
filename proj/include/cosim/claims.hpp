#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosim/rng.hpp"
#include "cosim/util.hpp"

namespace cosim {

/// Reserved pseudo-agent id labelling the misinformation spreader as a
/// message source. The spreader is exogenous: it occupies no graph node and
/// receives no replies.
inline constexpr int kSpreaderId = -1;

inline const std::array<std::string, 6>& claim_domains() {
    static const std::array<std::string, 6> domains = {"health", "society",  "life",
                                                       "disaster", "science", "politics"};
    return domains;
}

/// One misinformation record. The parsed fields below are typed views into
/// `raw`; unknown fields in a loaded pool are preserved there and survive
/// round-trips byte-identically.
struct Claim {
    std::string id;
    std::string content;
    std::string domain;
    int year = 0;
    std::map<std::string, double> credibility_scores;  // backend name -> score in [0,10]
    double avg_credibility = 0.0;
    std::string gold_evidence;
    std::string source;
    double valence = 0.5;  // ideological alignment on the PI axis, 0.5 = neutral

    nlohmann::ordered_json raw;

    static Claim make(std::string id, std::string content, std::string domain, int year,
                      std::map<std::string, double> scores, std::string gold_evidence,
                      std::string source, double valence = 0.5) {
        Claim c;
        c.id = std::move(id);
        c.content = std::move(content);
        c.domain = std::move(domain);
        c.year = year;
        c.credibility_scores = std::move(scores);
        c.gold_evidence = std::move(gold_evidence);
        c.source = std::move(source);
        c.valence = valence;
        c.recompute_avg();
        c.sync_raw();
        return c;
    }

    void recompute_avg() {
        if (credibility_scores.empty()) {
            avg_credibility = 0.0;
            return;
        }
        double sum = 0.0;
        for (const auto& [_, s] : credibility_scores) sum += s;
        avg_credibility = sum / static_cast<double>(credibility_scores.size());
    }

    /// Write the typed fields back into `raw`, creating it with the canonical
    /// field order if the claim was built programmatically.
    void sync_raw() {
        if (raw.is_null()) {
            raw = nlohmann::ordered_json{{"id", nullptr},
                                         {"content", nullptr},
                                         {"domain", nullptr},
                                         {"year", nullptr},
                                         {"credibility_scores", nullptr},
                                         {"avg_credibility", nullptr},
                                         {"gold_evidence", nullptr},
                                         {"source", nullptr},
                                         {"valence", nullptr}};
        }
        raw["id"] = id;
        raw["content"] = content;
        raw["domain"] = domain;
        raw["year"] = year;
        raw["credibility_scores"] = credibility_scores;
        raw["avg_credibility"] = avg_credibility;
        raw["gold_evidence"] = gold_evidence;
        raw["source"] = source;
        raw["valence"] = valence;
    }

    void validate() const {
        if (content.empty()) throw ConfigError("claim '" + id + "': empty content");
        if (!in_unit_interval(valence)) throw ConfigError("claim '" + id + "': valence outside [0,1]");
        for (const auto& [backend, s] : credibility_scores)
            if (s < 0.0 || s > 10.0)
                throw ConfigError("claim '" + id + "': credibility score for " + backend +
                                  " outside [0,10]");
        if (!credibility_scores.empty()) {
            double sum = 0.0;
            for (const auto& [_, s] : credibility_scores) sum += s;
            const double mean = sum / static_cast<double>(credibility_scores.size());
            if (std::abs(mean - avg_credibility) > 1e-9)
                throw ConfigError("claim '" + id + "': avg_credibility inconsistent with scores");
        }
    }
};

inline Claim claim_from_json(const nlohmann::ordered_json& j) {
    Claim c;
    c.raw = j;
    c.id = j.at("id").get<std::string>();
    c.content = j.at("content").get<std::string>();
    c.domain = j.value("domain", std::string("society"));
    c.year = j.value("year", 0);
    if (j.contains("credibility_scores"))
        c.credibility_scores = j.at("credibility_scores").get<std::map<std::string, double>>();
    if (j.contains("avg_credibility")) c.avg_credibility = j.at("avg_credibility").get<double>();
    else c.recompute_avg();
    c.gold_evidence = j.value("gold_evidence", std::string());
    c.source = j.value("source", std::string());
    c.valence = j.value("valence", 0.5);
    c.validate();
    return c;
}

inline std::vector<Claim> pool_from_json_text(const std::string& text) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::parse(text);
    if (!doc.is_array()) throw ConfigError("claim pool: top-level JSON array expected");
    std::vector<Claim> pool;
    pool.reserve(doc.size());
    for (const auto& j : doc) pool.push_back(claim_from_json(j));
    return pool;
}

inline std::string pool_to_json_text(const std::vector<Claim>& pool) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& c : pool) doc.push_back(c.raw);
    return doc.dump(2) + "\n";
}

inline std::vector<Claim> load_pool(const std::filesystem::path& path) {
    return pool_from_json_text(read_text_file(path));
}

inline void save_pool(const std::filesystem::path& path, const std::vector<Claim>& pool) {
    write_text_file(path, pool_to_json_text(pool));
}

/// Retain claims whose average credibility strictly exceeds the threshold.
/// Order-preserving and idempotent.
inline std::vector<Claim> filter_pool(const std::vector<Claim>& claims, double threshold = 6.0) {
    std::vector<Claim> retained;
    for (const auto& c : claims) {
        if (c.credibility_scores.empty())
            throw ConfigError("claim '" + c.id + "': no credibility scores to filter on");
        if (c.avg_credibility > threshold) retained.push_back(c);
    }
    return retained;
}

// ---------------------------------------------------------------------------
// Exposure scheduling
// ---------------------------------------------------------------------------

/// Per-round directly-exposed agent sets E_1..E_T, each of exactly
/// ceil(rho*n) ids, each drawn uniformly among all subsets of that size,
/// independent across rounds.
struct ExposureSchedule {
    size_t n = 0;
    std::vector<std::vector<int>> rounds;  // rounds[t-1] = sorted E_t

    bool exposed(int agent_id, int t) const {
        if (t < 1 || static_cast<size_t>(t) > rounds.size()) return false;
        const auto& e = rounds[static_cast<size_t>(t - 1)];
        return std::binary_search(e.begin(), e.end(), agent_id);
    }
};

/// Uniform fixed-size subset per round via partial Fisher-Yates selection.
inline ExposureSchedule schedule_exposure(size_t n, double rho, int t_rounds, Rng& rng) {
    if (rho <= 0.0 || rho > 1.0) throw ConfigError("schedule_exposure: rho must be in (0,1]");
    if (t_rounds < 0) throw ConfigError("schedule_exposure: negative round count");
    const size_t m = static_cast<size_t>(std::ceil(rho * static_cast<double>(n)));
    if (m > n) throw ConfigError("schedule_exposure: exposure set larger than community");

    ExposureSchedule sched;
    sched.n = n;
    sched.rounds.reserve(static_cast<size_t>(t_rounds));
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    for (int t = 0; t < t_rounds; ++t) {
        for (size_t j = 0; j < m; ++j) {
            const size_t pick = j + rng.uniform_below(n - j);
            std::swap(ids[j], ids[pick]);
        }
        std::vector<int> chosen(ids.begin(), ids.begin() + static_cast<long>(m));
        std::sort(chosen.begin(), chosen.end());
        sched.rounds.push_back(std::move(chosen));
    }
    return sched;
}

/// What a directly exposed agent receives: the claim content labelled with
/// the reserved spreader source id.
struct ExposurePayload {
    std::string content;
    int source_id = kSpreaderId;
};

/// The direct-exposure input for one agent-round: the claim if the agent is
/// in E_t, empty otherwise.
inline std::optional<ExposurePayload> exposure_input(const Claim& claim, int agent_id, int t,
                                                     const ExposureSchedule& schedule) {
    if (t < 1 || static_cast<size_t>(t) > schedule.rounds.size())
        throw ConfigError("exposure_input: round outside schedule");
    if (!schedule.exposed(agent_id, t)) return std::nullopt;
    return ExposurePayload{claim.content, kSpreaderId};
}

}  // namespace cosim
