#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosim/interventions.hpp"
#include "cosim/persona.hpp"
#include "cosim/remote_backend.hpp"
#include "cosim/traits.hpp"

namespace cosim {

/// One community slot of a sweep: a standard id (G01..G16) or an explicit
/// profile pair.
struct CommunitySpec {
    std::string id;
    std::string aot_profile;
    std::string pi_profile;
};

/// The 16 standard community types: four AOT rows (low, center, high,
/// polarized) crossed with four PI columns (liberal, center, polarized,
/// conservative), numbered G01..G16 row-major.
inline std::vector<CommunitySpec> standard_communities() {
    const std::vector<std::string> aot = {"aot_low", "aot_center", "aot_high", "aot_polarized"};
    const std::vector<std::string> pi = {"pi_liberal", "pi_center", "pi_polarized",
                                         "pi_conservative"};
    std::vector<CommunitySpec> out;
    int index = 1;
    for (const auto& a : aot) {
        for (const auto& p : pi) {
            CommunitySpec spec;
            char id[16];
            std::snprintf(id, sizeof(id), "G%02d", index++);
            spec.id = id;
            spec.aot_profile = a;
            spec.pi_profile = p;
            out.push_back(std::move(spec));
        }
    }
    return out;
}

inline CommunitySpec standard_community(const std::string& id) {
    for (const auto& spec : standard_communities())
        if (spec.id == id) return spec;
    throw ConfigError("unknown standard community id: " + id);
}

/// Full file-determined run configuration. The only value read from the
/// environment is the remote API credential.
struct RunConfig {
    std::uint64_t master_seed = 42;
    std::vector<int> seeds = {0, 1, 2, 3, 4};
    std::vector<CommunitySpec> communities = {standard_community("G10")};
    size_t n = 200;

    int graph_k = 6;
    double graph_p_rewire = 0.1;

    int rounds = 10;
    double rho = 0.1;

    std::string backend_kind = "reference";  // "reference" | "remote"
    RemoteConfig remote;

    std::string pool_path = "assets/claims_pool.json";
    std::string claim_id;  // empty: first claim retained by the credibility filter

    std::string arm = "control";
    int intervention_start_round = 1;

    std::string template_path = "assets/persona_template.txt";
    std::string backgrounds_path = "assets/backgrounds.json";
    std::string questionnaire_path = "assets/questionnaire.json";
    size_t calibration_agents_per_cell = 20;
    int calibration_iterations = 10;

    std::string output_dir = "out";

    /// Directory the config file lived in; relative asset paths resolve
    /// against it.
    std::filesystem::path base_dir = ".";

    std::filesystem::path resolve(const std::string& path) const {
        std::filesystem::path p(path);
        return p.is_absolute() ? p : base_dir / p;
    }

    void validate() const {
        if (seeds.empty()) throw ConfigError("config: seeds list is empty");
        if (communities.empty()) throw ConfigError("config: no communities");
        if (n == 0) throw ConfigError("config: n must be positive");
        if (rounds < 1) throw ConfigError("config: rounds must be >= 1");
        if (rho < 0.0 || rho > 1.0) throw ConfigError("config: rho must be in [0,1]");
        if (graph_k < 2 || graph_k % 2 != 0) throw ConfigError("config: graph k must be even and >= 2");
        if (n <= static_cast<size_t>(graph_k)) throw ConfigError("config: need n > graph k");
        if (backend_kind != "reference" && backend_kind != "remote")
            throw ConfigError("config: backend kind must be reference or remote");
        if (calibration_iterations < 1) throw ConfigError("config: calibration iterations must be >= 1");
        arm_from_name(arm);  // throws on unknown arm
        for (const auto& c : communities) {
            profile_by_name(c.aot_profile);
            profile_by_name(c.pi_profile);
        }
        for (const std::string& p : {template_path, backgrounds_path, pool_path}) {
            if (!std::filesystem::exists(resolve(p)))
                throw ConfigError("config: referenced file does not exist: " + p);
        }
    }
};

inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["master_seed"] = c.master_seed;
    j["seeds"] = c.seeds;
    j["communities"] = nlohmann::ordered_json::array();
    for (const auto& spec : c.communities)
        j["communities"].push_back(
            {{"id", spec.id}, {"aot", spec.aot_profile}, {"pi", spec.pi_profile}});
    j["n"] = c.n;
    j["graph"] = {{"k", c.graph_k}, {"p_rewire", c.graph_p_rewire}};
    j["simulation"] = {{"rounds", c.rounds}, {"rho", c.rho}};
    j["backend"] = {{"kind", c.backend_kind},
                    {"endpoint", c.remote.endpoint},
                    {"path", c.remote.path},
                    {"model", c.remote.model},
                    {"temperature", c.remote.temperature},
                    {"retries", c.remote.retries},
                    {"in_flight", c.remote.in_flight}};
    j["claims"] = {{"pool", c.pool_path}, {"claim_id", c.claim_id}};
    j["intervention"] = {{"arm", c.arm}, {"start_round", c.intervention_start_round}};
    j["personas"] = {{"template", c.template_path}, {"backgrounds", c.backgrounds_path}};
    j["calibration"] = {{"questionnaire", c.questionnaire_path},
                        {"agents_per_cell", c.calibration_agents_per_cell},
                        {"iterations", c.calibration_iterations}};
    j["output"] = {{"dir", c.output_dir}};
    return j;
}

inline RunConfig config_from_json(const nlohmann::ordered_json& j) {
    RunConfig c;
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<int>>();
    if (j.contains("communities")) {
        c.communities.clear();
        const auto& communities = j.at("communities");
        if (communities.is_string() && communities.get<std::string>() == "all") {
            c.communities = standard_communities();
        } else {
            for (const auto& item : communities) {
                if (item.is_string()) {
                    c.communities.push_back(standard_community(item.get<std::string>()));
                } else {
                    CommunitySpec spec;
                    spec.id = item.at("id").get<std::string>();
                    spec.aot_profile = item.at("aot").get<std::string>();
                    spec.pi_profile = item.at("pi").get<std::string>();
                    c.communities.push_back(std::move(spec));
                }
            }
        }
    }
    c.n = j.value("n", c.n);
    if (j.contains("graph")) {
        c.graph_k = j.at("graph").value("k", c.graph_k);
        c.graph_p_rewire = j.at("graph").value("p_rewire", c.graph_p_rewire);
    }
    if (j.contains("simulation")) {
        c.rounds = j.at("simulation").value("rounds", c.rounds);
        c.rho = j.at("simulation").value("rho", c.rho);
    }
    if (j.contains("backend")) {
        const auto& b = j.at("backend");
        c.backend_kind = b.value("kind", c.backend_kind);
        c.remote.endpoint = b.value("endpoint", c.remote.endpoint);
        c.remote.path = b.value("path", c.remote.path);
        c.remote.model = b.value("model", c.remote.model);
        c.remote.temperature = b.value("temperature", c.remote.temperature);
        c.remote.retries = b.value("retries", c.remote.retries);
        c.remote.in_flight = b.value("in_flight", c.remote.in_flight);
    }
    if (j.contains("claims")) {
        c.pool_path = j.at("claims").value("pool", c.pool_path);
        c.claim_id = j.at("claims").value("claim_id", c.claim_id);
    }
    if (j.contains("intervention")) {
        c.arm = j.at("intervention").value("arm", c.arm);
        c.intervention_start_round = j.at("intervention").value("start_round", 1);
    }
    if (j.contains("personas")) {
        c.template_path = j.at("personas").value("template", c.template_path);
        c.backgrounds_path = j.at("personas").value("backgrounds", c.backgrounds_path);
    }
    if (j.contains("calibration")) {
        c.questionnaire_path = j.at("calibration").value("questionnaire", c.questionnaire_path);
        c.calibration_agents_per_cell =
            j.at("calibration").value("agents_per_cell", c.calibration_agents_per_cell);
        c.calibration_iterations = j.at("calibration").value("iterations", c.calibration_iterations);
    }
    if (j.contains("output")) c.output_dir = j.at("output").value("dir", c.output_dir);
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    RunConfig c = config_from_json(j);
    c.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return c;
}

/// Hash of the canonical serialized config; stamped into every output file
/// so artifacts are traceable to the exact configuration.
inline std::string config_hash(const RunConfig& c) {
    return hex64(fnv1a64(config_to_json(c).dump()));
}

/// Load the persona template body from a plain-text asset.
inline PersonaTemplate load_persona_template(const std::filesystem::path& path) {
    PersonaTemplate t;
    t.body = read_text_file(path);
    t.version = 0;
    if (!t.has_required_placeholders())
        throw ConfigError("persona template file is missing a required placeholder: " +
                          path.string());
    return t;
}

inline std::vector<BackgroundAttrs> load_backgrounds(const std::filesystem::path& path) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::parse(read_text_file(path));
    if (!doc.is_array() || doc.empty())
        throw ConfigError("backgrounds file: non-empty JSON array expected");
    std::vector<BackgroundAttrs> pool;
    for (const auto& j : doc) pool.push_back(j.get<BackgroundAttrs>());
    return pool;
}

}  // namespace cosim
