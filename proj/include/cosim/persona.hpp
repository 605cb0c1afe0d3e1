#pragma once

#include <array>
#include <cctype>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosim/traits.hpp"

namespace cosim {

// ---------------------------------------------------------------------------
// Trait description bands
//
// Continuous trait scores are translated into natural-language descriptions
// over five half-open intervals: [0,0.2) [0.2,0.4) [0.4,0.6) [0.6,0.8) and
// [0.8,1.0]. The final band is closed at 1.0 so the partition covers [0,1].
// ---------------------------------------------------------------------------

inline constexpr int kTraitBands = 5;

inline const std::array<std::string, kTraitBands>& aot_band_texts() {
    static const std::array<std::string, kTraitBands> bands = {
        "The agent strongly relies on intuition, emotion, first impressions, familiar "
        "narratives, and prior beliefs. It rarely verifies sources or compares opposing "
        "evidence. When exposed to information consistent with its initial view, it tends "
        "to believe, endorse, or spread it quickly.",

        "The agent remains strongly influenced by first impressions and prior beliefs. It "
        "may notice conflicting information, but usually starts to hesitate only when "
        "controversy becomes obvious, comments are highly divided, or multiple sources "
        "contradict each other.",

        "The agent shows moderate openness. It does not immediately accept or reject new "
        "information and tends to wait for further discussion or additional evidence. It "
        "may compare competing claims, but usually does not systematically verify original "
        "sources.",

        "The agent shows high openness to evidence revision. It usually checks whether "
        "information is sufficient, whether sources are reliable, and whether different "
        "accounts are consistent. It is willing to revise its judgment when credible "
        "corrections or counter evidence appear.",

        "The agent shows very high analytical openness. It actively delays judgment, "
        "compares multiple sources, and searches for evidence that may challenge its "
        "initial view. It distinguishes facts, speculation, emotional framing, and "
        "unverified misinformation, and updates its beliefs when stronger evidence appears."};
    return bands;
}

inline const std::array<std::string, kTraitBands>& pi_band_texts() {
    static const std::array<std::string, kTraitBands> bands = {
        "The agent holds a strongly progressive orientation. It strongly prioritizes "
        "equality, inclusion, vulnerable groups, structural causes, public service "
        "expansion, redistribution, and institutional accountability.",

        "The agent leans progressive. It generally supports fairness protection, public "
        "services, inclusive access, and institutional responsibility, while remaining "
        "less extreme than the lowest interval.",

        "The agent holds a relatively centrist orientation. It tends to balance fairness, "
        "personal responsibility, institutional accountability, social stability, "
        "procedural legitimacy, and practical constraints.",

        "The agent leans conservative. It tends to prioritize social stability, personal "
        "responsibility, rule boundaries, fiscal restraint, gradual governance, and clear "
        "responsibility allocation.",

        "The agent holds a strongly conservative orientation. It strongly prioritizes "
        "order, rule authority, personal responsibility, boundary enforcement, traditional "
        "norms, fiscal restraint, and the social costs of large-scale public intervention."};
    return bands;
}

/// Index of the band containing `score`. Lower-inclusive, upper-exclusive,
/// except the final band which includes 1.0. Boundary comparisons are
/// explicit rather than floor(score*5) to avoid floating-point misbinning
/// at 0.6.
inline int trait_band_index(double score) {
    if (!in_unit_interval(score)) throw ConfigError("trait score outside [0,1]");
    if (score < 0.2) return 0;
    if (score < 0.4) return 1;
    if (score < 0.6) return 2;
    if (score < 0.8) return 3;
    return 4;
}

/// Verbatim band description for the interval containing `score`.
inline const std::string& trait_band(double score, TraitKind kind) {
    const int idx = trait_band_index(score);
    return kind == TraitKind::AOT ? aot_band_texts()[static_cast<size_t>(idx)]
                                  : pi_band_texts()[static_cast<size_t>(idx)];
}

// ---------------------------------------------------------------------------
// Persona template and instantiation
// ---------------------------------------------------------------------------

inline constexpr const char* kPlaceholderAot = "{Description_AOT}";
inline constexpr const char* kPlaceholderPi = "{Description_Political_Ideology}";

/// A persona generation template. `version` is the calibration iteration the
/// body came from (0 for the shipped initial template).
struct PersonaTemplate {
    std::string body;
    int version = 0;

    bool has_required_placeholders() const {
        return body.find(kPlaceholderAot) != std::string::npos &&
               body.find(kPlaceholderPi) != std::string::npos;
    }
};

/// The shipped initial template (the same text ships in
/// assets/persona_template.txt for file-based configuration).
inline PersonaTemplate default_persona_template() {
    PersonaTemplate t;
    t.version = 0;
    t.body =
        "You are a social media user agent for social simulation. Your task is not to "
        "choose the objectively correct or socially desirable answer, but to consistently "
        "express the assigned psychological traits.\n"
        "\n"
        "You have two independent psychological traits.\n"
        "\n"
        "The first trait is AOT, which determines how you process new information, "
        "including whether you verify evidence, seek opposing viewpoints, revise beliefs, "
        "or rely on first impressions.\n"
        "\n"
        "The second trait is PI, which determines the value perspectives you use to "
        "interpret public issues, including fairness, institutional accountability, social "
        "order, personal responsibility, and rule boundaries.\n"
        "\n"
        "Your AOT profile:\n"
        "{Description_AOT}\n"
        "\n"
        "Your Political Ideology profile:\n"
        "{Description_Political_Ideology}\n"
        "\n"
        "You must follow these rules:\n"
        "- when a question evaluates AOT, respond only according to your AOT level\n"
        "- when a question evaluates PI, respond only according to your PI level\n"
        "- do not let the two traits interfere with each other\n"
        "- maintain stable behavioral consistency\n"
        "- avoid explicitly mentioning numerical scores or psychological labels\n";
    return t;
}

using BackgroundAttrs = std::map<std::string, std::string>;

/// One instantiated agent persona.
struct PersonaSpec {
    double aot = 0.5;
    double pi = 0.5;
    BackgroundAttrs background;
    std::string persona_text;
};

namespace detail {
/// True if text still contains a `{identifier}` style placeholder.
inline bool has_unresolved_placeholder(const std::string& text) {
    size_t open = text.find('{');
    while (open != std::string::npos) {
        size_t close = text.find('}', open + 1);
        if (close == std::string::npos) return false;
        bool identifier = close > open + 1;
        for (size_t i = open + 1; i < close && identifier; ++i) {
            const char c = text[i];
            identifier = std::isalnum(static_cast<unsigned char>(c)) || c == '_';
        }
        if (identifier) return true;
        open = text.find('{', open + 1);
    }
    return false;
}
}  // namespace detail

/// Fill the template with the band descriptions matching the agent's scores.
/// The numeric scores never appear in the resulting text.
inline PersonaSpec instantiate_persona(double aot, double pi, const BackgroundAttrs& background,
                                       const PersonaTemplate& tmpl) {
    if (!tmpl.has_required_placeholders())
        throw TemplateError("persona template is missing a trait description placeholder");
    PersonaSpec spec;
    spec.aot = aot;
    spec.pi = pi;
    spec.background = background;
    std::string text = replace_all(tmpl.body, kPlaceholderAot, trait_band(aot, TraitKind::AOT));
    text = replace_all(text, kPlaceholderPi, trait_band(pi, TraitKind::PI));
    if (detail::has_unresolved_placeholder(text))
        throw TemplateError("persona template contains an unresolved placeholder");
    if (text.empty()) throw TemplateError("instantiated persona text is empty");
    spec.persona_text = std::move(text);
    return spec;
}

// ---------------------------------------------------------------------------
// Community
// ---------------------------------------------------------------------------

/// A community of agents with stable dense ids 0..n-1 (the position in
/// `agents` is the agent id).
struct Community {
    std::string id;
    DistributionProfile aot_profile;
    DistributionProfile pi_profile;
    std::vector<PersonaSpec> agents;

    size_t size() const { return agents.size(); }
};

/// The shipped neutral background pool. Agents draw from a pool round-robin
/// by id, so community composition differs only in the sampled traits.
inline std::vector<BackgroundAttrs> default_background_pool() {
    auto make = [](const char* gender, const char* age, const char* occupation, const char* story,
                   const char* preference) {
        return BackgroundAttrs{{"gender", gender},
                               {"age", age},
                               {"occupation", occupation},
                               {"background_story", story},
                               {"preference", preference}};
    };
    return {
        make("female", "18-29", "retail assistant",
             "Lives in a mid-sized city, follows local community groups, and mostly reads "
             "news on a phone during commutes.",
             "short casual posts"),
        make("male", "30-44", "logistics coordinator",
             "Moved to the city for work, keeps in touch with family through group chats, "
             "and occasionally shares practical tips.",
             "plain matter-of-fact posts"),
        make("female", "30-44", "primary school teacher",
             "Active in a neighborhood parents group and used to explaining things step by "
             "step.",
             "clear explanatory posts"),
        make("male", "45-59", "maintenance technician",
             "Worked in the same district for two decades and trusts firsthand experience "
             "over online chatter.",
             "brief blunt posts"),
        make("female", "45-59", "clinic receptionist",
             "Sees a steady stream of local visitors and hears most neighborhood news "
             "early.",
             "conversational posts"),
        make("male", "18-29", "university student",
             "Studies part-time, spends evenings on short-video platforms, and often "
             "comments on trending topics.",
             "informal posts with questions"),
        make("female", "60+", "retired accountant",
             "Keeps a careful household ledger, reads the morning news digest, and "
             "forwards items to a family chat.",
             "polite complete sentences"),
        make("male", "60+", "retired bus driver",
             "Knows the city routes by heart and enjoys chatting with former colleagues "
             "about local events.",
             "short anecdotal posts"),
    };
}

/// Sample n agents from the two profiles and instantiate their personas.
/// Pure function of its inputs: a fixed seed yields a byte-identical
/// community.
inline Community build_community(const std::string& id, const DistributionProfile& aot_profile,
                                 const DistributionProfile& pi_profile, size_t n,
                                 const std::vector<BackgroundAttrs>& background_pool,
                                 const PersonaTemplate& tmpl, std::uint64_t seed) {
    if (n == 0) throw ConfigError("community size must be positive");
    if (background_pool.empty()) throw ConfigError("background pool is empty");
    aot_profile.validate();
    pi_profile.validate();

    Community c;
    c.id = id;
    c.aot_profile = aot_profile;
    c.pi_profile = pi_profile;
    c.agents.reserve(n);

    Rng rng = derive_rng(seed, {"traits", id});
    for (size_t i = 0; i < n; ++i) {
        const double aot = sample_trait(aot_profile, rng);
        const double pi = sample_trait(pi_profile, rng);
        const BackgroundAttrs& bg = background_pool[i % background_pool.size()];
        c.agents.push_back(instantiate_persona(aot, pi, bg, tmpl));
    }
    return c;
}

// ---------------------------------------------------------------------------
// Serialization (stable field order for byte-reproducibility)
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json community_to_json(const Community& c) {
    nlohmann::ordered_json doc;
    doc["id"] = c.id;
    doc["profiles"] = {{"aot", c.aot_profile.name}, {"pi", c.pi_profile.name}};
    doc["n"] = c.agents.size();
    nlohmann::ordered_json agents = nlohmann::ordered_json::array();
    for (size_t i = 0; i < c.agents.size(); ++i) {
        const PersonaSpec& a = c.agents[i];
        nlohmann::ordered_json ja;
        ja["agent_id"] = i;
        ja["aot"] = a.aot;
        ja["pi"] = a.pi;
        ja["background"] = a.background;
        ja["persona_text"] = a.persona_text;
        agents.push_back(std::move(ja));
    }
    doc["agents"] = std::move(agents);
    return doc;
}

inline Community community_from_json(const nlohmann::ordered_json& doc) {
    Community c;
    c.id = doc.at("id").get<std::string>();
    c.aot_profile = profile_by_name(doc.at("profiles").at("aot").get<std::string>());
    c.pi_profile = profile_by_name(doc.at("profiles").at("pi").get<std::string>());
    for (const auto& ja : doc.at("agents")) {
        PersonaSpec a;
        a.aot = ja.at("aot").get<double>();
        a.pi = ja.at("pi").get<double>();
        a.background = ja.at("background").get<BackgroundAttrs>();
        a.persona_text = ja.at("persona_text").get<std::string>();
        c.agents.push_back(std::move(a));
    }
    if (c.agents.size() != doc.at("n").get<size_t>())
        throw ConfigError("community document: agent count does not match n");
    return c;
}

}  // namespace cosim
