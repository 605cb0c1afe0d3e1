#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "cosim/backend.hpp"
#include "cosim/prompts.hpp"

namespace cosim {

/// Environment variable holding the remote API credential. Never stored in
/// configuration files.
inline constexpr const char* kApiKeyEnvVar = "COSIM_API_KEY";

struct RemoteConfig {
    std::string endpoint = "http://127.0.0.1:8080";  // scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string model = "qwen3-4b";
    double temperature = 0.5;
    int retries = 3;          // attempts per call, including the first
    size_t in_flight = 4;     // engine-side concurrent call limit
    int timeout_seconds = 120;
};

/// Chat-completion client for an OpenAI-compatible endpoint. Each operation
/// assembles its message template, requests a completion, and parses the
/// structured reply, re-prompting on malformed output up to the retry
/// budget. Stateless between calls; safe to use from multiple threads.
class RemoteChatBackend : public AgentBackend {
public:
    explicit RemoteChatBackend(RemoteConfig config) : config_(std::move(config)) {
        if (config_.retries < 1) throw ConfigError("remote backend: retries must be >= 1");
        const char* key = std::getenv(kApiKeyEnvVar);
        if (key != nullptr) api_key_ = key;
    }

    std::string name() const override { return config_.model; }
    size_t concurrency() const override { return config_.in_flight; }
    const RemoteConfig& config() const { return config_; }

    /// One minimal completion; throws when the endpoint cannot be reached.
    void preflight() override {
        complete({{"user", "Reply with the single word: ready"}});
    }

    // -- wire-level -------------------------------------------------------

    struct ChatMessage {
        std::string role;
        std::string content;
    };

    /// One POST to the chat-completions endpoint. Throws BackendError on
    /// transport failure or a non-2xx status.
    std::string complete(const std::vector<ChatMessage>& messages) {
        nlohmann::json body;
        body["model"] = config_.model;
        body["temperature"] = config_.temperature;
        body["messages"] = nlohmann::json::array();
        for (const auto& m : messages)
            body["messages"].push_back({{"role", m.role}, {"content", m.content}});

        httplib::Client client(config_.endpoint);
        client.set_connection_timeout(config_.timeout_seconds);
        client.set_read_timeout(config_.timeout_seconds);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        auto res = client.Post(config_.path, headers, body.dump(), "application/json");
        if (!res)
            throw BackendError("remote backend unreachable: " + config_.endpoint +
                               " (" + httplib::to_string(res.error()) + ")");
        if (res->status < 200 || res->status >= 300)
            throw BackendError("remote backend HTTP " + std::to_string(res->status) + ": " +
                               res->body);
        try {
            nlohmann::json reply = nlohmann::json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("malformed chat-completion response: ") + e.what());
        }
    }

    // -- operations -------------------------------------------------------

    ResponseTuple respond(const RespondContext& ctx) override {
        const std::string user = fill_cognitive_prompt(ctx);
        std::vector<ChatMessage> messages = {
            {"system", prompts::fill(prompts::kPersonaInstantiation, "persona_description",
                                     ctx.persona->persona_text)},
            {"user", user}};
        nlohmann::json j = complete_json(messages, "respond");
        ResponseTuple out;
        if (!j.contains("trust") || !j.at("trust").is_number())
            throw BackendError("respond: reply is missing a numeric trust field");
        out.trust = j.at("trust").get<double>();
        out.opinion = j.value("opinion", std::string());
        const auto emotion = emotion_from_name(j.value("emotion", std::string("none")));
        if (!emotion) throw BackendError("respond: unknown emotion label");
        out.emotion = *emotion;
        out.emotion_reason = j.value("emotion_reason", std::string());
        const std::string decision = j.value("decision", std::string("none"));
        if (decision != "post_only" && decision != "none")
            throw BackendError("respond: unknown decision label " + decision);
        out.decision = decision == "post_only" ? Decision::post_only : Decision::none;
        out.post_text = j.value("post_text", std::string());
        out.enforce_invariants();
        return out;
    }

    SummaryPair summarize(const std::string& history_summary,
                          const std::vector<std::string>& new_messages) override {
        std::string joined;
        for (const auto& m : new_messages) {
            joined += m;
            joined += '\n';
        }
        std::string user = prompts::fill(prompts::kDualSummary, "history_summary", history_summary);
        user = prompts::fill(std::move(user), "new_messages", joined);
        nlohmann::json j = complete_json({{"user", user}}, "summarize");
        SummaryPair out;
        out.updated_history = j.value("updated_history", std::string());
        out.round_only = j.value("round_only", std::string());
        return out;
    }

    Stance classify_stance(const std::string& message, const Claim& claim) override {
        std::string user = prompts::fill(prompts::kStanceAnnotation, "claim", claim.content);
        user = prompts::fill(std::move(user), "message", message);
        nlohmann::json j = complete_json({{"user", user}}, "classify_stance");
        const auto stance = stance_from_name(j.value("stance", std::string()));
        if (!stance) throw BackendError("classify_stance: unknown stance label");
        return *stance;
    }

    FactCheckDecision decide_fact_check(const FactCheckContext& ctx) override {
        std::string user = prompts::fill(prompts::kFactCheckDecision, "misinformation",
                                         ctx.claim->content);
        user = prompts::fill(std::move(user), "history_summary", ctx.history_summary);
        user = prompts::fill(std::move(user), "opinion", ctx.opinion);
        user = prompts::fill(std::move(user), "emotion", emotion_name(ctx.emotion));
        nlohmann::json j = complete_json({{"user", user}}, "decide_fact_check");
        if (!j.contains("want_fact_check") || !j.at("want_fact_check").is_boolean())
            throw BackendError("decide_fact_check: want_fact_check must be true or false");
        FactCheckDecision d;
        d.requested = j.at("want_fact_check").get<bool>();
        d.reason = j.value("reason", std::string());
        return d;
    }

    std::string revise_template(const TemplateRevisionContext& ctx) override {
        std::string user = prompts::fill(prompts::kTemplateRevision, "target_aot",
                                         format_double(ctx.target_aot, 3));
        user = prompts::fill(std::move(user), "target_pi", format_double(ctx.target_pi, 3));
        user = prompts::fill(std::move(user), "observed_aot", format_double(ctx.observed_aot, 3));
        user = prompts::fill(std::move(user), "observed_pi", format_double(ctx.observed_pi, 3));
        user = prompts::fill(std::move(user), "current_template", ctx.current_template);
        return with_retries("revise_template", [&](int) {
            std::string reply = complete({{"user", user}});
            // tolerate markdown fences around the returned template
            const size_t first = reply.find_first_not_of(" \t\r\n");
            if (first == std::string::npos) throw BackendError("empty template revision");
            return reply;
        });
    }

    CredibilityResult score_claim(const Claim& claim) override {
        const std::string user =
            prompts::fill(prompts::kCredibilityAssessment, "misinformation", claim.content);
        nlohmann::json j = complete_json({{"user", user}}, "score_claim");
        if (!j.contains("score") || !j.at("score").is_number())
            throw BackendError("score_claim: reply is missing a numeric score");
        CredibilityResult r;
        const double raw = j.at("score").get<double>();
        r.out_of_range = raw < 0.0 || raw > 10.0;
        r.score = std::min(10.0, std::max(0.0, raw));
        r.reason = j.value("reason", std::string());
        return r;
    }

    std::string generate_persuasion(const Claim& claim, bool evidence_grounded) override {
        std::string user;
        if (evidence_grounded) {
            user = prompts::fill(prompts::kPersuasionEvidence, "gold_evidence", claim.gold_evidence);
            user = prompts::fill(std::move(user), "misinformation_origin", claim.content);
        } else {
            user = prompts::fill(prompts::kPersuasionPlain, "misinformation_origin", claim.content);
        }
        nlohmann::json j = complete_json({{"user", user}}, "generate_persuasion");
        const std::string reply = j.value("reply", std::string());
        if (reply.empty()) throw BackendError("generate_persuasion: empty reply field");
        return reply;
    }

    char answer_diagnostic(const PersonaSpec& persona, const DiagnosticItem& item,
                           size_t item_index) override {
        std::string options_text;
        for (int k = 0; k < 5; ++k) {
            options_text += static_cast<char>('A' + k);
            options_text += ". " + item.options[static_cast<size_t>(k)] + "\n";
        }
        std::string user = prompts::fill(prompts::kQuestionnaireWrapper, "Scenario_Text",
                                         item.scenario_text);
        user = prompts::fill(std::move(user), "Question_Text", item.question_text);
        user = prompts::fill(std::move(user), "Target_Trait",
                             item.target_trait == TraitKind::AOT
                                 ? "Actively Open-minded Thinking (AOT)"
                                 : "Political Ideology (PI)");
        user = prompts::fill(std::move(user), "Options_Text", options_text);
        std::vector<ChatMessage> messages = {
            {"system", prompts::fill(prompts::kPersonaInstantiation, "persona_description",
                                     persona.persona_text)},
            {"user", user}};
        return with_retries("answer_diagnostic", [&](int attempt) {
            auto msgs = messages;
            if (attempt > 0)
                msgs.push_back({"user", "Reply with exactly one option letter from A to E and "
                                        "nothing else."});
            const std::string reply = complete(msgs);
            const auto letter = extract_single_letter(reply);
            if (!letter)
                throw BackendError("item " + std::to_string(item_index) +
                                   ": reply does not contain exactly one option letter");
            return *letter;
        });
    }

    /// Recover the selected option from a possibly chatty reply: accept it
    /// only if exactly one standalone A-E letter token is present.
    static std::optional<char> extract_single_letter(const std::string& reply) {
        std::optional<char> found;
        size_t i = 0;
        while (i < reply.size()) {
            if (!std::isalnum(static_cast<unsigned char>(reply[i]))) {
                ++i;
                continue;
            }
            size_t j = i;
            while (j < reply.size() && std::isalnum(static_cast<unsigned char>(reply[j]))) ++j;
            if (j - i == 1) {
                const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(reply[i])));
                if (c >= 'A' && c <= 'E') {
                    if (found) return std::nullopt;  // more than one candidate
                    found = c;
                }
            }
            i = j;
        }
        return found;
    }

    /// Extract the outermost JSON object embedded in a completion.
    static nlohmann::json parse_embedded_json(const std::string& reply) {
        const size_t first = reply.find('{');
        const size_t last = reply.rfind('}');
        if (first == std::string::npos || last == std::string::npos || last < first)
            throw BackendError("reply contains no JSON object");
        return nlohmann::json::parse(reply.substr(first, last - first + 1));
    }

private:
    template <typename Fn>
    auto with_retries(const char* op, Fn&& fn) -> decltype(fn(0)) {
        std::string last_error;
        for (int attempt = 0; attempt < config_.retries; ++attempt) {
            try {
                return fn(attempt);
            } catch (const BackendError& e) {
                last_error = e.what();
            }
        }
        throw BackendError(std::string(op) + " failed after " + std::to_string(config_.retries) +
                           " attempts: " + last_error);
    }

    /// Completion that must yield a JSON object; malformed output triggers a
    /// structured-output re-prompt on the next attempt.
    nlohmann::json complete_json(std::vector<ChatMessage> messages, const char* op) {
        return with_retries(op, [&](int attempt) {
            auto msgs = messages;
            if (attempt > 0)
                msgs.push_back({"user", "Your previous reply was not valid. Strictly output a "
                                        "single JSON object with the requested fields and no "
                                        "other text."});
            return parse_embedded_json(complete(msgs));
        });
    }

    std::string fill_cognitive_prompt(const RespondContext& ctx) const {
        const BackgroundAttrs& bg = ctx.persona->background;
        auto attr = [&](const char* key) {
            auto it = bg.find(key);
            return it == bg.end() ? std::string("unspecified") : it->second;
        };
        std::string new_messages;
        if (ctx.exposure)
            new_messages += std::to_string(ctx.exposure->source_id) + ": " + ctx.exposure->content +
                            (ctx.signal.kind == SignalKind::accuracy_prompt
                                 ? " [" + ctx.signal.text + "]"
                                 : "") +
                            "\n";
        for (const auto& m : ctx.peers)
            new_messages += std::to_string(m.source_id) + ": " + m.text + "\n";

        std::string user = prompts::fill(prompts::kCognitiveResponse, "gender", attr("gender"));
        user = prompts::fill(std::move(user), "age", attr("age"));
        user = prompts::fill(std::move(user), "occupation", attr("occupation"));
        user = prompts::fill(std::move(user), "background_story", attr("background_story"));
        user = prompts::fill(std::move(user), "preference_appendix", attr("preference"));
        user = prompts::fill(std::move(user), "history_summary", ctx.history_summary);
        user = prompts::fill(std::move(user), "new_messages", new_messages);
        user = prompts::fill(std::move(user), "message_summary", ctx.round_summary);
        user = prompts::fill(std::move(user), "intervention_history", ctx.intervention_history);
        return user;
    }

    RemoteConfig config_;
    std::string api_key_;
};

}  // namespace cosim
