#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cosim/remote_backend.hpp"

using namespace cosim;

namespace {

/// Minimal local endpoint speaking the chat-completion wire protocol.
class StubServer {
public:
    using Responder = std::function<std::string(const nlohmann::json& body, int call_index)>;

    explicit StubServer(Responder responder) : responder_(std::move(responder)) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
            nlohmann::json body = nlohmann::json::parse(req.body);
            int index;
            {
                std::lock_guard<std::mutex> lock(mutex_);
                bodies_.push_back(body);
                index = static_cast<int>(bodies_.size()) - 1;
            }
            nlohmann::json reply;
            reply["choices"] = nlohmann::json::array();
            reply["choices"].push_back(
                {{"message", {{"role", "assistant"}, {"content", responder_(body, index)}}}});
            res.set_content(reply.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::vector<nlohmann::json> bodies() {
        std::lock_guard<std::mutex> lock(mutex_);
        return bodies_;
    }

private:
    httplib::Server server_;
    Responder responder_;
    int port_ = 0;
    std::thread thread_;
    std::mutex mutex_;
    std::vector<nlohmann::json> bodies_;
};

RemoteConfig config_for(const StubServer& server) {
    RemoteConfig cfg;
    cfg.endpoint = server.endpoint();
    cfg.model = "qwen3-4b";
    cfg.temperature = 0.5;
    cfg.retries = 3;
    return cfg;
}

Claim test_claim() {
    return Claim::make("C01", "the dam has cracked", "disaster", 2024, {{"m", 8.0}},
                       "inspection bulletin refutes it", "account X", 0.5);
}

PersonaSpec test_persona() {
    return instantiate_persona(0.7, 0.4, default_background_pool()[0],
                               default_persona_template());
}

}  // namespace

TEST_CASE("respond sends model, temperature, and persona, and parses the reply") {
    StubServer server([](const nlohmann::json&, int) {
        return R"({"trust": 0.62, "emotion": "fear", "emotion_reason": "worried",
                   "opinion": "this may be false", "why_opinion": "no source",
                   "decision": "post_only", "post_text": "anyone have a source?"})";
    });
    RemoteChatBackend backend(config_for(server));

    const Claim claim = test_claim();
    const PersonaSpec persona = test_persona();
    RespondContext ctx;
    ctx.persona = &persona;
    ctx.claim = &claim;
    ctx.exposure = ExposurePayload{claim.content, kSpreaderId};
    ctx.peers = {PeerMessage{3, "saw this too", Stance::comment, 0.4}};
    ctx.history_summary = "earlier chatter";

    const ResponseTuple out = backend.respond(ctx);
    REQUIRE(out.trust == Catch::Approx(0.62));
    REQUIRE(out.emotion == Emotion::fear);
    REQUIRE(out.decision == Decision::post_only);
    REQUIRE(out.post_text == "anyone have a source?");

    const auto bodies = server.bodies();
    REQUIRE(bodies.size() == 1);
    REQUIRE(bodies[0].at("model") == "qwen3-4b");
    REQUIRE(bodies[0].at("temperature").get<double>() == Catch::Approx(0.5));
    const auto& messages = bodies[0].at("messages");
    REQUIRE(messages.size() == 2);
    REQUIRE(messages[0].at("role") == "system");
    REQUIRE(messages[0].at("content").get<std::string>().find(persona.persona_text) !=
            std::string::npos);
    const std::string user = messages[1].at("content").get<std::string>();
    REQUIRE(user.find("-1: " + claim.content) != std::string::npos);
    REQUIRE(user.find("3: saw this too") != std::string::npos);
    REQUIRE(user.find("earlier chatter") != std::string::npos);
}

TEST_CASE("decision none forces an empty post even if the model wrote one") {
    StubServer server([](const nlohmann::json&, int) {
        return R"({"trust": 0.2, "emotion": "none", "opinion": "quiet",
                   "decision": "none", "post_text": "should be dropped"})";
    });
    RemoteChatBackend backend(config_for(server));
    const Claim claim = test_claim();
    const PersonaSpec persona = test_persona();
    RespondContext ctx;
    ctx.persona = &persona;
    ctx.claim = &claim;
    const ResponseTuple out = backend.respond(ctx);
    REQUIRE(out.decision == Decision::none);
    REQUIRE(out.post_text.empty());
}

TEST_CASE("malformed output triggers a re-prompt and then succeeds") {
    StubServer server([](const nlohmann::json&, int index) {
        if (index == 0) return std::string("I think the answer is roughly this, no JSON today");
        return std::string(R"({"trust": 0.5, "emotion": "none", "opinion": "ok",
                               "decision": "none", "post_text": ""})");
    });
    RemoteChatBackend backend(config_for(server));
    const Claim claim = test_claim();
    const PersonaSpec persona = test_persona();
    RespondContext ctx;
    ctx.persona = &persona;
    ctx.claim = &claim;
    const ResponseTuple out = backend.respond(ctx);
    REQUIRE(out.trust == Catch::Approx(0.5));
    const auto bodies = server.bodies();
    REQUIRE(bodies.size() == 2);
    // the retry carries a corrective instruction
    const auto& retry_messages = bodies[1].at("messages");
    const std::string last = retry_messages.back().at("content").get<std::string>();
    REQUIRE(last.find("JSON") != std::string::npos);
}

TEST_CASE("persistent garbage exhausts retries with a backend error") {
    StubServer server([](const nlohmann::json&, int) { return std::string("no json here"); });
    RemoteChatBackend backend(config_for(server));
    const Claim claim = test_claim();
    const PersonaSpec persona = test_persona();
    RespondContext ctx;
    ctx.persona = &persona;
    ctx.claim = &claim;
    REQUIRE_THROWS_AS(backend.respond(ctx), BackendError);
    REQUIRE(server.bodies().size() == 3);  // the configured retry budget
}

TEST_CASE("summarize parses both summary fields") {
    StubServer server([](const nlohmann::json&, int) {
        return R"({"updated_history": "we heard a dam rumor", "round_only": "one new message"})";
    });
    RemoteChatBackend backend(config_for(server));
    const SummaryPair out = backend.summarize("old summary", {"-1: the dam has cracked"});
    REQUIRE(out.updated_history == "we heard a dam rumor");
    REQUIRE(out.round_only == "one new message");
}

TEST_CASE("stance classification parses the four labels") {
    std::atomic<int> which{0};
    StubServer server([&](const nlohmann::json&, int) {
        switch (which.load()) {
            case 0: return std::string(R"({"stance": "deny"})");
            case 1: return std::string(R"({"stance": "query"})");
            case 2: return std::string(R"({"stance": "support"})");
            default: return std::string(R"({"stance": "comment"})");
        }
    });
    RemoteChatBackend backend(config_for(server));
    const Claim claim = test_claim();
    REQUIRE(backend.classify_stance("clearly false, already debunked", claim) == Stance::deny);
    which = 1;
    REQUIRE(backend.classify_stance("does anyone have a source?", claim) == Stance::query);
    which = 2;
    REQUIRE(backend.classify_stance("this is true, share it", claim) == Stance::support);
    which = 3;
    REQUIRE(backend.classify_stance("people keep talking", claim) == Stance::comment);
}

TEST_CASE("fact-check decisions require a boolean") {
    StubServer server([](const nlohmann::json&, int index) {
        if (index == 0) return std::string(R"({"want_fact_check": true, "reason": "unsure"})");
        return std::string(R"({"want_fact_check": "yes"})");  // invalid on retries
    });
    RemoteChatBackend backend(config_for(server));
    const Claim claim = test_claim();
    const PersonaSpec persona = test_persona();
    FactCheckContext ctx;
    ctx.persona = &persona;
    ctx.claim = &claim;
    ctx.opinion = "unsure";
    REQUIRE(backend.decide_fact_check(ctx).requested);
    REQUIRE_THROWS_AS(backend.decide_fact_check(ctx), BackendError);
}

TEST_CASE("claim scoring parses and clamps") {
    std::atomic<bool> huge{false};
    StubServer server([&](const nlohmann::json&, int) {
        return huge.load() ? std::string(R"({"score": 12, "reason": "overconfident"})")
                           : std::string(R"({"score": 6.7, "reason": "plausible source"})");
    });
    RemoteChatBackend backend(config_for(server));
    const Claim claim = test_claim();
    const CredibilityResult ok = backend.score_claim(claim);
    REQUIRE(ok.score == Catch::Approx(6.7));
    REQUIRE(ok.reason == "plausible source");
    REQUIRE_FALSE(ok.out_of_range);
    huge = true;
    const CredibilityResult clamped = backend.score_claim(claim);
    REQUIRE(clamped.score == 10.0);
    REQUIRE(clamped.out_of_range);
}

TEST_CASE("diagnostic answers recover a single letter token") {
    std::atomic<int> mode{0};
    StubServer server([&](const nlohmann::json&, int) {
        switch (mode.load()) {
            case 0: return std::string("C");
            case 1: return std::string("maybe C");
            default: return std::string("A or B");  // ambiguous forever
        }
    });
    RemoteChatBackend backend(config_for(server));
    const PersonaSpec persona = test_persona();
    DiagnosticItem item;
    item.scenario_text = "s";
    item.question_text = "q";
    item.target_trait = TraitKind::AOT;
    item.options = {"o1", "o2", "o3", "o4", "o5"};
    REQUIRE(backend.answer_diagnostic(persona, item, 0) == 'C');
    mode = 1;
    REQUIRE(backend.answer_diagnostic(persona, item, 1) == 'C');
    mode = 2;
    REQUIRE_THROWS_AS(backend.answer_diagnostic(persona, item, 2), BackendError);
}

TEST_CASE("persuasion generation uses the evidence-grounded prompt") {
    StubServer server([](const nlohmann::json& body, int) {
        const std::string user = body.at("messages").back().at("content").get<std::string>();
        if (user.find("inspection bulletin refutes it") == std::string::npos)
            return std::string(R"({"reply": "missing evidence"})");
        return std::string(R"({"reply": "the claim is false, stop sharing it"})");
    });
    RemoteChatBackend backend(config_for(server));
    const Claim claim = test_claim();
    REQUIRE(backend.generate_persuasion(claim, true) == "the claim is false, stop sharing it");
    REQUIRE(backend.generate_persuasion(claim, false) == "missing evidence");
}

TEST_CASE("template revision returns the raw completion") {
    StubServer server([](const nlohmann::json&, int) {
        return std::string("revised template {Description_AOT} {Description_Political_Ideology}");
    });
    RemoteChatBackend backend(config_for(server));
    TemplateRevisionContext ctx;
    ctx.current_template = "old";
    const std::string body = backend.revise_template(ctx);
    REQUIRE(body.find("revised template") != std::string::npos);
}

TEST_CASE("an unreachable endpoint fails preflight with a backend error") {
    RemoteConfig cfg;
    cfg.endpoint = "http://127.0.0.1:1";  // nothing listens there
    cfg.retries = 1;
    cfg.timeout_seconds = 2;
    RemoteChatBackend backend(cfg);
    REQUIRE_THROWS_AS(backend.preflight(), BackendError);
}

TEST_CASE("embedded json extraction tolerates prose around the object") {
    const auto j = RemoteChatBackend::parse_embedded_json("Sure! Here it is: {\"a\": 1} done");
    REQUIRE(j.at("a") == 1);
    REQUIRE_THROWS_AS(RemoteChatBackend::parse_embedded_json("no braces"), BackendError);
    REQUIRE(RemoteChatBackend::extract_single_letter("maybe C") == 'C');
    REQUIRE(RemoteChatBackend::extract_single_letter("the answer is (d)") == 'D');
    REQUIRE_FALSE(RemoteChatBackend::extract_single_letter("A or B").has_value());
    REQUIRE_FALSE(RemoteChatBackend::extract_single_letter("nothing").has_value());
}
