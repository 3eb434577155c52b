#include <doctest.h>

#include "fake_server.hpp"
#include "fakes.hpp"
#include "overton/backend.hpp"
#include "overton/cassette.hpp"
#include "overton/errors.hpp"

using namespace overton;
using nlohmann::json;

namespace {

json chat_reply(const std::string& text) {
    return {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}})},
            {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 34}}}};
}

template <class E>
class Throwing : public ModelBackend {
public:
    Completion complete(std::string_view, double, const std::string&) override {
        ++calls;
        throw E("scripted failure");
    }
    std::string kind() const override { return "throwing"; }
    int calls = 0;
};

}  // namespace

TEST_CASE("retry budget") {
    RetryPolicy policy{3, std::chrono::milliseconds(0)};
    SUBCASE("retryable errors use the whole budget") {
        Throwing<TransportError> t;
        int attempts = 0;
        CHECK_THROWS_AS(complete_with_retry(t, "p", 0.0, "m", policy, &attempts), TransportError);
        CHECK(t.calls == 4);
        CHECK(attempts == 4);
        Throwing<RateLimitError> r;
        CHECK_THROWS_AS(complete_with_retry(r, "p", 0.0, "m", policy), RateLimitError);
        CHECK(r.calls == 4);
    }
    SUBCASE("non-retryable errors fail at once") {
        Throwing<AuthError> a;
        CHECK_THROWS_AS(complete_with_retry(a, "p", 0.0, "m", policy), AuthError);
        CHECK(a.calls == 1);
        Throwing<MalformedResponseError> m;
        CHECK_THROWS_AS(complete_with_retry(m, "p", 0.0, "m", policy), MalformedResponseError);
        CHECK(m.calls == 1);
    }
    SUBCASE("recovery after transient failures") {
        fakes::Scripted flaky([](std::string_view, int call) -> std::string {
            if (call < 2) throw TransportError("reset");
            return "ok";
        });
        int attempts = 0;
        CHECK(complete_with_retry(flaky, "p", 0.0, "m", policy, &attempts).text == "ok");
        CHECK(attempts == 3);
    }
    SUBCASE("zero retries") {
        Throwing<TransportError> t;
        CHECK_THROWS(complete_with_retry(t, "p", 0.0, "m", RetryPolicy{0, {}}));
        CHECK(t.calls == 1);
    }
}

TEST_CASE("chat-completions backend against a local server") {
    int status = 200;
    std::string body = chat_reply("I agree.").dump();
    fakes::HttpServer server([&](const httplib::Request&, httplib::Response& res) {
        res.status = status;
        res.set_content(body, "application/json");
    });
    ChatCompletionsBackend backend(server.url("/v1/"), "sk-test-key");

    SUBCASE("success") {
        auto c = backend.complete("Write an essay.", 0.7, "gpt-test");
        CHECK(c.text == "I agree.");
        CHECK(c.prompt_tokens == 12);
        CHECK(c.completion_tokens == 34);
        CHECK(c.latency_ms.has_value());
        auto seen = server.seen();
        REQUIRE(seen.size() == 1);
        CHECK(seen[0].path == "/v1/chat/completions");
        CHECK(seen[0].authorization == "Bearer sk-test-key");
        auto sent = json::parse(seen[0].body);
        CHECK(sent["model"] == "gpt-test");
        CHECK(sent["temperature"] == 0.7);
        CHECK(sent["messages"][0]["content"] == "Write an essay.");
    }
    SUBCASE("error mapping") {
        status = 401;
        CHECK_THROWS_AS(backend.complete("p", 0, "m"), AuthError);
        status = 429;
        CHECK_THROWS_AS(backend.complete("p", 0, "m"), RateLimitError);
        status = 503;
        CHECK_THROWS_AS(backend.complete("p", 0, "m"), TransportError);
        status = 200;
        body = "{not json";
        CHECK_THROWS_AS(backend.complete("p", 0, "m"), MalformedResponseError);
        body = R"({"choices": []})";
        CHECK_THROWS_AS(backend.complete("p", 0, "m"), MalformedResponseError);
        body = "{\"choices\":[{\"message\":{\"content\":\"bad \xff\xfe bytes\"}}]}";
        CHECK_THROWS_AS(backend.complete("p", 0, "m"), MalformedResponseError);
    }
}

TEST_CASE("local-server backend against a local server") {
    fakes::HttpServer server([](const httplib::Request& req, httplib::Response& res) {
        auto sent = json::parse(req.body);
        json reply = {{"message", {{"role", "assistant"}, {"content", "neutral on " + sent["model"].get<std::string>()}}},
                      {"prompt_eval_count", 5},
                      {"eval_count", 7}};
        res.set_content(reply.dump(), "application/json");
    });
    LocalServerBackend backend(server.url());
    auto c = backend.complete("prompt", 0.0, "llama-test");
    CHECK(c.text == "neutral on llama-test");
    CHECK(c.prompt_tokens == 5);
    CHECK(c.completion_tokens == 7);
    auto seen = server.seen();
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].path == "/api/chat");
    CHECK(json::parse(seen[0].body)["stream"] == false);
}

TEST_CASE("unreachable endpoint is a transport error") {
    int port;
    {
        httplib::Server probe;
        port = probe.bind_to_any_port("127.0.0.1");
    }
    LocalServerBackend backend("http://127.0.0.1:" + std::to_string(port), std::chrono::seconds(2));
    CHECK_THROWS_AS(backend.complete("p", 0, "m"), TransportError);
    CHECK_THROWS_AS(LocalServerBackend("localhost:11434"), ConfigError);
}

TEST_CASE("split_endpoint") {
    auto ep = split_endpoint("https://api.example.com/v1/");
    CHECK(ep.scheme_host_port == "https://api.example.com");
    CHECK(ep.path_prefix == "/v1");
    CHECK(split_endpoint("http://localhost:11434").path_prefix.empty());
}

TEST_CASE("utf-8 validation") {
    CHECK(is_valid_utf8("plain"));
    CHECK(is_valid_utf8("caf\xc3\xa9 \xe2\x80\x94 \xf0\x9f\x98\x80"));
    CHECK_FALSE(is_valid_utf8("\xc3"));
    CHECK_FALSE(is_valid_utf8("\xc0\xaf"));
    CHECK_FALSE(is_valid_utf8("\xed\xa0\x80"));
    CHECK_FALSE(is_valid_utf8("\xff"));
}

TEST_CASE("replay backend") {
    Cassette c;
    c.append(kKindEssay, "e1",
             {{"model_id", "m"}, {"prompt", "P"}, {"temperature", 0.5}, {"response", "verbatim \n text"}});
    ReplayBackend replay(c);
    CHECK(replay.complete("P", 0.5, "m").text == "verbatim \n text");
    CHECK_THROWS_AS(replay.complete("P", 0.25, "m"), ReplayMissError);
    CHECK_THROWS_AS(replay.complete("P", 0.5, "other"), ReplayMissError);
    try {
        replay.complete("Q", 0.5, "m");
        FAIL("expected ReplayMissError");
    } catch (const ReplayMissError& e) {
        CHECK(e.record_id() == ReplayBackend::exchange_key("m", "Q", 0.5));
    }
}

TEST_CASE("fault injection is deterministic and close to the fraction") {
    auto inner = std::make_shared<fakes::Scripted>([](std::string_view, int) { return std::string("fine"); });
    FaultInjectingBackend faulty(inner, 0.1, "seed-1");
    int failed = 0;
    for (int i = 0; i < 2000; ++i) {
        auto prompt = "prompt " + std::to_string(i);
        bool expect = faulty.should_fail(prompt);
        failed += expect;
        if (expect)
            CHECK_THROWS_AS(faulty.complete(prompt, 0, "m"), TransportError);
        else
            CHECK(faulty.complete(prompt, 0, "m").text == "fine");
        CHECK(FaultInjectingBackend(inner, 0.1, "seed-1").should_fail(prompt) == expect);
    }
    CHECK(failed > 140);
    CHECK(failed < 260);
    FaultInjectingBackend never(inner, 0.0, "s");
    CHECK_FALSE(never.should_fail("anything"));
}
