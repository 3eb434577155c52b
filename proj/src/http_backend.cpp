#include <chrono>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "overton/backend.hpp"
#include "overton/errors.hpp"

namespace overton {

using nlohmann::json;

namespace {

// Maps an HTTP status onto the backend error taxonomy.
void raise_for_status(int status, const std::string& body, const std::string& who) {
    auto snippet = body.substr(0, 200);
    if (status == 401 || status == 403)
        throw AuthError(who + ": authentication failed (HTTP " + std::to_string(status) + ")");
    if (status == 429) throw RateLimitError(who + ": rate limited (HTTP 429)");
    if (status == 408 || status >= 500)
        throw TransportError(who + ": server error HTTP " + std::to_string(status) + ": " + snippet);
    if (status != 200)
        throw BackendError(who + ": request rejected HTTP " + std::to_string(status) + ": " +
                           snippet);
}

httplib::Result post_json(const std::string& who, const Endpoint& ep, const std::string& path,
                          const json& body, const httplib::Headers& headers,
                          std::chrono::seconds timeout) {
    httplib::Client client(ep.scheme_host_port);
    client.set_connection_timeout(std::chrono::seconds(30));
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(ep.path_prefix + path, headers, body.dump(), "application/json");
    if (!res)
        throw TransportError(who + ": transport failure: " + httplib::to_string(res.error()));
    return res;
}

json parse_body(const std::string& who, const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error&) {
        throw MalformedResponseError(who + ": response is not JSON");
    }
}

std::string checked_text(const std::string& who, const json& node) {
    if (!node.is_string()) throw MalformedResponseError(who + ": response carries no text content");
    auto text = node.get<std::string>();
    if (!is_valid_utf8(text)) throw MalformedResponseError(who + ": response is not valid UTF-8");
    return text;
}

std::optional<int> optional_int(const json& obj, const char* key) {
    if (obj.is_object() && obj.contains(key) && obj[key].is_number_integer()) return obj[key].get<int>();
    return std::nullopt;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ChatCompletionsBackend::ChatCompletionsBackend(std::string endpoint, std::string api_key,
                                               std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), timeout_(timeout) {
    split_endpoint(endpoint_);
}

Completion ChatCompletionsBackend::complete(std::string_view prompt, double temperature,
                                            const std::string& model_id) {
    const std::string who = "chat-completions[" + model_id + "]";
    json body = {{"model", model_id},
                 {"temperature", temperature},
                 {"messages", json::array({{{"role", "user"}, {"content", std::string(prompt)}}})}};
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto start = std::chrono::steady_clock::now();
    auto res = post_json(who, split_endpoint(endpoint_), "/chat/completions", body, headers, timeout_);
    raise_for_status(res->status, res->body, who);
    auto doc = parse_body(who, res->body);

    if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty())
        throw MalformedResponseError(who + ": response has no choices");
    const auto& message = doc["choices"][0].value("message", json::object());
    Completion out;
    out.text = checked_text(who, message.value("content", json()));
    out.latency_ms = elapsed_ms(start);
    const auto usage = doc.value("usage", json::object());
    out.prompt_tokens = optional_int(usage, "prompt_tokens");
    out.completion_tokens = optional_int(usage, "completion_tokens");
    return out;
}

LocalServerBackend::LocalServerBackend(std::string endpoint, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
    split_endpoint(endpoint_);
}

Completion LocalServerBackend::complete(std::string_view prompt, double temperature,
                                        const std::string& model_id) {
    const std::string who = "local-server[" + model_id + "]";
    json body = {{"model", model_id},
                 {"stream", false},
                 {"options", {{"temperature", temperature}}},
                 {"messages", json::array({{{"role", "user"}, {"content", std::string(prompt)}}})}};

    auto start = std::chrono::steady_clock::now();
    auto res = post_json(who, split_endpoint(endpoint_), "/api/chat", body, {}, timeout_);
    raise_for_status(res->status, res->body, who);
    auto doc = parse_body(who, res->body);
    if (!doc.is_object() || !doc.contains("message") || !doc["message"].is_object())
        throw MalformedResponseError(who + ": response has no message");

    Completion out;
    out.text = checked_text(who, doc["message"].value("content", json()));
    out.latency_ms = elapsed_ms(start);
    out.prompt_tokens = optional_int(doc, "prompt_eval_count");
    out.completion_tokens = optional_int(doc, "eval_count");
    return out;
}

}  // namespace overton
