#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace overton {

class Cassette;

struct Completion {
    std::string text;
    std::optional<double> latency_ms;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
};

/// A text-completion provider. Implementations must be safe to call from
/// several threads at once.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;

    /// Full text response. Throws a BackendError subclass on failure;
    /// `retryable()` on the error decides whether the caller retries.
    virtual Completion complete(std::string_view prompt, double temperature,
                                const std::string& model_id) = 0;

    virtual std::string kind() const = 0;

    /// True when responses and timing carry no wall-clock dependence, so
    /// records can be written with a fixed timestamp.
    virtual bool deterministic() const { return false; }
};

struct RetryPolicy {
    int max_retries = 2;
    std::chrono::milliseconds base_delay{0};
};

/// Calls `backend` at most 1 + max_retries times. Non-retryable errors are
/// rethrown immediately; the last retryable error is rethrown when the budget
/// runs out. `attempts` (if given) receives the number of calls made.
Completion complete_with_retry(ModelBackend& backend, std::string_view prompt, double temperature,
                               const std::string& model_id, const RetryPolicy& policy,
                               int* attempts = nullptr);

/// OpenAI-style chat-completions endpoint, e.g. "https://api.openai.com/v1".
class ChatCompletionsBackend : public ModelBackend {
public:
    ChatCompletionsBackend(std::string endpoint, std::string api_key,
                           std::chrono::seconds timeout = std::chrono::seconds(120));
    Completion complete(std::string_view prompt, double temperature,
                        const std::string& model_id) override;
    std::string kind() const override { return "chat-completions"; }

private:
    std::string endpoint_;
    std::string api_key_;
    std::chrono::seconds timeout_;
};

/// Local model server speaking the Ollama /api/chat protocol.
class LocalServerBackend : public ModelBackend {
public:
    explicit LocalServerBackend(std::string endpoint,
                                std::chrono::seconds timeout = std::chrono::seconds(600));
    Completion complete(std::string_view prompt, double temperature,
                        const std::string& model_id) override;
    std::string kind() const override { return "local-server"; }

private:
    std::string endpoint_;
    std::chrono::seconds timeout_;
};

/// Serves responses from a cassette, keyed by (model, prompt, temperature).
/// Never performs live calls; a miss raises ReplayMissError.
class ReplayBackend : public ModelBackend {
public:
    explicit ReplayBackend(const Cassette& cassette);
    Completion complete(std::string_view prompt, double temperature,
                        const std::string& model_id) override;
    std::string kind() const override { return "replay"; }
    bool deterministic() const override { return true; }

    static std::string exchange_key(const std::string& model_id, std::string_view prompt,
                                    double temperature);

private:
    std::map<std::string, std::string> responses_;
};

/// Wraps another backend and fails a fixed, seed-determined fraction of
/// prompts with a TransportError on every attempt.
class FaultInjectingBackend : public ModelBackend {
public:
    FaultInjectingBackend(std::shared_ptr<ModelBackend> inner, double fraction, std::string seed);
    Completion complete(std::string_view prompt, double temperature,
                        const std::string& model_id) override;
    std::string kind() const override { return inner_->kind(); }
    bool deterministic() const override { return inner_->deterministic(); }

    bool should_fail(std::string_view prompt) const;

private:
    std::shared_ptr<ModelBackend> inner_;
    double fraction_;
    std::string seed_;
};

struct Endpoint {
    std::string scheme_host_port;  // "https://api.example.com:443"
    std::string path_prefix;       // "/v1" or ""
};

Endpoint split_endpoint(const std::string& url);

/// True when `s` is well-formed UTF-8.
bool is_valid_utf8(std::string_view s);

}  // namespace overton
