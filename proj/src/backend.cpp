#include "overton/backend.hpp"

#include <thread>

#include <nlohmann/json.hpp>

#include "overton/cassette.hpp"
#include "overton/errors.hpp"
#include "overton/hashing.hpp"

namespace overton {

using nlohmann::json;

Completion complete_with_retry(ModelBackend& backend, std::string_view prompt, double temperature,
                               const std::string& model_id, const RetryPolicy& policy,
                               int* attempts) {
    const int budget = 1 + std::max(0, policy.max_retries);
    for (int attempt = 1;; ++attempt) {
        if (attempts) *attempts = attempt;
        try {
            return backend.complete(prompt, temperature, model_id);
        } catch (const BackendError& e) {
            if (!e.retryable() || attempt >= budget) throw;
        }
        if (policy.base_delay.count() > 0)
            std::this_thread::sleep_for(policy.base_delay * (1 << std::min(attempt - 1, 10)));
    }
}

bool is_valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k) {
            auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates, out of range
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
            return false;
        i += len;
    }
    return true;
}

ReplayBackend::ReplayBackend(const Cassette& cassette) {
    for (const auto& e : cassette.entries()) {
        if (e.kind == kKindEssay) {
            const auto& p = e.payload;
            responses_.emplace(exchange_key(p.at("model_id"), p.at("prompt").get<std::string>(),
                                            p.at("temperature").get<double>()),
                               p.at("response").get<std::string>());
        } else if (e.kind == kKindAssessment) {
            const auto& p = e.payload;
            responses_.emplace(
                exchange_key(p.at("assessor_model_id"), p.at("prompt").get<std::string>(),
                             p.at("temperature").get<double>()),
                p.at("raw_response").get<std::string>());
        }
    }
}

std::string ReplayBackend::exchange_key(const std::string& model_id, std::string_view prompt,
                                        double temperature) {
    return hash_fields({"exchange", model_id, prompt, canonical_double(temperature)});
}

Completion ReplayBackend::complete(std::string_view prompt, double temperature,
                                   const std::string& model_id) {
    auto key = exchange_key(model_id, prompt, temperature);
    auto it = responses_.find(key);
    if (it == responses_.end()) throw ReplayMissError(key);
    return Completion{it->second, std::nullopt, std::nullopt, std::nullopt};
}

FaultInjectingBackend::FaultInjectingBackend(std::shared_ptr<ModelBackend> inner, double fraction,
                                             std::string seed)
    : inner_(std::move(inner)), fraction_(fraction), seed_(std::move(seed)) {}

bool FaultInjectingBackend::should_fail(std::string_view prompt) const {
    auto h = hash_fields({"fault", seed_, prompt});
    auto bucket = std::stoull(h.substr(0, 12), nullptr, 16);
    return static_cast<double>(bucket) / static_cast<double>(1ULL << 48) < fraction_;
}

Completion FaultInjectingBackend::complete(std::string_view prompt, double temperature,
                                           const std::string& model_id) {
    if (should_fail(prompt)) throw TransportError("injected transport fault");
    return inner_->complete(prompt, temperature, model_id);
}

Endpoint split_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("endpoint must include a scheme (http:// or https://): " + url);
    auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    ep.scheme_host_port = url.substr(0, path_start);
    if (path_start != std::string::npos) ep.path_prefix = url.substr(path_start);
    while (!ep.path_prefix.empty() && ep.path_prefix.back() == '/') ep.path_prefix.pop_back();
    return ep;
}

}  // namespace overton
