#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace overton {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input files, manifests and instruments.
class ConfigError : public Error {
public:
    using Error::Error;
};

class InstrumentError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Backend failures. `retryable()` decides whether the retry loop tries again.
class BackendError : public Error {
public:
    using Error::Error;
    virtual bool retryable() const { return false; }
};

class TransportError : public BackendError {
public:
    using BackendError::BackendError;
    bool retryable() const override { return true; }
};

class RateLimitError : public BackendError {
public:
    using BackendError::BackendError;
    bool retryable() const override { return true; }
};

class AuthError : public BackendError {
public:
    using BackendError::BackendError;
};

class MalformedResponseError : public BackendError {
public:
    using BackendError::BackendError;
};

/// Raised in replay-strict mode when the cassette lacks a required record.
class ReplayMissError : public Error {
public:
    explicit ReplayMissError(std::string record_id)
        : Error("replay miss: no cassette entry for record " + record_id),
          record_id_(std::move(record_id)) {}
    const std::string& record_id() const noexcept { return record_id_; }

private:
    std::string record_id_;
};

/// Assessor output that carries no recognisable label.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string raw) : Error(what), raw_(std::move(raw)) {}
    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

/// An axis without a single answered proposition has no defined position.
class UndefinedPositionError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

/// Gold-set ids that have no matching assessment.
class MissingAssessmentError : public Error {
public:
    explicit MissingAssessmentError(std::vector<std::string> ids);
    const std::vector<std::string>& missing_ids() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
};

}  // namespace overton
