#pragma once

#include <stdexcept>
#include <string>

namespace tcs {

/// Base of every error the toolkit raises on bad input or violated
/// preconditions. Callers that only need a diagnostic catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::string path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path))
    {
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class PreconditionViolated : public Error {
public:
    using Error::Error;
};

class ReplicationExceeded : public Error {
public:
    ReplicationExceeded(const std::string& stage, long long k, long long k_max)
        : Error("stage " + stage + " needs " + std::to_string(k) + " replicas (limit " +
                std::to_string(k_max) + ")"),
          stage_(stage)
    {
    }
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

class AllocationFailed : public Error {
public:
    explicit AllocationFailed(const std::string& stage)
        : Error("no core can host stage " + stage), stage_(stage)
    {
    }
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

class InvalidAllocation : public Error {
public:
    using Error::Error;
};

class MissingStage : public Error {
public:
    explicit MissingStage(const std::string& stage)
        : Error("no response time for stage " + stage), stage_(stage)
    {
    }
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

class MissingParam : public Error {
public:
    using Error::Error;
};

class HorizonTooShort : public Error {
public:
    using Error::Error;
};

} // namespace tcs
