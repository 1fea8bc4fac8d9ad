#pragma once

#include <stdexcept>
#include <string>

namespace finsim {

// Bad scenario / CLI input. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A simulator self-check failed. The CLI maps this to exit code 3.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& msg) : std::logic_error(msg) {}
};

// Domain preconditions. These are contract violations by the caller, not
// outcomes: aborted transactions, rejected proposals and the like are values.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

class UnresolvableName : public DomainError {
public:
    using DomainError::DomainError;
};

class PositionOutOfRange : public DomainError {
public:
    using DomainError::DomainError;
};

class UnsupportedMode : public DomainError {
public:
    using DomainError::DomainError;
};

class NotFrontRunnable : public DomainError {
public:
    using DomainError::DomainError;
};

class InfeasibleCommittee : public DomainError {
public:
    using DomainError::DomainError;
};

class NoResolution : public DomainError {
public:
    using DomainError::DomainError;
};

class PrematureCheckpoint : public DomainError {
public:
    using DomainError::DomainError;
};

class UnfinalizedCandidate : public DomainError {
public:
    using DomainError::DomainError;
};

class RecordsUnavailable : public DomainError {
public:
    using DomainError::DomainError;
};

class InfeasibleParams : public DomainError {
public:
    using DomainError::DomainError;
};

} // namespace finsim
