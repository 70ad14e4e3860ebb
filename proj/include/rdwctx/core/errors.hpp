#pragma once

#include <stdexcept>
#include <string>

namespace rdwctx {

/// Invalid or inconsistent configuration (maps to CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Caller broke a precondition: dimension mismatch, wrong variant, etc.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// Simulator invariant broken at run time. Carries a state dump in what().
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Training diverged (NaN loss) or could not proceed.
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg)
{
    if (!cond)
        throw ContractViolation(msg);
}

} // namespace rdwctx
