#pragma once

#include <stdexcept>
#include <string>

namespace jumpgop {

// Base for all domain-level failures (as opposed to malformed input).
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Volatility matrix too close to singular for a reliable solve.
struct IllConditionedError : ModelError {
    IllConditionedError(double cond, int piece)
        : ModelError("volatility matrix ill-conditioned (cond=" + std::to_string(cond) +
                     ") on piece " + std::to_string(piece)),
          condition_number(cond),
          piece(piece) {}
    double condition_number;
    int piece;
};

// Market price of jump risk reaches or exceeds sqrt(lambda): no optimal
// growth rate exists in the unconstrained market.
struct NoGopError : ModelError {
    NoGopError(int component, int piece)
        : ModelError("no growth-optimal portfolio: jump component " + std::to_string(component) +
                     " on piece " + std::to_string(piece) +
                     " has market price of risk >= sqrt(lambda)"),
          component(component),
          piece(piece) {}
    int component;
    int piece;
};

struct InadmissibleVolatilityError : ModelError {
    using ModelError::ModelError;
};

struct InadmissibleStrategyError : ModelError {
    using ModelError::ModelError;
};

// Jump-volatility cap requested for a market shape it is not defined for.
struct UnsupportedConstraintError : ModelError {
    using ModelError::ModelError;
};

// Near-boundary regime needs more paths than requested for a usable estimate.
struct HighVarianceError : ModelError {
    using ModelError::ModelError;
};

// Malformed market spec / scenario input.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace jumpgop
