#ifndef MVENT_ERRORS_HPP
#define MVENT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvent {

/** Base class for all library errors. */
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/** Two values from structurally different finite spaces were combined. */
class SpaceMismatchError : public Error {
  public:
    explicit SpaceMismatchError(const std::string& what = "elements belong to different spaces")
        : Error(what) {}
};

/** The partial MV-sum a + b exceeded the unit at some point. */
class SumExceedsUnitError : public Error {
  public:
    SumExceedsUnitError(std::size_t point, const std::string& point_id)
        : Error("sum exceeds unit at point " + std::to_string(point) + " ('" + point_id + "')"),
          point_index(point) {}
    std::size_t point_index;
};

/** An operation precondition failed (e.g. Riesz decomposition bound). */
class PreconditionError : public Error {
  public:
    explicit PreconditionError(const std::string& what) : Error(what) {}
};

/** A structural invariant does not hold (weights, partition sums, marginals...). */
class InvariantViolationError : public Error {
  public:
    explicit InvariantViolationError(const std::string& what) : Error(what) {}
};

/** A value is outside the domain of a numeric map (phi, probabilities). */
class DomainError : public Error {
  public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/** An exact computation would exceed the configured enumeration budget. */
class BudgetExceededError : public Error {
  public:
    explicit BudgetExceededError(const std::string& what) : Error(what) {}
};

/** A claimed isomorphism fails bijectivity, weight preservation or commutation. */
class IsomorphismError : public Error {
  public:
    explicit IsomorphismError(const std::string& what) : Error(what) {}
};

/** Malformed or inconsistent configuration input. */
class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace mvent

#endif
