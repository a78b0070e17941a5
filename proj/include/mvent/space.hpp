#ifndef MVENT_SPACE_HPP
#define MVENT_SPACE_HPP

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mvent/errors.hpp"
#include "mvent/numeric.hpp"

namespace mvent {

/**
 * A finite probability space: named points with nonnegative weights summing
 * to one.  Immutable after construction; shared by elements, partitions and
 * transformations built on it.
 *
 * Two spaces are "the same" if they are the same object or structurally
 * identical (same ids, same weights).  Mixing values across different spaces
 * throws SpaceMismatchError.
 */
template <class S>
class FiniteSpace {
  public:
    FiniteSpace(std::vector<std::string> point_ids, std::vector<S> weights, double tolerance = 1e-9)
        : ids_(std::move(point_ids)), weights_(std::move(weights)), tol_(tolerance) {
        if (ids_.empty()) throw InvariantViolationError("space needs at least one point");
        if (ids_.size() != weights_.size())
            throw InvariantViolationError("point ids and weights differ in length");
        std::set<std::string> seen(ids_.begin(), ids_.end());
        if (seen.size() != ids_.size())
            throw InvariantViolationError("duplicate point id in space");
        S total = NumTraits<S>::zero();
        for (const S& w : weights_) {
            if (!NumTraits<S>::leq(NumTraits<S>::zero(), w, tol_))
                throw InvariantViolationError("negative point weight");
            total += w;
        }
        if (!NumTraits<S>::eq(total, NumTraits<S>::one(), tol_))
            throw InvariantViolationError("point weights must sum to one");
    }

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& id(std::size_t i) const { return ids_[i]; }
    const std::vector<S>& weights() const { return weights_; }
    const S& weight(std::size_t i) const { return weights_[i]; }
    double tolerance() const { return tol_; }

    bool same_as(const FiniteSpace& other) const {
        if (this == &other) return true;
        return ids_ == other.ids_ && weights_ == other.weights_;
    }

  private:
    std::vector<std::string> ids_;
    std::vector<S> weights_;
    double tol_;
};

template <class S>
using SpacePtr = std::shared_ptr<const FiniteSpace<S>>;

template <class S>
SpacePtr<S> make_space(std::vector<std::string> ids, std::vector<S> weights,
                       double tolerance = 1e-9) {
    return std::make_shared<const FiniteSpace<S>>(std::move(ids), std::move(weights), tolerance);
}

template <class S>
void require_same_space(const SpacePtr<S>& a, const SpacePtr<S>& b) {
    if (!a || !b) throw SpaceMismatchError("missing space");
    if (a == b) return;
    if (!a->same_as(*b)) throw SpaceMismatchError();
}

}  // namespace mvent

#endif
