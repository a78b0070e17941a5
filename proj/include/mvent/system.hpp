#ifndef MVENT_SYSTEM_HPP
#define MVENT_SYSTEM_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "mvent/element.hpp"
#include "mvent/errors.hpp"
#include "mvent/numeric.hpp"
#include "mvent/space.hpp"

namespace mvent {

/**
 * The state m(f) = sum_w f(w) P(w): expectation of a fuzzy event under the
 * point weights.  Additive on partial sums and maps the unit to one.
 */
template <class S>
class StateM {
  public:
    explicit StateM(SpacePtr<S> space) : space_(std::move(space)) {
        if (!space_) throw InvariantViolationError("state without a space");
    }

    const SpacePtr<S>& space() const { return space_; }

    S mass(const MvElement<S>& f) const {
        require_same_space(space_, f.space());
        S total = NumTraits<S>::zero();
        for (std::size_t i = 0; i < f.size(); ++i) total += f[i] * space_->weight(i);
        return total;
    }

    S operator()(const MvElement<S>& f) const { return mass(f); }

  private:
    SpacePtr<S> space_;
};

/**
 * The operator f -> f o T induced by a measure-preserving point map T.
 * T is stored as image indices: point i maps to point_map[i].
 *
 * Measure preservation is checked as pushforward equality: for every point j,
 * sum of weights of its preimage equals the weight of j.
 */
template <class S>
class TransformationTau {
  public:
    TransformationTau(SpacePtr<S> space, std::vector<std::size_t> point_map)
        : space_(std::move(space)), map_(std::move(point_map)) {
        if (!space_) throw InvariantViolationError("transformation without a space");
        if (map_.size() != space_->size())
            throw InvariantViolationError("point map length does not match space size");
        for (std::size_t img : map_)
            if (img >= space_->size())
                throw InvariantViolationError("point map image out of range");
        std::vector<S> push(space_->size(), NumTraits<S>::zero());
        for (std::size_t i = 0; i < map_.size(); ++i) push[map_[i]] += space_->weight(i);
        const double tol = space_->tolerance();
        for (std::size_t j = 0; j < push.size(); ++j)
            if (!NumTraits<S>::eq(push[j], space_->weight(j), tol))
                throw InvariantViolationError("point map does not preserve the weights (point '" +
                                              space_->id(j) + "')");
    }

    const SpacePtr<S>& space() const { return space_; }
    const std::vector<std::size_t>& point_map() const { return map_; }

    /** (tau f)(w) = f(T w). */
    MvElement<S> apply(const MvElement<S>& f) const {
        require_same_space(space_, f.space());
        std::vector<S> v;
        v.reserve(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) v.push_back(f[map_[i]]);
        return MvElement<S>(f.space(), std::move(v));
    }

    MvElement<S> operator()(const MvElement<S>& f) const { return apply(f); }

    /** Composition of the point map with itself, n >= 0 times. */
    std::vector<std::size_t> iterated_map(std::size_t n) const {
        std::vector<std::size_t> cur(map_.size());
        for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = i;
        for (std::size_t step = 0; step < n; ++step)
            for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = map_[cur[i]];
        return cur;
    }

  private:
    SpacePtr<S> space_;
    std::vector<std::size_t> map_;
};

/** A finite space, its state, and a measure-preserving dynamics, bundled. */
template <class S>
struct DynamicalSystem {
    SpacePtr<S> space;
    StateM<S> state;
    TransformationTau<S> tau;

    DynamicalSystem(SpacePtr<S> sp, std::vector<std::size_t> point_map)
        : space(sp), state(sp), tau(sp, std::move(point_map)) {}
};

}  // namespace mvent

#endif
