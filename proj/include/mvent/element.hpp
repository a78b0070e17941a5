#ifndef MVENT_ELEMENT_HPP
#define MVENT_ELEMENT_HPP

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "mvent/errors.hpp"
#include "mvent/numeric.hpp"
#include "mvent/space.hpp"

namespace mvent {

/**
 * A fuzzy event: a function from the points of a finite space into [0, 1].
 * These are the elements of the MV-algebra of [0,1]-valued functions; the
 * algebra operations below act pointwise.
 */
template <class S>
class MvElement {
  public:
    MvElement(SpacePtr<S> space, std::vector<S> values)
        : space_(std::move(space)), values_(std::move(values)) {
        if (!space_) throw InvariantViolationError("element without a space");
        if (values_.size() != space_->size())
            throw InvariantViolationError("element length does not match space size");
        const double tol = space_->tolerance();
        for (S& v : values_) {
            if (!NumTraits<S>::leq(NumTraits<S>::zero(), v, tol) ||
                !NumTraits<S>::leq(v, NumTraits<S>::one(), tol))
                throw DomainError("element value outside [0, 1]");
            if constexpr (!NumTraits<S>::is_exact) {
                // values that pass only by tolerance are clamped back into range
                v = std::min(1.0, std::max(0.0, v));
            }
        }
    }

    static MvElement zero(const SpacePtr<S>& space) {
        return MvElement(space, std::vector<S>(space->size(), NumTraits<S>::zero()));
    }
    static MvElement unit(const SpacePtr<S>& space) {
        return MvElement(space, std::vector<S>(space->size(), NumTraits<S>::one()));
    }
    static MvElement constant(const SpacePtr<S>& space, const S& c) {
        return MvElement(space, std::vector<S>(space->size(), c));
    }
    /** Crisp indicator of a set of point indices. */
    static MvElement indicator(const SpacePtr<S>& space, const std::vector<std::size_t>& points) {
        std::vector<S> v(space->size(), NumTraits<S>::zero());
        for (std::size_t p : points) {
            if (p >= space->size()) throw DomainError("indicator point out of range");
            v[p] = NumTraits<S>::one();
        }
        return MvElement(space, std::move(v));
    }

    const SpacePtr<S>& space() const { return space_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<S>& values() const { return values_; }
    const S& operator[](std::size_t i) const { return values_[i]; }

    bool same_values(const MvElement& other) const {
        const double tol = space_->tolerance();
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!NumTraits<S>::eq(values_[i], other.values_[i], tol)) return false;
        return true;
    }

    /** True when every value is 0 or 1 (a crisp, set-like event). */
    bool is_idempotent() const {
        const double tol = space_->tolerance();
        for (const S& v : values_)
            if (!NumTraits<S>::is_zero(v, tol) && !NumTraits<S>::eq(v, NumTraits<S>::one(), tol))
                return false;
        return true;
    }

  private:
    SpacePtr<S> space_;
    std::vector<S> values_;
};

namespace detail {
template <class S>
void check_pair(const MvElement<S>& a, const MvElement<S>& b) {
    require_same_space(a.space(), b.space());
}
}  // namespace detail

/** Complement: (neg a)(w) = 1 - a(w). */
template <class S>
MvElement<S> mv_neg(const MvElement<S>& a) {
    std::vector<S> v;
    v.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v.push_back(NumTraits<S>::one() - a[i]);
    return MvElement<S>(a.space(), std::move(v));
}

/** Truncated sum: (a oplus b)(w) = min(1, a(w) + b(w)). */
template <class S>
MvElement<S> mv_oplus(const MvElement<S>& a, const MvElement<S>& b) {
    detail::check_pair(a, b);
    std::vector<S> v;
    v.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        S s = a[i] + b[i];
        v.push_back(std::min(s, NumTraits<S>::one()));
    }
    return MvElement<S>(a.space(), std::move(v));
}

/** Truncated product: (a odot b)(w) = max(0, a(w) + b(w) - 1). */
template <class S>
MvElement<S> mv_odot(const MvElement<S>& a, const MvElement<S>& b) {
    detail::check_pair(a, b);
    std::vector<S> v;
    v.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        S s = a[i] + b[i] - NumTraits<S>::one();
        v.push_back(std::max(s, NumTraits<S>::zero()));
    }
    return MvElement<S>(a.space(), std::move(v));
}

/** Pointwise minimum (lattice meet). */
template <class S>
MvElement<S> mv_meet(const MvElement<S>& a, const MvElement<S>& b) {
    detail::check_pair(a, b);
    std::vector<S> v;
    v.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v.push_back(std::min(a[i], b[i]));
    return MvElement<S>(a.space(), std::move(v));
}

/** Pointwise maximum (lattice join). */
template <class S>
MvElement<S> mv_join(const MvElement<S>& a, const MvElement<S>& b) {
    detail::check_pair(a, b);
    std::vector<S> v;
    v.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v.push_back(std::max(a[i], b[i]));
    return MvElement<S>(a.space(), std::move(v));
}

/** Pointwise ordinary product (a.b)(w) = a(w) * b(w). */
template <class S>
MvElement<S> mv_product(const MvElement<S>& a, const MvElement<S>& b) {
    detail::check_pair(a, b);
    std::vector<S> v;
    v.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v.push_back(a[i] * b[i]);
    return MvElement<S>(a.space(), std::move(v));
}

/**
 * Partial ordinary sum, defined only when a + b stays below the unit
 * pointwise.  Throws SumExceedsUnitError naming the first offending point.
 */
template <class S>
MvElement<S> partial_add(const MvElement<S>& a, const MvElement<S>& b) {
    detail::check_pair(a, b);
    const double tol = a.space()->tolerance();
    std::vector<S> v;
    v.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        S s = a[i] + b[i];
        if (!NumTraits<S>::leq(s, NumTraits<S>::one(), tol))
            throw SumExceedsUnitError(i, a.space()->id(i));
        if constexpr (!NumTraits<S>::is_exact) s = std::min(s, 1.0);
        v.push_back(std::move(s));
    }
    return MvElement<S>(a.space(), std::move(v));
}

/** Pointwise difference a - b, defined when b <= a pointwise. */
template <class S>
MvElement<S> partial_sub(const MvElement<S>& a, const MvElement<S>& b) {
    detail::check_pair(a, b);
    const double tol = a.space()->tolerance();
    std::vector<S> v;
    v.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!NumTraits<S>::leq(b[i], a[i], tol))
            throw PreconditionError("difference would be negative at point " +
                                    a.space()->id(i));
        S d = a[i] - b[i];
        if constexpr (!NumTraits<S>::is_exact) d = std::max(d, 0.0);
        v.push_back(std::move(d));
    }
    return MvElement<S>(a.space(), std::move(v));
}

/**
 * Riesz-style decomposition: given a <= b + c pointwise, split a into
 * d + e with d <= b and e <= c.  Takes d = min(a, b) and e = a - d.
 */
template <class S>
std::pair<MvElement<S>, MvElement<S>> riesz_decompose(const MvElement<S>& a,
                                                      const MvElement<S>& b,
                                                      const MvElement<S>& c) {
    detail::check_pair(a, b);
    detail::check_pair(a, c);
    const double tol = a.space()->tolerance();
    for (std::size_t i = 0; i < a.size(); ++i) {
        S bound = b[i] + c[i];
        if (!NumTraits<S>::leq(a[i], bound, tol))
            throw PreconditionError("decomposition needs a <= b + c, violated at point " +
                                    a.space()->id(i));
    }
    MvElement<S> d = mv_meet(a, b);
    MvElement<S> e = partial_sub(a, d);
    return {std::move(d), std::move(e)};
}

}  // namespace mvent

#endif
