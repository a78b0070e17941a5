#ifndef MVENT_PARTITION_HPP
#define MVENT_PARTITION_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mvent/element.hpp"
#include "mvent/errors.hpp"
#include "mvent/system.hpp"

namespace mvent {

/**
 * A partition of unity: finitely many fuzzy events that sum to the constant
 * one function pointwise.  Crisp set partitions are the special case where
 * every value is 0 or 1.
 */
template <class S>
class Partition {
  public:
    Partition(SpacePtr<S> space, std::vector<MvElement<S>> elements)
        : space_(std::move(space)), elements_(std::move(elements)) {
        if (!space_) throw InvariantViolationError("partition without a space");
        if (elements_.empty()) throw InvariantViolationError("partition needs at least one element");
        const double tol = space_->tolerance();
        for (const auto& e : elements_) require_same_space(space_, e.space());
        for (std::size_t w = 0; w < space_->size(); ++w) {
            S total = NumTraits<S>::zero();
            for (const auto& e : elements_) total += e[w];
            if (!NumTraits<S>::eq(total, NumTraits<S>::one(), tol))
                throw InvariantViolationError("partition does not sum to the unit at point '" +
                                              space_->id(w) + "'");
        }
    }

    /** The one-element partition {u}. */
    static Partition trivial(const SpacePtr<S>& space) {
        return Partition(space, {MvElement<S>::unit(space)});
    }

    /** Crisp partition from disjoint covering blocks of point indices. */
    static Partition from_blocks(const SpacePtr<S>& space,
                                 const std::vector<std::vector<std::size_t>>& blocks) {
        std::vector<MvElement<S>> elems;
        elems.reserve(blocks.size());
        for (const auto& b : blocks) elems.push_back(MvElement<S>::indicator(space, b));
        return Partition(space, std::move(elems));
    }

    const SpacePtr<S>& space() const { return space_; }
    std::size_t size() const { return elements_.size(); }
    const MvElement<S>& operator[](std::size_t i) const { return elements_[i]; }
    const std::vector<MvElement<S>>& elements() const { return elements_; }

    bool is_crisp() const {
        for (const auto& e : elements_)
            if (!e.is_idempotent()) return false;
        return true;
    }

    std::vector<S> masses(const StateM<S>& m) const {
        std::vector<S> out;
        out.reserve(elements_.size());
        for (const auto& e : elements_) out.push_back(m.mass(e));
        return out;
    }

  private:
    SpacePtr<S> space_;
    std::vector<MvElement<S>> elements_;
};

/** Image partition tau A = { f o T : f in A }; stays a partition of unity. */
template <class S>
Partition<S> tau_partition(const TransformationTau<S>& tau, const Partition<S>& a) {
    std::vector<MvElement<S>> elems;
    elems.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) elems.push_back(tau.apply(a[i]));
    return Partition<S>(a.space(), std::move(elems));
}

}  // namespace mvent

#endif
