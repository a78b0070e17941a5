#ifndef MVENT_TENSOR_HPP
#define MVENT_TENSOR_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mvent/entropy.hpp"
#include "mvent/errors.hpp"
#include "mvent/partition.hpp"

namespace mvent {

namespace detail {

inline std::vector<std::size_t> row_major_strides(const std::vector<std::size_t>& shape) {
    std::vector<std::size_t> strides(shape.size(), 1);
    for (std::size_t t = shape.size(); t-- > 1;) strides[t - 1] = strides[t] * shape[t];
    return strides;
}

inline std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t k : shape) n *= k;
    return n;
}

/** Step a row-major multi-index; returns false after the last one. */
inline bool next_multi_index(std::vector<std::size_t>& idx, const std::vector<std::size_t>& shape) {
    for (std::size_t t = idx.size(); t-- > 0;) {
        if (++idx[t] < shape[t]) return true;
        idx[t] = 0;
    }
    return false;
}

}  // namespace detail

/**
 * A common refinement of several partitions, laid out as a tensor of fuzzy
 * events: one axis per refined partition, and for every axis t and index i
 * the slice sum over the remaining axes equals the i-th element of the t-th
 * partition, pointwise.  Cells are stored row-major with the last axis
 * running fastest.
 */
template <class S>
class RefinementTensor {
  public:
    RefinementTensor(std::vector<Partition<S>> axes, std::vector<MvElement<S>> cells)
        : axes_(std::move(axes)), cells_(std::move(cells)) {
        if (axes_.empty()) throw InvariantViolationError("refinement tensor needs at least one axis");
        space_ = axes_.front().space();
        for (const auto& p : axes_) require_same_space(space_, p.space());
        for (const auto& c : cells_) require_same_space(space_, c.space());
        shape_.reserve(axes_.size());
        for (const auto& p : axes_) shape_.push_back(p.size());
        strides_ = detail::row_major_strides(shape_);
        if (cells_.size() != detail::shape_product(shape_))
            throw InvariantViolationError("cell count does not match tensor shape");
        check_marginals();
    }

    const SpacePtr<S>& space() const { return space_; }
    const std::vector<Partition<S>>& axes() const { return axes_; }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t cell_count() const { return cells_.size(); }
    const std::vector<MvElement<S>>& cells() const { return cells_; }

    std::size_t flat_index(const std::vector<std::size_t>& idx) const {
        std::size_t f = 0;
        for (std::size_t t = 0; t < idx.size(); ++t) f += idx[t] * strides_[t];
        return f;
    }

    const MvElement<S>& cell(const std::vector<std::size_t>& idx) const {
        return cells_[flat_index(idx)];
    }

    std::vector<S> masses(const StateM<S>& m) const {
        std::vector<S> out;
        out.reserve(cells_.size());
        for (const auto& c : cells_) out.push_back(m.mass(c));
        return out;
    }

    /** All cells, flattened into one partition of unity (row-major order). */
    Partition<S> flatten() const { return Partition<S>(space_, cells_); }

  private:
    void check_marginals() const {
        const double tol = space_->tolerance();
        const std::size_t npoints = space_->size();
        for (std::size_t t = 0; t < axes_.size(); ++t) {
            for (std::size_t i = 0; i < shape_[t]; ++i) {
                std::vector<S> sum(npoints, NumTraits<S>::zero());
                std::vector<std::size_t> idx(shape_.size(), 0);
                do {
                    if (idx[t] != i) continue;
                    const MvElement<S>& c = cells_[flat_index(idx)];
                    for (std::size_t w = 0; w < npoints; ++w) sum[w] += c[w];
                } while (detail::next_multi_index(idx, shape_));
                const MvElement<S>& target = axes_[t][i];
                for (std::size_t w = 0; w < npoints; ++w)
                    if (!NumTraits<S>::eq(sum[w], target[w], tol))
                        throw InvariantViolationError(
                            "tensor marginal mismatch on axis " + std::to_string(t) + ", index " +
                            std::to_string(i) + ", point '" + space_->id(w) + "'");
            }
        }
    }

    SpacePtr<S> space_;
    std::vector<Partition<S>> axes_;
    std::vector<std::size_t> shape_;
    std::vector<std::size_t> strides_;
    std::vector<MvElement<S>> cells_;
};

/**
 * Two-axis common refinement by meet-and-subtract: walk the grid row-major,
 * place min(row residual, column residual) in each cell and subtract it from
 * both.  Always lands exactly on both marginals.
 */
template <class S>
RefinementTensor<S> greedy_refine(const Partition<S>& a, const Partition<S>& b) {
    require_same_space(a.space(), b.space());
    const std::size_t npoints = a.space()->size();
    std::vector<std::vector<S>> row_res, col_res;
    row_res.reserve(a.size());
    col_res.reserve(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) row_res.push_back(a[i].values());
    for (std::size_t j = 0; j < b.size(); ++j) col_res.push_back(b[j].values());
    std::vector<MvElement<S>> cells;
    cells.reserve(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            std::vector<S> v(npoints);
            for (std::size_t w = 0; w < npoints; ++w) {
                S x = std::min(row_res[i][w], col_res[j][w]);
                if constexpr (!NumTraits<S>::is_exact) x = std::max(x, 0.0);
                row_res[i][w] -= x;
                col_res[j][w] -= x;
                v[w] = std::move(x);
            }
            cells.emplace_back(a.space(), std::move(v));
        }
    }
    return RefinementTensor<S>({a, b}, std::move(cells));
}

/**
 * Product refinement: cell (i1,...,in) is the pointwise product of the axis
 * elements.  Valid for any number of axes since each partition sums to one.
 */
template <class S>
RefinementTensor<S> product_refine(const std::vector<Partition<S>>& parts) {
    if (parts.empty()) throw InvariantViolationError("product refinement of nothing");
    const SpacePtr<S>& space = parts.front().space();
    for (const auto& p : parts) require_same_space(space, p.space());
    const std::size_t npoints = space->size();
    std::vector<std::size_t> shape;
    shape.reserve(parts.size());
    for (const auto& p : parts) shape.push_back(p.size());
    std::vector<MvElement<S>> cells;
    cells.reserve(detail::shape_product(shape));
    std::vector<std::size_t> idx(shape.size(), 0);
    do {
        std::vector<S> v(npoints, NumTraits<S>::one());
        for (std::size_t t = 0; t < parts.size(); ++t)
            for (std::size_t w = 0; w < npoints; ++w) v[w] *= parts[t][idx[t]][w];
        cells.emplace_back(space, std::move(v));
    } while (detail::next_multi_index(idx, shape));
    return RefinementTensor<S>(parts, std::move(cells));
}

/**
 * Common refinement of many partitions by folding the two-axis construction:
 * refine the flattened previous stage against the next partition, then
 * reshape.  The result refines every input partition.
 */
template <class S>
RefinementTensor<S> chain_refine(const std::vector<Partition<S>>& parts) {
    if (parts.empty()) throw InvariantViolationError("refinement of nothing");
    const SpacePtr<S>& space = parts.front().space();
    for (const auto& p : parts) require_same_space(space, p.space());
    std::vector<MvElement<S>> cells = parts.front().elements();
    for (std::size_t t = 1; t < parts.size(); ++t) {
        RefinementTensor<S> step =
            greedy_refine(Partition<S>(space, cells), parts[t]);
        cells = step.cells();
    }
    return RefinementTensor<S>(parts, std::move(cells));
}

/**
 * Conditional entropy of a two-axis tensor: with given_axis = 1 this is
 * H_C(A|B) = sum_ij m(b_j) phi( m(c_ij) / m(b_j) ); with given_axis = 0 the
 * roles swap.  Cells over a zero-mass condition contribute nothing.
 */
template <class S>
EntropyValue conditional_entropy(const RefinementTensor<S>& c, const StateM<S>& m,
                                 LogBase base = LogBase::natural, std::size_t given_axis = 1) {
    if (c.rank() != 2) throw PreconditionError("conditional entropy needs a two-axis tensor");
    if (given_axis > 1) throw PreconditionError("given_axis must be 0 or 1");
    const Partition<S>& cond = c.axes()[given_axis];
    std::vector<S> cond_mass = cond.masses(m);
    double total = 0.0;
    const std::size_t rows = c.shape()[0], cols = c.shape()[1];
    for (std::size_t j = 0; j < cond.size(); ++j) {
        if (NumTraits<S>::is_zero(cond_mass[j], c.space()->tolerance())) continue;
        const double w = to_double(cond_mass[j]);
        const std::size_t other = given_axis == 1 ? rows : cols;
        for (std::size_t i = 0; i < other; ++i) {
            std::vector<std::size_t> idx =
                given_axis == 1 ? std::vector<std::size_t>{i, j} : std::vector<std::size_t>{j, i};
            S cm = m.mass(c.cell(idx));
            double ratio;
            if constexpr (NumTraits<S>::is_exact) {
                Rat r = cm / cond_mass[j];
                ratio = r.get_d();
            } else {
                ratio = std::min(1.0, std::max(0.0, cm / cond_mass[j]));
            }
            total += w * phi(ratio, base);
        }
    }
    return {total, base};
}

/** Entropy of the tensor's cells: H(C) = sum over cells of phi(m(cell)). */
template <class S>
EntropyValue tensor_entropy(const RefinementTensor<S>& c, const StateM<S>& m,
                            LogBase base = LogBase::natural) {
    return {entropy_of_masses(c.masses(m), base), base};
}

/**
 * Relative entropy of B against A under the pointwise-product coupling:
 * sum_ij m(b_j) phi( m(a_i.b_j) / m(b_j) ).  Zero-mass b_j terms drop out.
 */
template <class S>
EntropyValue h_parallel(const Partition<S>& b, const Partition<S>& a, const StateM<S>& m,
                        LogBase base = LogBase::natural) {
    require_same_space(a.space(), b.space());
    double total = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        S bm = m.mass(b[j]);
        if (NumTraits<S>::is_zero(bm, b.space()->tolerance())) continue;
        const double w = to_double(bm);
        for (std::size_t i = 0; i < a.size(); ++i) {
            S pm = m.mass(mv_product(a[i], b[j]));
            double ratio;
            if constexpr (NumTraits<S>::is_exact) {
                Rat r = pm / bm;
                ratio = r.get_d();
            } else {
                ratio = std::min(1.0, std::max(0.0, pm / bm));
            }
            total += w * phi(ratio, base);
        }
    }
    return {total, base};
}

}  // namespace mvent

#endif
