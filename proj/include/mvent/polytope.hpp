#ifndef MVENT_POLYTOPE_HPP
#define MVENT_POLYTOPE_HPP

#include <algorithm>
#include <deque>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mvent/errors.hpp"
#include "mvent/numeric.hpp"
#include "mvent/partition.hpp"
#include "mvent/tensor.hpp"

namespace mvent {

/**
 * The feasible set of one point of the space: nonnegative cell values on the
 * axis grid whose line sums hit the axis-element values at that point.  The
 * tensor feasible set is the product of these over the points, so vertex
 * candidates can be enumerated pointwise.  For a single-point space this is
 * exactly the (multi-marginal) transportation polytope.
 */
template <class S>
struct LocalPolytope {
    std::size_t point = 0;
    std::vector<std::vector<S>> marginals;  // [axis][index]
};

template <class S>
LocalPolytope<S> local_polytope_at(const std::vector<Partition<S>>& parts, std::size_t w) {
    LocalPolytope<S> lp;
    lp.point = w;
    lp.marginals.reserve(parts.size());
    for (const auto& p : parts) {
        std::vector<S> marg;
        marg.reserve(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) marg.push_back(p[i][w]);
        lp.marginals.push_back(std::move(marg));
    }
    return lp;
}

template <class S>
std::size_t local_cell_count(const LocalPolytope<S>& lp) {
    std::size_t n = 1;
    for (const auto& marg : lp.marginals) n *= marg.size();
    return n;
}

/**
 * Fill the grid in the given cell order, assigning each cell the minimum of
 * its residual line values.  Any complete order yields a feasible point (a
 * balanced residual cannot survive: filling a cell zeroes its smallest line),
 * and every outcome is a vertex of the local polytope.
 */
template <class S>
std::vector<S> greedy_local_fill(const LocalPolytope<S>& lp,
                                 const std::vector<std::size_t>& cell_order) {
    const std::size_t naxes = lp.marginals.size();
    std::vector<std::size_t> shape(naxes);
    for (std::size_t t = 0; t < naxes; ++t) shape[t] = lp.marginals[t].size();
    const std::vector<std::size_t> strides = detail::row_major_strides(shape);
    std::vector<std::vector<S>> res = lp.marginals;
    std::vector<S> grid(local_cell_count(lp), NumTraits<S>::zero());
    for (std::size_t c : cell_order) {
        S x = NumTraits<S>::one();
        std::size_t rem = c;
        for (std::size_t t = 0; t < naxes; ++t) {
            std::size_t i = rem / strides[t];
            rem %= strides[t];
            x = std::min(x, res[t][i]);
        }
        if constexpr (!NumTraits<S>::is_exact) x = std::max(x, 0.0);
        rem = c;
        for (std::size_t t = 0; t < naxes; ++t) {
            std::size_t i = rem / strides[t];
            rem %= strides[t];
            res[t][i] -= x;
        }
        grid[c] = std::move(x);
    }
    return grid;
}

namespace detail {

/** Local system with zero-marginal indices dropped and redundant lines removed. */
struct ReducedLocal {
    std::vector<std::vector<Rat>> marg;            // active marginals per axis
    std::vector<std::vector<std::size_t>> active;  // original index per active slot
    std::vector<std::size_t> rshape, rstrides;
    std::vector<std::size_t> fshape, fstrides;
    std::size_t ncells = 0;
    std::vector<std::vector<int>> cell_rows;  // kept line ids touching each cell
    std::size_t nrows = 0;                    // kept (independent) line count
    std::vector<Rat> rhs;                     // kept line values
};

/** Greedy maximal independent row subset via exact elimination. */
inline std::vector<std::size_t> independent_rows(const std::vector<std::vector<Rat>>& rows) {
    if (rows.empty()) return {};
    const std::size_t ncols = rows.front().size();
    std::vector<std::vector<Rat>> pivots;       // reduced row echelon snippets
    std::vector<std::size_t> pivot_cols, kept;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<Rat> v = rows[r];
        for (std::size_t p = 0; p < pivots.size(); ++p) {
            const Rat& coef = v[pivot_cols[p]];
            if (coef == 0) continue;
            Rat c = coef;
            for (std::size_t j = 0; j < ncols; ++j) v[j] -= c * pivots[p][j];
        }
        std::size_t pc = ncols;
        for (std::size_t j = 0; j < ncols; ++j)
            if (v[j] != 0) {
                pc = j;
                break;
            }
        if (pc == ncols) continue;
        Rat inv = v[pc];
        for (std::size_t j = 0; j < ncols; ++j) v[j] /= inv;
        pivots.push_back(std::move(v));
        pivot_cols.push_back(pc);
        kept.push_back(r);
    }
    return kept;
}

inline ReducedLocal reduce_local(const LocalPolytope<Rat>& lp) {
    ReducedLocal rl;
    const std::size_t naxes = lp.marginals.size();
    rl.marg.resize(naxes);
    rl.active.resize(naxes);
    rl.rshape.resize(naxes);
    rl.fshape.resize(naxes);
    for (std::size_t t = 0; t < naxes; ++t) {
        rl.fshape[t] = lp.marginals[t].size();
        for (std::size_t i = 0; i < lp.marginals[t].size(); ++i) {
            const Rat& m = lp.marginals[t][i];
            if (m < 0) throw InvariantViolationError("negative marginal in local polytope");
            if (m > 0) {
                rl.marg[t].push_back(m);
                rl.active[t].push_back(i);
            }
        }
        rl.rshape[t] = rl.marg[t].size();
        if (rl.rshape[t] == 0)
            throw InvariantViolationError("axis with all-zero marginals at a point");
    }
    rl.rstrides = row_major_strides(rl.rshape);
    rl.fstrides = row_major_strides(rl.fshape);
    rl.ncells = shape_product(rl.rshape);

    // all lines, then keep an independent subset
    std::vector<std::pair<std::size_t, std::size_t>> lines;  // (axis, active slot)
    for (std::size_t t = 0; t < naxes; ++t)
        for (std::size_t i = 0; i < rl.rshape[t]; ++i) lines.emplace_back(t, i);
    std::vector<std::vector<Rat>> incidence(lines.size(), std::vector<Rat>(rl.ncells, Rat(0)));
    for (std::size_t c = 0; c < rl.ncells; ++c) {
        std::size_t rem = c, lbase = 0;
        for (std::size_t t = 0; t < naxes; ++t) {
            std::size_t i = rem / rl.rstrides[t];
            rem %= rl.rstrides[t];
            incidence[lbase + i][c] = 1;
            lbase += rl.rshape[t];
        }
    }
    std::vector<std::size_t> kept = independent_rows(incidence);
    rl.nrows = kept.size();
    rl.rhs.reserve(kept.size());
    std::vector<int> line_to_kept(lines.size(), -1);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        line_to_kept[kept[k]] = static_cast<int>(k);
        rl.rhs.push_back(rl.marg[lines[kept[k]].first][lines[kept[k]].second]);
    }
    rl.cell_rows.assign(rl.ncells, {});
    for (std::size_t c = 0; c < rl.ncells; ++c) {
        std::size_t rem = c, lbase = 0;
        for (std::size_t t = 0; t < naxes; ++t) {
            std::size_t i = rem / rl.rstrides[t];
            rem %= rl.rstrides[t];
            int k = line_to_kept[lbase + i];
            if (k >= 0) rl.cell_rows[c].push_back(k);
            lbase += rl.rshape[t];
        }
    }
    return rl;
}

inline std::size_t reduced_to_full_cell(const ReducedLocal& rl, std::size_t rc) {
    std::size_t rem = rc, full = 0;
    for (std::size_t t = 0; t < rl.rshape.size(); ++t) {
        std::size_t i = rem / rl.rstrides[t];
        rem %= rl.rstrides[t];
        full += rl.active[t][i] * rl.fstrides[t];
    }
    return full;
}

/** Min-fill on the reduced grid in the given order. */
inline std::vector<Rat> reduced_greedy_fill(const ReducedLocal& rl,
                                            const std::vector<std::size_t>& order) {
    std::vector<std::vector<Rat>> res = rl.marg;
    std::vector<Rat> grid(rl.ncells, Rat(0));
    for (std::size_t c : order) {
        std::size_t rem = c;
        Rat x(-1);
        for (std::size_t t = 0; t < rl.rshape.size(); ++t) {
            std::size_t i = rem / rl.rstrides[t];
            rem %= rl.rstrides[t];
            if (x < 0 || res[t][i] < x) x = res[t][i];
        }
        rem = c;
        for (std::size_t t = 0; t < rl.rshape.size(); ++t) {
            std::size_t i = rem / rl.rstrides[t];
            rem %= rl.rstrides[t];
            res[t][i] -= x;
        }
        grid[c] = std::move(x);
    }
    return grid;
}

/**
 * Solve for the basic values and all pivot directions of one basis: eliminate
 * [A_B | A | rhs] into [I | D | x].  Returns false when A_B is singular.
 */
inline bool solve_basis(const ReducedLocal& rl, const std::vector<int>& basis,
                        std::vector<std::vector<Rat>>& dirs, std::vector<Rat>& x) {
    const std::size_t m = rl.nrows, n = rl.ncells;
    std::vector<std::vector<Rat>> mat(m, std::vector<Rat>(m + n + 1, Rat(0)));
    for (std::size_t r = 0; r < m; ++r) mat[r][m + n] = rl.rhs[r];
    for (std::size_t bcol = 0; bcol < basis.size(); ++bcol)
        for (int row : rl.cell_rows[basis[bcol]]) mat[row][bcol] = 1;
    for (std::size_t c = 0; c < n; ++c)
        for (int row : rl.cell_rows[c]) mat[row][m + c] = 1;

    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = m;
        for (std::size_t r = col; r < m; ++r)
            if (mat[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv == m) return false;
        std::swap(mat[col], mat[piv]);
        Rat inv = mat[col][col];
        for (std::size_t j = col; j < m + n + 1; ++j) mat[col][j] /= inv;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col || mat[r][col] == 0) continue;
            Rat f = mat[r][col];
            for (std::size_t j = col; j < m + n + 1; ++j) mat[r][j] -= f * mat[col][j];
        }
    }
    dirs.assign(m, std::vector<Rat>(n));
    x.assign(m, Rat(0));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) dirs[r][c] = mat[r][m + c];
        x[r] = mat[r][m + n];
    }
    return true;
}

/** Extend the support of a feasible point to a full set of basic columns. */
inline std::vector<int> seed_basis(const ReducedLocal& rl, const std::vector<Rat>& point) {
    std::vector<std::vector<Rat>> cols;
    std::vector<int> chosen;
    auto col_of = [&](std::size_t c) {
        std::vector<Rat> v(rl.nrows, Rat(0));
        for (int row : rl.cell_rows[c]) v[row] = 1;
        return v;
    };
    std::vector<std::vector<Rat>> pivots;
    std::vector<std::size_t> pivot_rows;
    auto try_add = [&](std::size_t c) {
        std::vector<Rat> v = col_of(c);
        for (std::size_t p = 0; p < pivots.size(); ++p) {
            const Rat coef = v[pivot_rows[p]];
            if (coef == 0) continue;
            for (std::size_t r = 0; r < rl.nrows; ++r) v[r] -= coef * pivots[p][r];
        }
        std::size_t pr = rl.nrows;
        for (std::size_t r = 0; r < rl.nrows; ++r)
            if (v[r] != 0) {
                pr = r;
                break;
            }
        if (pr == rl.nrows) return false;
        Rat inv = v[pr];
        for (std::size_t r = 0; r < rl.nrows; ++r) v[r] /= inv;
        pivots.push_back(std::move(v));
        pivot_rows.push_back(pr);
        chosen.push_back(static_cast<int>(c));
        return true;
    };
    for (std::size_t c = 0; c < rl.ncells; ++c)
        if (point[c] > 0 && !try_add(c))
            throw Error("support of a greedy fill is dependent; enumeration invariant broken");
    for (std::size_t c = 0; c < rl.ncells && chosen.size() < rl.nrows; ++c) {
        if (point[c] > 0) continue;
        try_add(c);
    }
    if (chosen.size() != rl.nrows) throw Error("could not complete a seed basis");
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

/**
 * Complete vertex enumeration by breadth-first search over feasible bases.
 * Ratio-test pivots walk every edge of the polytope; zero pivots (leaving a
 * zero-valued basic column) connect all bases of a degenerate vertex, so all
 * vertices of the connected polytope graph are reached.  Budget counts
 * visited bases.
 */
inline std::vector<std::vector<Rat>> enumerate_reduced_vertices(const ReducedLocal& rl,
                                                                std::size_t basis_budget,
                                                                std::size_t point_label) {
    const std::size_t m = rl.nrows, n = rl.ncells;
    std::vector<std::size_t> lex(n);
    for (std::size_t c = 0; c < n; ++c) lex[c] = c;
    std::vector<Rat> seed_point = reduced_greedy_fill(rl, lex);
    std::vector<int> b0 = seed_basis(rl, seed_point);

    std::set<std::vector<int>> visited;
    std::deque<std::vector<int>> todo;
    visited.insert(b0);
    todo.push_back(std::move(b0));
    std::set<std::vector<Rat>> points;

    std::vector<std::vector<Rat>> dirs;
    std::vector<Rat> xb;
    while (!todo.empty()) {
        if (visited.size() > basis_budget)
            throw BudgetExceededError("feasible-basis search exceeded " +
                                      std::to_string(basis_budget) + " bases at point " +
                                      std::to_string(point_label));
        std::vector<int> basis = std::move(todo.front());
        todo.pop_front();
        if (!solve_basis(rl, basis, dirs, xb))
            throw Error("singular basis reached; enumeration invariant broken");

        std::vector<Rat> full(n, Rat(0));
        for (std::size_t k = 0; k < m; ++k) {
            if (xb[k] < 0) throw Error("infeasible basis reached; enumeration invariant broken");
            full[basis[k]] = xb[k];
        }
        points.insert(std::move(full));

        std::vector<bool> in_basis(n, false);
        for (int c : basis) in_basis[c] = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (in_basis[j]) continue;
            // direction: entering j at level t moves basics by -t * d
            Rat rmin(-1);
            bool any_pos = false;
            for (std::size_t k = 0; k < m; ++k) {
                const Rat& d = dirs[k][j];
                if (d > 0) {
                    Rat ratio = xb[k] / d;
                    if (!any_pos || ratio < rmin) rmin = ratio;
                    any_pos = true;
                }
            }
            if (!any_pos) throw Error("unbounded pivot direction in a bounded polytope");
            for (std::size_t k = 0; k < m; ++k) {
                const Rat& d = dirs[k][j];
                bool leaves = rmin > 0 ? (d > 0 && xb[k] / d == rmin) : (xb[k] == 0 && d != 0);
                if (!leaves) continue;
                std::vector<int> nb = basis;
                nb[k] = static_cast<int>(j);
                std::sort(nb.begin(), nb.end());
                if (visited.insert(nb).second) todo.push_back(std::move(nb));
            }
        }
    }
    return {points.begin(), points.end()};
}

}  // namespace detail

/**
 * All extreme points of the local polytope, as flattened full-grid value
 * vectors in lexicographic order.  Exact arithmetic only.
 */
inline std::vector<std::vector<Rat>> enumerate_local_vertices(const LocalPolytope<Rat>& lp,
                                                              std::size_t cell_cap,
                                                              std::size_t basis_budget = 200000) {
    const std::size_t ncells = local_cell_count(lp);
    if (ncells > cell_cap)
        throw BudgetExceededError("local grid has " + std::to_string(ncells) +
                                  " cells, above the cap of " + std::to_string(cell_cap));
    detail::ReducedLocal rl = detail::reduce_local(lp);
    std::vector<std::vector<Rat>> reduced =
        detail::enumerate_reduced_vertices(rl, basis_budget, lp.point);
    std::vector<std::vector<Rat>> out;
    out.reserve(reduced.size());
    for (const auto& rv : reduced) {
        std::vector<Rat> full(ncells, Rat(0));
        for (std::size_t rc = 0; rc < rv.size(); ++rc)
            full[detail::reduced_to_full_cell(rl, rc)] = rv[rc];
        out.push_back(std::move(full));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/**
 * Reference enumerator: try every column subset of basis size, solve, keep
 * feasible basic solutions.  Exponential; for tests and tiny shapes only.
 */
inline std::vector<std::vector<Rat>> enumerate_local_vertices_reference(
    const LocalPolytope<Rat>& lp) {
    detail::ReducedLocal rl = detail::reduce_local(lp);
    const std::size_t m = rl.nrows, n = rl.ncells;
    std::set<std::vector<Rat>> points;
    std::vector<int> comb(m);
    for (std::size_t k = 0; k < m; ++k) comb[k] = static_cast<int>(k);
    std::vector<std::vector<Rat>> dirs;
    std::vector<Rat> xb;
    while (true) {
        if (detail::solve_basis(rl, comb, dirs, xb)) {
            bool feasible = true;
            for (const Rat& v : xb)
                if (v < 0) {
                    feasible = false;
                    break;
                }
            if (feasible) {
                std::vector<Rat> full(rl.ncells, Rat(0));
                for (std::size_t k = 0; k < m; ++k) full[comb[k]] = xb[k];
                points.insert(std::move(full));
            }
        }
        // next combination
        std::size_t k = m;
        while (k-- > 0) {
            if (comb[k] < static_cast<int>(n - m + k)) {
                ++comb[k];
                for (std::size_t j = k + 1; j < m; ++j) comb[j] = comb[j - 1] + 1;
                break;
            }
            if (k == 0) {
                std::vector<std::vector<Rat>> out;
                const std::size_t ncells = local_cell_count(lp);
                for (const auto& rv : points) {
                    std::vector<Rat> full(ncells, Rat(0));
                    for (std::size_t rc = 0; rc < rv.size(); ++rc)
                        full[detail::reduced_to_full_cell(rl, rc)] = rv[rc];
                    out.push_back(std::move(full));
                }
                std::sort(out.begin(), out.end());
                return out;
            }
        }
    }
}

}  // namespace mvent

#endif
