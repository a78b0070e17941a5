#ifndef MVENT_OPTIMIZER_HPP
#define MVENT_OPTIMIZER_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mvent/entropy.hpp"
#include "mvent/errors.hpp"
#include "mvent/partition.hpp"
#include "mvent/polytope.hpp"
#include "mvent/tensor.hpp"

namespace mvent {

enum class SolveMode { exact, heuristic, auto_mode };

enum class Certificate { exact_vertex_enumeration, heuristic, crisp_unique };

inline std::string certificate_name(Certificate c) {
    switch (c) {
        case Certificate::exact_vertex_enumeration: return "exact-vertex-enumeration";
        case Certificate::heuristic: return "heuristic";
        case Certificate::crisp_unique: return "crisp-unique";
    }
    return "?";
}

struct SolveOptions {
    SolveMode mode = SolveMode::auto_mode;
    LogBase base = LogBase::natural;
    std::size_t max_cells_per_point = 4096;
    std::size_t max_bases_per_point = 200000;
    std::size_t max_combinations = 4000000;
    std::size_t heuristic_sweeps = 8;
    std::size_t heuristic_samples = 24;
    std::size_t probe_samples = 64;
    unsigned workers = 1;  // 0 = all hardware threads
    std::uint64_t seed = 0;
};

template <class S>
struct RefinementSolution {
    RefinementTensor<S> tensor;
    EntropyValue entropy;
    Certificate certificate;
    double bound_gap = 0.0;  // 0 when the certificate is exact
};

namespace detail {

inline double canonical_entropy(std::vector<double> masses, LogBase base) {
    std::sort(masses.begin(), masses.end());
    double total = 0.0;
    for (double x : masses)
        if (x > 0.0) total += phi(std::min(x, 1.0), base);
    return total;
}

template <class S>
double masses_entropy(const std::vector<S>& masses, LogBase base) {
    return entropy_of_masses(masses, base);
}

/** Deterministic per-site RNG stream, independent of evaluation order. */
inline std::mt19937_64 site_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = seed * 0x9e3779b97f4a7c15ull + a * 0xbf58476d1ce4e5b9ull +
                      b * 0x94d049bb133111ebull + 0x2545f4914f6cdd1dull;
    return std::mt19937_64(x);
}

template <class S>
RefinementTensor<S> tensor_from_slices(const std::vector<Partition<S>>& parts,
                                       const std::vector<std::vector<S>>& slices) {
    const SpacePtr<S>& space = parts.front().space();
    const std::size_t npoints = space->size();
    const std::size_t ncells = slices.front().size();
    std::vector<MvElement<S>> cells;
    cells.reserve(ncells);
    for (std::size_t c = 0; c < ncells; ++c) {
        std::vector<S> v(npoints);
        for (std::size_t w = 0; w < npoints; ++w) v[w] = slices[w][c];
        cells.emplace_back(space, std::move(v));
    }
    return RefinementTensor<S>(parts, std::move(cells));
}

template <class S>
std::vector<std::vector<S>> slices_of_tensor(const RefinementTensor<S>& t) {
    const std::size_t npoints = t.space()->size();
    std::vector<std::vector<S>> slices(npoints, std::vector<S>(t.cell_count()));
    for (std::size_t c = 0; c < t.cell_count(); ++c)
        for (std::size_t w = 0; w < npoints; ++w) slices[w][c] = t.cells()[c][w];
    return slices;
}

template <class S>
std::vector<S> global_masses(const std::vector<std::vector<S>>& slices,
                             const std::vector<S>& weights) {
    const std::size_t ncells = slices.front().size();
    std::vector<S> masses(ncells, NumTraits<S>::zero());
    for (std::size_t w = 0; w < slices.size(); ++w)
        for (std::size_t c = 0; c < ncells; ++c) masses[c] += weights[w] * slices[w][c];
    return masses;
}

// ---------------------------------------------------------------- exact mode

struct ExactIncumbent {
    bool set = false;
    double entropy = 0.0;
    std::vector<Rat> masses;  // exact, for lexicographic tie-breaking
    std::vector<std::uint32_t> choice;
};

struct ExactSearch {
    std::vector<std::vector<std::vector<Rat>>> verts;  // [point][vertex][cell]
    std::vector<std::vector<std::vector<double>>> contrib;
    std::vector<std::vector<double>> suffix_min, suffix_max;  // [point..P][cell]
    std::vector<Rat> weights;
    std::size_t npoints = 0, ncells = 0;
    LogBase base = LogBase::natural;
    double prune_slack = 1e-12;

    std::vector<Rat> exact_masses(const std::vector<std::uint32_t>& choice) const {
        std::vector<Rat> masses(ncells, Rat(0));
        for (std::size_t w = 0; w < npoints; ++w) {
            const auto& v = verts[w][choice[w]];
            for (std::size_t c = 0; c < ncells; ++c) masses[c] += weights[w] * v[c];
        }
        return masses;
    }

    void consider_leaf(const std::vector<double>& partial,
                       const std::vector<std::uint32_t>& choice, ExactIncumbent& inc) const {
        double h = canonical_entropy(partial, base);
        if (inc.set && h > inc.entropy) return;
        std::vector<Rat> masses = exact_masses(choice);
        if (inc.set && h == inc.entropy && !(masses < inc.masses)) return;
        inc.set = true;
        inc.entropy = h;
        inc.masses = std::move(masses);
        inc.choice = choice;
    }

    double lower_bound(const std::vector<double>& partial, std::size_t next_point) const {
        const auto& lo = suffix_min[next_point];
        const auto& hi = suffix_max[next_point];
        double bound = 0.0;
        for (std::size_t c = 0; c < ncells; ++c) {
            double a = std::min(std::max(partial[c] + lo[c], 0.0), 1.0);
            double b = std::min(std::max(partial[c] + hi[c], 0.0), 1.0);
            bound += std::min(phi(a, base), phi(b, base));
        }
        return bound;
    }

    // `cap` is a known-feasible entropy value; subtrees whose lower bound
    // exceeds it cannot contain the global minimum
    void dfs(std::size_t point, std::vector<double>& partial, std::vector<std::uint32_t>& choice,
             double cap, ExactIncumbent& inc) const {
        if (point == npoints) {
            consider_leaf(partial, choice, inc);
            return;
        }
        double limit = inc.set ? std::min(cap, inc.entropy) : cap;
        if (lower_bound(partial, point) > limit + prune_slack) return;
        std::vector<double> next(ncells);
        for (std::uint32_t v = 0; v < verts[point].size(); ++v) {
            const auto& add = contrib[point][v];
            for (std::size_t c = 0; c < ncells; ++c) next[c] = partial[c] + add[c];
            choice[point] = static_cast<std::uint32_t>(v);
            std::swap(partial, next);
            dfs(point + 1, partial, choice, cap, inc);
            std::swap(partial, next);
        }
    }
};

template <class S>
RefinementSolution<S> solve_exact(const std::vector<Partition<S>>& parts, const StateM<S>& m,
                                  const SolveOptions& opt) {
    if constexpr (!NumTraits<S>::is_exact) {
        throw PreconditionError("exact mode requires rational arithmetic");
    } else {
        const SpacePtr<Rat>& space = parts.front().space();
        const std::size_t npoints = space->size();

        ExactSearch search;
        search.base = opt.base;
        search.npoints = npoints;
        search.weights = space->weights();
        search.verts.resize(npoints);
        search.contrib.resize(npoints);

        std::size_t combos = 1;
        bool overflowed = false;
        for (std::size_t w = 0; w < npoints; ++w) {
            LocalPolytope<Rat> lp = local_polytope_at(parts, w);
            search.verts[w] =
                enumerate_local_vertices(lp, opt.max_cells_per_point, opt.max_bases_per_point);
            if (combos > opt.max_combinations / std::max<std::size_t>(search.verts[w].size(), 1))
                overflowed = true;
            combos *= search.verts[w].size();
        }
        if (overflowed || combos > opt.max_combinations)
            throw BudgetExceededError("vertex combinations exceed the budget of " +
                                      std::to_string(opt.max_combinations));

        search.ncells = search.verts.front().front().size();
        for (std::size_t w = 0; w < npoints; ++w) {
            search.contrib[w].reserve(search.verts[w].size());
            for (const auto& v : search.verts[w]) {
                std::vector<double> cv(search.ncells);
                for (std::size_t c = 0; c < search.ncells; ++c) {
                    Rat scaled = search.weights[w] * v[c];
                    cv[c] = scaled.get_d();
                }
                search.contrib[w].push_back(std::move(cv));
            }
        }
        search.suffix_min.assign(npoints + 1, std::vector<double>(search.ncells, 0.0));
        search.suffix_max.assign(npoints + 1, std::vector<double>(search.ncells, 0.0));
        for (std::size_t w = npoints; w-- > 0;) {
            for (std::size_t c = 0; c < search.ncells; ++c) {
                double lo = search.contrib[w].front()[c], hi = lo;
                for (const auto& cv : search.contrib[w]) {
                    lo = std::min(lo, cv[c]);
                    hi = std::max(hi, cv[c]);
                }
                search.suffix_min[w][c] = search.suffix_min[w + 1][c] + lo;
                search.suffix_max[w][c] = search.suffix_max[w + 1][c] + hi;
            }
        }

        // cheap feasible upper bound so pruning bites from the first chunk
        double cap;
        {
            RefinementTensor<Rat> chain = chain_refine(parts);
            std::vector<Rat> masses = chain.masses(m);
            std::vector<double> md(masses.size());
            for (std::size_t c = 0; c < masses.size(); ++c) md[c] = masses[c].get_d();
            cap = canonical_entropy(md, opt.base);
        }

        const std::size_t nchunks = search.verts.front().size();
        std::vector<ExactIncumbent> results(nchunks);
        unsigned nworkers = opt.workers == 0
                                ? std::max(1u, std::thread::hardware_concurrency())
                                : opt.workers;
        nworkers = static_cast<unsigned>(
            std::min<std::size_t>(nworkers, std::max<std::size_t>(nchunks, 1)));

        auto run_chunk = [&](std::size_t chunk) {
            ExactIncumbent inc;
            std::vector<double> partial = search.contrib[0][chunk];
            std::vector<std::uint32_t> choice(npoints, 0);
            choice[0] = static_cast<std::uint32_t>(chunk);
            search.dfs(1, partial, choice, cap, inc);
            results[chunk] = std::move(inc);
        };

        if (nworkers <= 1) {
            for (std::size_t chunk = 0; chunk < nchunks; ++chunk) run_chunk(chunk);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            pool.reserve(nworkers);
            for (unsigned t = 0; t < nworkers; ++t)
                pool.emplace_back([&] {
                    while (true) {
                        std::size_t chunk = next.fetch_add(1);
                        if (chunk >= nchunks) return;
                        run_chunk(chunk);
                    }
                });
            for (auto& th : pool) th.join();
        }

        const ExactIncumbent* best = nullptr;
        for (const auto& inc : results) {
            if (!inc.set) continue;
            if (!best || inc.entropy < best->entropy ||
                (inc.entropy == best->entropy && inc.masses < best->masses))
                best = &inc;
        }
        if (!best) throw Error("exact search finished with no candidate");

        std::vector<std::vector<Rat>> slices(npoints);
        for (std::size_t w = 0; w < npoints; ++w) slices[w] = search.verts[w][best->choice[w]];
        RefinementTensor<Rat> tensor = tensor_from_slices(parts, slices);
        EntropyValue h = tensor_entropy(tensor, m, opt.base);
        return RefinementSolution<S>{std::move(tensor), h,
                                     Certificate::exact_vertex_enumeration, 0.0};
    }
}

// ------------------------------------------------------------ heuristic mode

template <class S>
RefinementSolution<S> solve_heuristic(const std::vector<Partition<S>>& parts, const StateM<S>& m,
                                      const SolveOptions& opt) {
    const SpacePtr<S>& space = parts.front().space();
    const std::size_t npoints = space->size();
    const std::vector<S>& weights = space->weights();
    std::vector<std::size_t> shape;
    shape.reserve(parts.size());
    for (const auto& p : parts) shape.push_back(p.size());
    const std::vector<std::size_t> strides = row_major_strides(shape);
    const std::size_t ncells = shape_product(shape);
    if (ncells > opt.max_cells_per_point)
        throw BudgetExceededError("tensor has " + std::to_string(ncells) +
                                  " cells, above the cap of " +
                                  std::to_string(opt.max_cells_per_point));

    auto eval = [&](const std::vector<std::vector<S>>& slices) {
        return masses_entropy(global_masses(slices, weights), opt.base);
    };

    std::vector<std::vector<S>> slices = slices_of_tensor(chain_refine(parts));
    double best = eval(slices);
    {
        auto alt = slices_of_tensor(product_refine(parts));
        double h = eval(alt);
        if (h < best) {
            best = h;
            slices = std::move(alt);
        }
    }

    std::vector<LocalPolytope<S>> lps;
    lps.reserve(npoints);
    for (std::size_t w = 0; w < npoints; ++w) lps.push_back(local_polytope_at(parts, w));

    std::vector<std::size_t> lex(ncells);
    for (std::size_t c = 0; c < ncells; ++c) lex[c] = c;

    for (std::size_t sweep = 0; sweep < opt.heuristic_sweeps; ++sweep) {
        bool improved = false;

        for (std::size_t w = 0; w < npoints; ++w) {
            auto rng = site_rng(opt.seed, sweep, w);
            std::vector<std::vector<std::size_t>> orders;
            orders.push_back(lex);
            orders.emplace_back(lex.rbegin(), lex.rend());
            for (std::size_t s = 0; s < opt.heuristic_samples; ++s) {
                std::vector<std::size_t> ord = lex;
                for (std::size_t c = ncells; c-- > 1;)
                    std::swap(ord[c], ord[rng() % (c + 1)]);
                orders.push_back(std::move(ord));
            }
            for (const auto& ord : orders) {
                std::vector<S> cand = greedy_local_fill(lps[w], ord);
                std::vector<S> saved = std::move(slices[w]);
                slices[w] = std::move(cand);
                double h = eval(slices);
                if (h < best) {
                    best = h;
                    improved = true;
                } else {
                    slices[w] = std::move(saved);
                }
            }
        }

        if (shape.size() >= 2) {
            for (std::size_t w = 0; w < npoints; ++w) {
                auto rng = site_rng(opt.seed ^ 0x5bf03635ull, sweep, w);
                for (std::size_t probe = 0; probe < opt.probe_samples; ++probe) {
                    std::size_t t1 = rng() % shape.size();
                    std::size_t t2 = rng() % shape.size();
                    if (t1 == t2 || shape[t1] < 2 || shape[t2] < 2) continue;
                    std::size_t i1 = rng() % shape[t1], i2 = rng() % shape[t1];
                    std::size_t j1 = rng() % shape[t2], j2 = rng() % shape[t2];
                    if (i1 == i2 || j1 == j2) continue;
                    std::size_t rest = 0;
                    for (std::size_t t = 0; t < shape.size(); ++t)
                        if (t != t1 && t != t2) rest += (rng() % shape[t]) * strides[t];
                    auto cell_at = [&](std::size_t a, std::size_t b) {
                        return rest + a * strides[t1] + b * strides[t2];
                    };
                    std::size_t c11 = cell_at(i1, j1), c12 = cell_at(i1, j2);
                    std::size_t c21 = cell_at(i2, j1), c22 = cell_at(i2, j2);
                    auto& x = slices[w];
                    // +d on c11,c22 and -d on c12,c21 keeps all line sums
                    S up = std::min(x[c12], x[c21]);
                    S down = std::min(x[c11], x[c22]);
                    for (int dir = 0; dir < 2; ++dir) {
                        S d = dir == 0 ? up : down;
                        if (NumTraits<S>::is_zero(d, 0.0)) continue;
                        S sgn_d = dir == 0 ? d : S(NumTraits<S>::zero() - d);
                        std::vector<S> saved = x;
                        x[c11] = x[c11] + sgn_d;
                        x[c22] = x[c22] + sgn_d;
                        x[c12] = x[c12] - sgn_d;
                        x[c21] = x[c21] - sgn_d;
                        if constexpr (!NumTraits<S>::is_exact) {
                            for (std::size_t c : {c11, c12, c21, c22})
                                x[c] = std::min(1.0, std::max(0.0, x[c]));
                        }
                        double h = eval(slices);
                        if (h < best) {
                            best = h;
                            improved = true;
                        } else {
                            x = std::move(saved);
                        }
                    }
                }
            }
        }

        if (!improved) break;
    }

    RefinementTensor<S> tensor = tensor_from_slices(parts, slices);
    EntropyValue h = tensor_entropy(tensor, m, opt.base);
    double lower = 0.0;
    for (const auto& p : parts)
        lower = std::max(lower, partition_entropy(p, m, opt.base).value);
    double gap = std::max(0.0, h.value - lower);
    return RefinementSolution<S>{std::move(tensor), h, Certificate::heuristic, gap};
}

}  // namespace detail

/**
 * Minimize H(C) over common refinements of the given partitions.
 *
 * Crisp inputs short-circuit to the pointwise-product tensor, which is the
 * one and only refinement in that case.  Exact mode enumerates per-point
 * polytope vertices and searches their combinations with concave-bound
 * pruning; the entropy is concave in the cell masses and the masses are
 * affine in each point's slice, so some combination of local vertices is
 * optimal.  Heuristic mode improves greedy fillings by coordinate descent
 * and quad mass shifts and reports a lower-bound gap instead of a proof.
 */
template <class S>
RefinementSolution<S> min_entropy_refinement(const std::vector<Partition<S>>& parts,
                                             const StateM<S>& m, const SolveOptions& opt = {}) {
    if (parts.empty()) throw InvariantViolationError("refinement of an empty partition list");
    const SpacePtr<S>& space = parts.front().space();
    require_same_space(space, m.space());
    for (const auto& p : parts) require_same_space(space, p.space());

    bool crisp = true;
    for (const auto& p : parts)
        if (!p.is_crisp()) {
            crisp = false;
            break;
        }
    if (crisp) {
        RefinementTensor<S> tensor = product_refine(parts);
        EntropyValue h = tensor_entropy(tensor, m, opt.base);
        return RefinementSolution<S>{std::move(tensor), h, Certificate::crisp_unique, 0.0};
    }

    switch (opt.mode) {
        case SolveMode::exact: return detail::solve_exact(parts, m, opt);
        case SolveMode::heuristic: return detail::solve_heuristic(parts, m, opt);
        case SolveMode::auto_mode: break;
    }
    if constexpr (!NumTraits<S>::is_exact) return detail::solve_heuristic(parts, m, opt);
    try {
        return detail::solve_exact(parts, m, opt);
    } catch (const BudgetExceededError&) {
        return detail::solve_heuristic(parts, m, opt);
    }
}

/**
 * Independent grid-search oracle: parameterize each point's feasible set by
 * its free cells, scan a uniform rational grid over their ranges, reject
 * infeasible combinations, union in the polytope vertices, and take the
 * minimum entropy.  Exponential in the number of free cells; test use only.
 */
inline EntropyValue brute_force_min_entropy(const std::vector<Partition<Rat>>& parts,
                                            const StateM<Rat>& m,
                                            LogBase base = LogBase::natural,
                                            std::size_t resolution = 64,
                                            std::size_t max_free_dims = 4) {
    if (parts.empty()) throw InvariantViolationError("refinement of an empty partition list");
    const SpacePtr<Rat>& space = parts.front().space();
    const std::size_t npoints = space->size();

    struct PointGrid {
        std::vector<std::vector<Rat>> candidates;  // full-grid value vectors
    };
    std::vector<PointGrid> grids(npoints);
    std::size_t total_free = 0;

    for (std::size_t w = 0; w < npoints; ++w) {
        LocalPolytope<Rat> lp = local_polytope_at(parts, w);
        detail::ReducedLocal rl = detail::reduce_local(lp);
        const std::size_t n = rl.ncells, mrows = rl.nrows;

        // RREF of [A | b] exposes basic columns and the affine dependence on frees
        std::vector<std::vector<Rat>> mat(mrows, std::vector<Rat>(n + 1, Rat(0)));
        for (std::size_t c = 0; c < n; ++c)
            for (int row : rl.cell_rows[c]) mat[row][c] = 1;
        for (std::size_t r = 0; r < mrows; ++r) mat[r][n] = rl.rhs[r];
        std::vector<std::size_t> basic_cols;
        std::size_t row = 0;
        for (std::size_t col = 0; col < n && row < mrows; ++col) {
            std::size_t piv = mrows;
            for (std::size_t r = row; r < mrows; ++r)
                if (mat[r][col] != 0) {
                    piv = r;
                    break;
                }
            if (piv == mrows) continue;
            std::swap(mat[row], mat[piv]);
            Rat inv = mat[row][col];
            for (std::size_t j = col; j <= n; ++j) mat[row][j] /= inv;
            for (std::size_t r = 0; r < mrows; ++r) {
                if (r == row || mat[r][col] == 0) continue;
                Rat f = mat[r][col];
                for (std::size_t j = col; j <= n; ++j) mat[r][j] -= f * mat[row][j];
            }
            basic_cols.push_back(col);
            ++row;
        }
        std::vector<bool> is_basic(n, false);
        for (std::size_t c : basic_cols) is_basic[c] = true;
        std::vector<std::size_t> free_cols;
        for (std::size_t c = 0; c < n; ++c)
            if (!is_basic[c]) free_cols.push_back(c);
        total_free += free_cols.size();
        if (total_free > max_free_dims)
            throw PreconditionError("dimension too large for the grid oracle");

        // upper bound per free cell: smallest line value through it
        std::vector<Rat> ub(free_cols.size(), Rat(1));
        for (std::size_t f = 0; f < free_cols.size(); ++f) {
            std::size_t rem = free_cols[f];
            for (std::size_t t = 0; t < rl.rshape.size(); ++t) {
                std::size_t i = rem / rl.rstrides[t];
                rem %= rl.rstrides[t];
                ub[f] = std::min(ub[f], rl.marg[t][i]);
            }
        }

        std::vector<std::size_t> steps(free_cols.size(), 0);
        bool done = free_cols.empty();
        std::vector<std::vector<Rat>> found;
        while (true) {
            std::vector<Rat> x(n, Rat(0));
            for (std::size_t f = 0; f < free_cols.size(); ++f)
                x[free_cols[f]] =
                    ub[f] * Rat(static_cast<long>(steps[f])) / Rat(static_cast<long>(resolution));
            bool feasible = true;
            for (std::size_t r = 0; r < basic_cols.size() && feasible; ++r) {
                Rat v = mat[r][n];
                for (std::size_t f = 0; f < free_cols.size(); ++f)
                    v -= mat[r][free_cols[f]] * x[free_cols[f]];
                if (v < 0) feasible = false;
                x[basic_cols[r]] = v;
            }
            if (feasible) {
                std::vector<Rat> full(local_cell_count(lp), Rat(0));
                for (std::size_t rc = 0; rc < n; ++rc)
                    full[detail::reduced_to_full_cell(rl, rc)] = x[rc];
                found.push_back(std::move(full));
            }
            if (done) break;
            std::size_t f = free_cols.size();
            bool carried = true;
            while (f-- > 0) {
                if (++steps[f] <= resolution) {
                    carried = false;
                    break;
                }
                steps[f] = 0;
                if (f == 0) break;
            }
            if (carried) break;
        }
        for (auto& v : enumerate_local_vertices(lp, 4096)) found.push_back(std::move(v));
        grids[w].candidates = std::move(found);
    }

    std::size_t combos = 1;
    for (const auto& g : grids) {
        if (g.candidates.empty()) throw Error("oracle grid produced no feasible point");
        combos *= g.candidates.size();
        if (combos > 5000000) throw PreconditionError("dimension too large for the grid oracle");
    }

    const std::size_t ncells = grids.front().candidates.front().size();
    std::vector<std::size_t> pick(npoints, 0);
    double best = 0.0;
    bool have = false;
    while (true) {
        std::vector<Rat> masses(ncells, Rat(0));
        for (std::size_t w = 0; w < npoints; ++w) {
            const auto& x = grids[w].candidates[pick[w]];
            for (std::size_t c = 0; c < ncells; ++c) masses[c] += space->weight(w) * x[c];
        }
        double h = entropy_of_masses(masses, base);
        if (!have || h < best) {
            best = h;
            have = true;
        }
        std::size_t w = npoints;
        bool carried = true;
        while (w-- > 0) {
            if (++pick[w] < grids[w].candidates.size()) {
                carried = false;
                break;
            }
            pick[w] = 0;
            if (w == 0) break;
        }
        if (carried) break;
    }
    return {best, base};
}

}  // namespace mvent

#endif
