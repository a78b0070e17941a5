#ifndef MVENT_DYNAMICS_HPP
#define MVENT_DYNAMICS_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mvent/entropy.hpp"
#include "mvent/errors.hpp"
#include "mvent/optimizer.hpp"
#include "mvent/partition.hpp"
#include "mvent/system.hpp"
#include "mvent/tensor.hpp"

namespace mvent {

/** The axes a, tau(a), ..., tau^{n-1}(a). */
template <class S>
std::vector<Partition<S>> orbit_axes(const DynamicalSystem<S>& sys, const Partition<S>& a,
                                     std::size_t n) {
    if (n == 0) throw PreconditionError("orbit of length zero");
    require_same_space(sys.space, a.space());
    std::vector<Partition<S>> axes;
    axes.reserve(n);
    axes.push_back(a);
    for (std::size_t i = 1; i < n; ++i) axes.push_back(tau_partition(sys.tau, axes.back()));
    return axes;
}

/** Minimum-entropy common refinement of the first n orbit axes. */
template <class S>
RefinementSolution<S> refinement_step(const DynamicalSystem<S>& sys, const Partition<S>& a,
                                      std::size_t n, const SolveOptions& opt = {}) {
    return min_entropy_refinement(orbit_axes(sys, a, n), sys.state, opt);
}

/**
 * The step entropies for n = 1..N with their per-step rates and the running
 * infimum of the rate.  The running infimum is nonincreasing and, when every
 * entry is certified, an upper bound on the limiting rate that converges to
 * it (subadditive sequences converge to their infimum rate).
 */
struct EntropySequence {
    LogBase base = LogBase::natural;
    std::vector<double> values;       // index n-1 holds the n-step entropy
    std::vector<double> per_step;     // values[n-1] / n
    std::vector<double> running_inf;  // min of per_step prefixes
    std::vector<Certificate> certificates;
    std::vector<std::string> warnings;

    bool all_exact() const {
        for (Certificate c : certificates)
            if (c == Certificate::heuristic) return false;
        return true;
    }
};

namespace detail {

inline void finish_sequence(EntropySequence& seq, bool exact_arithmetic) {
    const std::size_t n_max = seq.values.size();
    seq.per_step.resize(n_max);
    seq.running_inf.resize(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
        seq.per_step[n - 1] = seq.values[n - 1] / static_cast<double>(n);
        seq.running_inf[n - 1] = n == 1 ? seq.per_step[0]
                                        : std::min(seq.running_inf[n - 2], seq.per_step[n - 1]);
    }
    const bool certified = exact_arithmetic && seq.all_exact();
    for (std::size_t n = 1; n <= n_max; ++n) {
        for (std::size_t m = n; n + m <= n_max; ++m) {
            double excess = seq.values[n + m - 1] - seq.values[n - 1] - seq.values[m - 1];
            if (excess <= 1e-9) continue;
            std::string msg = "step entropy at n=" + std::to_string(n + m) +
                              " exceeds the n=" + std::to_string(n) + " plus n=" +
                              std::to_string(m) + " split by " + std::to_string(excess);
            if (certified) throw InvariantViolationError(msg);
            seq.warnings.push_back(msg + " (uncertified entries)");
        }
    }
}

}  // namespace detail

template <class S>
EntropySequence entropy_sequence(const DynamicalSystem<S>& sys, const Partition<S>& a,
                                 std::size_t n_max, const SolveOptions& opt = {}) {
    if (n_max == 0) throw PreconditionError("sequence of length zero");
    EntropySequence seq;
    seq.base = opt.base;
    for (std::size_t n = 1; n <= n_max; ++n) {
        RefinementSolution<S> sol = refinement_step(sys, a, n, opt);
        seq.values.push_back(sol.entropy.value);
        seq.certificates.push_back(sol.certificate);
    }
    detail::finish_sequence(seq, NumTraits<S>::is_exact);
    return seq;
}

struct RateEstimate {
    double estimate = 0.0;
    EntropySequence sequence;
};

/** Rate of a single partition: the running infimum at the last computed n. */
template <class S>
RateEstimate entropy_rate_of_partition(const DynamicalSystem<S>& sys, const Partition<S>& a,
                                       std::size_t n_max, const SolveOptions& opt = {}) {
    RateEstimate est;
    est.sequence = entropy_sequence(sys, a, n_max, opt);
    est.estimate = est.sequence.running_inf.back();
    return est;
}

/**
 * Rate of the system over an explicit partition library: the maximum of the
 * per-partition estimates.  A lower bound on the unrestricted supremum.
 */
template <class S>
double entropy_rate_of_system(const DynamicalSystem<S>& sys,
                              const std::vector<Partition<S>>& library, std::size_t n_max,
                              const SolveOptions& opt = {}) {
    if (library.empty()) throw PreconditionError("empty partition library");
    double best = 0.0;
    bool have = false;
    for (const auto& a : library) {
        double est = entropy_rate_of_partition(sys, a, n_max, opt).estimate;
        if (!have || est > best) {
            best = est;
            have = true;
        }
    }
    return best;
}

/**
 * Rate of the pointwise-product join: H of the product of the first n orbit
 * axes, per n.  No minimization happens here; the join is one fixed tensor.
 */
template <class S>
RateEstimate product_join_rate(const DynamicalSystem<S>& sys, const Partition<S>& a,
                               std::size_t n_max, LogBase base = LogBase::natural,
                               std::size_t cell_cap = 1u << 20) {
    if (n_max == 0) throw PreconditionError("sequence of length zero");
    std::vector<Partition<S>> axes = orbit_axes(sys, a, n_max);
    RateEstimate est;
    est.sequence.base = base;
    std::size_t cells = 1;
    for (std::size_t n = 1; n <= n_max; ++n) {
        cells *= a.size();
        if (cells > cell_cap)
            throw BudgetExceededError("product join has " + std::to_string(cells) +
                                      " cells, above the cap of " + std::to_string(cell_cap));
        std::vector<Partition<S>> prefix(axes.begin(), axes.begin() + n);
        RefinementTensor<S> join = product_refine(prefix);
        est.sequence.values.push_back(tensor_entropy(join, sys.state, base).value);
    }
    detail::finish_sequence(est.sequence, NumTraits<S>::is_exact);
    est.estimate = est.sequence.running_inf.back();
    return est;
}

struct RefineJoinComparison {
    double refined = 0.0;
    double joined = 0.0;
    bool within = false;
};

/** The minimized n-step entropy never exceeds the product-join entropy. */
template <class S>
RefineJoinComparison refine_vs_join_check(const DynamicalSystem<S>& sys, const Partition<S>& a,
                                          std::size_t n, const SolveOptions& opt = {},
                                          double slack = 1e-9) {
    RefineJoinComparison cmp;
    cmp.refined = refinement_step(sys, a, n, opt).entropy.value;
    std::vector<Partition<S>> axes = orbit_axes(sys, a, n);
    cmp.joined = tensor_entropy(product_refine(axes), sys.state, opt.base).value;
    cmp.within = cmp.refined <= cmp.joined + slack;
    return cmp;
}

/**
 * Set-based join entropy for idempotent partitions: label every point by the
 * block membership of its forward orbit and sum weights per label class.
 * Deliberately shares no code with the tensor machinery.
 */
inline double classical_join_entropy(const SpacePtr<Rat>& space,
                                     const std::vector<std::size_t>& point_map,
                                     const Partition<Rat>& a, std::size_t n,
                                     LogBase base = LogBase::natural) {
    if (n == 0) throw PreconditionError("join of length zero");
    require_same_space(space, a.space());
    if (!a.is_crisp()) throw PreconditionError("set-based join requires an idempotent partition");
    if (point_map.size() != space->size())
        throw PreconditionError("point map length does not match space size");
    for (std::size_t img : point_map)
        if (img >= space->size()) throw PreconditionError("point map image out of range");
    std::vector<Rat> push(space->size(), Rat(0));
    for (std::size_t w = 0; w < point_map.size(); ++w) push[point_map[w]] += space->weight(w);
    for (std::size_t j = 0; j < push.size(); ++j)
        if (push[j] != space->weight(j))
            throw PreconditionError("point map does not preserve the weights (point '" +
                                    space->id(j) + "')");

    std::vector<std::size_t> block(space->size(), 0);
    for (std::size_t w = 0; w < space->size(); ++w)
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i][w] == 1) block[w] = i;

    std::map<std::vector<std::size_t>, Rat> atoms;
    for (std::size_t w = 0; w < space->size(); ++w) {
        std::vector<std::size_t> label(n);
        std::size_t cur = w;
        for (std::size_t i = 0; i < n; ++i) {
            label[i] = block[cur];
            cur = point_map[cur];
        }
        atoms[label] += space->weight(w);
    }
    std::vector<Rat> masses;
    masses.reserve(atoms.size());
    for (const auto& [label, mass] : atoms) masses.push_back(mass);
    return entropy_of_masses(masses, base);
}

struct RateTransferCheck {
    double rate_b = 0.0;
    double rate_a = 0.0;
    double conditional = 0.0;
    double bound = 0.0;
    bool within = false;
};

/**
 * Rate of b bounded through an idempotent partition a: rate(b) never exceeds
 * rate(a) plus the product-coupling conditional sum_i m(a_i) sum_j
 * phi(m(a_i.b_j)/m(a_i)).  With a crisp base the bound holds at every finite
 * n (refine the b orbit against the unique crisp refinement of the a orbit),
 * so the slack only absorbs float noise.  Conditioning the other way around
 * breaks the bound already for the one-cell base.
 */
template <class S>
RateTransferCheck rate_transfer_check(const DynamicalSystem<S>& sys, const Partition<S>& a,
                                      const Partition<S>& b, std::size_t n_max,
                                      const SolveOptions& opt = {}, double slack = 1e-9) {
    if (!a.is_crisp()) throw PreconditionError("rate transfer requires an idempotent base");
    RateTransferCheck chk;
    chk.rate_a = entropy_rate_of_partition(sys, a, n_max, opt).estimate;
    chk.rate_b = entropy_rate_of_partition(sys, b, n_max, opt).estimate;
    chk.conditional = h_parallel(a, b, sys.state, opt.base).value;
    chk.bound = chk.rate_a + chk.conditional;
    chk.within = chk.rate_b <= chk.bound + slack;
    return chk;
}

/**
 * Point bijection between two spaces.  Valid when it is one-to-one, carries
 * each weight across unchanged, and (checked against a pair of systems)
 * intertwines the two point maps.
 */
template <class S>
struct IsomorphismMap {
    SpacePtr<S> from;
    SpacePtr<S> to;
    std::vector<std::size_t> sigma;  // image index in `to` per point of `from`
};

template <class S>
void validate_isomorphism(const IsomorphismMap<S>& iso) {
    if (!iso.from || !iso.to) throw IsomorphismError("bijection without spaces");
    if (iso.from->size() != iso.to->size())
        throw IsomorphismError("spaces differ in size (" + std::to_string(iso.from->size()) +
                               " vs " + std::to_string(iso.to->size()) + ")");
    if (iso.sigma.size() != iso.from->size())
        throw IsomorphismError("bijection length does not match the source space");
    std::vector<bool> hit(iso.to->size(), false);
    for (std::size_t w = 0; w < iso.sigma.size(); ++w) {
        std::size_t img = iso.sigma[w];
        if (img >= iso.to->size())
            throw IsomorphismError("image out of range for point '" + iso.from->id(w) + "'");
        if (hit[img])
            throw IsomorphismError("two points share the image '" + iso.to->id(img) + "'");
        hit[img] = true;
        if (!NumTraits<S>::eq(iso.from->weight(w), iso.to->weight(img),
                              std::max(iso.from->tolerance(), iso.to->tolerance())))
            throw IsomorphismError("weight changes across the bijection at point '" +
                                   iso.from->id(w) + "'");
    }
}

template <class S>
void validate_commutation(const IsomorphismMap<S>& iso, const TransformationTau<S>& tau_from,
                          const TransformationTau<S>& tau_to) {
    require_same_space(iso.from, tau_from.space());
    require_same_space(iso.to, tau_to.space());
    const auto& t1 = tau_from.point_map();
    const auto& t2 = tau_to.point_map();
    for (std::size_t w = 0; w < iso.sigma.size(); ++w)
        if (iso.sigma[t1[w]] != t2[iso.sigma[w]])
            throw IsomorphismError("bijection does not intertwine the dynamics at point '" +
                                   iso.from->id(w) + "'");
}

template <class S>
Partition<S> transport_partition(const Partition<S>& a, const IsomorphismMap<S>& iso) {
    validate_isomorphism(iso);
    require_same_space(a.space(), iso.from);
    std::vector<MvElement<S>> elems;
    elems.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::vector<S> v(iso.to->size(), NumTraits<S>::zero());
        for (std::size_t w = 0; w < iso.sigma.size(); ++w) v[iso.sigma[w]] = a[i][w];
        elems.emplace_back(iso.to, std::move(v));
    }
    return Partition<S>(iso.to, std::move(elems));
}

template <class S>
DynamicalSystem<S> transport_system(const DynamicalSystem<S>& sys, const IsomorphismMap<S>& iso) {
    validate_isomorphism(iso);
    require_same_space(sys.space, iso.from);
    const auto& t1 = sys.tau.point_map();
    std::vector<std::size_t> t2(iso.sigma.size(), 0);
    for (std::size_t w = 0; w < iso.sigma.size(); ++w) t2[iso.sigma[w]] = iso.sigma[t1[w]];
    DynamicalSystem<S> out(iso.to, std::move(t2));
    validate_commutation(iso, sys.tau, out.tau);
    return out;
}

}  // namespace mvent

#endif
