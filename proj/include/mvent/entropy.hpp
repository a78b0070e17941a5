#ifndef MVENT_ENTROPY_HPP
#define MVENT_ENTROPY_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mvent/errors.hpp"
#include "mvent/numeric.hpp"
#include "mvent/partition.hpp"

namespace mvent {

enum class LogBase { natural, two };

inline std::string log_base_name(LogBase b) { return b == LogBase::natural ? "e" : "2"; }

inline double log_in_base(double x, LogBase b) {
    return b == LogBase::natural ? std::log(x) : std::log2(x);
}

/** phi(x) = -x log x on [0, 1], with phi(0) = 0. */
inline double phi(double x, LogBase base = LogBase::natural) {
    constexpr double slack = 1e-12;
    if (x < -slack || x > 1.0 + slack) throw DomainError("phi argument outside [0, 1]");
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * log_in_base(x, base);
}

/** An entropy together with the logarithm base it was computed in. */
struct EntropyValue {
    double value = 0.0;
    LogBase base = LogBase::natural;
};

namespace detail {
// Exact-mode masses are sorted by exact comparison before any float math so
// that every code path producing the same multiset of masses produces the
// same double, bit for bit.
inline double entropy_sorted(std::vector<double> xs, LogBase base) {
    std::sort(xs.begin(), xs.end());
    double total = 0.0;
    for (double x : xs) total += phi(x, base);
    return total;
}
}  // namespace detail

inline double entropy_of_masses(const std::vector<Rat>& masses, LogBase base) {
    std::vector<Rat> pos;
    pos.reserve(masses.size());
    for (const Rat& m : masses)
        if (m > 0) pos.push_back(m);
    std::sort(pos.begin(), pos.end());
    double total = 0.0;
    for (const Rat& m : pos) total += phi(m.get_d(), base);
    return total;
}

inline double entropy_of_masses(const std::vector<double>& masses, LogBase base) {
    std::vector<double> pos;
    pos.reserve(masses.size());
    for (double m : masses)
        if (m > 0.0) pos.push_back(m);
    return detail::entropy_sorted(std::move(pos), base);
}

/** H(A) = sum_i phi(m(a_i)). */
template <class S>
EntropyValue partition_entropy(const Partition<S>& a, const StateM<S>& m,
                               LogBase base = LogBase::natural) {
    return {entropy_of_masses(a.masses(m), base), base};
}

}  // namespace mvent

#endif
