#ifndef MVENT_CONFIG_HPP
#define MVENT_CONFIG_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mvent/entropy.hpp"
#include "mvent/errors.hpp"
#include "mvent/numeric.hpp"
#include "mvent/partition.hpp"
#include "mvent/system.hpp"

namespace mvent {

/** A named partition as read from a config file: rows = elements, columns = points. */
struct RawPartition {
    std::string name;
    std::vector<std::vector<Rat>> rows;
};

/**
 * A system description parsed from the line-based config format:
 *
 *   space  w1 w2 w3 w4          point ids
 *   weights 1/4 1/4 1/4 1/4     rationals or finite decimals
 *   map     1 2 3 0             image point index per point (optional, default identity)
 *   log_base e                  e | 2 (optional)
 *   numeric rational            rational | float (optional)
 *   tolerance 1e-9              float-mode comparison tolerance (optional)
 *
 *   partition A                 one row per element, one column per point
 *   1 0 0 1
 *   0 1 1 0
 *   end
 *
 * '#' starts a comment.  Values are stored exactly; float mode converts on use.
 */
struct ParsedConfig {
    std::vector<std::string> point_ids;
    std::vector<Rat> weights;
    std::vector<std::size_t> point_map;  // empty means identity
    std::vector<RawPartition> partitions;
    std::optional<LogBase> log_base;
    std::optional<NumericMode::Kind> numeric;
    std::optional<double> tolerance;

    const RawPartition& partition(const std::string& name) const;
};

ParsedConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
ParsedConfig load_config_file(const std::string& path);

namespace detail {
inline Rat to_scalar(const Rat& r, Rat*) { return r; }
inline double to_scalar(const Rat& r, double*) { return r.get_d(); }
}  // namespace detail

template <class S>
DynamicalSystem<S> system_from_config(const ParsedConfig& cfg, double tolerance = 1e-9) {
    std::vector<S> w;
    w.reserve(cfg.weights.size());
    for (const Rat& r : cfg.weights) w.push_back(detail::to_scalar(r, static_cast<S*>(nullptr)));
    SpacePtr<S> space = make_space<S>(cfg.point_ids, std::move(w),
                                      NumTraits<S>::is_exact ? 1e-9 : tolerance);
    std::vector<std::size_t> map = cfg.point_map;
    if (map.empty()) {
        map.resize(cfg.point_ids.size());
        for (std::size_t i = 0; i < map.size(); ++i) map[i] = i;
    }
    return DynamicalSystem<S>(space, std::move(map));
}

template <class S>
Partition<S> partition_from_config(const ParsedConfig& cfg, const std::string& name,
                                   const SpacePtr<S>& space) {
    const RawPartition& raw = cfg.partition(name);
    std::vector<MvElement<S>> elems;
    elems.reserve(raw.rows.size());
    for (const auto& row : raw.rows) {
        std::vector<S> v;
        v.reserve(row.size());
        for (const Rat& r : row) v.push_back(detail::to_scalar(r, static_cast<S*>(nullptr)));
        elems.emplace_back(space, std::move(v));
    }
    return Partition<S>(space, std::move(elems));
}

}  // namespace mvent

#endif
