#pragma once

#include "ahlfors/cubes.hpp"
#include "ahlfors/error.hpp"
#include "ahlfors/space.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace ahlfors {

// Measures are sums of at most ~10^6 weights of a unit total; comparisons
// against targets absorb this much rounding.
inline constexpr double measure_epsilon = 1e-12;

/// Picks T inside S with mu(T) within one atom weight below t.
///
/// Walks the generations from coarse to fine. At each generation where every
/// (S_rem ∩ Q) has measure <= t_rem, whole intersections are taken while
/// they fit; after the finest generation single atoms are taken the same
/// way. Candidates are visited by cube index. With anchors they are visited
/// by distance to the nearest anchor and taking stops at the first one that
/// does not fit, so T grows outward from the anchors.
template <Metric M>
std::vector<AtomId> extract_subset(const AtomizedSpace<M>& space, const CubeTree& tree, std::span<const AtomId> subset,
    double t, std::span<const AtomId> anchors)
{
    const bool anchored = !anchors.empty();
    auto reach = [&](AtomId x) {
        double best = std::numeric_limits<double>::infinity();
        for (AtomId a : anchors)
            best = std::min(best, space.distance(a, x));
        return best;
    };
    const double mu_s = space.measure(subset);
    detail::require(t >= -measure_epsilon && t <= mu_s + measure_epsilon, Errc::invalid_argument,
        "target measure outside [0, mu(S)]");
    std::vector<AtomId> rest(subset.begin(), subset.end());
    std::sort(rest.begin(), rest.end());
    if (t <= measure_epsilon)
        return {};
    if (t >= mu_s - measure_epsilon)
        return rest;

    std::vector<AtomId> taken;
    double remaining = t;
    std::vector<double> acc;
    std::vector<int> touched;
    std::vector<char> take_cube;
    for (int k = tree.k_min(); k <= tree.k_max() && remaining > measure_epsilon; ++k) {
        acc.assign(tree.cube_count(k), 0.0);
        touched.clear();
        const auto labels = tree.labels(k);
        for (AtomId a : rest) {
            const int q = labels[static_cast<std::size_t>(a)];
            if (acc[static_cast<std::size_t>(q)] == 0.0)
                touched.push_back(q);
            acc[static_cast<std::size_t>(q)] += space.weight(a);
        }
        double largest = 0.0;
        for (int q : touched)
            largest = std::max(largest, acc[static_cast<std::size_t>(q)]);
        if (largest > remaining + measure_epsilon)
            continue;
        if (anchored) {
            std::vector<std::pair<double, int>> keyed;
            keyed.reserve(touched.size());
            for (int q : touched)
                keyed.emplace_back(reach(tree.cube(k, q).center_id), q);
            std::sort(keyed.begin(), keyed.end());
            for (std::size_t i = 0; i < keyed.size(); ++i)
                touched[i] = keyed[i].second;
        } else {
            std::sort(touched.begin(), touched.end());
        }
        take_cube.assign(tree.cube_count(k), 0);
        for (int q : touched) {
            const double m = acc[static_cast<std::size_t>(q)];
            if (m <= remaining + measure_epsilon) {
                take_cube[static_cast<std::size_t>(q)] = 1;
                remaining -= m;
            } else if (anchored) {
                break;
            }
        }
        std::size_t keep = 0;
        for (AtomId a : rest) {
            if (take_cube[static_cast<std::size_t>(labels[static_cast<std::size_t>(a)])])
                taken.push_back(a);
            else
                rest[keep++] = a;
        }
        rest.resize(keep);
    }
    if (remaining > measure_epsilon) {
        if (anchored) {
            std::vector<std::pair<double, AtomId>> keyed;
            keyed.reserve(rest.size());
            for (AtomId a : rest)
                keyed.emplace_back(reach(a), a);
            std::sort(keyed.begin(), keyed.end());
            for (std::size_t i = 0; i < keyed.size(); ++i)
                rest[i] = keyed[i].second;
        }
        for (AtomId a : rest) {
            if (space.weight(a) <= remaining + measure_epsilon) {
                taken.push_back(a);
                remaining -= space.weight(a);
                if (remaining <= measure_epsilon)
                    break;
            } else if (anchored) {
                break;
            }
        }
    }
    std::sort(taken.begin(), taken.end());
    return taken;
}

template <Metric M>
std::vector<AtomId> extract_subset(const AtomizedSpace<M>& space, const CubeTree& tree, std::span<const AtomId> subset,
    double t, std::optional<AtomId> anchor = std::nullopt)
{
    if (anchor) {
        const AtomId one[] = { *anchor };
        return extract_subset(space, tree, subset, t, std::span<const AtomId>(one));
    }
    return extract_subset(space, tree, subset, t, std::span<const AtomId> {});
}

} // namespace ahlfors
