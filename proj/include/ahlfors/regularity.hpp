#pragma once

#include "ahlfors/error.hpp"
#include "ahlfors/nets.hpp"
#include "ahlfors/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace ahlfors {

struct RegularityReport {
    double d_fit {};
    double c1_hat {};
    double c2_hat {};
    double r_min {};
    double r_max {};
    std::size_t sample_count {};
};

/// mu(B(x, r)) for the open ball, for each radius (any order).
template <Metric M>
std::vector<double> ball_measures(const AtomizedSpace<M>& space, AtomId center, std::span<const double> radii)
{
    std::vector<std::pair<double, double>> dw(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto a = static_cast<AtomId>(i);
        dw[i] = { space.distance(center, a), space.weight(a) };
    }
    std::sort(dw.begin(), dw.end());
    std::vector<double> prefix(dw.size() + 1, 0.0);
    for (std::size_t i = 0; i < dw.size(); ++i)
        prefix[i + 1] = prefix[i] + dw[i].second;
    std::vector<double> out;
    out.reserve(radii.size());
    for (double r : radii) {
        const auto it = std::lower_bound(dw.begin(), dw.end(), std::pair { r, -std::numeric_limits<double>::infinity() });
        out.push_back(prefix[static_cast<std::size_t>(it - dw.begin())]);
    }
    return out;
}

/// Fits mu(B(x, r)) ~ r^d over the given centers and radii.
///
/// Radii outside (4h, diam] are dropped. With `exponent` set, the fit is
/// skipped and the constants are taken at that exponent.
template <Metric M>
RegularityReport regularity_probe(const AtomizedSpace<M>& space, std::span<const AtomId> sample_centers,
    std::span<const double> radii, std::optional<double> exponent = std::nullopt)
{
    detail::require(!sample_centers.empty(), Errc::invalid_argument, "no sample centers");
    std::vector<double> usable;
    for (double r : radii)
        if (r > 4.0 * space.resolution() && r <= space.diameter())
            usable.push_back(r);
    detail::require(!usable.empty(), Errc::resolution_too_coarse, "every probe radius is at or below 4x the resolution");
    std::sort(usable.begin(), usable.end());

    std::vector<std::pair<double, double>> samples; // (log r, log mu)
    samples.reserve(usable.size() * sample_centers.size());
    for (AtomId c : sample_centers) {
        const auto mu = ball_measures(space, c, usable);
        for (std::size_t i = 0; i < usable.size(); ++i)
            samples.emplace_back(std::log(usable[i]), std::log(mu[i]));
    }

    RegularityReport rep;
    rep.r_min = usable.front();
    rep.r_max = usable.back();
    rep.sample_count = samples.size();
    if (exponent) {
        rep.d_fit = *exponent;
    } else if (usable.size() < 2) {
        rep.d_fit = space.dimension_hint();
    } else {
        double mx = 0.0, my = 0.0;
        for (auto [x, y] : samples) {
            mx += x;
            my += y;
        }
        mx /= static_cast<double>(samples.size());
        my /= static_cast<double>(samples.size());
        double sxx = 0.0, sxy = 0.0;
        for (auto [x, y] : samples) {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
        }
        rep.d_fit = sxy / sxx;
    }
    rep.c1_hat = std::numeric_limits<double>::infinity();
    rep.c2_hat = 0.0;
    for (auto [x, y] : samples) {
        const double c = std::exp(y - rep.d_fit * x);
        rep.c1_hat = std::min(rep.c1_hat, c);
        rep.c2_hat = std::max(rep.c2_hat, c);
    }
    return rep;
}

/// `count` radii spaced geometrically over (8h, diam / 2].
template <Metric M>
std::vector<double> default_probe_radii(const AtomizedSpace<M>& space, int count = 8)
{
    const double lo = 8.0 * space.resolution();
    const double hi = 0.5 * space.diameter();
    std::vector<double> radii;
    if (lo >= hi) {
        radii.push_back(space.diameter());
        return radii;
    }
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 1.0 : static_cast<double>(i) / (count - 1);
        radii.push_back(lo * std::pow(hi / lo, t));
    }
    return radii;
}

/// The first `count` farthest-point centers; extreme atoms come first.
template <Metric M>
std::vector<AtomId> default_probe_centers(const AtomizedSpace<M>& space, std::size_t count = 64)
{
    FarthestPointSampler<M> fps(space);
    count = std::min(count, space.size());
    while (fps.centers().size() < count && fps.farthest_distance() > 0.0)
        fps.add_farthest();
    return fps.centers();
}

} // namespace ahlfors
