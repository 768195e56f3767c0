#pragma once

#include "ahlfors/error.hpp"
#include "ahlfors/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ahlfors {

using AtomId = std::int32_t;

/// A finite weighted point cloud standing in for a metric measure space.
///
/// Atoms are identified by their dense index. The measure of a set is the sum
/// of its atom weights, so every "exact measure" statement downstream is exact
/// up to one atom weight. Objects are immutable after construction.
template <Metric M>
class AtomizedSpace {
public:
    using metric_type = M;

    /// `resolution` is the largest radius of the cell an atom stands for. When
    /// `diameter` is omitted it is computed by exhaustive pair scan.
    AtomizedSpace(std::string kind, std::vector<Point> positions, std::vector<double> weights,
        double dimension_hint, double resolution, std::optional<double> diameter = std::nullopt,
        M metric = {})
        : kind_(std::move(kind))
        , positions_(std::move(positions))
        , weights_(std::move(weights))
        , dimension_hint_(dimension_hint)
        , resolution_(resolution)
        , metric_(metric)
    {
        detail::require(positions_.size() >= 2, Errc::invalid_argument, "a space needs at least two atoms");
        detail::require(positions_.size() == weights_.size(), Errc::invalid_argument,
            "positions and weights differ in length");
        detail::require(positions_.size() < static_cast<std::size_t>(INT32_MAX), Errc::invalid_argument,
            "too many atoms");
        detail::require(dimension_hint_ > 0.0, Errc::invalid_argument, "dimension hint must be positive");
        detail::require(resolution_ > 0.0, Errc::invalid_argument, "resolution must be positive");
        for (double w : weights_)
            detail::require(w > 0.0 && std::isfinite(w), Errc::invalid_argument, "atom weights must be positive");
        total_measure_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
        max_weight_ = *std::max_element(weights_.begin(), weights_.end());
        diameter_ = diameter ? *diameter : exhaustive_diameter();
        detail::require(diameter_ > 0.0, Errc::invalid_argument, "space has zero diameter");
    }

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t size() const noexcept { return positions_.size(); }
    [[nodiscard]] const Point& position(AtomId i) const { return positions_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] double weight(AtomId i) const { return weights_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] std::span<const Point> positions() const noexcept { return positions_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] const M& metric() const noexcept { return metric_; }

    [[nodiscard]] double distance(AtomId a, AtomId b) const { return metric_(position(a), position(b)); }
    [[nodiscard]] double distance(const Point& p, AtomId b) const { return metric_(p, position(b)); }

    [[nodiscard]] double total_measure() const noexcept { return total_measure_; }
    [[nodiscard]] double max_weight() const noexcept { return max_weight_; }
    [[nodiscard]] double dimension_hint() const noexcept { return dimension_hint_; }
    [[nodiscard]] double diameter() const noexcept { return diameter_; }
    [[nodiscard]] double resolution() const noexcept { return resolution_; }

    [[nodiscard]] double measure(std::span<const AtomId> atoms) const
    {
        double sum = 0.0;
        for (AtomId a : atoms)
            sum += weight(a);
        return sum;
    }

private:
    double exhaustive_diameter() const
    {
        double best = 0.0;
        for (std::size_t i = 0; i < positions_.size(); ++i)
            for (std::size_t j = i + 1; j < positions_.size(); ++j)
                best = std::max(best, metric_(positions_[i], positions_[j]));
        return best;
    }

    std::string kind_;
    std::vector<Point> positions_;
    std::vector<double> weights_;
    double dimension_hint_;
    double resolution_;
    double total_measure_ {};
    double max_weight_ {};
    double diameter_ {};
    M metric_;
};

// Midpoints of `atom_count` equal cells of [0, 1].
inline AtomizedSpace<Euclidean> build_interval(int atom_count)
{
    detail::require(atom_count >= 2, Errc::invalid_argument, "interval needs at least 2 atoms");
    const double step = 1.0 / atom_count;
    std::vector<Point> pos(static_cast<std::size_t>(atom_count));
    for (int i = 0; i < atom_count; ++i)
        pos[static_cast<std::size_t>(i)] = { (i + 0.5) * step, 0.0, 0.0 };
    std::vector<double> w(pos.size(), step);
    return { "interval", std::move(pos), std::move(w), 1.0, 0.5 * step, 1.0 - step };
}

// Cell centers of a side_atoms x side_atoms grid on [0, 1]^2, row-major.
inline AtomizedSpace<Euclidean> build_square(int side_atoms)
{
    detail::require(side_atoms >= 2, Errc::invalid_argument, "square needs at least 2 atoms per side");
    const double step = 1.0 / side_atoms;
    std::vector<Point> pos;
    pos.reserve(static_cast<std::size_t>(side_atoms) * static_cast<std::size_t>(side_atoms));
    for (int j = 0; j < side_atoms; ++j)
        for (int i = 0; i < side_atoms; ++i)
            pos.push_back({ (i + 0.5) * step, (j + 0.5) * step, 0.0 });
    std::vector<double> w(pos.size(), step * step);
    const double half_diagonal = 0.5 * step * std::numbers::sqrt2;
    return { "square", std::move(pos), std::move(w), 2.0, half_diagonal,
        std::numbers::sqrt2 * (1.0 - step) };
}

namespace detail {

    // Largest geodesic distance among unit vectors: pi minus the smallest angle
    // between a point and the antipode of another. Candidates are pruned by
    // the z-gap, which bounds the angle from below.
    inline double sphere_diameter(std::span<const Point> pts)
    {
        std::vector<std::size_t> order(pts.size());
        std::iota(order.begin(), order.end(), std::size_t { 0 });
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return pts[a][2] < pts[b][2] || (pts[a][2] == pts[b][2] && a < b);
        });
        std::vector<double> zs(order.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            zs[i] = pts[order[i]][2];
        const Geodesic geo;
        double best = std::numbers::pi;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Point anti { -pts[i][0], -pts[i][1], -pts[i][2] };
            // chord >= |dz| and angle >= chord
            auto lo = std::lower_bound(zs.begin(), zs.end(), anti[2] - best);
            for (auto it = lo; it != zs.end() && *it <= anti[2] + best; ++it) {
                const std::size_t j = order[static_cast<std::size_t>(it - zs.begin())];
                if (j == i)
                    continue;
                best = std::min(best, geo(anti, pts[j]));
            }
        }
        return std::numbers::pi - best;
    }

} // namespace detail

/// Equal-weight atoms on the unit sphere along a generalized spiral. The seed
/// fixes a longitude offset; positions are otherwise deterministic.
inline AtomizedSpace<Geodesic> build_sphere_s2(int atom_count, std::uint64_t seed)
{
    detail::require(atom_count >= 8, Errc::invalid_argument, "sphere needs at least 8 atoms");
    std::mt19937_64 rng(seed);
    // 53 random bits mapped to [0, 1), independent of the standard library's
    // distribution implementations.
    const double offset = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Point> pos(static_cast<std::size_t>(atom_count));
    for (int i = 0; i < atom_count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / atom_count;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = offset + golden_angle * i;
        pos[static_cast<std::size_t>(i)] = { rho * std::cos(phi), rho * std::sin(phi), z };
    }
    std::vector<double> w(pos.size(), 1.0 / atom_count);
    // Twice the radius of a cap holding 1/atom_count of the area.
    const double cap = std::acos(1.0 - 2.0 / atom_count);
    const double diam = detail::sphere_diameter(pos);
    return { "sphere", std::move(pos), std::move(w), 2.0, 2.0 * cap, diam };
}

/// The 3^level cells of the Sierpinski gasket on the unit equilateral
/// triangle, one atom at each cell centroid, in address order.
inline AtomizedSpace<Euclidean> build_gasket(int level)
{
    detail::require(level >= 1 && level <= 14, Errc::invalid_argument, "gasket level must be in [1, 14]");
    const std::array<Point, 3> corners { Point { 0.0, 0.0, 0.0 }, Point { 1.0, 0.0, 0.0 },
        Point { 0.5, std::numbers::sqrt3 / 2.0, 0.0 } };
    // Lower-left corners of cells; each level maps p -> p + side * corner_j.
    std::vector<Point> anchors { Point { 0.0, 0.0, 0.0 } };
    double side = 1.0;
    for (int l = 0; l < level; ++l) {
        side *= 0.5;
        std::vector<Point> next;
        next.reserve(anchors.size() * 3);
        for (const Point& a : anchors)
            for (const Point& c : corners)
                next.push_back({ a[0] + side * c[0], a[1] + side * c[1], 0.0 });
        anchors = std::move(next);
    }
    std::vector<Point> pos;
    pos.reserve(anchors.size());
    for (const Point& a : anchors)
        pos.push_back({ a[0] + side * 0.5, a[1] + side * std::numbers::sqrt3 / 6.0, 0.0 });
    std::vector<double> w(pos.size(), 1.0 / static_cast<double>(pos.size()));
    const double circumradius = side / std::numbers::sqrt3;
    return { "gasket", std::move(pos), std::move(w), std::log(3.0) / std::log(2.0), circumradius, 1.0 - side };
}

/// Atoms on the two segments [-1,1]x{0} and {0}x[-1,1] under the max-metric,
/// weighted by normalized length. The horizontal arm gets the extra atom when
/// atom_count is odd.
inline AtomizedSpace<Chebyshev> build_plus_sign(int atom_count)
{
    detail::require(atom_count >= 8, Errc::invalid_argument, "plus-sign needs at least 8 atoms");
    const int horizontal = (atom_count + 1) / 2;
    const int vertical = atom_count / 2;
    std::vector<Point> pos;
    std::vector<double> w;
    pos.reserve(static_cast<std::size_t>(atom_count));
    w.reserve(static_cast<std::size_t>(atom_count));
    auto arm = [&](int count, int axis) {
        const double step = 2.0 / count;
        for (int i = 0; i < count; ++i) {
            Point p { 0.0, 0.0, 0.0 };
            p[static_cast<std::size_t>(axis)] = -1.0 + (i + 0.5) * step;
            pos.push_back(p);
            w.push_back(step / 4.0);
        }
    };
    arm(horizontal, 0);
    arm(vertical, 1);
    const double resolution = 1.0 / vertical;
    const double diam = 2.0 - 2.0 / horizontal;
    return { "plus", std::move(pos), std::move(w), 1.0, resolution, diam };
}

/// [0, 0.4] and [0.6, 1] on the line, half of the atoms on each: a
/// disconnected Ahlfors regular space with gap 0.2.
inline AtomizedSpace<Euclidean> build_two_segments(int atom_count)
{
    detail::require(atom_count >= 4 && atom_count % 2 == 0, Errc::invalid_argument,
        "two-segments needs an even atom count of at least 4");
    const int half = atom_count / 2;
    const double step = 0.4 / half;
    std::vector<Point> pos;
    pos.reserve(static_cast<std::size_t>(atom_count));
    for (double start : { 0.0, 0.6 })
        for (int i = 0; i < half; ++i)
            pos.push_back({ start + (i + 0.5) * step, 0.0, 0.0 });
    std::vector<double> w(pos.size(), 1.0 / atom_count);
    return { "segments", std::move(pos), std::move(w), 1.0, 0.5 * step, 1.0 - step };
}

} // namespace ahlfors
