#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <string_view>

namespace ahlfors {

// Atom coordinates. Planar spaces leave the third component at zero.
using Point = std::array<double, 3>;

template <typename M>
concept Metric = requires(const M& m, const Point& a, const Point& b) {
    { m(a, b) } -> std::convertible_to<double>;
    { M::name } -> std::convertible_to<std::string_view>;
    // Lipschitz constant of the ambient Euclidean distance with respect to M,
    // used to bound Lipschitz constants of test integrands.
    { M::euclidean_lipschitz } -> std::convertible_to<double>;
};

struct Euclidean {
    static constexpr std::string_view name = "euclidean";
    static constexpr double euclidean_lipschitz = 1.0;

    [[nodiscard]] double operator()(const Point& a, const Point& b) const noexcept
    {
        const double dx = a[0] - b[0];
        const double dy = a[1] - b[1];
        const double dz = a[2] - b[2];
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    }
};

// max(|dx|, |dy|, |dz|)
struct Chebyshev {
    static constexpr std::string_view name = "chebyshev";
    static constexpr double euclidean_lipschitz = 1.7320508075688772; // sqrt(3)

    [[nodiscard]] double operator()(const Point& a, const Point& b) const noexcept
    {
        return std::max({ std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2]) });
    }
};

// Great-circle distance between unit vectors, arccos<a, b>.
struct Geodesic {
    static constexpr std::string_view name = "geodesic";
    static constexpr double euclidean_lipschitz = 1.0; // chord <= arc

    [[nodiscard]] double operator()(const Point& a, const Point& b) const noexcept
    {
        // atan2 form stays accurate for nearly equal and nearly antipodal pairs.
        const double cx = a[1] * b[2] - a[2] * b[1];
        const double cy = a[2] * b[0] - a[0] * b[2];
        const double cz = a[0] * b[1] - a[1] * b[0];
        const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
    }
};

} // namespace ahlfors
