#pragma once

#include "ahlfors/cubes.hpp"
#include "ahlfors/error.hpp"
#include "ahlfors/partition.hpp"
#include "ahlfors/space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace ahlfors {

struct QuadratureRule {
    std::vector<AtomId> nodes; // one per region, its inner-ball center
    std::vector<double> weights;
    double mesh {};       // sup over atoms of the distance to the nearest node
    double separation {}; // min pairwise node distance (+inf for one node)
};

/// Nodes at the inner-ball centers, weights equal to the region measures.
template <Metric M>
QuadratureRule rule_from_partition(const AtomizedSpace<M>& space, const Partition& part)
{
    QuadratureRule rule;
    for (const Region& r : part.regions) {
        rule.nodes.push_back(r.inner_center);
        rule.weights.push_back(space.measure(r.atom_ids));
    }
    detail::require(!rule.nodes.empty(), Errc::invalid_argument, "partition has no regions");
    std::vector<double> nearest(space.size(), std::numeric_limits<double>::infinity());
    for (AtomId z : rule.nodes)
        for (std::size_t i = 0; i < space.size(); ++i)
            nearest[i] = std::min(nearest[i], space.distance(z, static_cast<AtomId>(i)));
    rule.mesh = *std::max_element(nearest.begin(), nearest.end());
    rule.separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < rule.nodes.size(); ++j)
            rule.separation = std::min(rule.separation, space.distance(rule.nodes[i], rule.nodes[j]));
    return rule;
}

using Integrand = std::function<double(const Point&)>;

template <Metric M>
double integrate(const AtomizedSpace<M>& space, const QuadratureRule& rule, const Integrand& f)
{
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
        sum += rule.weights[j] * f(space.position(rule.nodes[j]));
    return sum;
}

/// The integral against the atomized measure.
template <Metric M>
double reference_integral(const AtomizedSpace<M>& space, const Integrand& f)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i)
        sum += space.weight(static_cast<AtomId>(i)) * f(space.position(static_cast<AtomId>(i)));
    return sum;
}

/// An integrand with a Lipschitz constant valid for the space's metric.
struct TestFunction {
    std::string name;
    Integrand f;
    double lipschitz {};
};

/// Coordinate functions (the non-constant ones), distance to an extreme atom,
/// a Gaussian bump centered at the atom nearest the barycenter, and the
/// constant 1 (Lipschitz 0).
template <Metric M>
std::vector<TestFunction> default_test_functions(const AtomizedSpace<M>& space)
{
    const double lip = M::euclidean_lipschitz;
    std::vector<TestFunction> suite;
    Point lo { std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity() };
    Point hi { -lo[0], -lo[1], -lo[2] };
    Point bary {};
    for (std::size_t i = 0; i < space.size(); ++i) {
        const Point& p = space.position(static_cast<AtomId>(i));
        const double w = space.weight(static_cast<AtomId>(i));
        for (int c = 0; c < 3; ++c) {
            lo[static_cast<std::size_t>(c)] = std::min(lo[static_cast<std::size_t>(c)], p[static_cast<std::size_t>(c)]);
            hi[static_cast<std::size_t>(c)] = std::max(hi[static_cast<std::size_t>(c)], p[static_cast<std::size_t>(c)]);
            bary[static_cast<std::size_t>(c)] += w * p[static_cast<std::size_t>(c)];
        }
    }
    static constexpr const char* axis_names[] = { "x", "y", "z" };
    for (std::size_t c = 0; c < 3; ++c)
        if (hi[c] - lo[c] > 0.0)
            suite.push_back({ axis_names[c], [c](const Point& p) { return p[c]; }, lip });

    const Point anchor = space.position(0);
    suite.push_back({ "dist", [metric = space.metric(), anchor](const Point& p) { return metric(anchor, p); }, 1.0 });

    AtomId mid = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < space.size(); ++i) {
        const Point& p = space.position(static_cast<AtomId>(i));
        const double e = std::hypot(p[0] - bary[0], p[1] - bary[1], p[2] - bary[2]);
        if (e < best) {
            best = e;
            mid = static_cast<AtomId>(i);
        }
    }
    // exp(-|x - c|^2 / (2 s^2)) has Euclidean Lipschitz constant e^(-1/2) / s.
    const Point c = space.position(mid);
    const double s = 0.25 * space.diameter();
    suite.push_back({ "bump",
        [c, s](const Point& p) {
            const double r2 = (p[0] - c[0]) * (p[0] - c[0]) + (p[1] - c[1]) * (p[1] - c[1]) + (p[2] - c[2]) * (p[2] - c[2]);
            return std::exp(-r2 / (2.0 * s * s));
        },
        lip * std::exp(-0.5) / s });
    suite.push_back({ "one", [](const Point&) { return 1.0; }, 0.0 });
    return suite;
}

struct DecayRow {
    int N {};
    std::string f_name;
    double error {};
    double bound {}; // Lip(f) * max region diameter
    double mesh {};
    double separation {};
    double ratio {};       // mesh / separation
    double ratio_bound {}; // c3 / c4
};

struct DecaySlope {
    std::string f_name;
    double slope {}; // NaN when fewer than two rows have a nonzero error
};

struct DecayTable {
    std::string space;
    std::vector<DecayRow> rows;
    std::vector<DecaySlope> slopes;
    std::vector<std::pair<int, std::string>> skipped; // N and the reason
};

/// Least-squares slope of log y against log x over the positive pairs.
inline double loglog_slope(const std::vector<std::pair<double, double>>& xy)
{
    std::vector<std::pair<double, double>> pts;
    for (auto [x, y] : xy)
        if (x > 0.0 && y > 0.0)
            pts.emplace_back(std::log(x), std::log(y));
    if (pts.size() < 2)
        return std::numeric_limits<double>::quiet_NaN();
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0.0, sxy = 0.0;
    for (auto [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

/// Equal-measure rules for each N, compared with the atom-sum integrals. N
/// values rejected by the partition preconditions are listed in `skipped`.
template <Metric M>
DecayTable error_decay_experiment(const AtomizedSpace<M>& space, const CubeTree& tree,
    const std::vector<TestFunction>& suite, const std::vector<int>& N_list)
{
    detail::require(std::is_sorted(N_list.begin(), N_list.end()), Errc::invalid_argument, "N list must be increasing");
    DecayTable table;
    table.space = space.kind();
    const auto constants = effective_constants(space, tree);
    std::vector<double> reference;
    for (const auto& t : suite)
        reference.push_back(reference_integral(space, t.f));
    std::vector<std::vector<std::pair<double, double>>> series(suite.size());
    for (int N : N_list) {
        Partition part;
        try {
            part = equal_measure_partition(space, tree, N, constants);
        } catch (const Error& e) {
            if (e.code() == Errc::space_not_connected)
                throw;
            table.skipped.emplace_back(N, e.what());
            continue;
        }
        const auto rule = rule_from_partition(space, part);
        double max_diam = 0.0;
        for (const Region& r : part.regions)
            max_diam = std::max(max_diam, set_diameter(space, tree, r.atom_ids));
        for (std::size_t i = 0; i < suite.size(); ++i) {
            DecayRow row;
            row.N = N;
            row.f_name = suite[i].name;
            row.error = std::abs(integrate(space, rule, suite[i].f) - reference[i]);
            row.bound = suite[i].lipschitz * max_diam;
            row.mesh = rule.mesh;
            row.separation = rule.separation;
            row.ratio = rule.mesh / rule.separation;
            row.ratio_bound = part.params.c3 / part.params.c4;
            series[i].emplace_back(N, row.error);
            table.rows.push_back(std::move(row));
        }
    }
    for (std::size_t i = 0; i < suite.size(); ++i)
        table.slopes.push_back({ suite[i].name, loglog_slope(series[i]) });
    return table;
}

} // namespace ahlfors
