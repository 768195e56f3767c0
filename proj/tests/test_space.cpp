#include "ahlfors/regularity.hpp"
#include "ahlfors/space.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ahlfors;

namespace {

template <Metric M>
double sum_weights(const AtomizedSpace<M>& s)
{
    double t = 0.0;
    for (double w : s.weights())
        t += w;
    return t;
}

template <Metric M>
double ball(const AtomizedSpace<M>& s, AtomId x, double r)
{
    const double radii[] = { r };
    return ball_measures(s, x, radii)[0];
}

// Worst triangle-inequality slack over random triples.
template <Metric M>
double triangle_slack(const AtomizedSpace<M>& s, int triples)
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<AtomId> pick(0, static_cast<AtomId>(s.size() - 1));
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < triples; ++t) {
        const AtomId a = pick(rng), b = pick(rng), c = pick(rng);
        EXPECT_EQ(s.distance(a, a), 0.0);
        EXPECT_EQ(s.distance(a, b), s.distance(b, a));
        EXPECT_GE(s.distance(a, b), 0.0);
        worst = std::min(worst, s.distance(a, b) + s.distance(b, c) - s.distance(a, c));
    }
    return worst;
}

template <Metric M>
double constant_ratio(const AtomizedSpace<M>& s)
{
    const auto rep = regularity_probe(s, default_probe_centers(s), default_probe_radii(s), s.dimension_hint());
    return rep.c2_hat / rep.c1_hat;
}

} // namespace

TEST(Interval, FourAtomsAtCellMidpoints)
{
    const auto s = build_interval(4);
    ASSERT_EQ(s.size(), 4u);
    const double expect[] = { 0.125, 0.375, 0.625, 0.875 };
    for (AtomId i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(s.position(i)[0], expect[i]);
        EXPECT_DOUBLE_EQ(s.weight(i), 0.25);
    }
    EXPECT_EQ(s.total_measure(), 1.0);
    EXPECT_DOUBLE_EQ(s.resolution(), 1.0 / 8.0);
    EXPECT_DOUBLE_EQ(s.diameter(), 0.75);
}

TEST(Interval, RejectsFewerThanTwoAtoms)
{
    try {
        build_interval(1);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::invalid_argument);
    }
}

TEST(Interval, BallMeasureBetweenOneAndTwoTimesRadius)
{
    const auto s = build_interval(1000);
    const AtomId mid = 500; // 0.5005
    const double r = 0.1;
    const double mu = ball(s, mid, r);
    EXPECT_GE(mu, 1.0 * r - s.max_weight());
    EXPECT_LE(mu, 2.0 * r + s.max_weight());
    // an endpoint ball keeps only one side
    EXPECT_NEAR(ball(s, 0, r), r, s.max_weight());
}

TEST(Builders, NormalizedWithPositiveDiameter)
{
    EXPECT_NEAR(sum_weights(build_interval(1000)), 1.0, 1e-12);
    EXPECT_NEAR(sum_weights(build_square(64)), 1.0, 1e-12);
    EXPECT_NEAR(sum_weights(build_sphere_s2(5000, 1)), 1.0, 1e-12);
    EXPECT_NEAR(sum_weights(build_gasket(7)), 1.0, 1e-12);
    EXPECT_NEAR(sum_weights(build_plus_sign(1001)), 1.0, 1e-12);
    EXPECT_NEAR(sum_weights(build_two_segments(1000)), 1.0, 1e-12);
    EXPECT_GT(build_gasket(3).diameter(), 0.0);
}

TEST(Builders, DiameterMatchesExhaustiveScan)
{
    auto check = [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        const S scanned(s.kind(), std::vector<Point>(s.positions().begin(), s.positions().end()),
            std::vector<double>(s.weights().begin(), s.weights().end()), s.dimension_hint(), s.resolution());
        EXPECT_NEAR(s.diameter(), scanned.diameter(), 1e-12) << s.kind();
    };
    check(build_interval(50));
    check(build_square(12));
    check(build_sphere_s2(700, 3));
    check(build_gasket(4));
    check(build_plus_sign(61));
    check(build_two_segments(40));
}

TEST(Gasket, LevelOneHasThreeEqualAtoms)
{
    const auto s = build_gasket(1);
    ASSERT_EQ(s.size(), 3u);
    for (AtomId i = 0; i < 3; ++i) {
        EXPECT_DOUBLE_EQ(s.weight(i), 1.0 / 3.0);
    }
}

TEST(Gasket, FittedDimensionNearLog3OverLog2)
{
    const auto s = build_gasket(9);
    const auto rep = regularity_probe(s, default_probe_centers(s), default_probe_radii(s));
    EXPECT_NEAR(rep.d_fit, std::log(3.0) / std::log(2.0), 0.1);
}

TEST(Sphere, CapMeasureMatchesAreaFormula)
{
    const auto s = build_sphere_s2(20000, 0);
    for (AtomId x : { 0, 777, 10000, 19999 })
        for (double r : { 0.1, 0.5, 1.0, 2.0, 3.0 }) {
            const double mu = ball(s, x, r);
            EXPECT_NEAR(mu, (1.0 - std::cos(r)) / 2.0, 0.01) << "x=" << x << " r=" << r;
            const double slack = 0.01;
            EXPECT_GE(mu, r * r / (std::numbers::pi * std::numbers::pi) - slack);
            EXPECT_LE(mu, r * r / 4.0 + slack);
        }
}

TEST(Sphere, UnitVectorsAndSeedDeterminism)
{
    const auto a = build_sphere_s2(1000, 42);
    const auto b = build_sphere_s2(1000, 42);
    const auto c = build_sphere_s2(1000, 43);
    bool differs = false;
    for (AtomId i = 0; i < 1000; ++i) {
        const Point& p = a.position(i);
        EXPECT_NEAR(p[0] * p[0] + p[1] * p[1] + p[2] * p[2], 1.0, 1e-12);
        EXPECT_EQ(p, b.position(i));
        differs = differs || p != c.position(i);
    }
    EXPECT_TRUE(differs);
}

TEST(Regularity, IntervalProbe)
{
    const auto s = build_interval(1 << 14);
    const double radii[] = { 0.05, 0.1, 0.2 };
    // both ends and the middle: balls of measure r and 2r
    const auto rep = regularity_probe(s, default_probe_centers(s, 3), radii);
    EXPECT_NEAR(rep.d_fit, 1.0, 0.05);
    EXPECT_GE(rep.c1_hat, 0.9);
    EXPECT_LE(rep.c2_hat, 2.1);
    EXPECT_LE(rep.c1_hat, rep.c2_hat);
    EXPECT_EQ(rep.sample_count, 9u);
}

TEST(Regularity, SphereProbe)
{
    const auto s = build_sphere_s2(20000, 0);
    const auto rep = regularity_probe(s, default_probe_centers(s), default_probe_radii(s));
    EXPECT_NEAR(rep.d_fit, 2.0, 0.1);
}

TEST(Regularity, PlusSignProbe)
{
    const auto s = build_plus_sign(1 << 13);
    const auto rep = regularity_probe(s, default_probe_centers(s), default_probe_radii(s));
    EXPECT_NEAR(rep.d_fit, 1.0, 0.1);
}

TEST(Regularity, ReportBracketsEverySample)
{
    const auto s = build_square(64);
    const auto centers = default_probe_centers(s, 16);
    const auto radii = default_probe_radii(s);
    const auto rep = regularity_probe(s, centers, radii);
    for (AtomId x : centers) {
        const auto mu = ball_measures(s, x, radii);
        for (std::size_t i = 0; i < radii.size(); ++i) {
            if (radii[i] <= 4.0 * s.resolution() || radii[i] > s.diameter())
                continue;
            const double p = std::pow(radii[i], rep.d_fit);
            EXPECT_LE(rep.c1_hat * p, mu[i] * (1.0 + 1e-12));
            EXPECT_GE(rep.c2_hat * p, mu[i] * (1.0 - 1e-12));
        }
    }
}

TEST(Regularity, RadiiAtResolutionRejected)
{
    const auto s = build_interval(100);
    const double radii[] = { 0.01, 0.02 }; // 4h = 0.02
    try {
        regularity_probe(s, default_probe_centers(s), radii);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::resolution_too_coarse);
    }
}

TEST(Regularity, ConstantsStableUnderRefinement)
{
    EXPECT_LT(constant_ratio(build_interval(4096)) / constant_ratio(build_interval(1024)), 2.0);
    EXPECT_LT(constant_ratio(build_square(128)) / constant_ratio(build_square(64)), 2.0);
    EXPECT_LT(constant_ratio(build_gasket(9)) / constant_ratio(build_gasket(8)), 2.0);
    EXPECT_LT(constant_ratio(build_sphere_s2(16000, 0)) / constant_ratio(build_sphere_s2(4000, 0)), 2.0);
    EXPECT_LT(constant_ratio(build_plus_sign(4096)) / constant_ratio(build_plus_sign(1024)), 2.0);
}

TEST(Metric, AxiomsOnRandomTriples)
{
    const int triples = 100000;
    EXPECT_GE(triangle_slack(build_interval(1000), triples), -1e-12);
    EXPECT_GE(triangle_slack(build_square(100), triples), -1e-12);
    EXPECT_GE(triangle_slack(build_sphere_s2(10000, 0), triples), -1e-12);
    EXPECT_GE(triangle_slack(build_gasket(8), triples), -1e-12);
    EXPECT_GE(triangle_slack(build_plus_sign(1000), triples), -1e-12);
}

TEST(Metric, GeodesicNearAntipodes)
{
    const Geodesic g;
    EXPECT_NEAR(g({ 1, 0, 0 }, { -1, 0, 0 }), std::numbers::pi, 1e-15);
    EXPECT_NEAR(g({ 1, 0, 0 }, { 0, 1, 0 }), std::numbers::pi / 2, 1e-15);
    EXPECT_EQ(g({ 0, 0, 1 }, { 0, 0, 1 }), 0.0);
}

TEST(TwoSegments, GapBetweenHalves)
{
    const auto s = build_two_segments(100);
    EXPECT_NEAR(s.distance(49, 50), 0.2 + 0.4 / 50, 1e-12);
    EXPECT_NEAR(s.position(0)[0], 0.004, 1e-12);
}
