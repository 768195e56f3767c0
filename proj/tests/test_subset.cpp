#include "ahlfors/cubes.hpp"
#include "ahlfors/subset.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ahlfors;

namespace {

std::vector<AtomId> all_atoms(std::size_t n)
{
    std::vector<AtomId> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = static_cast<AtomId>(i);
    return v;
}

// Square grid with weights drawn from [1, 3], normalized.
AtomizedSpace<Euclidean> uneven_square(int side, std::uint64_t seed)
{
    const auto base = build_square(side);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(1.0, 3.0);
    std::vector<double> w(base.size());
    double total = 0.0;
    for (double& x : w)
        total += x = u(rng);
    for (double& x : w)
        x /= total;
    return { "uneven", std::vector<Point>(base.positions().begin(), base.positions().end()), std::move(w), 2.0,
        base.resolution(), base.diameter() };
}

template <Metric M>
void random_cases(const AtomizedSpace<M>& s, const CubeTree& tree, int cases, bool exact)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int c = 0; c < cases; ++c) {
        std::vector<AtomId> S;
        const double keep = u(rng);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (u(rng) < keep)
                S.push_back(static_cast<AtomId>(i));
        if (S.empty())
            S.push_back(0);
        double wmax = 0.0;
        for (AtomId a : S)
            wmax = std::max(wmax, s.weight(a));
        const double mu = s.measure(S);
        double t = u(rng) * mu;
        if (exact)
            t = std::floor(t / wmax) * wmax;
        const auto T = extract_subset(s, tree, S, t);
        ASSERT_TRUE(std::includes(S.begin(), S.end(), T.begin(), T.end()));
        ASSERT_TRUE(std::adjacent_find(T.begin(), T.end()) == T.end());
        const double dev = std::abs(s.measure(T) - t);
        ASSERT_LE(dev, exact ? 1e-12 : wmax + 1e-15) << "case " << c;
    }
}

} // namespace

TEST(ExtractSubset, TrivialTargets)
{
    const auto s = build_interval(64);
    const auto tree = build_cube_tree(s);
    const auto X = all_atoms(s.size());
    EXPECT_TRUE(extract_subset(s, tree, X, 0.0).empty());
    EXPECT_EQ(extract_subset(s, tree, X, 1.0), X);
}

TEST(ExtractSubset, QuarterOfInterval)
{
    const auto s = build_interval(1024);
    const auto tree = build_cube_tree(s);
    const auto T = extract_subset(s, tree, all_atoms(s.size()), 0.25);
    EXPECT_EQ(T.size(), 256u);
    EXPECT_EQ(s.measure(T), 0.25);
}

TEST(ExtractSubset, TargetOutsideRangeRejected)
{
    const auto s = build_interval(64);
    const auto tree = build_cube_tree(s);
    const std::vector<AtomId> S { 1, 2, 3 };
    for (double t : { -0.1, 0.5 }) {
        try {
            extract_subset(s, tree, S, t);
            FAIL() << "t = " << t;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::invalid_argument);
        }
    }
}

TEST(ExtractSubset, RandomCasesUniformWeights)
{
    const auto s = build_gasket(6);
    const auto tree = build_cube_tree(s);
    random_cases(s, tree, 300, false);
    random_cases(s, tree, 300, true);
}

TEST(ExtractSubset, RandomCasesUnevenWeights)
{
    const auto s = uneven_square(24, 3);
    const auto tree = build_cube_tree(s);
    random_cases(s, tree, 300, false);
}

TEST(ExtractSubset, AnchoredGrowsFromAnchor)
{
    const auto s = build_interval(1024);
    const auto tree = build_cube_tree(s);
    const AtomId anchor = 1000;
    const auto T = extract_subset(s, tree, all_atoms(s.size()), 0.125, anchor);
    EXPECT_EQ(T.size(), 128u);
    // a prefix by distance: T is one contiguous run containing the anchor's end
    EXPECT_EQ(T.back() - T.front() + 1, 128);
    EXPECT_GE(T.back(), 1000);
}
