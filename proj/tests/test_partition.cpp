#include "ahlfors/partition.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ahlfors;

namespace {

// Brute-force diameter of a region.
template <Metric M>
double diameter_of(const AtomizedSpace<M>& s, const std::vector<AtomId>& atoms)
{
    double d = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = i + 1; j < atoms.size(); ++j)
            d = std::max(d, s.distance(atoms[i], atoms[j]));
    return d;
}

template <Metric M>
void expect_inner_ball(const AtomizedSpace<M>& s, const Partition& p)
{
    const double r = p.params.c4 * std::pow(static_cast<double>(p.N), -1.0 / p.params.d);
    std::vector<int> owner(s.size(), -1);
    for (const Region& reg : p.regions)
        for (AtomId a : reg.atom_ids)
            owner[static_cast<std::size_t>(a)] = reg.id;
    for (const Region& reg : p.regions)
        for (std::size_t a = 0; a < s.size(); ++a)
            if (s.distance(reg.inner_center, static_cast<AtomId>(a)) < r) {
                EXPECT_EQ(owner[a], reg.id);
            }
}

Errc error_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return Errc::invalid_argument;
}

} // namespace

TEST(EqualMeasure, IntervalEightRegions)
{
    const auto s = build_interval(1 << 14);
    const auto tree = build_cube_tree(s);
    const auto p = equal_measure_partition(s, tree, 8);
    ASSERT_EQ(p.regions.size(), 8u);
    for (const Region& r : p.regions) {
        EXPECT_NEAR(s.measure(r.atom_ids), 0.125, std::ldexp(1.0, -14));
        EXPECT_LE(diameter_of(s, r.atom_ids), 2.0 * p.params.c3 / 8.0);
        // and in fact close to the optimum 1/8
        EXPECT_LE(diameter_of(s, r.atom_ids), 0.2);
    }
    expect_inner_ball(s, p);
    const auto rep = verify_partition(s, tree, p);
    EXPECT_TRUE(rep.all());
    for (const auto& f : rep.failures)
        ADD_FAILURE() << f;
}

TEST(EqualMeasure, LedgerInvariants)
{
    const auto s = build_square(160);
    const auto tree = build_cube_tree(s);
    const int N = 40;
    const auto p = equal_measure_partition(s, tree, N);
    int total = 0;
    for (const NodeLedger& led : p.ledger) {
        total += led.count;
        EXPECT_GE(led.cube_measure, 2.0 / N - 1e-12) << "mu(Q_b^n) >= 2/N";
        EXPECT_NEAR(led.cube_measure, tree.cube(p.params.n, led.vertex).measure, 1e-12);
        if (p.params.nuclei_bounded) {
            EXPECT_LE(led.nuclei_measure, 1.0 / N + p.params.quantization_tol);
        }
        if (led.parent >= 0) {
            EXPECT_LT(led.remainder_measure, 1.0 / N + p.params.quantization_tol);
        }
        EXPECT_EQ(static_cast<int>(led.nuclei.size()), led.count);
    }
    EXPECT_EQ(total, N);
    EXPECT_EQ(p.ledger.size(), tree.cube_count(p.params.n));
    EXPECT_TRUE(verify_partition(s, tree, p).all());
    expect_inner_ball(s, p);
}

TEST(EqualMeasure, ParamsFollowTheFormulas)
{
    const auto s = build_interval(1 << 14);
    const auto tree = build_cube_tree(s);
    const auto c = effective_constants(s, tree);
    const int N = 32;
    const auto p = equal_measure_partition(s, tree, N, c);
    const double a0 = tree.a0_hat(), a1 = tree.a1_hat(), delta = tree.delta(), d = c.d;
    EXPECT_NEAR(p.params.M, 2.0 * c.c2 * std::pow(3.0 * a1, d) / (c.c1 * std::pow(delta * a0, d)), 1e-9 * p.params.M);
    EXPECT_NEAR(p.params.c3, 3.0 * a1 / (delta * a0) * std::pow(2.0 / c.c1, 1.0 / d), 1e-9 * p.params.c3);
    const double step1 = std::pow(2.0 / (c.c1 * N), 1.0 / d);
    EXPECT_LT(a0 * std::pow(delta, p.params.n + 1), step1);
    EXPECT_LE(step1, a0 * std::pow(delta, p.params.n) * (1 + 1e-12));
    EXPECT_LE(std::pow(delta, p.params.k_step_bound), 3.0 * std::pow(p.params.M, -2.0 / d));
    EXPECT_GT(std::pow(delta, p.params.k_step_bound - 1), 3.0 * std::pow(p.params.M, -2.0 / d));
    EXPECT_EQ(p.params.m, p.params.n + p.params.k_step);
    if (p.params.nuclei_bounded)
        for (const Cube& q : tree.generation(p.params.m)) {
            EXPECT_LE(q.measure, 1.0 / (p.params.M_hat * N) + 1e-12);
        }
}

TEST(EqualMeasure, SeveralSpacesVerify)
{
    auto run = [](const auto& s, std::initializer_list<int> Ns) {
        const auto tree = build_cube_tree(s);
        const auto c = effective_constants(s, tree);
        for (int N : Ns) {
            const auto p = equal_measure_partition(s, tree, N, c);
            const auto rep = verify_partition(s, tree, p);
            EXPECT_TRUE(rep.all()) << s.kind() << " N=" << N;
            EXPECT_LE(rep.max_measure_deviation, 10.0 * s.max_weight());
            EXPECT_LE(rep.max_diameter, 2.0 * rep.outer_bound);
            for (const auto& f : rep.failures)
                ADD_FAILURE() << s.kind() << " N=" << N << ": " << f;
        }
    };
    run(build_interval(1 << 13), { 8, 24, 40 });
    run(build_square(200), { 24, 50 });
    run(build_gasket(9), { 32 });
    run(build_sphere_s2(20000, 0), { 16 });
}

TEST(EqualMeasure, BreadthFirstTreeAlsoValid)
{
    const auto s = build_square(128);
    const auto tree = build_cube_tree(s);
    PartitionOptions opt;
    opt.spanning = SpanningRule::bfs;
    opt.round_pieces = false;
    const auto p = equal_measure_partition(s, tree, 32, opt);
    EXPECT_TRUE(verify_partition(s, tree, p).all());
}

TEST(EqualMeasure, UniformDivisibleAtomsGiveExactMeasures)
{
    const auto s = build_interval(1 << 13);
    const auto tree = build_cube_tree(s);
    const auto p = equal_measure_partition(s, tree, 16);
    for (const Region& r : p.regions) {
        EXPECT_EQ(r.atom_ids.size(), (1u << 13) / 16);
    }
}

TEST(EqualMeasure, Deterministic)
{
    const auto s = build_gasket(9);
    const auto tree = build_cube_tree(s);
    const auto a = equal_measure_partition(s, tree, 32);
    const auto b = equal_measure_partition(s, tree, 32);
    ASSERT_EQ(a.regions.size(), b.regions.size());
    for (std::size_t i = 0; i < a.regions.size(); ++i) {
        EXPECT_EQ(a.regions[i].atom_ids, b.regions[i].atom_ids);
        EXPECT_EQ(a.regions[i].inner_center, b.regions[i].inner_center);
    }
}

TEST(EqualMeasure, PreconditionsReported)
{
    const auto s = build_square(128);
    const auto tree = build_cube_tree(s);
    EXPECT_EQ(error_of([&] { equal_measure_partition(s, tree, 4); }), Errc::invalid_argument);
    EXPECT_EQ(error_of([&] { equal_measure_partition(s, tree, 0); }), Errc::invalid_argument);
    EXPECT_EQ(error_of([&] { equal_measure_partition(s, tree, 256); }), Errc::resolution_too_coarse);
}

TEST(EqualMeasure, DisconnectedSpaceRejected)
{
    const auto s = build_two_segments(1 << 13);
    const auto tree = build_cube_tree(s);
    try {
        equal_measure_partition(s, tree, 128);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::space_not_connected);
        EXPECT_NE(std::string(e.what()).find("connected"), std::string::npos);
    }
    const auto q = quasi_equal_partition(s, tree, 128);
    EXPECT_TRUE(verify_partition(s, tree, q).all());
}

TEST(Verify, MergedRegionsFailMeasureOnly)
{
    const auto s = build_interval(1 << 12);
    const auto tree = build_cube_tree(s);
    auto p = equal_measure_partition(s, tree, 8);
    auto& a = p.regions[0].atom_ids;
    const auto& b = p.regions[1].atom_ids;
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    p.regions[1].atom_ids.clear();
    const auto rep = verify_partition(s, tree, p);
    EXPECT_TRUE(rep.covering);
    EXPECT_TRUE(rep.disjoint);
    EXPECT_FALSE(rep.measure_ok);
    EXPECT_FALSE(rep.all());
}

TEST(QuasiEqual, OneRegionIsEverything)
{
    const auto s = build_gasket(5);
    const auto tree = build_cube_tree(s);
    const auto p = quasi_equal_partition(s, tree, 1);
    ASSERT_EQ(p.regions.size(), 1u);
    EXPECT_EQ(p.regions[0].atom_ids.size(), s.size());
}

TEST(QuasiEqual, CubeCountGivesTheCubes)
{
    const auto s = build_square(64);
    const auto tree = build_cube_tree(s);
    int k = tree.k_min();
    while (tree.cube_count(k) < 5)
        ++k;
    const int N = static_cast<int>(tree.cube_count(k));
    const auto p = quasi_equal_partition(s, tree, N);
    ASSERT_EQ(p.regions.size(), static_cast<std::size_t>(N));
    std::vector<std::vector<AtomId>> got, cubes;
    for (const Region& r : p.regions)
        got.push_back(r.atom_ids);
    for (const Cube& q : tree.generation(k))
        cubes.push_back(q.atom_ids);
    std::sort(got.begin(), got.end());
    std::sort(cubes.begin(), cubes.end());
    EXPECT_EQ(got, cubes);
}

TEST(QuasiEqual, PlusSignTenRegions)
{
    const auto s = build_plus_sign(1 << 12);
    const auto tree = build_cube_tree(s);
    const auto p = quasi_equal_partition(s, tree, 10);
    const auto rep = verify_partition(s, tree, p);
    EXPECT_TRUE(rep.covering && rep.disjoint && rep.count_ok);
    EXPECT_TRUE(rep.outer_ok && rep.inner_ok);
    EXPECT_LE(rep.spread, p.params.H);
    EXPECT_TRUE(rep.all());
    expect_inner_ball(s, p);
}

TEST(QuasiEqual, TooManyRegionsRejected)
{
    const auto s = build_interval(256);
    const auto tree = build_cube_tree(s);
    const int finest = static_cast<int>(tree.cube_count(tree.k_max()));
    EXPECT_EQ(error_of([&] { quasi_equal_partition(s, tree, finest + 1); }), Errc::resolution_too_coarse);
}
