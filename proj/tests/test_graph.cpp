#include "ahlfors/graph.hpp"

#include <gtest/gtest.h>

using namespace ahlfors;

namespace {

OverlapGraph path(int n)
{
    OverlapGraph g { static_cast<std::size_t>(n), {} };
    for (int i = 0; i + 1 < n; ++i)
        g.edges.emplace_back(i, i + 1);
    return g;
}

void expect_valid(const RootedTree& t, std::size_t n)
{
    ASSERT_EQ(t.parent.size(), n);
    ASSERT_EQ(t.order.size(), n);
    EXPECT_EQ(t.parent[static_cast<std::size_t>(t.root)], -1);
    EXPECT_EQ(t.order.back(), t.root);
    std::vector<int> pos(n);
    for (std::size_t i = 0; i < n; ++i)
        pos[static_cast<std::size_t>(t.order[i])] = static_cast<int>(i);
    for (std::size_t v = 0; v < n; ++v)
        if (static_cast<int>(v) != t.root) {
            EXPECT_LT(pos[v], pos[static_cast<std::size_t>(t.parent[v])]);
        }
}

} // namespace

TEST(TreeCenter, OddPath)
{
    const auto t = spanning_tree_rooted(path(3));
    EXPECT_EQ(t.root, 1);
    expect_valid(t, 3);
}

TEST(TreeCenter, EvenPathBicentreTakesLowerVertex)
{
    const auto t = spanning_tree_rooted(path(4));
    EXPECT_EQ(t.root, 1);
    expect_valid(t, 4);
}

TEST(TreeCenter, StarHub)
{
    OverlapGraph g { 6, { { 4, 0 }, { 4, 1 }, { 4, 2 }, { 4, 3 }, { 4, 5 } } };
    const auto t = spanning_tree_rooted(g);
    EXPECT_EQ(t.root, 4);
    for (int v : { 0, 1, 2, 3, 5 }) {
        EXPECT_TRUE(t.is_leaf(v));
    }
}

TEST(TreeCenter, MinimizesEccentricity)
{
    // a long arm and a short arm hanging off vertex 0
    OverlapGraph g { 7, { { 0, 1 }, { 1, 2 }, { 2, 3 }, { 3, 4 }, { 0, 5 }, { 5, 6 } } };
    const auto t = spanning_tree_rooted(g);
    EXPECT_EQ(t.root, 1); // eccentricity 3, the unique minimum
}

TEST(SpanningTree, DisconnectedGraphRejected)
{
    OverlapGraph g { 4, { { 0, 1 }, { 2, 3 } } };
    try {
        (void)spanning_tree_rooted(g);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::space_not_connected);
        EXPECT_NE(std::string(e.what()).find("connected"), std::string::npos);
    }
    const double len[] = { 1.0, 1.0 };
    EXPECT_THROW(spanning_tree_rooted(g, len), Error);
    EXPECT_FALSE(is_connected(g));
}

TEST(SpanningTree, BreadthFirstOnCycleDropsOneEdge)
{
    OverlapGraph g { 4, { { 0, 1 }, { 1, 2 }, { 2, 3 }, { 3, 0 } } };
    const auto t = spanning_tree_rooted(g);
    expect_valid(t, 4);
    int edges = 0;
    for (int p : t.parent)
        edges += p >= 0;
    EXPECT_EQ(edges, 3);
}

TEST(SpanningTree, ShortestEdgesFormMinimumTree)
{
    // square 0-1-2-3 with one long side 3-0 and a long diagonal 0-2
    OverlapGraph g { 4, { { 0, 1 }, { 1, 2 }, { 2, 3 }, { 3, 0 }, { 0, 2 } } };
    const double len[] = { 1.0, 1.0, 1.0, 5.0, 2.0 };
    const auto t = spanning_tree_rooted(g, len);
    expect_valid(t, 4);
    // the minimum tree is the path 0-1-2-3, rooted at its lower bicentre
    EXPECT_EQ(t.root, 1);
    EXPECT_EQ(t.parent[0], 1);
    EXPECT_EQ(t.parent[2], 1);
    EXPECT_EQ(t.parent[3], 2);
}

TEST(SpanningTree, SingleVertex)
{
    const auto t = spanning_tree_rooted(OverlapGraph { 1, {} });
    EXPECT_EQ(t.root, 0);
    EXPECT_TRUE(t.is_leaf(0));
}
