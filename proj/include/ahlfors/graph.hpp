#pragma once

#include "ahlfors/error.hpp"

#include <algorithm>
#include <deque>
#include <span>
#include <utility>
#include <vector>

namespace ahlfors {

struct OverlapGraph {
    std::size_t vertex_count = 0;
    std::vector<std::pair<int, int>> edges;

    [[nodiscard]] std::vector<std::vector<int>> adjacency() const
    {
        std::vector<std::vector<int>> adj(vertex_count);
        for (auto [a, b] : edges) {
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
        for (auto& list : adj) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
        return adj;
    }
};

[[nodiscard]] inline bool is_connected(const OverlapGraph& graph)
{
    if (graph.vertex_count == 0)
        return true;
    const auto adj = graph.adjacency();
    std::vector<char> seen(graph.vertex_count, 0);
    std::deque<int> queue { 0 };
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int w : adj[static_cast<std::size_t>(v)])
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++reached;
                queue.push_back(w);
            }
    }
    return reached == graph.vertex_count;
}

/// A spanning tree directed towards its root.
struct RootedTree {
    int root = 0;
    std::vector<int> parent;            // -1 at the root
    std::vector<std::vector<int>> children;
    std::vector<int> order;             // children strictly before parents

    [[nodiscard]] bool is_leaf(int v) const { return children[static_cast<std::size_t>(v)].empty(); }
};

namespace detail {

    inline std::vector<int> bfs_parents(const std::vector<std::vector<int>>& adj, int start, std::vector<int>* visit)
    {
        std::vector<int> parent(adj.size(), -2);
        std::deque<int> queue { start };
        parent[static_cast<std::size_t>(start)] = -1;
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            if (visit)
                visit->push_back(v);
            for (int w : adj[static_cast<std::size_t>(v)])
                if (parent[static_cast<std::size_t>(w)] == -2) {
                    parent[static_cast<std::size_t>(w)] = v;
                    queue.push_back(w);
                }
        }
        return parent;
    }

} // namespace detail

/// Center of a tree given as an adjacency list, by iterated leaf removal. A
/// bicentre resolves to its lower vertex.
[[nodiscard]] inline int tree_center(const std::vector<std::vector<int>>& tree_adj)
{
    const std::size_t n = tree_adj.size();
    if (n <= 2)
        return 0;
    std::vector<int> degree(n);
    std::vector<int> layer;
    for (std::size_t v = 0; v < n; ++v) {
        degree[v] = static_cast<int>(tree_adj[v].size());
        if (degree[v] <= 1)
            layer.push_back(static_cast<int>(v));
    }
    std::size_t remaining = n;
    while (remaining > 2) {
        remaining -= layer.size();
        std::vector<int> next;
        for (int leaf : layer)
            for (int w : tree_adj[static_cast<std::size_t>(leaf)])
                if (--degree[static_cast<std::size_t>(w)] == 1)
                    next.push_back(w);
        layer = std::move(next);
    }
    return *std::min_element(layer.begin(), layer.end());
}

namespace detail {

    inline void require_connected(const std::vector<std::vector<int>>& adj)
    {
        for (int p : bfs_parents(adj, 0, nullptr))
            if (p == -2)
                throw Error(Errc::space_not_connected,
                    "the overlap graph is disconnected; equal-measure partitions with small diameter need a connected "
                    "space");
    }

    inline RootedTree root_at_center(std::vector<std::vector<int>> tree_adj)
    {
        for (auto& list : tree_adj)
            std::sort(list.begin(), list.end());
        RootedTree t;
        t.root = tree_center(tree_adj);
        std::vector<int> visit;
        t.parent = bfs_parents(tree_adj, t.root, &visit);
        t.children.assign(tree_adj.size(), {});
        for (int v : visit)
            if (t.parent[static_cast<std::size_t>(v)] >= 0)
                t.children[static_cast<std::size_t>(t.parent[static_cast<std::size_t>(v)])].push_back(v);
        t.order.assign(visit.rbegin(), visit.rend());
        return t;
    }

} // namespace detail

/// BFS spanning tree from vertex 0, rerooted at the tree center.
[[nodiscard]] inline RootedTree spanning_tree_rooted(const OverlapGraph& graph)
{
    detail::require(graph.vertex_count > 0, Errc::invalid_argument, "empty graph");
    const auto adj = graph.adjacency();
    detail::require_connected(adj);
    const auto bfs = detail::bfs_parents(adj, 0, nullptr);
    std::vector<std::vector<int>> tree_adj(graph.vertex_count);
    for (std::size_t v = 0; v < graph.vertex_count; ++v)
        if (bfs[v] >= 0) {
            tree_adj[v].push_back(bfs[v]);
            tree_adj[static_cast<std::size_t>(bfs[v])].push_back(static_cast<int>(v));
        }
    return detail::root_at_center(std::move(tree_adj));
}

/// Minimum spanning tree for the given edge lengths (Kruskal, ties by edge
/// order), rerooted at the tree center.
[[nodiscard]] inline RootedTree spanning_tree_rooted(const OverlapGraph& graph, std::span<const double> edge_lengths)
{
    detail::require(graph.vertex_count > 0, Errc::invalid_argument, "empty graph");
    detail::require(edge_lengths.size() == graph.edges.size(), Errc::invalid_argument, "one length per edge expected");
    detail::require_connected(graph.adjacency());
    std::vector<std::size_t> order(graph.edges.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edge_lengths[a] < edge_lengths[b]; });
    std::vector<int> root(graph.vertex_count);
    for (std::size_t v = 0; v < root.size(); ++v)
        root[v] = static_cast<int>(v);
    auto find = [&](int v) {
        while (root[static_cast<std::size_t>(v)] != v) {
            root[static_cast<std::size_t>(v)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(v)])];
            v = root[static_cast<std::size_t>(v)];
        }
        return v;
    };
    std::vector<std::vector<int>> tree_adj(graph.vertex_count);
    for (std::size_t i : order) {
        const auto [a, b] = graph.edges[i];
        const int ra = find(a), rb = find(b);
        if (ra == rb)
            continue;
        root[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
        tree_adj[static_cast<std::size_t>(a)].push_back(b);
        tree_adj[static_cast<std::size_t>(b)].push_back(a);
    }
    return detail::root_at_center(std::move(tree_adj));
}

} // namespace ahlfors
