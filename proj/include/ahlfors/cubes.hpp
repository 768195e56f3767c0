#pragma once

#include "ahlfors/error.hpp"
#include "ahlfors/nets.hpp"
#include "ahlfors/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ahlfors {

struct Cube {
    int generation {};
    int index {};
    AtomId center_id {};
    std::vector<AtomId> atom_ids; // ascending
    std::optional<int> parent;   // index in generation - 1
    std::vector<int> children;   // indices in generation + 1
    double measure {};
    double outer_radius {}; // max distance center -> member atom
    double inner_radius {}; // distance center -> nearest non-member (+inf when Q = X)
};

/// The multi-generation family of dyadic cubes built over an atomized space.
///
/// Generation k lives at `cubes_[k - k_min]`; cube indices within a
/// generation equal the selection order of the generation's net centers, so a
/// cube at generation k keeps its index at every finer generation through its
/// same-centered descendant.
class CubeTree {
public:
    CubeTree() = default;

    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] int k_min() const noexcept { return k_min_; }
    [[nodiscard]] int k_max() const noexcept { return k_max_; }
    [[nodiscard]] double a0_hat() const noexcept { return a0_hat_; }
    [[nodiscard]] double a1_hat() const noexcept { return a1_hat_; }
    [[nodiscard]] double scale(int k) const { return std::pow(delta_, k); }
    [[nodiscard]] bool has_generation(int k) const noexcept { return k >= k_min_ && k <= k_max_; }

    [[nodiscard]] std::span<const Cube> generation(int k) const { return cubes_.at(slot(k)); }
    [[nodiscard]] const Cube& cube(int k, int alpha) const
    {
        return cubes_.at(slot(k)).at(static_cast<std::size_t>(alpha));
    }
    [[nodiscard]] std::size_t cube_count(int k) const { return cubes_.at(slot(k)).size(); }
    /// Index of the generation-k cube holding atom a.
    [[nodiscard]] int label(int k, AtomId a) const { return labels_.at(slot(k))[static_cast<std::size_t>(a)]; }
    [[nodiscard]] std::span<const int> labels(int k) const { return labels_.at(slot(k)); }
    [[nodiscard]] double max_outer_radius(int k) const { return max_outer_.at(slot(k)); }

    /// Index of the generation-k ancestor of cube (from_k, alpha), from_k >= k.
    [[nodiscard]] int ancestor(int from_k, int alpha, int k) const
    {
        while (from_k > k) {
            alpha = *cube(from_k, alpha).parent;
            --from_k;
        }
        return alpha;
    }

    /// Indices of the generation-to_k descendants of cube (k, alpha).
    [[nodiscard]] std::vector<int> descendants(int k, int alpha, int to_k) const
    {
        std::vector<int> level { alpha };
        for (int g = k; g < to_k; ++g) {
            std::vector<int> next;
            for (int a : level)
                for (int c : cube(g, a).children)
                    next.push_back(c);
            level = std::move(next);
        }
        std::sort(level.begin(), level.end());
        return level;
    }

private:
    template <Metric M>
    friend CubeTree build_cube_tree(const AtomizedSpace<M>&, double, int, int);

    [[nodiscard]] std::size_t slot(int k) const
    {
        if (!has_generation(k))
            throw Error(Errc::invalid_argument, "generation " + std::to_string(k) + " is not in the cube tree");
        return static_cast<std::size_t>(k - k_min_);
    }

    double delta_ {};
    int k_min_ {};
    int k_max_ {};
    double a0_hat_ {};
    double a1_hat_ {};
    std::vector<std::vector<Cube>> cubes_;
    std::vector<std::vector<int>> labels_;
    std::vector<double> max_outer_;
};

/// Default generation range: two single-cube generations on top (delta^k >
/// diam) down to the finest k with delta^k > 4h.
template <Metric M>
std::pair<int, int> default_generations(const AtomizedSpace<M>& space, double delta)
{
    detail::require(delta > 0.0 && delta < 1.0, Errc::invalid_argument, "delta must lie in (0, 1)");
    const int k_min = static_cast<int>(std::ceil(std::log(space.diameter()) / std::log(delta))) - 2;
    int k_max = static_cast<int>(std::floor(std::log(4.0 * space.resolution()) / std::log(delta)));
    // strict: at delta^k = 4h exactly, cubes shrink to two or three atoms
    while (std::pow(delta, k_max) <= 4.0 * space.resolution())
        --k_max;
    while (std::pow(delta, k_max + 1) > 4.0 * space.resolution())
        ++k_max;
    return { k_min, std::max(k_min, k_max) };
}

namespace detail {

    // Unordered pairs (alpha < beta) of generation-k cubes whose centers are
    // closer than `radius`. Exact: candidate pairs are generated top-down,
    // a pair of children can only be close if their parents' centers are
    // within radius + outer(parent_a) + outer(parent_b).
    template <Metric M>
    std::vector<std::pair<int, int>> center_pairs_within(
        const AtomizedSpace<M>& space, const CubeTree& tree, int k, double radius)
    {
        const int top = tree.k_min();
        std::vector<double> threshold(static_cast<std::size_t>(k - top + 1));
        threshold.back() = radius;
        for (int g = k - 1; g >= top; --g) {
            const auto s = static_cast<std::size_t>(g - top);
            threshold[s] = threshold[s + 1] + 2.0 * tree.max_outer_radius(g);
        }
        // pairs with alpha <= beta; the diagonal carries "same parent" candidates
        std::vector<std::pair<int, int>> pairs;
        const auto top_gen = tree.generation(top);
        for (std::size_t a = 0; a < top_gen.size(); ++a)
            for (std::size_t b = a; b < top_gen.size(); ++b)
                if (a == b || space.distance(top_gen[a].center_id, top_gen[b].center_id) < threshold[0])
                    pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
        for (int g = top; g < k; ++g) {
            const double limit = threshold[static_cast<std::size_t>(g + 1 - top)];
            std::vector<std::pair<int, int>> next;
            for (auto [a, b] : pairs) {
                const auto& ca = tree.cube(g, a).children;
                const auto& cb = tree.cube(g, b).children;
                for (std::size_t i = 0; i < ca.size(); ++i) {
                    const AtomId za = tree.cube(g + 1, ca[i]).center_id;
                    const std::size_t j0 = (a == b) ? i : 0;
                    for (std::size_t j = j0; j < cb.size(); ++j) {
                        if (a == b && j == i) {
                            next.emplace_back(ca[i], ca[i]);
                            continue;
                        }
                        const AtomId zb = tree.cube(g + 1, cb[j]).center_id;
                        if (space.distance(za, zb) < limit)
                            next.emplace_back(std::min(ca[i], cb[j]), std::max(ca[i], cb[j]));
                    }
                }
            }
            pairs = std::move(next);
        }
        std::vector<std::pair<int, int>> out;
        out.reserve(pairs.size());
        for (auto p : pairs)
            if (p.first != p.second)
                out.push_back(p);
        std::sort(out.begin(), out.end());
        return out;
    }

    inline std::vector<std::vector<int>> adjacency(std::size_t n, std::span<const std::pair<int, int>> pairs)
    {
        std::vector<std::vector<int>> adj(n);
        for (auto [a, b] : pairs) {
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
        return adj;
    }

} // namespace detail

/// Builds the cube family from nested farthest-point nets.
///
/// Finest generation: every atom joins its nearest center. Coarser
/// generations: every center joins its nearest coarser center and a cube is
/// the union of its children. a0_hat and a1_hat are the extreme inner and
/// outer radii over all cubes, divided by delta^k.
template <Metric M>
CubeTree build_cube_tree(const AtomizedSpace<M>& space, double delta, int k_min, int k_max)
{
    auto run = detail::run_nested(space, delta, k_min, k_max);
    const std::size_t gens = run.nets.size();
    const std::size_t n = space.size();

    CubeTree tree;
    tree.delta_ = delta;
    tree.k_min_ = k_min;
    tree.k_max_ = k_max;
    tree.cubes_.resize(gens);
    tree.labels_.resize(gens);
    tree.max_outer_.assign(gens, 0.0);

    for (std::size_t g = 0; g < gens; ++g) {
        const auto& centers = run.nets[g].center_ids;
        auto& cubes = tree.cubes_[g];
        cubes.resize(centers.size());
        for (std::size_t a = 0; a < centers.size(); ++a) {
            cubes[a].generation = k_min + static_cast<int>(g);
            cubes[a].index = static_cast<int>(a);
            cubes[a].center_id = centers[a];
        }
    }
    // parent links: center of (g+1, beta) joins its nearest generation-g center
    for (std::size_t g = 0; g + 1 < gens; ++g) {
        for (auto& child : tree.cubes_[g + 1]) {
            const int parent = run.owners[g][static_cast<std::size_t>(child.center_id)];
            child.parent = parent;
            tree.cubes_[g][static_cast<std::size_t>(parent)].children.push_back(child.index);
        }
    }
    // labels from the finest generation upward
    tree.labels_[gens - 1].assign(run.owners[gens - 1].begin(), run.owners[gens - 1].end());
    for (std::size_t g = gens - 1; g-- > 0;) {
        auto& lab = tree.labels_[g];
        lab.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            lab[i] = *tree.cubes_[g + 1][static_cast<std::size_t>(tree.labels_[g + 1][i])].parent;
    }
    run.owners.clear();

    double a1 = 0.0;
    for (std::size_t g = 0; g < gens; ++g) {
        auto& cubes = tree.cubes_[g];
        for (std::size_t i = 0; i < n; ++i)
            cubes[static_cast<std::size_t>(tree.labels_[g][i])].atom_ids.push_back(static_cast<AtomId>(i));
        const double s = std::pow(delta, k_min + static_cast<int>(g));
        for (auto& q : cubes) {
            q.measure = space.measure(q.atom_ids);
            for (AtomId x : q.atom_ids)
                q.outer_radius = std::max(q.outer_radius, space.distance(q.center_id, x));
            tree.max_outer_[g] = std::max(tree.max_outer_[g], q.outer_radius);
            a1 = std::max(a1, q.outer_radius / s);
        }
    }
    tree.a1_hat_ = a1;

    // Inner radii. A non-member atom x of Q_a lies in some Q_b; once a
    // candidate distance `best` is known, Q_b can only improve it when
    // d(z_a, z_b) - outer(Q_b) < best.
    double a0 = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < gens; ++g) {
        const int k = k_min + static_cast<int>(g);
        auto& cubes = tree.cubes_[g];
        const double s = std::pow(delta, k);
        if (cubes.size() == 1) {
            cubes[0].inner_radius = std::numeric_limits<double>::infinity();
            continue;
        }
        const double reach = 3.0 * tree.max_outer_[g];
        const auto pairs = detail::center_pairs_within(space, tree, k, reach);
        std::vector<std::vector<std::pair<double, int>>> near(cubes.size());
        for (auto [a, b] : pairs) {
            const double d = space.distance(cubes[static_cast<std::size_t>(a)].center_id,
                cubes[static_cast<std::size_t>(b)].center_id);
            near[static_cast<std::size_t>(a)].emplace_back(d, b);
            near[static_cast<std::size_t>(b)].emplace_back(d, a);
        }
        for (std::size_t a = 0; a < cubes.size(); ++a) {
            auto& q = cubes[a];
            auto& cand = near[a];
            std::sort(cand.begin(), cand.end());
            double best = std::numeric_limits<double>::infinity();
            for (auto [dc, b] : cand) {
                const auto& other = cubes[static_cast<std::size_t>(b)];
                if (dc - other.outer_radius >= best)
                    continue;
                for (AtomId x : other.atom_ids)
                    best = std::min(best, space.distance(q.center_id, x));
            }
            if (!(best <= reach - tree.max_outer_[g])) {
                // a closer non-member could hide beyond the candidate reach
                const auto& lab = tree.labels_[g];
                for (std::size_t i = 0; i < n; ++i)
                    if (lab[i] != static_cast<int>(a))
                        best = std::min(best, space.distance(q.center_id, static_cast<AtomId>(i)));
            }
            q.inner_radius = best;
            double nearest_member = std::numeric_limits<double>::infinity();
            for (AtomId x : q.atom_ids)
                if (x != q.center_id)
                    nearest_member = std::min(nearest_member, space.distance(q.center_id, x));
            if (!(nearest_member < best))
                throw Error(Errc::construction_degenerate,
                    "cube " + std::to_string(a) + " of generation " + std::to_string(k)
                        + " contains no ball beyond its center's cell; decrease delta");
            a0 = std::min(a0, best / s);
        }
    }
    if (!std::isfinite(a0))
        throw Error(Errc::construction_degenerate, "every generation holds a single cube; extend k_max");
    tree.a0_hat_ = a0;
    return tree;
}

template <Metric M>
CubeTree build_cube_tree(const AtomizedSpace<M>& space, double delta = 0.25)
{
    const auto [k_min, k_max] = default_generations(space, delta);
    return build_cube_tree(space, delta, k_min, k_max);
}

/// Pairs (alpha < beta) of generation-k cubes with d(z_alpha, z_beta) <
/// 2 a1_hat delta^k: every pair whose outer balls intersect is included.
template <Metric M>
std::vector<std::pair<int, int>> neighbor_pairs(const AtomizedSpace<M>& space, const CubeTree& tree, int k)
{
    if (tree.cube_count(k) < 2)
        return {};
    return detail::center_pairs_within(space, tree, k, 2.0 * tree.a1_hat() * tree.scale(k));
}

/// Cubes whose union with their graph neighbors leaves B(z, 3 a1_hat delta^k).
template <Metric M>
std::size_t big_ball_violations(const AtomizedSpace<M>& space, const CubeTree& tree, int k)
{
    const auto cubes = tree.generation(k);
    const auto adj = detail::adjacency(cubes.size(), neighbor_pairs(space, tree, k));
    const double bound = 3.0 * tree.a1_hat() * tree.scale(k);
    std::size_t bad = 0;
    for (std::size_t b = 0; b < cubes.size(); ++b) {
        const AtomId z = cubes[b].center_id;
        bool ok = true;
        auto check = [&](const Cube& q) {
            for (AtomId x : q.atom_ids)
                if (space.distance(z, x) > bound) {
                    ok = false;
                    return;
                }
        };
        check(cubes[b]);
        for (int a : adj[b])
            if (ok)
                check(cubes[static_cast<std::size_t>(a)]);
        bad += ok ? 0 : 1;
    }
    return bad;
}

struct CubeAxiomReport {
    bool covering = false;     // (1) every atom in some cube of each generation
    bool disjoint = false;     // (2) no atom in two cubes of a generation
    bool nested = false;       // (3) a cube is the disjoint union of its children
    bool inner_ball = false;   // (4) B(z, a0_hat delta^k) inside Q
    bool outer_ball = false;   // (5) Q inside the closed ball of radius a1_hat delta^k
    double a0_hat = 0.0;
    double a1_hat = 0.0;
    double ratio = 0.0;
    std::vector<std::string> failures;

    [[nodiscard]] bool all() const noexcept
    {
        return covering && disjoint && nested && inner_ball && outer_ball && a0_hat > 0.0;
    }
};

/// Re-checks the five cube properties from the cubes' atom lists alone.
template <Metric M>
CubeAxiomReport verify_cube_axioms(const AtomizedSpace<M>& space, const CubeTree& tree)
{
    CubeAxiomReport rep;
    rep.a0_hat = tree.a0_hat();
    rep.a1_hat = tree.a1_hat();
    rep.ratio = rep.a0_hat > 0.0 ? rep.a1_hat / rep.a0_hat : std::numeric_limits<double>::infinity();
    rep.covering = rep.disjoint = rep.nested = rep.inner_ball = rep.outer_ball = true;
    if (rep.a0_hat <= 0.0)
        rep.failures.push_back("a0_hat is zero: some cube contains no inner ball");

    const std::size_t n = space.size();
    std::vector<std::vector<int>> member(static_cast<std::size_t>(tree.k_max() - tree.k_min() + 1));
    for (int k = tree.k_min(); k <= tree.k_max(); ++k) {
        auto& own = member[static_cast<std::size_t>(k - tree.k_min())];
        own.assign(n, -1);
        std::vector<int> hits(n, 0);
        for (const Cube& q : tree.generation(k)) {
            if (q.atom_ids.empty() || !std::binary_search(q.atom_ids.begin(), q.atom_ids.end(), q.center_id)) {
                rep.covering = false;
                rep.failures.push_back("cube without its center at generation " + std::to_string(k));
            }
            for (AtomId x : q.atom_ids) {
                ++hits[static_cast<std::size_t>(x)];
                own[static_cast<std::size_t>(x)] = q.index;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (hits[i] == 0 && rep.covering) {
                rep.covering = false;
                rep.failures.push_back("atom " + std::to_string(i) + " uncovered at generation " + std::to_string(k));
            }
            if (hits[i] > 1 && rep.disjoint) {
                rep.disjoint = false;
                rep.failures.push_back("atom " + std::to_string(i) + " in two cubes at generation " + std::to_string(k));
            }
        }
    }
    for (int k = tree.k_min(); k < tree.k_max(); ++k) {
        const auto& up = member[static_cast<std::size_t>(k - tree.k_min())];
        for (const Cube& q : tree.generation(k)) {
            std::size_t total = 0;
            for (int c : q.children) {
                const Cube& child = tree.cube(k + 1, c);
                total += child.atom_ids.size();
                for (AtomId x : child.atom_ids)
                    if (up[static_cast<std::size_t>(x)] != q.index)
                        rep.nested = false;
            }
            if (total != q.atom_ids.size())
                rep.nested = false;
        }
        if (!rep.nested) {
            rep.failures.push_back("nesting broken between generations " + std::to_string(k) + " and "
                + std::to_string(k + 1));
            break;
        }
    }
    for (int k = tree.k_min(); k <= tree.k_max(); ++k) {
        const double s = tree.scale(k);
        const double outer = rep.a1_hat * s;
        const double inner = rep.a0_hat * s;
        const auto cubes = tree.generation(k);
        const auto& own = member[static_cast<std::size_t>(k - tree.k_min())];
        for (const Cube& q : cubes)
            for (AtomId x : q.atom_ids)
                if (space.distance(q.center_id, x) > outer)
                    rep.outer_ball = false;
        // a foreign atom within `inner` of z_a sits in a cube whose center is
        // closer than inner + outer
        std::vector<std::vector<int>> adj(cubes.size());
        if (cubes.size() > 1)
            adj = detail::adjacency(cubes.size(), detail::center_pairs_within(space, tree, k, inner + outer));
        for (const Cube& q : cubes)
            for (int b : adj[static_cast<std::size_t>(q.index)])
                for (AtomId x : cubes[static_cast<std::size_t>(b)].atom_ids)
                    if (own[static_cast<std::size_t>(x)] != q.index && space.distance(q.center_id, x) < inner)
                        rep.inner_ball = false;
    }
    if (!rep.outer_ball)
        rep.failures.push_back("a cube leaves its outer ball");
    if (!rep.inner_ball)
        rep.failures.push_back("a cube misses part of its inner ball");
    return rep;
}

} // namespace ahlfors
