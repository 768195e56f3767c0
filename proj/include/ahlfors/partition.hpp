#pragma once

#include "ahlfors/cubes.hpp"
#include "ahlfors/error.hpp"
#include "ahlfors/graph.hpp"
#include "ahlfors/regularity.hpp"
#include "ahlfors/space.hpp"
#include "ahlfors/subset.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace ahlfors {

/// Ahlfors constants as consumed by the partition formulas.
struct RegularityConstants {
    double d {};
    double c1 {};
    double c2 {};
};

/// Probes ball measures at the space's dimension hint, then widens the pair so
/// that every cube satisfies c1 (a0 delta^k)^d <= mu(Q) <= c2 (a1 delta^k)^d,
/// which is the form in which the constructions use them.
template <Metric M>
RegularityConstants effective_constants(const AtomizedSpace<M>& space, const CubeTree& tree)
{
    const auto centers = default_probe_centers(space);
    const auto radii = default_probe_radii(space);
    const auto rep = regularity_probe(space, centers, radii, space.dimension_hint());
    RegularityConstants c { rep.d_fit, rep.c1_hat, rep.c2_hat };
    for (int k = tree.k_min(); k <= tree.k_max(); ++k) {
        const double s = tree.scale(k);
        for (const Cube& q : tree.generation(k)) {
            if (tree.a0_hat() * s <= space.diameter())
                c.c1 = std::min(c.c1, q.measure / std::pow(tree.a0_hat() * s, c.d));
            c.c2 = std::max(c.c2, q.measure / std::pow(tree.a1_hat() * s, c.d));
        }
    }
    return c;
}

struct PartitionParams {
    int N {};
    int n {};            // coarse generation
    int m {};            // nucleus generation, n + k_step
    int k_step {};
    int k_step_bound {}; // smallest k with delta^k <= 3 M^(-2/d)
    double M {};         // 2 c2 (3 a1)^d / (c1 (delta a0)^d)
    double M_hat {};     // N * max over nodes of mu(X_b), predicted
    double H {};         // c2 a1^d / (c1 a0^d delta^d)
    double d {};
    double c1 {};
    double c2 {};
    double c3 {};
    double c4 {};
    double quantization_tol {};
    bool nuclei_bounded = true; // generation-m cubes have measure <= 1/(M N)
};

struct Region {
    int id {};
    std::vector<AtomId> atom_ids; // ascending
    double measure {};
    std::optional<std::pair<int, int>> nucleus; // (generation, index)
    int node = -1;                              // generation-n cube it grew in
    AtomId inner_center {};
    double inner_radius {};
    AtomId outer_center {};
    double outer_radius {};
};

/// Bookkeeping for one vertex of the rooted tree.
struct NodeLedger {
    int vertex {};
    int parent = -1;
    bool leaf = false;
    double cube_measure {};      // mu(Q_b^n)
    double x_measure {};         // mu(X_b)
    double neighborhood_measure {}; // mu(Q_b ∪ children Q_a)
    int count {};                // N_b
    double remainder_measure {}; // mu(W_b), zero at the root
    double nuclei_measure {};
    std::vector<int> nuclei;     // generation-m cube indices
};

enum class PartitionMethod { equal_measure, quasi_equal };

/// Spanning tree of the overlap graph used to route remainders: breadth
/// first from vertex 0, or shortest center-to-center edges.
enum class SpanningRule { bfs, shortest_edges };

struct PartitionOptions {
    SpanningRule spanning = SpanningRule::shortest_edges;
    bool round_pieces = true; // power-diagram smoothing of the bisection pieces
};

struct Partition {
    PartitionMethod method = PartitionMethod::equal_measure;
    int N {};
    PartitionParams params;
    std::vector<Region> regions;
    std::vector<NodeLedger> ledger;
};

namespace detail {

    inline double floor_count(double x) { return std::floor(x + 1e-9); }

    template <Metric M>
    std::pair<AtomId, double> farthest_from(const AtomizedSpace<M>& space, AtomId from, std::span<const AtomId> atoms)
    {
        AtomId best = from;
        double far = -1.0;
        for (AtomId a : atoms) {
            const double d = space.distance(from, a);
            if (d > far || (d == far && a < best)) {
                far = d;
                best = a;
            }
        }
        return { best, far };
    }

    // Splits a pool into one region per nucleus. Each nucleus stays whole.
    // A set holding q nuclei is ordered along d(a, .) - d(b, .) for two far
    // apart atoms a, b and cut where the measure to the left is closest to
    // (nuclei to the left) * (measure / q).
    template <Metric M>
    class NucleusSplitter {
    public:
        NucleusSplitter(const AtomizedSpace<M>& space, const std::vector<std::vector<AtomId>>& nuclei,
            std::span<const AtomId> nucleus_centers)
            : space_(space)
            , nuclei_(nuclei)
            , centers_(nucleus_centers)
            , out_(nuclei.size())
        {
        }

        std::vector<std::vector<AtomId>> run(std::vector<AtomId> free_atoms)
        {
            std::vector<int> all(nuclei_.size());
            std::iota(all.begin(), all.end(), 0);
            split(std::move(free_atoms), std::move(all));
            for (std::size_t i = 0; i < out_.size(); ++i) {
                out_[i].insert(out_[i].end(), nuclei_[i].begin(), nuclei_[i].end());
                std::sort(out_[i].begin(), out_[i].end());
            }
            return std::move(out_);
        }

    private:
        struct Item {
            double key;
            int nucleus; // -1 for a free atom
            AtomId atom;
            double weight;
        };

        void split(std::vector<AtomId> free_atoms, std::vector<int> group)
        {
            const std::size_t q = group.size();
            if (q == 1) {
                auto& dst = out_[static_cast<std::size_t>(group[0])];
                dst.insert(dst.end(), free_atoms.begin(), free_atoms.end());
                return;
            }
            std::vector<AtomId> extent(free_atoms);
            for (int g : group)
                extent.push_back(centers_[static_cast<std::size_t>(g)]);
            const AtomId a = farthest_from(space_, centers_[static_cast<std::size_t>(group[0])], extent).first;
            const AtomId b = farthest_from(space_, a, extent).first;

            std::vector<Item> items;
            items.reserve(free_atoms.size() + q);
            const Point& pa = space_.position(a);
            const Point& pb = space_.position(b);
            double total = 0.0;
            double w_max = 0.0;
            for (AtomId x : free_atoms) {
                const double w = space_.weight(x);
                items.push_back({ space_.distance(pa, x) - space_.distance(pb, x), -1, x, w });
                total += w;
                w_max = std::max(w_max, w);
            }
            for (int g : group) {
                const AtomId c = centers_[static_cast<std::size_t>(g)];
                const double w = space_.measure(nuclei_[static_cast<std::size_t>(g)]);
                items.push_back({ space_.distance(pa, c) - space_.distance(pb, c), g, c, w });
                total += w;
            }
            std::sort(items.begin(), items.end(), [](const Item& l, const Item& r) {
                return std::tie(l.key, l.nucleus, l.atom) < std::tie(r.key, r.nucleus, r.atom);
            });
            const double unit = total / static_cast<double>(q);

            // best cut: |f| small first (within one atom weight), then balance
            std::size_t best_pos = 0;
            std::size_t best_c = 0;
            double best_f = std::numeric_limits<double>::infinity();
            auto better = [&](double f, std::size_t c, std::size_t pos) {
                const bool fits = f <= w_max + measure_epsilon;
                const bool best_fits = best_f <= w_max + measure_epsilon;
                if (fits != best_fits)
                    return fits;
                if (fits) {
                    const auto bal = [q](std::size_t cc) { return cc * 2 > q ? cc * 2 - q : q - cc * 2; };
                    if (bal(c) != bal(best_c))
                        return bal(c) < bal(best_c);
                    return f < best_f - measure_epsilon || (std::abs(f - best_f) <= measure_epsilon && pos < best_pos);
                }
                return f < best_f;
            };
            double cum = 0.0;
            std::size_t c = 0;
            for (std::size_t p = 0; p + 1 < items.size(); ++p) {
                cum += items[p].weight;
                if (items[p].nucleus >= 0)
                    ++c;
                if (c == 0 || c == q)
                    continue;
                const double f = std::abs(cum - static_cast<double>(c) * unit);
                if (better(f, c, p)) {
                    best_f = f;
                    best_c = c;
                    best_pos = p;
                }
            }

            std::vector<AtomId> left_free, right_free;
            std::vector<int> left_group, right_group;
            if (best_f <= 2.0 * w_max + measure_epsilon) {
                for (std::size_t p = 0; p < items.size(); ++p) {
                    const bool left = p <= best_pos;
                    if (items[p].nucleus >= 0)
                        (left ? left_group : right_group).push_back(items[p].nucleus);
                    else
                        (left ? left_free : right_free).push_back(items[p].atom);
                }
            } else {
                // No consistent cut: the first half of the nuclei along the
                // key go left, free atoms fill the left share in key order.
                const std::size_t q1 = q / 2;
                double left_measure = 0.0;
                for (const Item& it : items)
                    if (it.nucleus >= 0) {
                        if (left_group.size() < q1) {
                            left_group.push_back(it.nucleus);
                            left_measure += it.weight;
                        } else {
                            right_group.push_back(it.nucleus);
                        }
                    }
                const double target = static_cast<double>(q1) * unit;
                for (const Item& it : items) {
                    if (it.nucleus >= 0)
                        continue;
                    if (left_measure + 0.5 * it.weight <= target + measure_epsilon) {
                        left_free.push_back(it.atom);
                        left_measure += it.weight;
                    } else {
                        right_free.push_back(it.atom);
                    }
                }
            }
            std::sort(left_group.begin(), left_group.end());
            std::sort(right_group.begin(), right_group.end());
            split(std::move(left_free), std::move(left_group));
            split(std::move(right_free), std::move(right_group));
        }

        const AtomizedSpace<M>& space_;
        const std::vector<std::vector<AtomId>>& nuclei_;
        std::span<const AtomId> centers_;
        std::vector<std::vector<AtomId>> out_;
    };

    // Farthest-point spread over a list of cubes of generation k, seeded at
    // `seed` (an element of `cubes`).
    template <Metric M>
    std::vector<int> spread_cubes(
        const AtomizedSpace<M>& space, const CubeTree& tree, int k, std::span<const int> cubes, int seed, std::size_t count)
    {
        std::vector<int> picked;
        if (count == 0)
            return picked;
        std::vector<double> dist(cubes.size(), std::numeric_limits<double>::infinity());
        int next = seed;
        while (picked.size() < count) {
            picked.push_back(next);
            const AtomId z = tree.cube(k, next).center_id;
            double far = -1.0;
            int arg = -1;
            for (std::size_t i = 0; i < cubes.size(); ++i) {
                dist[i] = std::min(dist[i], space.distance(z, tree.cube(k, cubes[i]).center_id));
                if (dist[i] > far) {
                    far = dist[i];
                    arg = cubes[i];
                }
            }
            if (far <= 0.0)
                break;
            next = arg;
        }
        std::sort(picked.begin(), picked.end());
        return picked;
    }

    // Double-sweep estimate of a set's diameter (a lower bound).
    template <Metric M>
    double sweep_diameter(const AtomizedSpace<M>& space, std::span<const AtomId> atoms)
    {
        if (atoms.size() < 2)
            return 0.0;
        const AtomId ea = farthest_from(space, atoms.front(), atoms).first;
        return farthest_from(space, ea, atoms).second;
    }

    // Splits atoms into q pieces of equal measure (within an atom weight per
    // level) by recursive planar cuts. Each cut is tried across the farthest
    // pair and along the coordinate axes and diagonals; the one whose larger
    // half has the smaller diameter wins.
    template <Metric M>
    std::vector<std::vector<AtomId>> bisect_equal(const AtomizedSpace<M>& space, std::vector<AtomId> atoms, std::size_t q)
    {
        std::vector<std::vector<AtomId>> out;
        std::vector<std::pair<std::vector<AtomId>, std::size_t>> stack;
        stack.emplace_back(std::move(atoms), q);
        const double r = std::sqrt(0.5);
        const Point fixed_axes[] = { { 1, 0, 0 }, { 0, 1, 0 }, { 0, 0, 1 }, { r, r, 0 }, { r, -r, 0 }, { r, 0, r },
            { r, 0, -r }, { 0, r, r }, { 0, r, -r } };
        std::vector<std::pair<double, AtomId>> keyed;
        std::vector<AtomId> left, right;
        while (!stack.empty()) {
            auto [list, k] = std::move(stack.back());
            stack.pop_back();
            if (k == 1 || list.size() < 2) {
                std::sort(list.begin(), list.end());
                out.push_back(std::move(list));
                for (std::size_t i = 1; i < k; ++i)
                    out.emplace_back();
                continue;
            }
            const AtomId ea = farthest_from(space, list.front(), list).first;
            const AtomId eb = farthest_from(space, ea, list).first;
            const Point& pa = space.position(ea);
            const Point& pb = space.position(eb);
            std::vector<Point> axes { { pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2] } };
            double spread[3] { 0, 0, 0 };
            {
                Point lo = space.position(list.front()), hi = lo;
                for (AtomId x : list)
                    for (int c = 0; c < 3; ++c) {
                        lo[static_cast<std::size_t>(c)] = std::min(lo[static_cast<std::size_t>(c)], space.position(x)[static_cast<std::size_t>(c)]);
                        hi[static_cast<std::size_t>(c)] = std::max(hi[static_cast<std::size_t>(c)], space.position(x)[static_cast<std::size_t>(c)]);
                    }
                for (int c = 0; c < 3; ++c)
                    spread[c] = hi[static_cast<std::size_t>(c)] - lo[static_cast<std::size_t>(c)];
            }
            for (const Point& ax : fixed_axes) {
                bool flat = false;
                for (int c = 0; c < 3; ++c)
                    if (ax[static_cast<std::size_t>(c)] != 0.0 && spread[c] == 0.0)
                        flat = true;
                if (!flat)
                    axes.push_back(ax);
            }
            // a half that is split into j pieces later is scored by diam / j^(1/d)
            const double inv_d = 1.0 / space.dimension_hint();
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_k1 = k / 2;
            std::vector<AtomId> best_left, best_right;
            std::vector<std::size_t> splits { k / 2, (k + 1) / 2 };
            std::size_t pow2 = 1;
            while (pow2 * 2 < k)
                pow2 *= 2;
            splits.push_back(pow2);
            splits.push_back(k - pow2);
            std::sort(splits.begin(), splits.end());
            splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
            for (std::size_t k1 : splits)
                for (const Point& axis : axes) {
                    keyed.clear();
                    double total = 0.0;
                    for (AtomId x : list) {
                        const Point& px = space.position(x);
                        keyed.emplace_back(px[0] * axis[0] + px[1] * axis[1] + px[2] * axis[2], x);
                        total += space.weight(x);
                    }
                    std::sort(keyed.begin(), keyed.end());
                    const double target = total * static_cast<double>(k1) / static_cast<double>(k);
                    std::size_t cut = 0;
                    double cum = 0.0;
                    while (cut < keyed.size() && cum + 0.5 * space.weight(keyed[cut].second) <= target) {
                        cum += space.weight(keyed[cut].second);
                        ++cut;
                    }
                    left.clear();
                    right.clear();
                    for (std::size_t i = 0; i < keyed.size(); ++i)
                        (i < cut ? left : right).push_back(keyed[i].second);
                    const double score
                        = std::max(sweep_diameter(space, left) / std::pow(static_cast<double>(k1), inv_d),
                            sweep_diameter(space, right) / std::pow(static_cast<double>(k - k1), inv_d));
                    if (score < best) {
                        best = score;
                        best_k1 = k1;
                        best_left = left;
                        best_right = right;
                    }
                }
            const std::size_t k1 = best_k1;
            stack.emplace_back(std::move(best_right), k - k1);
            stack.emplace_back(std::move(best_left), k1);
        }
        return out;
    }

    inline double squared_gap(const Point& a, const Point& b)
    {
        const double x = a[0] - b[0], y = a[1] - b[1], z = a[2] - b[2];
        return x * x + y * y + z * z;
    }

    // Rounds equal-measure pieces: Lloyd iterations on a power diagram of
    // the atom positions whose weights keep the cell measures equal, then
    // single-atom moves along chains of neighboring cells until every cell
    // is within half an atom weight of its share. Returns false (pieces
    // untouched) when the balance cannot be restored.
    template <Metric M>
    bool round_pieces(const AtomizedSpace<M>& space, std::vector<std::vector<AtomId>>& pieces, int iterations = 40)
    {
        const std::size_t q = pieces.size();
        if (q < 2)
            return false;
        std::vector<AtomId> atoms;
        std::vector<int> owner;
        for (std::size_t j = 0; j < q; ++j)
            for (AtomId a : pieces[j]) {
                atoms.push_back(a);
                owner.push_back(static_cast<int>(j));
            }
        const std::size_t n = atoms.size();
        double total = 0.0, w_max = 0.0;
        for (AtomId a : atoms) {
            total += space.weight(a);
            w_max = std::max(w_max, space.weight(a));
        }
        const double share = total / static_cast<double>(q);
        const std::size_t K = std::min<std::size_t>(q - 1, 10);

        std::vector<Point> site(q);
        std::vector<double> psi(q, 0.0), mu(q, 0.0);
        std::vector<std::vector<int>> near(q);
        auto refresh = [&] {
            std::vector<Point> sum(q, Point { 0, 0, 0 });
            std::fill(mu.begin(), mu.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto o = static_cast<std::size_t>(owner[i]);
                const double w = space.weight(atoms[i]);
                const Point& p = space.position(atoms[i]);
                for (std::size_t c = 0; c < 3; ++c)
                    sum[o][c] += w * p[c];
                mu[o] += w;
            }
            for (std::size_t j = 0; j < q; ++j)
                if (mu[j] > 0.0)
                    for (std::size_t c = 0; c < 3; ++c)
                        site[j][c] = sum[j][c] / mu[j];
            std::vector<std::pair<double, int>> d(q);
            for (std::size_t j = 0; j < q; ++j) {
                for (std::size_t l = 0; l < q; ++l)
                    d[l] = { l == j ? std::numeric_limits<double>::infinity() : squared_gap(site[j], site[l]),
                        static_cast<int>(l) };
                std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(K), d.end());
                near[j].clear();
                for (std::size_t t = 0; t < K; ++t)
                    near[j].push_back(d[t].second);
            }
        };
        auto cost = [&](std::size_t i, std::size_t j) { return squared_gap(space.position(atoms[i]), site[j]) - psi[j]; };

        refresh();
        double spacing = 0.0;
        for (std::size_t j = 0; j < q; ++j)
            spacing += squared_gap(site[j], site[static_cast<std::size_t>(near[j].front())]);
        spacing /= static_cast<double>(q);
        for (int it = 0; it < iterations; ++it) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto o = static_cast<std::size_t>(owner[i]);
                double best = cost(i, o);
                for (int l : near[o]) {
                    const double c = cost(i, static_cast<std::size_t>(l));
                    if (c < best) {
                        best = c;
                        owner[i] = l;
                    }
                }
            }
            refresh();
            for (std::size_t j = 0; j < q; ++j)
                psi[j] += 0.5 * spacing * (share - mu[j]) / share;
        }

        // settle the weights with the sites held fixed
        auto assign = [&] {
            std::fill(mu.begin(), mu.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto o = static_cast<std::size_t>(owner[i]);
                double best = cost(i, o);
                for (int l : near[o]) {
                    const double c = cost(i, static_cast<std::size_t>(l));
                    if (c < best) {
                        best = c;
                        owner[i] = l;
                    }
                }
                mu[static_cast<std::size_t>(owner[i])] += space.weight(atoms[i]);
            }
        };
        std::vector<double> rate(q, 0.5);
        std::vector<double> last(q, 0.0);
        for (int it = 0; it < 5 * iterations; ++it) {
            assign();
            double worst = 0.0;
            for (std::size_t j = 0; j < q; ++j) {
                const double err = (share - mu[j]) / share;
                worst = std::max(worst, std::abs(mu[j] - share));
                rate[j] = err * last[j] < 0.0 ? 0.5 * rate[j] : std::min(1.0, 1.2 * rate[j]);
                last[j] = err;
                psi[j] += rate[j] * spacing * err;
            }
            if (worst <= 2.0 * w_max)
                break;
        }
        assign();

        // exact balance: move one atom at a time along chains of touching
        // cells, from the cell farthest from its share to the nearest cell
        // on the other side of it
        std::vector<std::vector<std::size_t>> members(q);
        for (std::size_t i = 0; i < n; ++i)
            members[static_cast<std::size_t>(owner[i])].push_back(i);
        std::vector<std::vector<int>> adj(q);
        const double reach = 4.0 * space.resolution();
        for (std::size_t i = 0; i < n; ++i) {
            const auto o = static_cast<std::size_t>(owner[i]);
            const double own = cost(i, o);
            for (int l : near[o]) {
                const auto lu = static_cast<std::size_t>(l);
                if (cost(i, lu) - own <= 2.0 * std::sqrt(squared_gap(site[o], site[lu])) * reach)
                    adj[o].push_back(l);
            }
        }
        for (std::size_t j = 0; j < q; ++j)
            for (int l : std::vector<int>(adj[j]))
                adj[static_cast<std::size_t>(l)].push_back(static_cast<int>(j));
        for (auto& list : adj) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
        const double slack = w_max + measure_epsilon;
        double off = 0.0;
        for (std::size_t j = 0; j < q; ++j)
            off += std::abs(mu[j] - share);
        const auto budget = static_cast<std::size_t>(2.0 * off / w_max) + 4 * q + 100;
        auto move_one = [&](std::size_t from, std::size_t to) {
            auto& list = members[from];
            if (list.size() < 2)
                return false;
            std::size_t pick = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < list.size(); ++t) {
                const double c = cost(list[t], to) - cost(list[t], from);
                if (c < best) {
                    best = c;
                    pick = t;
                }
            }
            const std::size_t i = list[pick];
            list[pick] = list.back();
            list.pop_back();
            members[to].push_back(i);
            const double w = space.weight(atoms[i]);
            mu[from] -= w;
            mu[to] += w;
            return true;
        };
        for (std::size_t step = 0;; ++step) {
            std::size_t j = 0;
            for (std::size_t t = 1; t < q; ++t)
                if (std::abs(mu[t] - share) > std::abs(mu[j] - share))
                    j = t;
            const bool surplus = mu[j] > share;
            if (std::abs(mu[j] - share) <= slack)
                break;
            if (step > budget)
                return false;
            // nearest cell on the other side of the share
            std::vector<int> prev(q, -2);
            std::deque<std::size_t> queue { j };
            prev[j] = -1;
            std::optional<std::size_t> other;
            while (!queue.empty() && !other) {
                const std::size_t v = queue.front();
                queue.pop_front();
                for (int l : adj[v])
                    if (prev[static_cast<std::size_t>(l)] == -2) {
                        prev[static_cast<std::size_t>(l)] = static_cast<int>(v);
                        const double gap = mu[static_cast<std::size_t>(l)] - share;
                        if (surplus ? gap < -measure_epsilon : gap > measure_epsilon) {
                            other = static_cast<std::size_t>(l);
                            break;
                        }
                        queue.push_back(static_cast<std::size_t>(l));
                    }
            }
            if (!other)
                return false;
            for (std::size_t v = *other; prev[v] >= 0; v = static_cast<std::size_t>(prev[v])) {
                const auto u = static_cast<std::size_t>(prev[v]);
                if (!(surplus ? move_one(u, v) : move_one(v, u)))
                    return false;
            }
        }
        for (std::size_t j = 0; j < q; ++j)
            if (std::abs(mu[j] - share) > 2.0 * w_max + measure_epsilon || members[j].empty())
                return false;
        for (std::size_t j = 0; j < q; ++j) {
            pieces[j].clear();
            for (std::size_t i : members[j])
                pieces[j].push_back(atoms[i]);
            std::sort(pieces[j].begin(), pieces[j].end());
        }
        return true;
    }

    // A generation-m cube lying wholly in `piece`, preferring cubes of the
    // coarse cube (n, beta) and then the one nearest the middle of the
    // piece's farthest pair.
    template <Metric M>
    std::optional<int> pick_nucleus(const AtomizedSpace<M>& space, const CubeTree& tree, int n, int beta, int m,
        std::span<const AtomId> piece)
    {
        if (piece.empty())
            return std::nullopt;
        std::vector<std::pair<int, std::size_t>> hits; // (cube, atoms of it in piece)
        {
            std::vector<int> labels;
            labels.reserve(piece.size());
            for (AtomId a : piece)
                labels.push_back(tree.label(m, a));
            std::sort(labels.begin(), labels.end());
            for (std::size_t i = 0; i < labels.size();) {
                std::size_t j = i;
                while (j < labels.size() && labels[j] == labels[i])
                    ++j;
                hits.emplace_back(labels[i], j - i);
                i = j;
            }
        }
        const AtomId ea = farthest_from(space, piece.front(), piece).first;
        const AtomId eb = farthest_from(space, ea, piece).first;
        std::optional<int> best;
        std::tuple<int, double, int> best_key {};
        for (auto [e, cnt] : hits) {
            const Cube& c = tree.cube(m, e);
            if (cnt != c.atom_ids.size())
                continue;
            const int outside = tree.ancestor(m, e, n) == beta ? 0 : 1;
            const double ecc = std::max(space.distance(c.center_id, ea), space.distance(c.center_id, eb));
            const std::tuple<int, double, int> key { outside, ecc, e };
            if (!best || key < best_key) {
                best = e;
                best_key = key;
            }
        }
        return best;
    }

    template <Metric M>
    double radius_about(const AtomizedSpace<M>& space, AtomId center, std::span<const AtomId> atoms)
    {
        double r = 0.0;
        for (AtomId a : atoms)
            r = std::max(r, space.distance(center, a));
        return r;
    }

    // Largest rho such that every atom closer than rho to `center` is in the
    // set (distance to the nearest outsider).
    template <Metric M>
    double inner_radius_of(const AtomizedSpace<M>& space, AtomId center, const std::vector<char>& in_set)
    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < space.size(); ++i)
            if (!in_set[i])
                best = std::min(best, space.distance(center, static_cast<AtomId>(i)));
        return best;
    }

    template <Metric M>
    void finish_region(const AtomizedSpace<M>& space, Region& r, std::span<const AtomId> outer_candidates)
    {
        r.measure = space.measure(r.atom_ids);
        std::vector<char> in(space.size(), 0);
        for (AtomId a : r.atom_ids)
            in[static_cast<std::size_t>(a)] = 1;
        r.inner_radius = inner_radius_of(space, r.inner_center, in);
        r.outer_radius = std::numeric_limits<double>::infinity();
        for (AtomId c : outer_candidates) {
            const double rad = radius_about(space, c, r.atom_ids);
            if (rad < r.outer_radius) {
                r.outer_radius = rad;
                r.outer_center = c;
            }
        }
    }

    inline std::vector<AtomId> set_minus(std::span<const AtomId> a, std::span<const AtomId> b_sorted)
    {
        std::vector<AtomId> out;
        out.reserve(a.size());
        for (AtomId x : a)
            if (!std::binary_search(b_sorted.begin(), b_sorted.end(), x))
                out.push_back(x);
        return out;
    }

} // namespace detail

/// Generation n of the coarse cubes for N regions: a0 delta^(n+1) <
/// (2 / (c1 N))^(1/d) <= a0 delta^n.
inline int coarse_generation(const CubeTree& tree, const RegularityConstants& c, int N)
{
    const double s = std::pow(2.0 / (c.c1 * N), 1.0 / c.d);
    const double a0 = tree.a0_hat();
    int n = static_cast<int>(std::floor(std::log(s / a0) / std::log(tree.delta())));
    while (a0 * std::pow(tree.delta(), n) < s)
        --n;
    while (a0 * std::pow(tree.delta(), n + 1) >= s)
        ++n;
    return n;
}

/// Partition into N regions of measure mu(X)/N, each inside a ball of radius
/// c3 N^(-1/d) and containing a ball of radius c4 N^(-1/d).
///
/// Coarse cubes of generation n form an overlap graph; along a spanning tree
/// directed to its center each cube keeps floor(mu(X_b) N) regions grown
/// from generation-m nuclei and hands its remainder W_b to its parent.
template <Metric M>
Partition equal_measure_partition(const AtomizedSpace<M>& space, const CubeTree& tree, int N,
    const RegularityConstants& c, PartitionOptions options = {})
{
    detail::require(N >= 1, Errc::invalid_argument, "N must be positive");
    detail::require(std::abs(space.total_measure() - 1.0) <= 1e-9, Errc::invalid_argument,
        "the space must be normalized to total measure 1");
    const double delta = tree.delta();
    const double a0 = tree.a0_hat();
    const double a1 = tree.a1_hat();
    const double d = c.d;
    const double unit = 1.0 / N;

    // atoms stand for cells of radius h, so the set spans up to diam + 2h
    const double lower = 2.0 / (c.c1 * std::pow(delta * (space.diameter() + 2.0 * space.resolution()), d));
    detail::require(N >= lower, Errc::invalid_argument,
        "N = " + std::to_string(N) + " is below the lower bound 2 / (c1 delta^d (diam + 2h)^d) = " + std::to_string(lower));

    Partition part;
    part.method = PartitionMethod::equal_measure;
    part.N = N;
    PartitionParams& p = part.params;
    p.N = N;
    p.d = d;
    p.c1 = c.c1;
    p.c2 = c.c2;
    p.n = coarse_generation(tree, c, N);
    p.M = 2.0 * c.c2 * std::pow(3.0 * a1, d) / (c.c1 * std::pow(delta * a0, d));
    p.H = c.c2 * std::pow(a1, d) / (c.c1 * std::pow(a0, d) * std::pow(delta, d));
    p.c3 = 3.0 * a1 / (delta * a0) * std::pow(2.0 / c.c1, 1.0 / d);
    p.k_step_bound = 1;
    while (std::pow(delta, p.k_step_bound) > 3.0 * std::pow(p.M, -2.0 / d))
        ++p.k_step_bound;
    p.quantization_tol = 10.0 * space.max_weight();

    detail::require(p.n >= tree.k_min(), Errc::invalid_argument,
        "coarse generation " + std::to_string(p.n) + " lies above the tree; lower k_min");
    detail::require(p.n < tree.k_max(), Errc::resolution_too_coarse,
        "coarse generation " + std::to_string(p.n) + " leaves no finer generation for nuclei");
    const int n = p.n;
    const auto coarse = tree.generation(n);
    for (const Cube& q : coarse)
        detail::require(q.measure >= 2.0 * unit - measure_epsilon, Errc::construction_degenerate,
            "a generation-n cube has measure below 2/N");

    OverlapGraph graph { coarse.size(), neighbor_pairs(space, tree, n) };
    std::vector<double> lengths;
    for (auto [a, b] : graph.edges)
        lengths.push_back(space.distance(coarse[static_cast<std::size_t>(a)].center_id, coarse[static_cast<std::size_t>(b)].center_id));
    const RootedTree rooted = options.spanning == SpanningRule::bfs ? spanning_tree_rooted(graph)
                                                                       : spanning_tree_rooted(graph, lengths);

    // measured M: mu(X_b) follows mu(Q_b) + sum over children of the
    // fractional remainders, up to one atom weight per child
    std::vector<double> hood(coarse.size());
    std::vector<double> predicted(coarse.size());
    double x_max = 0.0;
    for (int beta : rooted.order) {
        const auto b = static_cast<std::size_t>(beta);
        hood[b] = predicted[b] = coarse[b].measure;
        for (int a : rooted.children[b]) {
            const auto ai = static_cast<std::size_t>(a);
            hood[b] += coarse[ai].measure;
            predicted[b] += predicted[ai] - detail::floor_count(predicted[ai] * N) * unit + space.max_weight();
        }
        x_max = std::max(x_max, predicted[b]);
    }
    p.M_hat = N * x_max;
    detail::require(space.max_weight() <= 1.0 / (10.0 * p.M_hat * N), Errc::resolution_too_coarse,
        "atom weight exceeds 1/(10 M N); refine the space");

    // nuclei of measure <= 1/(M N) keep a node's nuclei within 1/N in total;
    // when no generation is that fine the finest one is used (remainders are
    // taken before nuclei, so the construction does not depend on it)
    p.k_step = 0;
    for (int k = 1; n + k <= tree.k_max(); ++k) {
        double largest = 0.0;
        for (const Cube& q : tree.generation(n + k))
            largest = std::max(largest, q.measure);
        if (largest <= 1.0 / (p.M_hat * N) + measure_epsilon) {
            p.k_step = k;
            break;
        }
    }
    p.nuclei_bounded = p.k_step > 0;
    if (p.k_step == 0)
        p.k_step = tree.k_max() - n;
    p.m = n + p.k_step;
    p.c4 = std::pow(2.0 / c.c1, 1.0 / d) * std::pow(delta, p.k_step);
    const int m = p.m;

    std::vector<std::vector<AtomId>> remainder(coarse.size());
    std::vector<int> counts(coarse.size(), 0);
    double carried = 0.0; // accumulated shortfall of remainder extractions
    int assigned = 0;
    part.ledger.resize(coarse.size());

    for (int beta : rooted.order) {
        const auto b = static_cast<std::size_t>(beta);
        const Cube& q = coarse[b];
        const bool is_root = beta == rooted.root;
        NodeLedger& led = part.ledger[b];
        led.vertex = beta;
        led.parent = rooted.parent[b];
        led.leaf = rooted.is_leaf(beta);
        led.cube_measure = q.measure;
        led.neighborhood_measure = hood[b];

        std::vector<AtomId> x_atoms(q.atom_ids);
        for (int a : rooted.children[b]) {
            auto& w = remainder[static_cast<std::size_t>(a)];
            x_atoms.insert(x_atoms.end(), w.begin(), w.end());
        }
        std::sort(x_atoms.begin(), x_atoms.end());
        const double mu_x = space.measure(x_atoms);
        led.x_measure = mu_x;

        const int count = is_root ? N - assigned : static_cast<int>(detail::floor_count(mu_x * N));
        detail::require(count >= 1, Errc::construction_degenerate, "a tree node received no regions");
        counts[b] = count;
        led.count = count;

        std::vector<AtomId> pool;
        if (!is_root) {
            const double target = std::max(0.0, mu_x - count * unit);
            const double request = std::min(target + carried, q.measure);
            // grow W around the parent's closest point: the parent-side end
            // of the closest pair of fine cube centers
            const int up = rooted.parent[b];
            const int fine = std::min(n + 3, tree.k_max());
            AtomId toward = coarse[static_cast<std::size_t>(up)].center_id;
            double gap = std::numeric_limits<double>::infinity();
            const auto mine = tree.descendants(n, beta, fine);
            for (int e : tree.descendants(n, up, fine)) {
                const AtomId z = tree.cube(fine, e).center_id;
                for (int f : mine) {
                    const double dz = space.distance(z, tree.cube(fine, f).center_id);
                    if (dz < gap) {
                        gap = dz;
                        toward = z;
                    }
                }
            }
            remainder[b] = extract_subset(space, tree, q.atom_ids, request, toward);
            led.remainder_measure = space.measure(remainder[b]);
            carried += target - led.remainder_measure;
            pool = detail::set_minus(x_atoms, remainder[b]);
        } else {
            pool = std::move(x_atoms);
        }

        // equal-measure pieces first, then one whole generation-m cube of
        // each piece as its nucleus
        auto pieces = detail::bisect_equal(space, pool, static_cast<std::size_t>(count));
        if (options.round_pieces) {
            auto rounded = pieces;
            if (detail::round_pieces(space, rounded)) {
                auto widest = [&](const std::vector<std::vector<AtomId>>& list) {
                    double w = 0.0;
                    for (const auto& piece : list)
                        w = std::max(w, detail::sweep_diameter(space, piece));
                    return w;
                };
                if (widest(rounded) < widest(pieces))
                    pieces = std::move(rounded);
            }
        }
        std::vector<int> nuclei;
        for (const auto& piece : pieces) {
            const auto e = detail::pick_nucleus(space, tree, n, beta, m, piece);
            if (!e)
                break;
            nuclei.push_back(*e);
        }
        if (nuclei.size() != pieces.size()) {
            // some piece holds no whole cube: fix the nuclei first and split
            // around them
            std::vector<int> desc;
            for (int e : tree.descendants(n, beta, m)) {
                const auto& ids = tree.cube(m, e).atom_ids;
                if (std::all_of(ids.begin(), ids.end(),
                        [&](AtomId x) { return std::binary_search(pool.begin(), pool.end(), x); }))
                    desc.push_back(e);
            }
            detail::require(desc.size() >= static_cast<std::size_t>(count), Errc::resolution_too_coarse,
                "not enough generation-m cubes inside a coarse cube for its nuclei");
            int seed = desc.front();
            for (int e : desc)
                if (tree.cube(m, e).center_id == q.center_id)
                    seed = e;
            nuclei = detail::spread_cubes(space, tree, m, desc, seed, static_cast<std::size_t>(count));
            std::vector<std::vector<AtomId>> nucleus_atoms;
            std::vector<AtomId> centers;
            std::vector<AtomId> united;
            for (int e : nuclei) {
                const Cube& nq = tree.cube(m, e);
                nucleus_atoms.push_back(nq.atom_ids);
                centers.push_back(nq.center_id);
                united.insert(united.end(), nq.atom_ids.begin(), nq.atom_ids.end());
            }
            std::sort(united.begin(), united.end());
            detail::NucleusSplitter<M> splitter(space, nucleus_atoms, centers);
            pieces = splitter.run(detail::set_minus(pool, united));
        }
        led.nuclei = nuclei;
        for (int e : nuclei)
            led.nuclei_measure += tree.cube(m, e).measure;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            Region r;
            r.id = static_cast<int>(part.regions.size());
            r.atom_ids = std::move(pieces[i]);
            r.nucleus = std::pair { m, nuclei[i] };
            r.node = beta;
            r.inner_center = tree.cube(m, nuclei[i]).center_id;
            const AtomId outer_candidates[] = { q.center_id, r.inner_center };
            detail::finish_region(space, r, outer_candidates);
            part.regions.push_back(std::move(r));
        }
        if (!is_root)
            assigned += count;
    }
    return part;
}

template <Metric M>
Partition equal_measure_partition(
    const AtomizedSpace<M>& space, const CubeTree& tree, int N, PartitionOptions options = {})
{
    return equal_measure_partition(space, tree, N, effective_constants(space, tree), options);
}

/// Partition into N regions built from whole cubes: N_n <= N < N_(n+1)
/// coarse cubes, each split into unions of generation-(n+k) cubes. Needs no
/// connectivity; measures are only comparable, not equal.
template <Metric M>
Partition quasi_equal_partition(
    const AtomizedSpace<M>& space, const CubeTree& tree, int N, const RegularityConstants& c)
{
    detail::require(N >= 1, Errc::invalid_argument, "N must be positive");
    detail::require(tree.cube_count(tree.k_min()) <= static_cast<std::size_t>(N), Errc::invalid_argument,
        "N is smaller than the coarsest generation's cube count");
    detail::require(tree.cube_count(tree.k_max()) >= static_cast<std::size_t>(N), Errc::resolution_too_coarse,
        "N exceeds the number of finest-generation cubes");
    const double delta = tree.delta();
    const double a0 = tree.a0_hat();
    const double a1 = tree.a1_hat();
    const double d = c.d;

    int n = tree.k_min();
    while (n < tree.k_max() && tree.cube_count(n + 1) <= static_cast<std::size_t>(N))
        ++n;

    Partition part;
    part.method = PartitionMethod::quasi_equal;
    part.N = N;
    PartitionParams& p = part.params;
    p.N = N;
    p.n = n;
    p.d = d;
    p.c1 = c.c1;
    p.c2 = c.c2;
    p.H = c.c2 * std::pow(a1, d) / (c.c1 * std::pow(a0, d) * std::pow(delta, d));
    p.k_step_bound = 1;
    while (p.H * c.c2 * std::pow(a1, d) * std::pow(delta, p.k_step_bound * d) > c.c1 * std::pow(a0, d))
        ++p.k_step_bound;
    p.quantization_tol = 10.0 * space.max_weight();

    const auto coarse = tree.generation(n);
    if (coarse.size() == static_cast<std::size_t>(N)) {
        p.k_step = 0;
    } else {
        detail::require(n < tree.k_max(), Errc::resolution_too_coarse, "no finer generation to split coarse cubes");
        p.k_step = std::min(p.k_step_bound, tree.k_max() - n);
    }
    p.m = n + p.k_step;
    p.c3 = a1 / (delta * a0) * std::pow(1.0 / c.c1, 1.0 / d);
    p.c4 = a0 * std::pow(delta, p.k_step) / a1 * std::pow(1.0 / c.c2, 1.0 / d);
    const int m = p.m;

    // regions per coarse cube: one each, extras to the largest mu / count
    std::vector<std::vector<int>> units(coarse.size());
    std::vector<int> share(coarse.size(), 1);
    for (std::size_t a = 0; a < coarse.size(); ++a)
        units[a] = tree.descendants(n, static_cast<int>(a), m);
    using Entry = std::tuple<double, int>; // (mu / share, -index)
    std::priority_queue<Entry> heap;
    for (std::size_t a = 0; a < coarse.size(); ++a)
        if (units[a].size() > 1)
            heap.emplace(coarse[a].measure, -static_cast<int>(a));
    for (int extra = N - static_cast<int>(coarse.size()); extra > 0; --extra) {
        detail::require(!heap.empty(), Errc::resolution_too_coarse, "coarse cubes hold too few finer cubes");
        const auto [key, neg] = heap.top();
        heap.pop();
        const auto a = static_cast<std::size_t>(-neg);
        ++share[a];
        if (static_cast<std::size_t>(share[a]) < units[a].size())
            heap.emplace(coarse[a].measure / share[a], neg);
    }

    for (std::size_t a = 0; a < coarse.size(); ++a) {
        // split the units into share[a] groups along the widest direction
        std::vector<std::vector<int>> groups;
        std::vector<std::pair<std::vector<int>, int>> stack { { units[a], share[a] } };
        while (!stack.empty()) {
            auto [list, q] = std::move(stack.back());
            stack.pop_back();
            if (q == 1) {
                groups.push_back(std::move(list));
                continue;
            }
            std::vector<AtomId> centers;
            for (int u : list)
                centers.push_back(tree.cube(m, u).center_id);
            const AtomId ea = detail::farthest_from(space, centers.front(), centers).first;
            const AtomId eb = detail::farthest_from(space, ea, centers).first;
            std::vector<std::tuple<double, int>> keyed;
            double total = 0.0;
            for (int u : list) {
                const AtomId z = tree.cube(m, u).center_id;
                keyed.emplace_back(space.distance(ea, z) - space.distance(eb, z), u);
                total += tree.cube(m, u).measure;
            }
            std::sort(keyed.begin(), keyed.end());
            const int q1 = q / 2;
            const double target = total * q1 / q;
            std::size_t cut = static_cast<std::size_t>(q1);
            double cum = 0.0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < keyed.size(); ++i) {
                cum += tree.cube(m, std::get<1>(keyed[i])).measure;
                const std::size_t left = i + 1;
                if (left < static_cast<std::size_t>(q1) || keyed.size() - left < static_cast<std::size_t>(q - q1))
                    continue;
                if (std::abs(cum - target) < best) {
                    best = std::abs(cum - target);
                    cut = left;
                }
            }
            std::vector<int> l, r;
            for (std::size_t i = 0; i < keyed.size(); ++i)
                (i < cut ? l : r).push_back(std::get<1>(keyed[i]));
            std::sort(l.begin(), l.end());
            std::sort(r.begin(), r.end());
            stack.push_back({ std::move(r), q - q1 });
            stack.push_back({ std::move(l), q1 });
        }
        for (auto& g : groups) {
            Region r;
            r.id = static_cast<int>(part.regions.size());
            r.node = static_cast<int>(a);
            int biggest = g.front();
            for (int u : g) {
                const Cube& uq = tree.cube(m, u);
                r.atom_ids.insert(r.atom_ids.end(), uq.atom_ids.begin(), uq.atom_ids.end());
                if (uq.measure > tree.cube(m, biggest).measure)
                    biggest = u;
            }
            std::sort(r.atom_ids.begin(), r.atom_ids.end());
            r.nucleus = std::pair { m, biggest };
            r.inner_center = tree.cube(m, biggest).center_id;
            const AtomId outer_candidates[] = { coarse[a].center_id, r.inner_center };
            detail::finish_region(space, r, outer_candidates);
            part.regions.push_back(std::move(r));
        }
    }
    return part;
}

template <Metric M>
Partition quasi_equal_partition(const AtomizedSpace<M>& space, const CubeTree& tree, int N)
{
    return quasi_equal_partition(space, tree, N, effective_constants(space, tree));
}

/// Exact diameter of an atom set. Large sets are grouped by cube; a pair of
/// groups is scanned only when its bound d(z_i, z_j) + r_i + r_j beats the
/// best pair found so far.
template <Metric M>
double set_diameter(const AtomizedSpace<M>& space, const CubeTree& tree, std::span<const AtomId> atoms)
{
    if (atoms.size() < 2)
        return 0.0;
    if (atoms.size() <= 1500) {
        double best = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i)
            for (std::size_t j = i + 1; j < atoms.size(); ++j)
                best = std::max(best, space.distance(atoms[i], atoms[j]));
        return best;
    }
    int gen = tree.k_max();
    std::vector<int> groups_of;
    for (;; --gen) {
        groups_of.clear();
        for (AtomId a : atoms)
            groups_of.push_back(tree.label(gen, a));
        std::sort(groups_of.begin(), groups_of.end());
        groups_of.erase(std::unique(groups_of.begin(), groups_of.end()), groups_of.end());
        if (groups_of.size() <= 1500 || gen == tree.k_min())
            break;
    }
    struct Group {
        AtomId center;
        std::vector<AtomId> members;
        double radius = 0.0;
    };
    std::vector<Group> groups(groups_of.size());
    for (std::size_t g = 0; g < groups_of.size(); ++g)
        groups[g].center = tree.cube(gen, groups_of[g]).center_id;
    for (AtomId a : atoms) {
        const auto g = static_cast<std::size_t>(
            std::lower_bound(groups_of.begin(), groups_of.end(), tree.label(gen, a)) - groups_of.begin());
        groups[g].members.push_back(a);
        groups[g].radius = std::max(groups[g].radius, space.distance(groups[g].center, a));
    }
    const AtomId ea = detail::farthest_from(space, atoms.front(), atoms).first;
    const auto [eb, far] = detail::farthest_from(space, ea, atoms);
    double best = far;
    std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
    for (std::size_t i = 0; i < groups.size(); ++i)
        for (std::size_t j = i; j < groups.size(); ++j) {
            const double ub = space.distance(groups[i].center, groups[j].center) + groups[i].radius + groups[j].radius;
            if (ub > best)
                cand.emplace_back(ub, i, j);
        }
    std::sort(cand.begin(), cand.end(), [](const auto& l, const auto& r) { return std::get<0>(l) > std::get<0>(r); });
    for (auto [ub, i, j] : cand) {
        if (ub <= best)
            break;
        for (AtomId x : groups[i].members)
            for (AtomId y : groups[j].members)
                best = std::max(best, space.distance(x, y));
    }
    return best;
}

struct PartitionReport {
    bool covering = false;
    bool disjoint = false;
    bool count_ok = false;
    double max_measure_deviation {};
    double measure_tolerance {};
    bool measure_ok = false;
    double spread {}; // max mu / min mu
    double max_outer_radius {};
    double outer_bound {}; // c3 N^(-1/d)
    bool outer_ok = false;
    double min_inner_radius {};
    double inner_bound {}; // c4 N^(-1/d)
    bool inner_ok = false;
    bool nuclei_inside = false;
    double max_diameter {};
    bool ledger_ok = false;
    int count_sum {};
    std::vector<std::string> failures;

    [[nodiscard]] bool all() const noexcept
    {
        return covering && disjoint && count_ok && measure_ok && outer_ok && inner_ok && nuclei_inside && ledger_ok;
    }
};

/// Recomputes every partition property from the region atom lists.
template <Metric M>
PartitionReport verify_partition(const AtomizedSpace<M>& space, const CubeTree& tree, const Partition& part)
{
    PartitionReport rep;
    const PartitionParams& p = part.params;
    const double unit = space.total_measure() / part.N;
    const double scale = std::pow(static_cast<double>(part.N), -1.0 / p.d);
    rep.outer_bound = p.c3 * scale;
    rep.inner_bound = p.c4 * scale;
    rep.measure_tolerance = p.quantization_tol;

    std::vector<int> owner(space.size(), -1);
    rep.covering = rep.disjoint = true;
    for (std::size_t i = 0; i < part.regions.size(); ++i)
        for (AtomId a : part.regions[i].atom_ids) {
            auto& o = owner[static_cast<std::size_t>(a)];
            if (o >= 0)
                rep.disjoint = false;
            o = static_cast<int>(i);
        }
    for (int o : owner)
        if (o < 0)
            rep.covering = false;
    rep.count_ok = part.regions.size() == static_cast<std::size_t>(part.N);
    if (!rep.covering)
        rep.failures.push_back("some atom lies in no region");
    if (!rep.disjoint)
        rep.failures.push_back("some atom lies in two regions");
    if (!rep.count_ok)
        rep.failures.push_back("region count differs from N");

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    rep.min_inner_radius = std::numeric_limits<double>::infinity();
    rep.outer_ok = rep.inner_ok = rep.nuclei_inside = true;
    for (std::size_t i = 0; i < part.regions.size(); ++i) {
        const Region& r = part.regions[i];
        const double mu = space.measure(r.atom_ids);
        lo = std::min(lo, mu);
        hi = std::max(hi, mu);
        rep.max_measure_deviation = std::max(rep.max_measure_deviation, std::abs(mu - unit));

        const double outer = detail::radius_about(space, r.outer_center, r.atom_ids);
        rep.max_outer_radius = std::max(rep.max_outer_radius, outer);
        std::vector<char> in(space.size(), 0);
        for (AtomId a : r.atom_ids)
            in[static_cast<std::size_t>(a)] = 1;
        const double inner = detail::inner_radius_of(space, r.inner_center, in);
        rep.min_inner_radius = std::min(rep.min_inner_radius, inner);
        if (outer > rep.outer_bound)
            rep.outer_ok = false;
        if (inner < rep.inner_bound)
            rep.inner_ok = false;
        if (r.nucleus) {
            const Cube& nq = tree.cube(r.nucleus->first, r.nucleus->second);
            for (AtomId a : nq.atom_ids)
                if (!in[static_cast<std::size_t>(a)])
                    rep.nuclei_inside = false;
            if (!in[static_cast<std::size_t>(r.inner_center)])
                rep.nuclei_inside = false;
        }
        rep.max_diameter = std::max(rep.max_diameter, set_diameter(space, tree, r.atom_ids));
    }
    rep.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (part.method == PartitionMethod::equal_measure)
        rep.measure_ok = rep.max_measure_deviation <= rep.measure_tolerance;
    else
        rep.measure_ok = rep.spread <= p.H;
    if (!rep.measure_ok)
        rep.failures.push_back("region measures out of tolerance");
    if (!rep.outer_ok)
        rep.failures.push_back("a region leaves its c3 N^(-1/d) ball");
    if (!rep.inner_ok)
        rep.failures.push_back("a region misses its c4 N^(-1/d) inner ball");
    if (!rep.nuclei_inside)
        rep.failures.push_back("a nucleus is not contained in its region");

    rep.ledger_ok = true;
    if (part.method == PartitionMethod::equal_measure) {
        const double tol = p.quantization_tol;
        std::vector<std::pair<int, int>> used;
        for (const NodeLedger& led : part.ledger) {
            rep.count_sum += led.count;
            const bool root = led.parent < 0;
            if (!root && !(led.remainder_measure < unit + tol))
                rep.ledger_ok = false;
            if (!(led.x_measure <= p.M_hat * unit + tol) || !(led.x_measure <= led.neighborhood_measure + tol))
                rep.ledger_ok = false;
            if (p.nuclei_bounded && !(led.nuclei_measure <= unit + tol))
                rep.ledger_ok = false;
            if (root && std::abs(led.x_measure - led.count * unit) > tol)
                rep.ledger_ok = false;
            for (int e : led.nuclei)
                used.emplace_back(p.m, e);
        }
        std::sort(used.begin(), used.end());
        if (std::adjacent_find(used.begin(), used.end()) != used.end())
            rep.ledger_ok = false;
        if (rep.count_sum != part.N)
            rep.ledger_ok = false;
        if (!rep.ledger_ok)
            rep.failures.push_back("node ledger inconsistent");
    } else {
        rep.count_sum = part.N;
    }
    return rep;
}

} // namespace ahlfors
