#pragma once

#include "ahlfors/error.hpp"
#include "ahlfors/space.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace ahlfors {

struct SeparatedNet {
    double r {};
    std::vector<AtomId> center_ids; // selection order
    double covering_radius {};
};

/// Incremental greedy farthest-point selection.
///
/// Every atom keeps its nearest selected center (ties to the lower atom id).
/// Atoms are bucketed into cells by nearest center; a new center c can only
/// capture atoms of a cell with center z when d(z, c) <= 2 R_z, R_z being the
/// cell's radius, so only those cells are rescanned.
template <Metric M>
class FarthestPointSampler {
public:
    explicit FarthestPointSampler(const AtomizedSpace<M>& space, AtomId seed = 0)
        : space_(space)
        , dist_(space.size())
        , owner_(space.size(), 0)
    {
        detail::require(seed >= 0 && static_cast<std::size_t>(seed) < space.size(), Errc::invalid_argument,
            "seed atom out of range");
        centers_.push_back(seed);
        cells_.emplace_back();
        cells_[0].members.reserve(space.size());
        for (std::size_t i = 0; i < space.size(); ++i) {
            dist_[i] = space.distance(seed, static_cast<AtomId>(i));
            cells_[0].members.push_back(static_cast<AtomId>(i));
        }
        refresh(0);
    }

    /// Distance from the farthest atom to the current center set.
    [[nodiscard]] double farthest_distance() const { return cells_[farthest_cell()].radius; }
    [[nodiscard]] AtomId farthest_atom() const { return cells_[farthest_cell()].argmax; }

    [[nodiscard]] const std::vector<AtomId>& centers() const noexcept { return centers_; }

    /// Index into centers() of each atom's nearest center.
    [[nodiscard]] const std::vector<std::int32_t>& owners() const noexcept { return owner_; }
    [[nodiscard]] double distance_to_centers(AtomId a) const { return dist_[static_cast<std::size_t>(a)]; }

    /// Adds the current farthest atom as a center and returns it.
    AtomId add_farthest()
    {
        const AtomId next = farthest_atom();
        add(next);
        return next;
    }

    void add(AtomId c)
    {
        const auto ci = static_cast<std::int32_t>(centers_.size());
        const Point& pc = space_.position(c);
        const std::size_t existing = cells_.size();
        centers_.push_back(c);
        cells_.emplace_back();
        for (std::size_t z = 0; z < existing; ++z) {
            Cell& cell = cells_[z];
            if (cell.members.empty())
                continue;
            const double dzc = space_.distance(pc, centers_[z]);
            // small slack keeps the pruning exact under rounding
            if (dzc > 2.0 * cell.radius * (1.0 + 1e-12) + 1e-300)
                continue;
            std::size_t keep = 0;
            bool changed = false;
            for (AtomId a : cell.members) {
                const auto ai = static_cast<std::size_t>(a);
                const double d = space_.distance(pc, a);
                if (d < dist_[ai] || (d == dist_[ai] && c < centers_[z])) {
                    dist_[ai] = d;
                    owner_[ai] = ci;
                    cells_[static_cast<std::size_t>(ci)].members.push_back(a);
                    changed = true;
                } else {
                    cell.members[keep++] = a;
                }
            }
            if (changed) {
                cell.members.resize(keep);
                refresh(z);
            }
        }
        refresh(static_cast<std::size_t>(ci));
    }

private:
    struct Cell {
        std::vector<AtomId> members;
        double radius = 0.0;
        AtomId argmax = -1;
    };

    void refresh(std::size_t z)
    {
        Cell& cell = cells_[z];
        cell.radius = 0.0;
        cell.argmax = -1;
        for (AtomId a : cell.members) {
            const double d = dist_[static_cast<std::size_t>(a)];
            if (cell.argmax < 0 || d > cell.radius || (d == cell.radius && a < cell.argmax)) {
                cell.radius = d;
                cell.argmax = a;
            }
        }
    }

    std::size_t farthest_cell() const
    {
        std::size_t best = 0;
        bool found = false;
        for (std::size_t z = 0; z < cells_.size(); ++z) {
            const Cell& cell = cells_[z];
            if (cell.argmax < 0)
                continue;
            const Cell& b = cells_[best];
            if (!found || cell.radius > b.radius || (cell.radius == b.radius && cell.argmax < b.argmax)) {
                best = z;
                found = true;
            }
        }
        return best;
    }

    const AtomizedSpace<M>& space_;
    std::vector<double> dist_;
    std::vector<std::int32_t> owner_;
    std::vector<AtomId> centers_;
    std::vector<Cell> cells_;
};

/// Greedy maximal r-separated net seeded at atom 0.
template <Metric M>
SeparatedNet maximal_net(const AtomizedSpace<M>& space, double r)
{
    detail::require(r > 0.0 && r <= space.diameter(), Errc::invalid_argument, "net radius must lie in (0, diam]");
    FarthestPointSampler<M> fps(space);
    while (fps.farthest_distance() >= r)
        fps.add_farthest();
    return { r, fps.centers(), fps.farthest_distance() };
}

namespace detail {

    inline void check_generations(double delta, int k_min, int k_max)
    {
        require(delta > 0.0 && delta < 1.0, Errc::invalid_argument, "delta must lie in (0, 1)");
        require(k_min <= k_max, Errc::invalid_argument, "k_min must not exceed k_max");
    }

    // Nets for generations k_min..k_max from one farthest-point run, together
    // with every atom's nearest center (index into the generation's net) at
    // each generation.
    template <Metric M>
    struct NestedRun {
        std::vector<SeparatedNet> nets;
        std::vector<std::vector<std::int32_t>> owners;
    };

    template <Metric M>
    NestedRun<M> run_nested(const AtomizedSpace<M>& space, double delta, int k_min, int k_max)
    {
        check_generations(delta, k_min, k_max);
        require(std::pow(delta, k_max) >= 4.0 * space.resolution(), Errc::resolution_too_coarse,
            "finest generation radius is below 4x the atom resolution; cubes would degenerate to single atoms");
        NestedRun<M> run;
        FarthestPointSampler<M> fps(space);
        for (int k = k_min; k <= k_max; ++k) {
            const double r = std::pow(delta, k);
            while (fps.farthest_distance() >= r)
                fps.add_farthest();
            run.nets.push_back({ r, fps.centers(), fps.farthest_distance() });
            run.owners.push_back(fps.owners());
        }
        return run;
    }

} // namespace detail

/// Maximal nets at radii delta^k, k = k_min..k_max, nested by construction.
/// Generations with delta^k > diam are allowed and hold the seed alone.
template <Metric M>
std::vector<SeparatedNet> nested_nets(const AtomizedSpace<M>& space, double delta, int k_min, int k_max)
{
    return detail::run_nested(space, delta, k_min, k_max).nets;
}

} // namespace ahlfors
