#pragma once

// JSON and CSV exports. Needs nlohmann/json ("json.hpp") on the include path.

#include "ahlfors/cubes.hpp"
#include "ahlfors/partition.hpp"
#include "ahlfors/quadrature.hpp"
#include "ahlfors/space.hpp"

#include "json.hpp"

#include <ostream>
#include <string>

namespace ahlfors::io {

using nlohmann::json;

/// Number of leading coordinates that are not identically zero.
template <Metric M>
int ambient_dimension(const AtomizedSpace<M>& space)
{
    int dim = 1;
    for (const Point& p : space.positions())
        for (int c = 2; c >= dim; --c)
            if (p[static_cast<std::size_t>(c)] != 0.0) {
                dim = c + 1;
                break;
            }
    return dim;
}

template <Metric M>
json space_json(const AtomizedSpace<M>& space)
{
    const int dim = ambient_dimension(space);
    json atoms = json::array();
    for (std::size_t i = 0; i < space.size(); ++i) {
        const Point& p = space.position(static_cast<AtomId>(i));
        json pos = json::array();
        for (int c = 0; c < dim; ++c)
            pos.push_back(p[static_cast<std::size_t>(c)]);
        atoms.push_back({ { "id", i }, { "pos", std::move(pos) }, { "w", space.weight(static_cast<AtomId>(i)) } });
    }
    return { { "kind", space.kind() }, { "metric", std::string(M::name) }, { "atom_count", space.size() },
        { "d_hint", space.dimension_hint() }, { "diam", space.diameter() }, { "resolution", space.resolution() },
        { "atoms", std::move(atoms) } };
}

inline json cubes_json(const CubeTree& tree)
{
    json gens = json::array();
    for (int k = tree.k_min(); k <= tree.k_max(); ++k) {
        json cubes = json::array();
        for (const Cube& q : tree.generation(k)) {
            json c = { { "alpha", q.index }, { "center_id", q.center_id }, { "measure", q.measure },
                { "atom_ids", q.atom_ids } };
            c["parent"] = q.parent ? json(*q.parent) : json(nullptr);
            cubes.push_back(std::move(c));
        }
        gens.push_back({ { "k", k }, { "cubes", std::move(cubes) } });
    }
    return { { "delta", tree.delta() }, { "a0_hat", tree.a0_hat() }, { "a1_hat", tree.a1_hat() },
        { "generations", std::move(gens) } };
}

inline json params_json(const PartitionParams& p)
{
    return { { "n", p.n }, { "m", p.m }, { "k_step", p.k_step }, { "M", p.M }, { "M_hat", p.M_hat }, { "H", p.H },
        { "d", p.d }, { "c1", p.c1 }, { "c2", p.c2 }, { "c3", p.c3 }, { "c4", p.c4 },
        { "quantization_tol", p.quantization_tol }, { "nuclei_bounded", p.nuclei_bounded } };
}

inline json partition_json(const Partition& part)
{
    json regions = json::array();
    for (const Region& r : part.regions) {
        json j = { { "id", r.id }, { "measure", r.measure }, { "node", r.node }, { "nucleus_center", r.inner_center },
            { "inner_radius", r.inner_radius }, { "outer_center", r.outer_center },
            { "outer_radius", r.outer_radius } };
        j["nucleus"] = r.nucleus ? json { { "k", r.nucleus->first }, { "alpha", r.nucleus->second } } : json(nullptr);
        j["atom_ids"] = r.atom_ids;
        regions.push_back(std::move(j));
    }
    return { { "method", part.method == PartitionMethod::equal_measure ? "equal_measure" : "quasi_equal" },
        { "N", part.N }, { "params", params_json(part.params) }, { "regions", std::move(regions) } };
}

inline json report_json(const PartitionReport& rep)
{
    return { { "all", rep.all() }, { "covering", rep.covering }, { "disjoint", rep.disjoint },
        { "count_ok", rep.count_ok }, { "max_measure_deviation", rep.max_measure_deviation },
        { "measure_tolerance", rep.measure_tolerance }, { "measure_ok", rep.measure_ok }, { "spread", rep.spread },
        { "max_outer_radius", rep.max_outer_radius }, { "outer_bound", rep.outer_bound },
        { "outer_ok", rep.outer_ok }, { "min_inner_radius", rep.min_inner_radius },
        { "inner_bound", rep.inner_bound }, { "inner_ok", rep.inner_ok }, { "nuclei_inside", rep.nuclei_inside },
        { "max_diameter", rep.max_diameter }, { "ledger_ok", rep.ledger_ok }, { "count_sum", rep.count_sum },
        { "failures", rep.failures } };
}

/// CSV rows start after one "# config <json>" provenance line.
inline void write_config_line(std::ostream& out, const json& config) { out << "# config " << config.dump() << '\n'; }

inline void write_labels_csv(std::ostream& out, const Partition& part, std::size_t atom_count)
{
    std::vector<int> label(atom_count, -1);
    for (const Region& r : part.regions)
        for (AtomId a : r.atom_ids)
            label[static_cast<std::size_t>(a)] = r.id;
    out << "atom_id,region_id\n";
    for (std::size_t i = 0; i < atom_count; ++i)
        out << i << ',' << label[i] << '\n';
}

inline std::string format_double(double x) { return json(x).dump(); }

inline void write_decay_csv(std::ostream& out, const DecayTable& table)
{
    out << "space,N,f_name,error,bound,mesh,separation,ratio\n";
    for (const DecayRow& r : table.rows)
        out << table.space << ',' << r.N << ',' << r.f_name << ',' << format_double(r.error) << ','
            << format_double(r.bound) << ',' << format_double(r.mesh) << ',' << format_double(r.separation) << ','
            << format_double(r.ratio) << '\n';
}

inline json decay_json(const DecayTable& table)
{
    json rows = json::array();
    for (const DecayRow& r : table.rows)
        rows.push_back({ { "N", r.N }, { "f_name", r.f_name }, { "error", r.error }, { "bound", r.bound },
            { "mesh", r.mesh }, { "separation", r.separation }, { "ratio", r.ratio },
            { "ratio_bound", r.ratio_bound } });
    json slopes = json::object();
    for (const DecaySlope& s : table.slopes)
        slopes[s.f_name] = std::isnan(s.slope) ? json(nullptr) : json(s.slope);
    json skipped = json::array();
    for (const auto& [N, why] : table.skipped)
        skipped.push_back({ { "N", N }, { "reason", why } });
    return { { "space", table.space }, { "rows", std::move(rows) }, { "slopes", std::move(slopes) },
        { "skipped", std::move(skipped) } };
}

} // namespace ahlfors::io
