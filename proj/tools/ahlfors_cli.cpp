#include "ahlfors.hpp"
#include "ahlfors/io.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace {

using namespace ahlfors;
using nlohmann::json;

using AnySpace = std::variant<AtomizedSpace<Euclidean>, AtomizedSpace<Geodesic>, AtomizedSpace<Chebyshev>>;

struct RunConfig {
    std::string mode;
    std::string space = "interval";
    std::optional<int> atoms;
    int level = 10;
    std::uint64_t seed = 0;
    double delta = 0.25;
    std::optional<int> kmax;
    int N = 16;
    std::vector<int> Ns { 16, 32, 64, 128 };
    bool quasi = false;
    std::string format = "json";
    std::string out;
    std::string labels;

    [[nodiscard]] json to_json() const
    {
        json j = { { "mode", mode }, { "space", space }, { "delta", delta }, { "seed", seed }, { "format", format } };
        if (space == "gasket")
            j["level"] = level;
        else
            j["atoms"] = atom_count();
        if (kmax)
            j["kmax"] = *kmax;
        if (mode == "partition" || mode == "verify") {
            j["N"] = N;
            j["quasi"] = quasi;
        }
        if (mode == "quad")
            j["Ns"] = Ns;
        return j;
    }

    [[nodiscard]] int atom_count() const
    {
        if (atoms)
            return *atoms;
        if (space == "interval")
            return 1 << 16;
        if (space == "square")
            return 512 * 512;
        if (space == "sphere")
            return 100000;
        if (space == "plus" || space == "segments")
            return 1 << 14;
        return 0;
    }
};

AnySpace make_space(const RunConfig& cfg)
{
    const int n = cfg.atom_count();
    if (cfg.space == "interval")
        return build_interval(n);
    if (cfg.space == "square") {
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
        detail::require(side * side == n, Errc::invalid_argument, "square --atoms must be a perfect square");
        return build_square(side);
    }
    if (cfg.space == "sphere")
        return build_sphere_s2(n, cfg.seed);
    if (cfg.space == "gasket")
        return build_gasket(cfg.level);
    if (cfg.space == "plus")
        return build_plus_sign(n);
    if (cfg.space == "segments")
        return build_two_segments(n);
    throw Error(Errc::invalid_argument, "unknown space '" + cfg.space + "'");
}

template <Metric M>
CubeTree make_tree(const AtomizedSpace<M>& space, const RunConfig& cfg)
{
    auto [k_min, k_max] = default_generations(space, cfg.delta);
    if (cfg.kmax)
        k_max = *cfg.kmax;
    return build_cube_tree(space, cfg.delta, k_min, k_max);
}

// Relative output paths land under $AHLFORS_OUT_DIR when it is set.
std::filesystem::path output_path(const std::string& out)
{
    std::filesystem::path p(out);
    if (const char* dir = std::getenv("AHLFORS_OUT_DIR"); dir && *dir && p.is_relative())
        p = std::filesystem::path(dir) / p;
    return p;
}

void write_file(const std::string& out, const std::string& content)
{
    const auto path = output_path(out);
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error(Errc::invalid_argument, "cannot open output file " + path.string());
    f << content;
    std::cout << "wrote " << path.string() << '\n';
}

void write_json(const std::string& out, const RunConfig& cfg, json body)
{
    body["config"] = cfg.to_json();
    write_file(out, body.dump(1) + "\n");
}

void print_row(const std::string& name, double value)
{
    std::cout << "  " << std::left << std::setw(10) << name << std::setprecision(6) << value << '\n';
}

void print_constants(const CubeTree& tree, const PartitionParams& p)
{
    std::cout << "constants\n";
    print_row("d", p.d);
    print_row("c1_hat", p.c1);
    print_row("c2_hat", p.c2);
    print_row("a0_hat", tree.a0_hat());
    print_row("a1_hat", tree.a1_hat());
    print_row("M", p.M);
    print_row("M_hat", p.M_hat);
    print_row("H", p.H);
    print_row("c3", p.c3);
    print_row("c4", p.c4);
    std::cout << "  n = " << p.n << ", m = " << p.m << ", k_step = " << p.k_step << '\n';
}

void print_report(const PartitionReport& rep)
{
    std::cout << "verification: " << (rep.all() ? "PASS" : "FAIL") << '\n'
              << "  cover " << rep.covering << ", disjoint " << rep.disjoint << ", count " << rep.count_ok
              << ", ledger " << rep.ledger_ok << '\n'
              << "  max |mu - 1/N| " << rep.max_measure_deviation << " (tol " << rep.measure_tolerance
              << "), spread " << rep.spread << '\n'
              << "  max outer radius " << rep.max_outer_radius << " <= " << rep.outer_bound << '\n'
              << "  min inner radius " << rep.min_inner_radius << " >= " << rep.inner_bound << '\n'
              << "  max region diameter " << rep.max_diameter << '\n';
    for (const auto& f : rep.failures)
        std::cout << "  failure: " << f << '\n';
}

template <Metric M>
int run_space(const AtomizedSpace<M>& space, const RunConfig& cfg)
{
    const auto rep = regularity_probe(space, default_probe_centers(space), default_probe_radii(space));
    std::cout << space.kind() << ": " << space.size() << " atoms, diam " << space.diameter() << ", h "
              << space.resolution() << '\n';
    print_row("d_fit", rep.d_fit);
    print_row("c1_hat", rep.c1_hat);
    print_row("c2_hat", rep.c2_hat);
    if (!cfg.out.empty())
        write_json(cfg.out, cfg, { { "space", io::space_json(space) } });
    return 0;
}

template <Metric M>
int run_cubes(const AtomizedSpace<M>& space, const RunConfig& cfg)
{
    const auto tree = make_tree(space, cfg);
    std::cout << "generation  cubes\n";
    for (int k = tree.k_min(); k <= tree.k_max(); ++k)
        std::cout << "  " << std::setw(8) << k << "  " << tree.cube_count(k) << '\n';
    const auto rep = verify_cube_axioms(space, tree);
    std::cout << "a0_hat " << rep.a0_hat << ", a1_hat " << rep.a1_hat << ", ratio " << rep.ratio << '\n'
              << "axioms: " << (rep.all() ? "PASS" : "FAIL") << '\n';
    for (const auto& f : rep.failures)
        std::cout << "  failure: " << f << '\n';
    if (!cfg.out.empty())
        write_json(cfg.out, cfg, { { "cubes", io::cubes_json(tree) } });
    return rep.all() ? 0 : 1;
}

template <Metric M>
int run_partition(const AtomizedSpace<M>& space, const RunConfig& cfg)
{
    const auto tree = make_tree(space, cfg);
    const auto part = cfg.quasi ? quasi_equal_partition(space, tree, cfg.N) : equal_measure_partition(space, tree, cfg.N);
    const auto rep = verify_partition(space, tree, part);
    std::cout << (cfg.quasi ? "quasi-equal" : "equal-measure") << " partition of " << space.kind() << " into "
              << cfg.N << " regions\n";
    print_constants(tree, part.params);
    print_report(rep);
    if (cfg.mode == "verify") {
        if (!cfg.out.empty())
            write_json(cfg.out, cfg, { { "report", io::report_json(rep) } });
        return rep.all() ? 0 : 1;
    }
    if (!cfg.out.empty()) {
        if (cfg.format == "csv") {
            std::ostringstream s;
            io::write_config_line(s, cfg.to_json());
            io::write_labels_csv(s, part, space.size());
            write_file(cfg.out, s.str());
        } else {
            write_json(cfg.out, cfg, { { "partition", io::partition_json(part) }, { "report", io::report_json(rep) } });
        }
    }
    if (!cfg.labels.empty()) {
        std::ostringstream s;
        io::write_config_line(s, cfg.to_json());
        io::write_labels_csv(s, part, space.size());
        write_file(cfg.labels, s.str());
    }
    return 0;
}

template <Metric M>
int run_quad(const AtomizedSpace<M>& space, const RunConfig& cfg)
{
    const auto tree = make_tree(space, cfg);
    const auto table = error_decay_experiment(space, tree, default_test_functions(space), cfg.Ns);
    std::cout << std::left << std::setw(6) << "N" << std::setw(7) << "f" << std::setw(14) << "error" << std::setw(14)
              << "bound" << "mesh/sep\n";
    for (const auto& r : table.rows)
        std::cout << std::setw(6) << r.N << std::setw(7) << r.f_name << std::setw(14) << r.error << std::setw(14)
                  << r.bound << r.ratio << '\n';
    for (const auto& s : table.slopes)
        std::cout << "slope " << s.f_name << ": " << s.slope << '\n';
    for (const auto& [N, why] : table.skipped)
        std::cout << "skipped N = " << N << ": " << why << '\n';
    if (!cfg.out.empty()) {
        if (cfg.format == "json") {
            write_json(cfg.out, cfg, { { "quadrature", io::decay_json(table) } });
        } else {
            std::ostringstream s;
            io::write_config_line(s, cfg.to_json());
            io::write_decay_csv(s, table);
            write_file(cfg.out, s.str());
        }
    }
    return 0;
}

void add_space_options(CLI::App* cmd, RunConfig& cfg)
{
    cmd->add_option("--space", cfg.space, "interval | square | sphere | gasket | plus | segments")
        ->check(CLI::IsMember({ "interval", "square", "sphere", "gasket", "plus", "segments" }));
    cmd->add_option("--atoms", cfg.atoms, "atom count (square: total, a perfect square)")->check(CLI::PositiveNumber);
    cmd->add_option("--level", cfg.level, "gasket subdivision level")->check(CLI::Range(1, 14));
    cmd->add_option("--seed", cfg.seed, "seed for the sphere's spiral offset");
    cmd->add_option("--out", cfg.out, "output file (relative paths go under $AHLFORS_OUT_DIR)");
}

void add_tree_options(CLI::App* cmd, RunConfig& cfg)
{
    cmd->add_option("--delta", cfg.delta, "cube scale ratio")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--kmax", cfg.kmax, "finest cube generation");
}

} // namespace

int main(int argc, char** argv)
{
    RunConfig cfg;
    CLI::App app { "Dyadic cubes, equal-measure partitions and quadrature on atomized Ahlfors regular spaces" };
    app.require_subcommand(1);

    auto* space_cmd = app.add_subcommand("space", "build a space and probe its regularity constants");
    add_space_options(space_cmd, cfg);

    auto* cubes_cmd = app.add_subcommand("cubes", "build dyadic cubes and check their axioms");
    add_space_options(cubes_cmd, cfg);
    add_tree_options(cubes_cmd, cfg);

    for (const char* name : { "partition", "verify" }) {
        auto* cmd = app.add_subcommand(name,
            std::string(name) == "partition" ? "build an equal-measure (or quasi-equal) partition"
                                             : "build a partition and exit nonzero unless every check passes");
        add_space_options(cmd, cfg);
        add_tree_options(cmd, cfg);
        cmd->add_option("--N", cfg.N, "number of regions")->required()->check(CLI::PositiveNumber);
        cmd->add_flag("--quasi", cfg.quasi, "quasi-equal partition (no connectivity needed)");
        if (std::string(name) == "partition") {
            cmd->add_option("--format", cfg.format, "json | csv (csv writes per-atom labels)")
                ->check(CLI::IsMember({ "json", "csv" }));
            cmd->add_option("--labels", cfg.labels, "also write per-atom region labels as CSV");
        }
    }

    auto* quad_cmd = app.add_subcommand("quad", "quadrature error decay over a list of N");
    add_space_options(quad_cmd, cfg);
    add_tree_options(quad_cmd, cfg);
    quad_cmd->add_option("--Ns", cfg.Ns, "increasing region counts")->delimiter(',');
    quad_cmd->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({ "json", "csv" }));
    cfg.format = "json";

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    cfg.mode = app.get_subcommands().front()->get_name();
    if (cfg.mode == "quad" && quad_cmd->count("--format") == 0)
        cfg.format = "csv";

    try {
        std::cout << "config " << cfg.to_json().dump() << '\n';
        const AnySpace space = make_space(cfg);
        return std::visit(
            [&](const auto& s) {
                if (cfg.mode == "space")
                    return run_space(s, cfg);
                if (cfg.mode == "cubes")
                    return run_cubes(s, cfg);
                if (cfg.mode == "quad")
                    return run_quad(s, cfg);
                return run_partition(s, cfg);
            },
            space);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
