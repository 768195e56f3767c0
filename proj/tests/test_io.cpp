#include "ahlfors/io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace ahlfors;

TEST(Export, SpaceFields)
{
    const auto j = io::space_json(build_interval(4));
    EXPECT_EQ(j["kind"], "interval");
    EXPECT_EQ(j["atom_count"], 4);
    EXPECT_EQ(j["d_hint"], 1.0);
    ASSERT_EQ(j["atoms"].size(), 4u);
    EXPECT_EQ(j["atoms"][1]["id"], 1);
    EXPECT_EQ(j["atoms"][1]["pos"], nlohmann::json::array({ 0.375 }));
    EXPECT_EQ(j["atoms"][1]["w"], 0.25);
    EXPECT_EQ(io::space_json(build_sphere_s2(10, 0))["atoms"][0]["pos"].size(), 3u);
    EXPECT_EQ(io::space_json(build_gasket(2))["atoms"][5]["pos"].size(), 2u);
}

TEST(Export, CubesAndPartition)
{
    const auto s = build_interval(1 << 12);
    const auto tree = build_cube_tree(s);
    const auto cj = io::cubes_json(tree);
    EXPECT_EQ(cj["generations"].size(), static_cast<std::size_t>(tree.k_max() - tree.k_min() + 1));
    EXPECT_TRUE(cj["generations"][0]["cubes"][0]["parent"].is_null());
    const auto p = equal_measure_partition(s, tree, 8);
    const auto pj = io::partition_json(p);
    EXPECT_EQ(pj["N"], 8);
    EXPECT_EQ(pj["regions"].size(), 8u);
    for (const char* key : { "n", "m", "M", "c3", "c4" }) {
        EXPECT_TRUE(pj["params"].contains(key)) << key;
    }
    std::size_t atoms = 0;
    for (const auto& r : pj["regions"])
        atoms += r["atom_ids"].size();
    EXPECT_EQ(atoms, s.size());
}

TEST(Export, ByteIdenticalAcrossRuns)
{
    auto once = [] {
        const auto s = build_gasket(9);
        const auto tree = build_cube_tree(s);
        const auto p = equal_measure_partition(s, tree, 32);
        std::ostringstream out;
        out << io::partition_json(p).dump() << io::cubes_json(tree).dump();
        io::write_labels_csv(out, p, s.size());
        return out.str();
    };
    EXPECT_EQ(once(), once());
}

TEST(Export, CsvLayouts)
{
    const auto s = build_interval(1 << 12);
    const auto tree = build_cube_tree(s);
    const auto p = equal_measure_partition(s, tree, 8);
    std::ostringstream labels;
    io::write_config_line(labels, { { "mode", "partition" } });
    io::write_labels_csv(labels, p, s.size());
    std::istringstream in(labels.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, R"(# config {"mode":"partition"})");
    std::getline(in, line);
    EXPECT_EQ(line, "atom_id,region_id");
    std::size_t rows = 0;
    while (std::getline(in, line))
        ++rows;
    EXPECT_EQ(rows, s.size());

    DecayTable t;
    t.space = "interval";
    t.rows.push_back({ 8, "x", 0.5, 1.0, 0.1, 0.2, 0.5, 3.0 });
    std::ostringstream csv;
    io::write_decay_csv(csv, t);
    EXPECT_EQ(csv.str(), "space,N,f_name,error,bound,mesh,separation,ratio\ninterval,8,x,0.5,1.0,0.1,0.2,0.5\n");
}
