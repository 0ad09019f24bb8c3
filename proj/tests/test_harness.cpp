#include "sticky/error.hpp"
#include "sticky/harness.hpp"
#include "sticky/mesh_generators.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace sticky;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("sticky_harness_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

void expect_all_pass(const VerificationReport& r) {
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.count(CheckStatus::Skipped), 0u);
    EXPECT_EQ(r.count(CheckStatus::Informational), 0u);
    for (const auto& c : r.checks) EXPECT_TRUE(c.passed()) << c.name << " slack " << c.slack;
}

}  // namespace

TEST(Verify, SmallDiskConstantWeights) {
    const auto mesh = with_constant_weights(generate_small_disk(14, Geometry::Euclidean), 0.5);
    VerifyOptions o;
    o.brute_force = true;
    const auto r = verify_all(mesh, 1.0, o);
    expect_all_pass(r);
    EXPECT_EQ(r.constants_method, CheegerMethod::BruteForce);
}

TEST(Verify, SmallDiskRandomWeights) {
    const auto base = generate_small_disk(14, Geometry::Hyperbolic);
    VerifyOptions o;
    o.brute_force = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) expect_all_pass(verify_all(with_random_weights(base, seed), 1.0, o));
}

TEST(Verify, SweepConstantsAreInformational) {
    const auto mesh = generate_dumbbell_mesh(1.0, 0.3, 1.0, 3);
    const auto r = verify_all(mesh, 1.0);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.constants_method, CheegerMethod::Sweep);
    for (const auto& c : r.checks) {
        if (c.clause == clause::kEigenvalueComparison || c.clause == clause::kBoundaryDiffusionComparison)
            EXPECT_EQ(c.status, CheckStatus::Pass) << c.name;
        else
            EXPECT_EQ(c.status, CheckStatus::Informational) << c.name;
    }
}

TEST(Verify, EveryClauseAlwaysReported) {
    const auto small = with_random_weights(generate_small_disk(12, Geometry::Euclidean), 2);
    VerifyOptions brute;
    brute.brute_force = true;
    const auto a = verify_all(small, 0.5, brute);
    const auto b = verify_all(small, 0.5);
    const auto medium = with_random_weights(generate_small_disk(18, Geometry::Euclidean), 2);
    const auto c = verify_all(medium, 0.5, brute);
    ASSERT_EQ(a.checks.size(), b.checks.size());
    ASSERT_EQ(a.checks.size(), c.checks.size());
    std::set<std::string> names;
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        EXPECT_EQ(a.checks[i].name, b.checks[i].name);
        EXPECT_EQ(a.checks[i].name, c.checks[i].name);
        names.insert(a.checks[i].name);
    }
    EXPECT_EQ(names.size(), a.checks.size());
    // The three-set constant is out of reach at 18 triangles: those rows are skipped, not dropped.
    EXPECT_EQ(c.count(CheckStatus::Skipped), 6u);
    EXPECT_TRUE(c.passed());
}

TEST(Verify, SlackSignConvention) {
    const auto mesh = with_constant_weights(generate_small_disk(12, Geometry::Euclidean), 0.4);
    VerifyOptions o;
    o.brute_force = true;
    for (const auto& c : verify_all(mesh, 1.0, o).checks) {
        if (c.relation == Relation::LessEqual) EXPECT_EQ(c.slack, c.rhs - c.lhs);
        else EXPECT_EQ(c.slack, c.lhs - c.rhs);
    }
}

TEST(Verify, RejectsLargeBruteForce) {
    VerifyOptions o;
    o.brute_force = true;
    EXPECT_THROW(verify_all(generate_disk_mesh(2, Geometry::Euclidean), 1.0, o), EnumerationLimitError);
    EXPECT_THROW(verify_all(generate_small_disk(12, Geometry::Euclidean), -1.0, o), std::invalid_argument);
}

TEST(Verify, JsonSchema) {
    const auto mesh = generate_small_disk(12, Geometry::Euclidean);
    VerifyOptions o;
    o.brute_force = true;
    o.mesh_id = "small";
    const auto j = to_json(verify_all(mesh, 1.0, o));
    EXPECT_EQ(j["mesh"]["id"], "small");
    EXPECT_EQ(j["mesh"]["hash"].get<std::string>().size(), 16u);
    EXPECT_EQ(j["passed"], true);
    EXPECT_EQ(j["constants_method"], "brute-force");
    for (const char* key : {"checks", "eigenvalues", "constants", "metadata", "summary"}) EXPECT_TRUE(j.contains(key)) << key;
    const auto& c = j["checks"][0];
    for (const char* key : {"name", "clause", "lhs", "rhs", "relation", "slack", "status", "tolerance"})
        EXPECT_TRUE(c.contains(key)) << key;
    EXPECT_EQ(j["metadata"]["relation_tolerance"], kRelationTolerance);
}

TEST(Figures, Grids) {
    const auto a = alpha_grid();
    ASSERT_EQ(a.size(), 33u);
    EXPECT_DOUBLE_EQ(a.front(), 1.0 / 34.0);
    EXPECT_DOUBLE_EQ(a[16], 0.5);
    const auto d = delta_grid();
    EXPECT_EQ(d.front(), 0.0);
    EXPECT_EQ(d.back(), 50.0);
    for (std::size_t i = 1; i < d.size(); ++i) EXPECT_GT(d[i], d[i - 1]);
}

TEST(Figures, FilesAndRelations) {
    const auto dir = temp_dir("figs");
    FigureOptions o;
    o.fem_level = 4;
    const auto data = reproduce_figures(dir, o);
    EXPECT_EQ(data.files.size(), 6u);
    for (const char* stem : {"fig1", "fig2", "fig3"}) {
        const auto csv = parse_csv(slurp(dir / (std::string(stem) + ".csv")));
        ASSERT_GT(csv.size(), 1u);
        EXPECT_EQ(csv[0].size(), 6u);
        for (std::size_t i = 1; i < csv.size(); ++i) {
            ASSERT_EQ(csv[i].size(), 6u);
            for (std::size_t k = 1; k < 6; ++k) EXPECT_NO_THROW((void)std::stod(csv[i][k]));
        }
        const auto svg = slurp(dir / (std::string(stem) + ".svg"));
        EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
        EXPECT_NE(svg.find("<polyline"), std::string::npos);
        EXPECT_NE(svg.find("</svg>"), std::string::npos);
    }
    ASSERT_EQ(data.fig1.size(), 33u);
    ASSERT_EQ(data.fig2.size(), 33u);
    for (const auto* rows : {&data.fig1, &data.fig2}) {
        int fem = 0;
        for (const auto& r : *rows) {
            EXPECT_GT(r.exact, r.bound);
            if (!std::isnan(r.fem)) {
                ++fem;
                EXPECT_NEAR(r.fem, r.exact, 0.01 * r.exact);
            }
        }
        EXPECT_EQ(fem, 3);
    }
    ASSERT_TRUE(data.crossing_delta.has_value());
    EXPECT_LE(*data.crossing_delta, 50.0);
    EXPECT_NEAR(data.fig3.front().exact, disk_gap({Geometry::Euclidean, kFigure3AlphaBar, 0.0}), 1e-6);
    for (std::size_t i = 1; i < data.fig3.size(); ++i) EXPECT_GE(data.fig3[i].exact, data.fig3[i - 1].exact - 1e-10);
}

TEST(Figures, Deterministic) {
    FigureOptions o;
    o.fem_level = 2;
    const auto a = temp_dir("det_a"), b = temp_dir("det_b");
    reproduce_figures(a, o);
    o.execution = Execution::Serial;
    reproduce_figures(b, o);
    for (const char* f : {"fig1.csv", "fig2.csv", "fig3.csv", "fig1.svg", "fig2.svg", "fig3.svg"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Svg, EscapesAndDashes) {
    const auto svg = svg_plot("a < b", "x", "y", {{"s & t", "#000", true, {{0, 1}, {1, 2}}}});
    EXPECT_NE(svg.find("a &lt; b"), std::string::npos);
    EXPECT_NE(svg.find("s &amp; t"), std::string::npos);
    EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
}
