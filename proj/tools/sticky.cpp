// Command-line front end: mesh generation, eigenvalues, Cheeger constants, verification
// and the disk figures.

#include "sticky/assembly.hpp"
#include "sticky/cheeger.hpp"
#include "sticky/disk.hpp"
#include "sticky/eigensolver.hpp"
#include "sticky/error.hpp"
#include "sticky/harness.hpp"
#include "sticky/mesh_generators.hpp"
#include "sticky/mesh_io.hpp"
#include "sticky/parallel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace sticky;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

WeightedMesh read_mesh(const std::string& path) {
    try {
        return load_mesh(path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

void write_json(const nlohmann::json& doc, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << doc.dump(2) << "\n";
}

WeightedMesh apply_weights(const WeightedMesh& mesh, double alpha_bar, std::int64_t seed) {
    if (seed >= 0) return with_random_weights(mesh, static_cast<std::uint64_t>(seed));
    if (alpha_bar > 0.0) return with_constant_weights(mesh, alpha_bar);
    return mesh;
}

}  // namespace

int main(int argc, char** argv) {
    configure_threads_from_env();

    CLI::App app{"Spectral gaps and Cheeger-type constants for sticky-reflecting diffusions"};
    app.require_subcommand(1);

    // mesh
    auto* mesh_cmd = app.add_subcommand("mesh", "Generate meshes");
    mesh_cmd->require_subcommand(1);
    std::string out_path, geometry_name = "euclidean";
    int level = 3, triangles = 0;
    double alpha_bar = 0.0;
    std::int64_t seed = -1;
    auto* gen_disk = mesh_cmd->add_subcommand("gen-disk", "Unit disk or hyperbolic unit ball");
    gen_disk->add_option("--level", level, "Refinement level (2^level rings)")->check(CLI::Range(0, 8));
    gen_disk->add_option("--triangles", triangles, "Coarse disk with this many triangles instead (9..40)");
    gen_disk->add_option("--geometry", geometry_name)->check(CLI::IsMember({"euclidean", "hyperbolic"}));
    gen_disk->add_option("--alpha-bar", alpha_bar, "Constant normalized weights with this bulk share");
    gen_disk->add_option("--seed", seed, "Random normalized weights");
    gen_disk->add_option("-o,--out", out_path, "Output file (stdout if omitted)");

    double radius = 1.0, neck_width = 0.3, neck_length = 1.0;
    auto* gen_dumbbell = mesh_cmd->add_subcommand("gen-dumbbell", "Two disks joined by a neck");
    gen_dumbbell->add_option("--radius", radius);
    gen_dumbbell->add_option("--neck-width", neck_width);
    gen_dumbbell->add_option("--neck-length", neck_length);
    gen_dumbbell->add_option("--level", level)->check(CLI::Range(0, 6));
    gen_dumbbell->add_option("--alpha-bar", alpha_bar);
    gen_dumbbell->add_option("--seed", seed);
    gen_dumbbell->add_option("-o,--out", out_path);

    // solve
    std::string mesh_path, kind_name = "sr", method_name = "auto", json_path;
    double delta = 0.0;
    int count = 4;
    auto* solve = app.add_subcommand("solve", "Lowest eigenvalues of one problem");
    solve->add_option("--mesh", mesh_path)->required();
    solve->add_option("--kind", kind_name, "neumann | dirichlet | steklov | sr | srbd");
    solve->add_option("--delta", delta, "Boundary diffusion speed (srbd)");
    solve->add_option("--count", count)->check(CLI::PositiveNumber);
    solve->add_option("--method", method_name)->check(CLI::IsMember({"auto", "dense", "iterative"}));
    solve->add_option("--json", json_path, "Write the result as JSON ('-' for stdout)");

    // cheeger
    std::string constant_name = "hc", variant_name = "bulk", cheeger_method = "brute-force";
    auto* cheeger = app.add_subcommand("cheeger", "One Cheeger-type constant");
    cheeger->add_option("--mesh", mesh_path)->required();
    cheeger->add_option("--kind", constant_name, "hc | hj | hb | hd | he | hc-boundary | hc-tilde-bulk");
    cheeger->add_option("--variant", variant_name, "bulk | boundary | combined");
    cheeger->add_option("--method", cheeger_method)->check(CLI::IsMember({"brute-force", "sweep"}));
    cheeger->add_option("--delta", delta);

    // verify
    bool brute_force = false;
    std::string report_path;
    auto* verify = app.add_subcommand("verify", "Eigenvalue orderings, constant comparisons and lower bounds");
    verify->add_option("--mesh", mesh_path)->required();
    verify->add_flag("--brute-force", brute_force, "Exact constants by enumeration (small meshes)");
    verify->add_option("--delta", delta);
    verify->add_option("--report", report_path, "Write the JSON report here");

    // disk
    double alpha = 0.5;
    int fem_level = -1;
    auto* disk = app.add_subcommand("disk", "Semi-analytic spectral gap of the unit ball");
    disk->add_option("--geometry", geometry_name)->check(CLI::IsMember({"euclidean", "hyperbolic"}));
    disk->add_option("--alpha", alpha, "Bulk share alpha_bar in (0,1)");
    disk->add_option("--delta", delta);
    disk->add_option("--fem-level", fem_level, "Also solve the finite element problem at this refinement");

    // figures
    std::string figure_dir;
    int figure_fem_level = 5;
    auto* figures = app.add_subcommand("figures", "Write fig1-3 as CSV and SVG");
    figures->add_option("--out", figure_dir)->required();
    figures->add_option("--fem-level", figure_fem_level, "Refinement of the FEM spot checks (-1 disables)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (gen_disk->parsed() || gen_dumbbell->parsed()) {
            WeightedMesh mesh = [&] {
                if (gen_dumbbell->parsed()) return generate_dumbbell_mesh(radius, neck_width, neck_length, level);
                const Geometry g = parse_geometry(geometry_name);
                return triangles > 0 ? generate_small_disk(triangles, g) : generate_disk_mesh(level, g);
            }();
            mesh = apply_weights(mesh, alpha_bar, seed);
            if (out_path.empty())
                std::cout << mesh_to_json(mesh).dump() << "\n";
            else
                save_mesh(mesh, out_path);
            return kOk;
        }
        if (solve->parsed()) {
            const auto mesh = read_mesh(mesh_path);
            SolverOptions options;
            options.method = method_name == "dense"       ? SolverOptions::Method::Dense
                             : method_name == "iterative" ? SolverOptions::Method::Iterative
                                                          : SolverOptions::Method::Auto;
            const auto problem = assemble_problem(mesh, ProblemKind::parse(kind_name, delta));
            const auto result = solve_generalized(problem, count, options);
            if (!json_path.empty()) {
                write_json(to_json(result), json_path);
            } else {
                std::printf("%s  dimension %zu  mesh %s\n", result.kind.name().c_str(), problem.dimension(),
                            hash_hex(result.mesh_hash).c_str());
                for (std::size_t k = 0; k < result.eigenvalues.size(); ++k)
                    std::printf("lambda_%zu = %.12g  (residual %.2e)\n", k, result.eigenvalues[k], result.residuals[k]);
            }
            return kOk;
        }
        if (cheeger->parsed()) {
            const auto mesh = normalize_weights(read_mesh(mesh_path));
            const auto kind = parse_constant_kind(constant_name);
            const auto variant = parse_restriction_variant(variant_name);
            CheegerReport report;
            if (cheeger_method == "brute-force") {
                report = brute_force_constant(mesh, kind, variant, delta);
            } else {
                const bool diffusion = kind == ConstantKind::HD || kind == ConstantKind::HE;
                const auto pk = diffusion ? ProblemKind::boundary_diffusion(delta) : ProblemKind::sticky_reflection();
                const auto functions = sweep_functions(mesh, solve_generalized(assemble_problem(mesh, pk), 5));
                report = sweep_upper_bound(mesh, functions, kind, variant, delta);
            }
            write_json(to_json(report), "-");
            return kOk;
        }
        if (verify->parsed()) {
            const auto mesh = read_mesh(mesh_path);
            VerifyOptions options;
            options.brute_force = brute_force;
            options.mesh_id = mesh_path;
            const auto report = verify_all(mesh, delta, options);
            for (const auto& c : report.checks)
                std::printf("%-13s %-66s slack %+.3e\n", to_string(c.status).c_str(), c.name.c_str(), c.slack);
            std::printf("%s: %zu pass, %zu fail, %zu skipped, %zu informational\n", report.passed() ? "PASS" : "FAIL",
                        report.count(CheckStatus::Pass), report.count(CheckStatus::Fail),
                        report.count(CheckStatus::Skipped), report.count(CheckStatus::Informational));
            if (!report_path.empty()) write_json(to_json(report), report_path);
            return report.passed() ? kOk : kFailed;
        }
        if (disk->parsed()) {
            const DiskModel model{parse_geometry(geometry_name), alpha, delta};
            const auto gap = disk_gap_details(model);
            DiskRow row{model, gap.value, std::numeric_limits<double>::quiet_NaN(), bound_curve(model)};
            if (fem_level >= 0) row.fem = fem_disk_gap(model, fem_level);
            std::printf("%s\n%s\n", disk_csv_header().c_str(), to_csv(row).c_str());
            std::printf("# gamma %.12g, minimizing mode %d, mode cutoff %s\n", model.gamma(), gap.mode,
                        gap.cutoff_verified ? "verified" : "NOT verified");
            return kOk;
        }
        if (figures->parsed()) {
            FigureOptions options;
            options.fem_level = figure_fem_level;
            const auto data = reproduce_figures(figure_dir, options);
            for (const auto& f : data.files) std::printf("%s\n", f.string().c_str());
            if (data.crossing_delta)
                std::printf("# boundary-diffusion gap exceeds the Neumann gap from delta = %.6g\n", *data.crossing_delta);
            else
                std::printf("# no crossing of the Neumann gap for delta <= 50\n");
            return kOk;
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const EnumerationLimitError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailed;
    }
    return kUsage;
}
