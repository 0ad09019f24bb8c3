#include "sticky/harness.hpp"

#include "sticky/assembly.hpp"
#include "sticky/error.hpp"
#include "sticky/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <stdexcept>

namespace sticky {

bool VerificationReport::passed() const { return count(CheckStatus::Fail) == 0; }

std::size_t VerificationReport::count(CheckStatus status) const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [&](const Check& c) { return c.status == status; }));
}

namespace {

constexpr const char* kUncertified = "upper-bound-based, not certified";

struct KindSolve {
    ProblemKind kind;
    std::optional<SpectralResult> result;
    std::string error;
};

std::vector<KindSolve> solve_kinds(const WeightedMesh& mesh, double delta, const VerifyOptions& options) {
    std::vector<KindSolve> solves = {{ProblemKind::neumann(), {}, {}},
                                     {ProblemKind::dirichlet(), {}, {}},
                                     {ProblemKind::steklov(), {}, {}},
                                     {ProblemKind::sticky_reflection(), {}, {}},
                                     {ProblemKind::boundary_diffusion(delta), {}, {}}};
    const auto n = static_cast<std::int64_t>(solves.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        auto& s = solves[static_cast<std::size_t>(i)];
        try {
            const auto problem = assemble_problem(mesh, s.kind, {Execution::Serial});
            const int count = std::min(options.max_index + 1, static_cast<int>(problem.dimension()));
            s.result = solve_generalized(problem, count, options.solver);
        } catch (const std::exception& e) {
            s.error = e.what();
        }
    }
    return solves;
}

std::optional<double> eigenvalue(const KindSolve& s, int k) {
    if (!s.result || k >= static_cast<int>(s.result->eigenvalues.size())) return std::nullopt;
    return s.result->eigenvalues[static_cast<std::size_t>(k)];
}

void compare_eigenvalues(std::vector<Check>& out, const KindSolve& lhs, Relation relation, const KindSolve& rhs,
                         int k, const char* clause_name) {
    const std::string name = "lambda_" + std::to_string(k) + "(" + lhs.kind.name() + ") " + to_string(relation) +
                             " lambda_" + std::to_string(k) + "(" + rhs.kind.name() + ")";
    const auto a = eigenvalue(lhs, k);
    const auto b = eigenvalue(rhs, k);
    if (!a || !b) {
        std::string why = !lhs.error.empty() ? lhs.error : !rhs.error.empty() ? rhs.error : "index beyond problem dimension";
        out.push_back(skipped_check(name, clause_name, relation, why));
        return;
    }
    out.push_back(make_check(name, clause_name, *a, relation, *b, kRelationTolerance));
}

std::string theorem_name(Theorem t) {
    switch (t) {
        case Theorem::SR_Combined: return "lambda_1(sr) >= hbar_B * hbar_C / 4";
        case Theorem::SR_Bulk: return "lambda_1(sr) >= h_B * h_C / 4";
        case Theorem::SR_Boundary: return "lambda_1(sr) >= htilde_B * htilde_C / 4";
        case Theorem::SRBD_D: return "lambda_1(srbd) >= hbar_D / 4";
        case Theorem::SRBD_D_Bulk: return "lambda_1(srbd) >= h_D / 4";
        case Theorem::SRBD_D_Boundary: return "lambda_1(srbd) >= htilde_D / 4";
        case Theorem::SRBD_E: return "lambda_1(srbd) >= min(htilde_C, h_C(boundary)) * htilde_E / 4";
    }
    return "?";
}

}  // namespace

VerificationReport verify_all(const WeightedMesh& input, double delta, const VerifyOptions& options) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be finite and nonnegative");
    if (options.max_index < 1) throw std::invalid_argument("max_index must be at least 1");
    if (options.brute_force && input.triangle_count() > kBruteForceTriangleLimit)
        throw EnumerationLimitError("brute-force verification supports at most " +
                                    std::to_string(kBruteForceTriangleLimit) + " triangles, mesh has " +
                                    std::to_string(input.triangle_count()));
    const WeightedMesh mesh = normalize_weights(input);

    VerificationReport report;
    report.mesh_id = options.mesh_id;
    report.mesh_hash = input.hash();
    report.triangle_count = mesh.triangle_count();
    report.delta = delta;
    report.constants_method = options.brute_force ? CheegerMethod::BruteForce : CheegerMethod::Sweep;

    // Eigenvalue orderings.
    const auto solves = solve_kinds(mesh, delta, options);
    const KindSolve& neumann = solves[0];
    const KindSolve& dirichlet = solves[1];
    const KindSolve& steklov = solves[2];
    const KindSolve& sr = solves[3];
    const KindSolve& srbd = solves[4];
    for (int k = 1; k <= options.max_index; ++k) {
        compare_eigenvalues(report.checks, sr, Relation::LessEqual, neumann, k, clause::kEigenvalueComparison);
        compare_eigenvalues(report.checks, sr, Relation::LessEqual, dirichlet, k, clause::kEigenvalueComparison);
        compare_eigenvalues(report.checks, sr, Relation::LessEqual, steklov, k, clause::kEigenvalueComparison);
    }
    for (int k = 1; k <= options.max_index; ++k)
        compare_eigenvalues(report.checks, srbd, Relation::GreaterEqual, sr, k, clause::kBoundaryDiffusionComparison);
    for (const auto& s : solves)
        if (s.result) report.spectra.push_back(*s.result);

    // Cheeger-type constants.
    if (options.brute_force) {
        report.constants = constant_matrix(mesh, delta);
    } else {
        std::vector<Eigen::VectorXd> functions;
        for (const KindSolve* s : {&sr, &srbd, &neumann})
            if (s->result)
                for (auto& f : sweep_functions(mesh, *s->result)) functions.push_back(std::move(f));
        report.constants = sweep_constant_matrix(mesh, functions, delta);
    }
    for (auto c : comparison_checks(report.constants)) {
        if (!options.brute_force && c.status != CheckStatus::Skipped) {
            c.status = CheckStatus::Informational;
            c.note = kUncertified;
        }
        report.checks.push_back(std::move(c));
    }

    // Lower bounds.
    for (auto t : {Theorem::SR_Combined, Theorem::SR_Bulk, Theorem::SR_Boundary, Theorem::SRBD_D,
                   Theorem::SRBD_D_Bulk, Theorem::SRBD_D_Boundary, Theorem::SRBD_E}) {
        const bool diffusion = bounds_boundary_diffusion(t);
        const char* clause_name = diffusion ? clause::kBoundaryDiffusionCheeger : clause::kStickyCheeger;
        const auto lambda = eigenvalue(diffusion ? srbd : sr, 1);
        if (!lambda) {
            report.checks.push_back(skipped_check(theorem_name(t), clause_name, Relation::GreaterEqual,
                                                  "first nonzero eigenvalue unavailable"));
            continue;
        }
        LowerBound bound;
        try {
            bound = lower_bound(report.constants, t);
        } catch (const std::out_of_range&) {
            report.checks.push_back(skipped_check(theorem_name(t), clause_name, Relation::GreaterEqual,
                                                  "three-set constant needs at most " +
                                                      std::to_string(kTripleBruteForceTriangleLimit) + " triangles"));
            continue;
        }
        if (bound.certified)
            report.checks.push_back(
                make_check(theorem_name(t), clause_name, *lambda, Relation::GreaterEqual, bound.value, kRelationTolerance));
        else
            report.checks.push_back(informational_check(theorem_name(t), clause_name, *lambda, Relation::GreaterEqual,
                                                        bound.value, kRelationTolerance, kUncertified));
    }

    report.metadata = {{"relation_tolerance", kRelationTolerance},
                       {"constant_comparison_tolerance", "1e-12 relative"},
                       {"solver_tolerance", options.solver.tolerance},
                       {"solver_seed", options.solver.seed},
                       {"max_index", options.max_index},
                       {"threads", thread_count()},
                       {"weights", "normalized to total measure 1"}};
    return report;
}

nlohmann::json to_json(const VerificationReport& report) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : report.checks) checks.push_back(to_json(c));
    nlohmann::json spectra = nlohmann::json::object();
    for (const auto& s : report.spectra) spectra[s.kind.name()] = s.eigenvalues;
    nlohmann::json constants = nlohmann::json::array();
    for (const auto& r : report.constants.reports) constants.push_back(to_json(r));
    return {{"mesh", {{"id", report.mesh_id}, {"hash", hash_hex(report.mesh_hash)}, {"triangles", report.triangle_count}}},
            {"delta", report.delta},
            {"constants_method", to_string(report.constants_method)},
            {"passed", report.passed()},
            {"summary",
             {{"pass", report.count(CheckStatus::Pass)},
              {"fail", report.count(CheckStatus::Fail)},
              {"skipped", report.count(CheckStatus::Skipped)},
              {"informational", report.count(CheckStatus::Informational)}}},
            {"checks", checks},
            {"eigenvalues", spectra},
            {"constants", constants},
            {"metadata", report.metadata}};
}

// ---------------------------------------------------------------------------------------
// Figures

std::vector<double> alpha_grid() {
    std::vector<double> out;
    for (int i = 0; i < 33; ++i) out.push_back((i + 1) / 34.0);
    return out;
}

std::vector<double> delta_grid() {
    std::vector<double> out;
    for (int i = 0; i <= 8; ++i) out.push_back(0.25 * i);
    for (int j = 1; j <= 12; ++j) out.push_back(2.0 * std::pow(25.0, j / 12.0));
    out.back() = 50.0;
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string csv(const std::vector<DiskRow>& rows, const std::string& header) {
    std::string text = header + "\n";
    for (const auto& r : rows) text += to_csv(r) + "\n";
    return text;
}

// FEM values at three grid points; the rest stay NaN.
void add_fem(std::vector<DiskRow>& rows, const std::vector<std::size_t>& spots, int level) {
    if (level < 0) return;
    std::vector<std::exception_ptr> errors(spots.size());
    const auto n = static_cast<std::int64_t>(spots.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            auto& row = rows[spots[static_cast<std::size_t>(i)]];
            row.fem = fem_disk_gap(row.model, level);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

PlotSeries series_of(const std::vector<DiskRow>& rows, bool use_delta, bool bound, std::string label,
                     std::string color, bool dashed) {
    PlotSeries s{std::move(label), std::move(color), dashed, {}};
    for (const auto& r : rows)
        s.points.emplace_back(use_delta ? r.model.delta : r.model.alpha_bar, bound ? r.bound : r.exact);
    return s;
}

}  // namespace

FigureData reproduce_figures(const std::filesystem::path& dir, const FigureOptions& options) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

    FigureData data;
    const auto alphas = alpha_grid();
    data.fig1 = disk_rows(Geometry::Euclidean, alphas, {0.0}, -1, options.execution);
    data.fig2 = disk_rows(Geometry::Hyperbolic, alphas, {0.0}, -1, options.execution);
    const std::vector<std::size_t> alpha_spots = {7, 16, 25};  // alpha_bar = 8/34, 1/2, 26/34
    add_fem(data.fig1, alpha_spots, options.fem_level);
    add_fem(data.fig2, alpha_spots, options.fem_level);

    const auto deltas = delta_grid();
    data.fig3 = disk_rows(Geometry::Euclidean, {kFigure3AlphaBar}, deltas, -1, options.execution);
    data.neumann = neumann_gap(Geometry::Euclidean);
    for (auto& r : data.fig3) r.bound = data.neumann;
    add_fem(data.fig3, {0, 4, 8}, options.fem_level);  // delta = 0, 1, 2
    for (const auto& r : data.fig3)
        if (r.exact > data.neumann) {
            data.crossing_delta = r.model.delta;
            break;
        }

    const std::string header = disk_csv_header();
    const std::string header3 = "geometry,alpha_bar,delta,lambda1_exact,lambda1_fem,neumann_gap";
    auto emit = [&](const std::string& stem, const std::string& text, const std::string& svg) {
        write_file(dir / (stem + ".csv"), text);
        write_file(dir / (stem + ".svg"), svg);
        data.files.push_back(dir / (stem + ".csv"));
        data.files.push_back(dir / (stem + ".svg"));
    };
    emit("fig1", csv(data.fig1, header),
         svg_plot("Euclidean unit disk", "alpha_bar", "lambda_1",
                  {series_of(data.fig1, false, false, "spectral gap", "#1f77b4", false),
                   series_of(data.fig1, false, true, "lower bound 4 alpha_bar / pi^2", "#e3b505", true)}));
    emit("fig2", csv(data.fig2, header),
         svg_plot("Hyperbolic unit ball", "alpha_bar", "lambda_1",
                  {series_of(data.fig2, false, false, "spectral gap", "#1f77b4", false),
                   series_of(data.fig2, false, true, "lower bound alpha_bar / (pi^2 (cosh 1 - 1)^2)", "#e3b505", true)}));
    emit("fig3", csv(data.fig3, header3),
         svg_plot("Boundary diffusion, gamma = 5", "delta", "lambda_1",
                  {series_of(data.fig3, true, false, "spectral gap", "#1f77b4", false),
                   series_of(data.fig3, true, true, "Neumann gap", "#d62728", true)}));
    return data;
}

// ---------------------------------------------------------------------------------------
// SVG

namespace {

std::string fmt(double x, const char* spec = "%.4g") {
    char buf[32];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (m * mag >= raw) return m * mag;
    return 10.0 * mag;
}

}  // namespace

std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series) {
    double x0 = INFINITY, x1 = -INFINITY, y0 = 0.0, y1 = -INFINITY;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (!(x1 > x0)) {
        x0 = 0.0;
        x1 = 1.0;
    }
    if (!(y1 > y0)) y1 = y0 + 1.0;
    const double ystep = nice_step(y1 - y0, 6);
    y1 = std::ceil(y1 / ystep) * ystep;
    const double xstep = nice_step(x1 - x0, 8);

    const double W = 720, H = 480, L = 70, R = 20, T = 40, B = 60;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) +
         "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fmt(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) + "</text>\n";
    // Axes and ticks.
    s += "<g stroke=\"black\" stroke-width=\"1\">\n";
    s += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(H - B) + "\" x2=\"" + fmt(W - R) + "\" y2=\"" + fmt(H - B) + "\"/>\n";
    s += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(T) + "\" x2=\"" + fmt(L) + "\" y2=\"" + fmt(H - B) + "\"/>\n";
    s += "</g>\n<g fill=\"black\">\n";
    for (double x = std::ceil(x0 / xstep) * xstep; x <= x1 + 1e-9 * xstep; x += xstep) {
        s += "<line x1=\"" + fmt(px(x)) + "\" y1=\"" + fmt(H - B) + "\" x2=\"" + fmt(px(x)) + "\" y2=\"" + fmt(H - B + 5) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt(px(x)) + "\" y=\"" + fmt(H - B + 18) + "\" text-anchor=\"middle\">" + fmt(x, "%g") + "</text>\n";
    }
    for (double y = y0; y <= y1 + 1e-9 * ystep; y += ystep) {
        s += "<line x1=\"" + fmt(L - 5) + "\" y1=\"" + fmt(py(y)) + "\" x2=\"" + fmt(L) + "\" y2=\"" + fmt(py(y)) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt(L - 8) + "\" y=\"" + fmt(py(y) + 4) + "\" text-anchor=\"end\">" + fmt(y, "%g") + "</text>\n";
    }
    s += "<text x=\"" + fmt((L + W - R) / 2) + "\" y=\"" + fmt(H - 18) + "\" text-anchor=\"middle\">" + escape(x_label) +
         "</text>\n";
    s += "<text x=\"18\" y=\"" + fmt((T + H - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt((T + H - B) / 2) + ")\">" + escape(y_label) + "</text>\n</g>\n";
    // Series.
    for (const auto& ser : series) {
        std::string pts;
        for (const auto& [x, y] : ser.points)
            if (std::isfinite(x) && std::isfinite(y)) pts += fmt(px(x), "%.2f") + "," + fmt(py(y), "%.2f") + " ";
        if (!pts.empty()) pts.pop_back();
        s += "<polyline fill=\"none\" stroke=\"" + ser.color + "\" stroke-width=\"2\"" +
             (ser.dashed ? " stroke-dasharray=\"6,4\"" : "") + " points=\"" + pts + "\"/>\n";
    }
    // Legend.
    double ly = T + 10;
    for (const auto& ser : series) {
        s += "<line x1=\"" + fmt(L + 15) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(L + 45) + "\" y2=\"" + fmt(ly) +
             "\" stroke=\"" + ser.color + "\" stroke-width=\"2\"" + (ser.dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
        s += "<text x=\"" + fmt(L + 52) + "\" y=\"" + fmt(ly + 4) + "\">" + escape(ser.label) + "</text>\n";
        ly += 18;
    }
    s += "</svg>\n";
    return s;
}

}  // namespace sticky
