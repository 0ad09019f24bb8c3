#pragma once

#include "sticky/cheeger.hpp"
#include "sticky/check.hpp"
#include "sticky/disk.hpp"
#include "sticky/eigensolver.hpp"
#include "sticky/mesh.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sticky {

/// Clause names shared by the report rows.
namespace clause {
inline constexpr const char* kEigenvalueComparison = "eigenvalue comparison";
inline constexpr const char* kBoundaryDiffusionComparison = "boundary-diffusion eigenvalue comparison";
inline constexpr const char* kConstantComparison = "cheeger-constant comparison";
inline constexpr const char* kStickyCheeger = "sticky-reflection cheeger inequality";
inline constexpr const char* kBoundaryDiffusionCheeger = "boundary-diffusion cheeger inequality";
}  // namespace clause

/// Slack tolerance for eigenvalue relations; the eigensolver residual budget dominates it.
inline constexpr double kRelationTolerance = 1e-8;

struct VerifyOptions {
    bool brute_force = false;
    /// Eigenvalue indices 1..max_index are compared (index 0 is the constant mode).
    int max_index = 3;
    SolverOptions solver;
    std::string mesh_id = "mesh";
};

struct VerificationReport {
    std::string mesh_id;
    std::uint64_t mesh_hash = 0;
    std::size_t triangle_count = 0;
    double delta = 0.0;
    CheegerMethod constants_method = CheegerMethod::BruteForce;
    std::vector<Check> checks;
    std::vector<SpectralResult> spectra;
    ConstantMatrix constants;
    nlohmann::json metadata;

    /// True when no check failed (skipped and informational rows do not count).
    bool passed() const;
    std::size_t count(CheckStatus status) const;
};

/// Eigenvalue orderings, constant comparisons and Cheeger-type lower bounds on one mesh.
/// Weights are normalized first (every compared quantity is invariant under that). With
/// brute_force the mesh must be within the enumeration limits (EnumerationLimitError
/// otherwise); without it the constants come from eigenfunction sweeps and every relation
/// that needs them is reported as informational.
VerificationReport verify_all(const WeightedMesh& mesh, double delta, const VerifyOptions& options = {});

nlohmann::json to_json(const VerificationReport& report);

struct FigureOptions {
    /// Refinement of the FEM spot checks; negative disables them.
    int fem_level = 5;
    Execution execution = Execution::Parallel;
};

struct FigureData {
    std::vector<DiskRow> fig1;  // Euclidean, delta = 0
    std::vector<DiskRow> fig2;  // hyperbolic, delta = 0
    std::vector<DiskRow> fig3;  // Euclidean, gamma = 5, varying delta; `bound` holds the Neumann gap
    double neumann = 0.0;
    /// Smallest grid delta where the boundary-diffusion gap exceeds the Neumann gap.
    std::optional<double> crossing_delta;
    std::vector<std::filesystem::path> files;
};

/// (i + 1) / 34 for i = 0..32.
std::vector<double> alpha_grid();
/// 0, 0.25, ..., 2, then 12 log-spaced values up to 50.
std::vector<double> delta_grid();
/// alpha_bar giving gamma = 5 on the Euclidean disk (alpha = 5/(7 pi), beta = 1/(7 pi)).
inline constexpr double kFigure3AlphaBar = 5.0 / 7.0;

/// Computes the three figure data sets and writes fig{1,2,3}.{csv,svg} into `dir`
/// (created if missing). Throws std::runtime_error on I/O failure.
FigureData reproduce_figures(const std::filesystem::path& dir, const FigureOptions& options = {});

struct PlotSeries {
    std::string label;
    std::string color;
    bool dashed = false;
    std::vector<std::pair<double, double>> points;
};

/// Self-contained SVG line plot with axes, ticks and a legend.
std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series);

}  // namespace sticky
