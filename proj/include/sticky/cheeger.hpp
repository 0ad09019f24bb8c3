#pragma once

#include "sticky/check.hpp"
#include "sticky/eigensolver.hpp"
#include "sticky/mesh.hpp"
#include "sticky/parallel.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sticky {

/// HC  |d_I A|_alpha / |A|_alpha
/// HJ  |d_I A|_alpha / |d_E A|_beta
/// HB  |d_I A|_alpha / (|A|_alpha + |d_E A|_beta)
/// HD  (A,B,C) -> HC(A) * HB(B) + delta * |dd_E B|_beta / (|B|_alpha + |d_E B|_beta) * |dd_E C|_beta / |d_E C|_beta
/// HE  (|d_I B|_alpha + delta |dd_E B|_beta) / (|B|_alpha + |d_E B|_beta)
/// HC_boundary        isoperimetric constant of the boundary curve, over arcs C with |C|_beta <= |dOmega|_beta / 2
/// HC_tilde_bulkonly  HC under the Boundary restriction
enum class ConstantKind { HC, HJ, HB, HD, HE, HC_boundary, HC_tilde_bulkonly };

/// Bulk:     |A|_alpha <= |Omega|_alpha / 2
/// Boundary: |d_E A|_beta <= |dOmega|_beta / 2
/// Combined: |A|_alpha + |d_E A|_beta <= 1/2 (weights must be normalized)
enum class RestrictionVariant { Bulk, Boundary, Combined };

enum class CheegerMethod { BruteForce, Sweep, ArcEnumeration };

std::string to_string(ConstantKind kind);
std::string to_string(RestrictionVariant variant);
std::string to_string(CheegerMethod method);
ConstantKind parse_constant_kind(const std::string& text);
RestrictionVariant parse_restriction_variant(const std::string& text);

inline constexpr std::size_t kBruteForceTriangleLimit = 20;
inline constexpr std::size_t kTripleBruteForceTriangleLimit = 14;

/// Number of sets the ratio of `kind` takes (3 for HD, otherwise 1).
int set_count(ConstantKind kind);

/// Ratio from precomputed subset measures; std::nullopt when a denominator vanishes.
std::optional<double> ratio(ConstantKind kind, std::span<const SubsetMeasures> sets, double delta = 1.0);
std::optional<double> ratio(ConstantKind kind, const std::vector<TriangleSubset>& sets, double delta = 1.0);

/// Whether a set with these measures satisfies the restriction (relative slack 1e-12).
bool admissible(const WeightedMesh& mesh, RestrictionVariant variant, const SubsetMeasures& m);

struct CheegerReport {
    ConstantKind kind = ConstantKind::HC;
    RestrictionVariant variant = RestrictionVariant::Bulk;
    double delta = 1.0;
    /// +infinity when no admissible set exists.
    double value = 0.0;
    bool found = false;
    CheegerMethod method = CheegerMethod::BruteForce;
    std::vector<TriangleSubset> witnesses;
    /// HC_boundary only: boundary edge ids of the optimal arc, in loop order.
    std::vector<int> arc_edges;
};

nlohmann::json to_json(const CheegerReport& report);

/// Measures of all 2^T triangle subsets, indexed by bit mask.
class SubsetMeasureTable {
public:
    SubsetMeasureTable(const WeightedMesh& mesh, Execution execution = Execution::Parallel);

    const WeightedMesh& mesh() const { return *mesh_; }
    std::size_t size() const { return entries_.size(); }
    const SubsetMeasures& operator[](std::uint64_t mask) const { return entries_[mask]; }

private:
    const WeightedMesh* mesh_;
    std::vector<SubsetMeasures> entries_;
};

/// Exact minimum over all admissible nonempty subsets. Throws EnumerationLimitError above
/// kBruteForceTriangleLimit triangles (kTripleBruteForceTriangleLimit for HD).
/// Ties are broken by smaller bulk measure, then by lexicographic triangle indices.
CheegerReport brute_force_constant(const WeightedMesh& mesh, ConstantKind kind, RestrictionVariant variant,
                                   double delta = 1.0, Execution execution = Execution::Parallel);
CheegerReport brute_force_constant(const SubsetMeasureTable& table, ConstantKind kind, RestrictionVariant variant,
                                   double delta = 1.0, Execution execution = Execution::Parallel);

/// Best ratio over the superlevel sets {triangles whose vertex mean of f exceeds t}, t over
/// the distinct vertex values, for f and -f. `f` has one value per mesh vertex. A constant f
/// has no nontrivial superlevel sets and yields value +infinity, found = false.
CheegerReport sweep_upper_bound(const WeightedMesh& mesh, const Eigen::VectorXd& f, ConstantKind kind,
                                RestrictionVariant variant, double delta = 1.0);
/// Minimum of the single-function sweep over several functions.
CheegerReport sweep_upper_bound(const WeightedMesh& mesh, std::span<const Eigen::VectorXd> functions,
                                ConstantKind kind, RestrictionVariant variant, double delta = 1.0);

/// Test functions for sweeps: the nontrivial eigenvectors of `result` lifted to all mesh
/// vertices (zero off the dof map), plus `angles` rotations inside the lowest nontrivial
/// eigenspace when it is degenerate (the two lowest nontrivial eigenvalues within 1% of each other).
std::vector<Eigen::VectorXd> sweep_functions(const WeightedMesh& mesh, const SpectralResult& result, int angles = 64);

/// Exact isoperimetric constant of the boundary by enumeration of contiguous arcs.
CheegerReport boundary_cheeger(const WeightedMesh& mesh);

/// The constants needed for the comparison checks and the lower bounds.
struct ConstantMatrix {
    double delta = 1.0;
    CheegerMethod method = CheegerMethod::BruteForce;
    std::vector<CheegerReport> reports;

    bool has(ConstantKind kind, RestrictionVariant variant) const;
    const CheegerReport& at(ConstantKind kind, RestrictionVariant variant) const;
    double value(ConstantKind kind, RestrictionVariant variant) const { return at(kind, variant).value; }
};

/// Brute force for HC, HJ, HB, HE under all three variants, HD under all three variants when
/// the mesh is small enough for it, and HC_boundary. Requires normalized weights.
ConstantMatrix constant_matrix(const WeightedMesh& mesh, double delta = 1.0, Execution execution = Execution::Parallel);

/// The same entries as constant_matrix from sweeps over `functions` (upper bounds only).
ConstantMatrix sweep_constant_matrix(const WeightedMesh& mesh, std::span<const Eigen::VectorXd> functions,
                                     double delta = 1.0);

/// Positivity of the nine constants and the orderings between them. Tolerance is
/// 1e-12 relative.
std::vector<Check> comparison_checks(const ConstantMatrix& constants);

enum class Theorem {
    SR_Combined,      // hbar_B hbar_C / 4
    SR_Bulk,          // h_B h_C / 4
    SR_Boundary,      // htilde_B htilde_C / 4
    SRBD_D,           // hbar_D / 4
    SRBD_D_Bulk,      // h_D / 4
    SRBD_D_Boundary,  // htilde_D / 4
    SRBD_E,           // min(htilde_C, h_C(boundary)) htilde_E / 4
};

std::string to_string(Theorem theorem);
bool bounds_boundary_diffusion(Theorem theorem);

struct LowerBound {
    Theorem theorem = Theorem::SR_Combined;
    double value = 0.0;
    /// False when the constants are sweep values, which only bound the infima from above.
    bool certified = false;
};

/// Throws std::out_of_range if the matrix lacks a needed constant.
LowerBound lower_bound(const ConstantMatrix& constants, Theorem theorem);

/// Brute force when the mesh is small enough, otherwise sweeps over eigenfunctions of the
/// sticky-reflection problem (SR theorems) or of the boundary-diffusion problem (SRBD theorems).
LowerBound lower_bound(const WeightedMesh& mesh, Theorem theorem, double delta = 1.0,
                       Execution execution = Execution::Parallel);

}  // namespace sticky
