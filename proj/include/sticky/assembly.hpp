#pragma once

#include "sticky/mesh.hpp"
#include "sticky/parallel.hpp"

#include <Eigen/SparseCore>

#include <filesystem>
#include <string>
#include <vector>

namespace sticky {

using SparseMatrix = Eigen::SparseMatrix<double>;

class ProblemKind {
public:
    enum class Type { Neumann, Dirichlet, Steklov, StickyReflection, StickyReflectionBoundaryDiffusion };

    static ProblemKind neumann() { return ProblemKind(Type::Neumann, 0.0); }
    static ProblemKind dirichlet() { return ProblemKind(Type::Dirichlet, 0.0); }
    static ProblemKind steklov() { return ProblemKind(Type::Steklov, 0.0); }
    static ProblemKind sticky_reflection() { return ProblemKind(Type::StickyReflection, 0.0); }
    /// Throws std::invalid_argument for negative or non-finite delta.
    static ProblemKind boundary_diffusion(double delta);

    Type type() const { return type_; }
    double delta() const { return delta_; }

    /// True when the stiffness kernel is the constant vector (every kind but Dirichlet).
    bool has_constant_kernel() const;
    /// "neumann", "dirichlet", "steklov", "sr", "srbd(0.5)".
    std::string name() const;
    /// Inverse of name(); also accepts "srbd" with a separate delta.
    static ProblemKind parse(const std::string& text, double delta = 0.0);

    friend bool operator==(const ProblemKind&, const ProblemKind&) = default;

private:
    ProblemKind(Type type, double delta) : type_(type), delta_(delta) {}

    Type type_;
    double delta_;
};

struct AssemblyOptions {
    Execution execution = Execution::Parallel;
    bool lumped_mass = false;
};

/// P1 stiffness for the integral of |grad u|^2 alpha. Dirichlet energy is conformally
/// invariant in two dimensions, so the conformal factor does not appear here.
SparseMatrix assemble_bulk_stiffness(const WeightedMesh& mesh, const AssemblyOptions& options = {});

/// P1 mass for the integral of u^2 alpha over the metric area, which carries phi^2.
SparseMatrix assemble_bulk_mass(const WeightedMesh& mesh, const AssemblyOptions& options = {});

/// 1D P1 stiffness along the boundary loops: per edge, mean(beta) / metric length.
/// The metric length carries one factor of phi.
SparseMatrix assemble_boundary_stiffness(const WeightedMesh& mesh, const AssemblyOptions& options = {});

/// 1D P1 mass along the boundary loops: per edge, mean(beta) times metric length.
SparseMatrix assemble_boundary_mass(const WeightedMesh& mesh, const AssemblyOptions& options = {});

/// Symmetric pair (stiffness, mass) of one eigenvalue problem.
/// Row i corresponds to mesh vertex dof_map[i].
struct SpectralProblem {
    SparseMatrix stiffness;
    SparseMatrix mass;
    std::vector<int> dof_map;
    ProblemKind kind = ProblemKind::neumann();
    std::uint64_t mesh_hash = 0;

    Eigen::Index dimension() const { return stiffness.rows(); }
};

/// Builds the pair for `kind`:
///   Neumann    (K, M) on all vertices
///   Dirichlet  (K, M) on interior vertices
///   SR         (K, M + M_b) on all vertices
///   SRBD(d)    (K + d K_b, M + M_b) on all vertices
///   Steklov    (K_bb - K_bi K_ii^-1 K_ib, M_b restricted to the boundary)
/// Dirichlet and Steklov need at least one interior vertex (std::invalid_argument).
SpectralProblem assemble_problem(const WeightedMesh& mesh, const ProblemKind& kind,
                                 const AssemblyOptions& options = {});

/// Writes a Matrix Market coordinate file.
void write_matrix_market(const SparseMatrix& matrix, const std::filesystem::path& path);

}  // namespace sticky
