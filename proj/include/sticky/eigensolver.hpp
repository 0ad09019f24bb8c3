#pragma once

#include "sticky/assembly.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <vector>

namespace sticky {

struct SolverOptions {
    enum class Method { Auto, Dense, Iterative };

    Method method = Method::Auto;
    /// Residual bound ||Av - lambda Bv|| <= tolerance * ||Bv|| for every returned pair.
    double tolerance = 1e-9;
    /// Auto picks the dense path up to this many dofs.
    Eigen::Index dense_threshold = 3000;
    /// Largest Krylov basis the iterative path may build before giving up.
    Eigen::Index max_basis = 800;
    std::uint64_t seed = 0x5eed;
};

struct SpectralResult {
    ProblemKind kind = ProblemKind::neumann();
    std::vector<double> eigenvalues;           // ascending
    std::vector<Eigen::VectorXd> eigenvectors;  // B-orthonormal
    std::vector<double> residuals;              // ||Av - lambda Bv|| / ||Bv||
    std::vector<int> dof_map;
    std::uint64_t mesh_hash = 0;
    bool dense = true;
};

/// The `count` smallest eigenpairs of (stiffness, mass).
///
/// For kinds with a constant kernel the zero mode is returned exactly as the constant
/// vector and the remaining pairs are computed on its B-orthogonal complement.
/// Throws std::invalid_argument if count is out of range, SolverError if the mass matrix is
/// not positive definite or if the residual bound is not met.
SpectralResult solve_generalized(const SpectralProblem& problem, int count, const SolverOptions& options = {});

/// (u^T A u) / (u^T B u). Throws std::invalid_argument for a vector of zero B-norm.
double rayleigh_quotient(const SpectralProblem& problem, const Eigen::VectorXd& u);

/// ||Au - lambda Bu|| / ||Bu||
double relative_residual(const SpectralProblem& problem, double lambda, const Eigen::VectorXd& u);

struct EigenvalueTable {
    std::vector<ProblemKind> kinds;
    /// values[i][k] is lambda_k of kinds[i], k = 0..count-1.
    std::vector<std::vector<double>> values;
    std::uint64_t mesh_hash = 0;
};

/// Assembles and solves every kind. Kinds are solved concurrently for Execution::Parallel.
EigenvalueTable eigenvalue_table(const WeightedMesh& mesh, const std::vector<ProblemKind>& kinds, int count,
                                 const SolverOptions& options = {}, Execution execution = Execution::Parallel);

std::string hash_hex(std::uint64_t hash);

nlohmann::json to_json(const SpectralResult& result);
nlohmann::json to_json(const EigenvalueTable& table);

}  // namespace sticky
