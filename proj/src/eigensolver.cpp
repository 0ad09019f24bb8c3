#include "sticky/eigensolver.hpp"

#include "sticky/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>

namespace sticky {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double rayleigh_quotient(const SpectralProblem& problem, const VectorXd& u) {
    const double denom = u.dot(problem.mass * u);
    if (!(denom > 0.0)) throw std::invalid_argument("Rayleigh quotient of a vector with zero mass norm");
    return u.dot(problem.stiffness * u) / denom;
}

double relative_residual(const SpectralProblem& problem, double lambda, const VectorXd& u) {
    const VectorXd bu = problem.mass * u;
    return (problem.stiffness * u - lambda * bu).norm() / bu.norm();
}

namespace {

void normalize_sign(VectorXd& v) {
    Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    if (v(at) < 0.0) v = -v;
}

VectorXd constant_mode(const SpectralProblem& problem) {
    VectorXd one = VectorXd::Ones(problem.dimension());
    return one / std::sqrt(one.dot(problem.mass * one));
}

void finish(const SpectralProblem& problem, SpectralResult& result, double tolerance) {
    result.residuals.clear();
    for (std::size_t i = 0; i < result.eigenvalues.size(); ++i)
        result.residuals.push_back(relative_residual(problem, result.eigenvalues[i], result.eigenvectors[i]));
    for (double r : result.residuals)
        if (!(r <= tolerance)) {
            std::ostringstream msg;
            msg << "eigenpair residuals above tolerance " << tolerance << " for " << problem.kind.name();
            throw SolverError(msg.str(), result.residuals);
        }
}

SpectralResult solve_dense(const SpectralProblem& problem, int count) {
    const MatrixXd a = MatrixXd(problem.stiffness);
    const MatrixXd b = MatrixXd(problem.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> solver(a, b);
    if (solver.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed (mass not positive definite?)");

    SpectralResult result;
    int first = 0;
    if (problem.kind.has_constant_kernel()) {
        result.eigenvalues.push_back(0.0);
        result.eigenvectors.push_back(constant_mode(problem));
        first = 1;
    }
    for (int k = first; k < count; ++k) {
        VectorXd v = solver.eigenvectors().col(k);
        v /= std::sqrt(v.dot(problem.mass * v));
        normalize_sign(v);
        result.eigenvalues.push_back(solver.eigenvalues()(k));
        result.eigenvectors.push_back(std::move(v));
    }
    return result;
}

// Block Krylov Rayleigh-Ritz on T = A^{-1} B in the B-inner product. The largest eigenvalues
// 1/lambda of T converge first. For a constant kernel, dof 0 is grounded before factoring
// and every basis vector is kept B-orthogonal to the constants, on which A is invertible.
class KrylovSolver {
public:
    KrylovSolver(const SpectralProblem& problem, const SolverOptions& options)
        : problem_(problem), options_(options), kernel_(problem.kind.has_constant_kernel()) {
        const Index n = problem.dimension();
        Eigen::SimplicialLLT<SparseMatrix> mass_check(problem.mass);
        if (mass_check.info() != Eigen::Success) throw SolverError("mass matrix is not positive definite");
        if (kernel_) {
            const SparseMatrix grounded = problem.stiffness.bottomRightCorner(n - 1, n - 1);
            factor_.compute(grounded);
            constant_ = constant_mode(problem);
        } else {
            factor_.compute(problem.stiffness);
        }
        if (factor_.info() != Eigen::Success) throw SolverError("stiffness factorization failed for " + problem.kind.name());
    }

    // Returns pairs for the `wanted` smallest eigenvalues on the complement of the kernel.
    void solve(int wanted, std::vector<double>& values, std::vector<VectorXd>& vectors) {
        const Index n = problem_.dimension();
        const Index space = kernel_ ? n - 1 : n;
        const Index block = std::min<Index>(wanted + 2, space);
        const Index cap = std::min<Index>(std::max<Index>(options_.max_basis, 2 * block), space);

        std::mt19937_64 rng(options_.seed);
        std::normal_distribution<double> gauss;
        MatrixXd basis(n, cap);
        MatrixXd image(n, cap);  // T applied to each basis column
        Index size = 0;

        auto add = [&](VectorXd v) {
            for (int attempt = 0; attempt < 4; ++attempt) {
                const double before = std::sqrt(std::max(v.dot(problem_.mass * v), 0.0));
                orthogonalize(v, basis, size);
                orthogonalize(v, basis, size);
                const double after = std::sqrt(std::max(v.dot(problem_.mass * v), 0.0));
                if (after > 1e-10 * before && after > 0.0) {
                    basis.col(size) = v / after;
                    image.col(size) = apply(basis.col(size));
                    ++size;
                    return true;
                }
                v = VectorXd::NullaryExpr(n, [&]() { return gauss(rng); });
            }
            return false;
        };

        for (Index j = 0; j < block; ++j) add(VectorXd::NullaryExpr(n, [&]() { return gauss(rng); }));

        std::vector<double> best_residuals;
        Index block_start = 0;
        while (true) {
            const bool converged = ritz(wanted, basis, image, size, values, vectors, best_residuals);
            if (converged) return;
            if (size >= cap) break;
            const Index block_end = size;
            for (Index j = block_start; j < block_end && size < cap; ++j) add(image.col(j));
            block_start = block_end;
            if (size == block_end) break;
        }
        throw SolverError("Krylov eigensolver did not converge for " + problem_.kind.name(), best_residuals);
    }

private:
    void orthogonalize(VectorXd& v, const MatrixXd& basis, Index size) const {
        if (kernel_) v -= constant_ * constant_.dot(problem_.mass * v);
        if (size == 0) return;
        const VectorXd bv = problem_.mass * v;
        v -= basis.leftCols(size) * (basis.leftCols(size).transpose() * bv);
    }

    VectorXd apply(const VectorXd& y) const {
        const Index n = problem_.dimension();
        VectorXd rhs = problem_.mass * y;
        VectorXd x(n);
        if (kernel_) {
            x(0) = 0.0;
            x.tail(n - 1) = factor_.solve(rhs.tail(n - 1));
            x -= constant_ * constant_.dot(problem_.mass * x);
        } else {
            x = factor_.solve(rhs);
        }
        return x;
    }

    bool ritz(int wanted, const MatrixXd& basis, const MatrixXd& image, Index size, std::vector<double>& values,
              std::vector<VectorXd>& vectors, std::vector<double>& best) const {
        if (size < wanted) return false;
        const auto v = basis.leftCols(size);
        MatrixXd h = v.transpose() * (problem_.mass * image.leftCols(size));
        h = 0.5 * (h + h.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXd> small(h);
        values.clear();
        vectors.clear();
        std::vector<double> residuals;
        bool ok = true;
        for (int k = 0; k < wanted; ++k) {
            VectorXd u = v * small.eigenvectors().col(size - 1 - k);
            u /= std::sqrt(u.dot(problem_.mass * u));
            const double lambda = u.dot(problem_.stiffness * u);
            const double r = relative_residual(problem_, lambda, u);
            residuals.push_back(r);
            ok = ok && r <= options_.tolerance;
            values.push_back(lambda);
            vectors.push_back(std::move(u));
        }
        if (best.empty() || *std::max_element(residuals.begin(), residuals.end()) <
                                *std::max_element(best.begin(), best.end()))
            best = residuals;
        return ok;
    }

    const SpectralProblem& problem_;
    const SolverOptions& options_;
    bool kernel_;
    VectorXd constant_;
    Eigen::SimplicialLDLT<SparseMatrix> factor_;
};

SpectralResult solve_iterative(const SpectralProblem& problem, int count, const SolverOptions& options) {
    SpectralResult result;
    const bool kernel = problem.kind.has_constant_kernel();
    if (kernel) {
        result.eigenvalues.push_back(0.0);
        result.eigenvectors.push_back(constant_mode(problem));
    }
    const int wanted = kernel ? count - 1 : count;
    if (wanted > 0) {
        KrylovSolver solver(problem, options);
        std::vector<double> values;
        std::vector<VectorXd> vectors;
        solver.solve(wanted, values, vectors);
        std::vector<std::size_t> order(values.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
        for (auto i : order) {
            normalize_sign(vectors[i]);
            result.eigenvalues.push_back(values[i]);
            result.eigenvectors.push_back(std::move(vectors[i]));
        }
    }
    return result;
}

}  // namespace

SpectralResult solve_generalized(const SpectralProblem& problem, int count, const SolverOptions& options) {
    const Index n = problem.dimension();
    if (count < 1 || count > n) throw std::invalid_argument("eigenpair count must be in [1, dimension]");
    if (!(options.tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");

    bool dense = options.method == SolverOptions::Method::Dense ||
                 (options.method == SolverOptions::Method::Auto && n <= options.dense_threshold);
    // The Krylov path needs room for a block beyond the wanted pairs.
    if (!dense && count + 2 >= n) dense = true;

    SpectralResult result = dense ? solve_dense(problem, count) : solve_iterative(problem, count, options);
    result.kind = problem.kind;
    result.dof_map = problem.dof_map;
    result.mesh_hash = problem.mesh_hash;
    result.dense = dense;
    finish(problem, result, options.tolerance);
    return result;
}

EigenvalueTable eigenvalue_table(const WeightedMesh& mesh, const std::vector<ProblemKind>& kinds, int count,
                                 const SolverOptions& options, Execution execution) {
    EigenvalueTable table;
    table.kinds = kinds;
    table.mesh_hash = mesh.hash();
    table.values.resize(kinds.size());
    std::vector<std::exception_ptr> errors(kinds.size());
    const auto n = static_cast<std::ptrdiff_t>(kinds.size());
    auto run = [&](std::ptrdiff_t i) {
        try {
            const auto problem = assemble_problem(mesh, kinds[static_cast<std::size_t>(i)], {Execution::Serial});
            table.values[static_cast<std::size_t>(i)] = solve_generalized(problem, count, options).eigenvalues;
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    };
    if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) run(i);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) run(i);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return table;
}

std::string hash_hex(std::uint64_t hash) {
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << hash;
    return out.str();
}

nlohmann::json to_json(const SpectralResult& result) {
    return {{"kind", result.kind.name()},
            {"delta", result.kind.delta()},
            {"eigenvalues", result.eigenvalues},
            {"residuals", result.residuals},
            {"dimension", result.dof_map.size()},
            {"method", result.dense ? "dense" : "iterative"},
            {"mesh_hash", hash_hex(result.mesh_hash)}};
}

nlohmann::json to_json(const EigenvalueTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < table.kinds.size(); ++i)
        rows.push_back({{"kind", table.kinds[i].name()}, {"eigenvalues", table.values[i]}});
    return {{"mesh_hash", hash_hex(table.mesh_hash)}, {"rows", rows}};
}

}  // namespace sticky
