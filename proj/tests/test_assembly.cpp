#include "sticky/assembly.hpp"
#include "sticky/eigensolver.hpp"
#include "sticky/error.hpp"
#include "sticky/mesh_generators.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/SparseExtra>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

using namespace sticky;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

double sum_entries(const SparseMatrix& m) { return MatrixXd(m).sum(); }

double max_asymmetry(const SparseMatrix& m) { return MatrixXd(m - SparseMatrix(m.transpose())).cwiseAbs().maxCoeff(); }

// Direct quadrature of the integrals in the SR/SRBD quotients for a P1 function with nodal
// values u. Gradients come from a 2x2 solve, u^2 over triangles from the edge-midpoint rule
// and u^2 along edges from Simpson's rule (both exact for quadratics).
struct QuadratureForms {
    double bulk_energy = 0.0;
    double bulk_mass = 0.0;
    double boundary_energy = 0.0;
    double boundary_mass = 0.0;
};

double conformal(const WeightedMesh& mesh, double x, double y) {
    const double s = mesh.metric().scale;
    if (mesh.metric().kind == Metric::Kind::Euclidean) return s;
    return s * 2.0 / (1.0 - x * x - y * y);
}

QuadratureForms quadrature(const WeightedMesh& mesh, const VectorXd& u) {
    QuadratureForms f;
    const auto& p = mesh.vertices();
    const auto& alpha = mesh.alpha();
    const auto& beta = mesh.beta();
    for (const auto& tri : mesh.triangles()) {
        const auto& a = p[static_cast<std::size_t>(tri[0])];
        const auto& b = p[static_cast<std::size_t>(tri[1])];
        const auto& c = p[static_cast<std::size_t>(tri[2])];
        Eigen::Matrix2d j;
        j << b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y;
        const Eigen::Vector2d g = j.inverse() * Eigen::Vector2d(u(tri[1]) - u(tri[0]), u(tri[2]) - u(tri[0]));
        const double area = 0.5 * std::abs(j.determinant());
        const double abar = (alpha[static_cast<std::size_t>(tri[0])] + alpha[static_cast<std::size_t>(tri[1])] +
                             alpha[static_cast<std::size_t>(tri[2])]) / 3.0;
        f.bulk_energy += g.squaredNorm() * area * abar;
        const double phi = conformal(mesh, (a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
        const double m01 = 0.5 * (u(tri[0]) + u(tri[1]));
        const double m12 = 0.5 * (u(tri[1]) + u(tri[2]));
        const double m20 = 0.5 * (u(tri[2]) + u(tri[0]));
        f.bulk_mass += area / 3.0 * (m01 * m01 + m12 * m12 + m20 * m20) * phi * phi * abar;
    }
    for (int id : mesh.boundary_edges()) {
        const auto& e = mesh.edges()[static_cast<std::size_t>(id)];
        const auto& a = p[static_cast<std::size_t>(e.v0)];
        const auto& b = p[static_cast<std::size_t>(e.v1)];
        const double len = std::hypot(b.x - a.x, b.y - a.y) * conformal(mesh, 0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
        const double bbar = 0.5 * (beta[static_cast<std::size_t>(e.v0)] + beta[static_cast<std::size_t>(e.v1)]);
        const double u0 = u(e.v0), u1 = u(e.v1), um = 0.5 * (u0 + u1);
        f.boundary_mass += len / 6.0 * (u0 * u0 + 4.0 * um * um + u1 * u1) * bbar;
        f.boundary_energy += (u1 - u0) * (u1 - u0) / len * bbar;
    }
    return f;
}

std::vector<WeightedMesh> sample_meshes() {
    return {with_random_weights(generate_disk_mesh(3, Geometry::Euclidean), 1),
            with_random_weights(generate_disk_mesh(3, Geometry::Hyperbolic), 2),
            scale_metric(with_random_weights(generate_disk_mesh(2, Geometry::Hyperbolic), 3), 1.7),
            with_random_weights(generate_dumbbell_mesh(1.0, 0.4, 0.6, 2), 4)};
}

// Smallest eigenvalues of a dense symmetric pair restricted to the given rows.
VectorXd dense_eigenvalues(const SparseMatrix& a, const SparseMatrix& b, const std::vector<int>& rows) {
    MatrixXd ad(rows.size(), rows.size()), bd(rows.size(), rows.size());
    const MatrixXd af(a), bf(b);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) {
            ad(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = af(rows[i], rows[j]);
            bd(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = bf(rows[i], rows[j]);
        }
    return Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd>(ad, bd, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST(ProblemKindTest, NamesRoundTrip) {
    for (const auto& k : {ProblemKind::neumann(), ProblemKind::dirichlet(), ProblemKind::steklov(),
                          ProblemKind::sticky_reflection(), ProblemKind::boundary_diffusion(0.5)})
        EXPECT_EQ(ProblemKind::parse(k.name()), k);
    EXPECT_EQ(ProblemKind::parse("srbd", 2.0), ProblemKind::boundary_diffusion(2.0));
    EXPECT_THROW(ProblemKind::boundary_diffusion(-1.0), std::invalid_argument);
    EXPECT_THROW(ProblemKind::parse("robin"), std::invalid_argument);
    EXPECT_THROW(ProblemKind::parse("srbd(x)"), std::invalid_argument);
}

TEST(BulkStiffness, ReferenceTriangle) {
    const auto mesh = WeightedMesh::with_unit_weights({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    MatrixXd expected(3, 3);
    expected << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
    const MatrixXd k(assemble_bulk_stiffness(mesh));
    EXPECT_LT((k - expected).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT(k.rowwise().sum().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BulkStiffness, ConformallyInvariantAndLinearInAlpha) {
    const auto hyp = generate_disk_mesh(2, Geometry::Hyperbolic);
    const auto flat = WeightedMesh::with_unit_weights(hyp.vertices(), hyp.triangles(), Metric::euclidean());
    EXPECT_EQ(MatrixXd(assemble_bulk_stiffness(flat)), MatrixXd(assemble_bulk_stiffness(hyp)));

    auto alpha = flat.alpha();
    for (auto& a : alpha) a *= 2.0;
    const auto doubled = with_weights(flat, alpha, flat.beta());
    EXPECT_EQ(MatrixXd(assemble_bulk_stiffness(doubled)), 2.0 * MatrixXd(assemble_bulk_stiffness(flat)));
}

TEST(Assembly, SerialAndParallelAgreeExactly) {
    for (const auto& mesh : sample_meshes()) {
        const AssemblyOptions serial{Execution::Serial, false};
        const AssemblyOptions parallel{Execution::Parallel, false};
        EXPECT_EQ(MatrixXd(assemble_bulk_stiffness(mesh, serial)), MatrixXd(assemble_bulk_stiffness(mesh, parallel)));
        EXPECT_EQ(MatrixXd(assemble_bulk_mass(mesh, serial)), MatrixXd(assemble_bulk_mass(mesh, parallel)));
        EXPECT_EQ(MatrixXd(assemble_boundary_stiffness(mesh, serial)),
                  MatrixXd(assemble_boundary_stiffness(mesh, parallel)));
        EXPECT_EQ(MatrixXd(assemble_boundary_mass(mesh, serial)), MatrixXd(assemble_boundary_mass(mesh, parallel)));
    }
}

TEST(BulkMass, TotalsMatchMeasures) {
    for (const auto& mesh : sample_meshes()) {
        EXPECT_NEAR(sum_entries(assemble_bulk_mass(mesh)), mesh.bulk_measure(), 1e-12);
        EXPECT_NEAR(sum_entries(assemble_bulk_mass(mesh, {Execution::Serial, true})), mesh.bulk_measure(), 1e-12);
        EXPECT_NEAR(sum_entries(assemble_boundary_mass(mesh)), mesh.boundary_measure(), 1e-12);
        EXPECT_NEAR(sum_entries(assemble_boundary_mass(mesh, {Execution::Serial, true})), mesh.boundary_measure(), 1e-12);
    }
}

TEST(BulkMass, UnitWeightTotals) {
    const auto flat = generate_disk_mesh(4, Geometry::Euclidean);
    EXPECT_NEAR(sum_entries(assemble_bulk_mass(flat)), kPi, 0.01 * kPi);
    EXPECT_NEAR(sum_entries(assemble_boundary_mass(flat)), 2 * kPi, 0.01 * 2 * kPi);
    const auto hyp = generate_disk_mesh(4, Geometry::Hyperbolic);
    const double area = 2 * kPi * (std::cosh(1.0) - 1.0);
    const double perimeter = 2 * kPi * std::sinh(1.0);
    EXPECT_NEAR(sum_entries(assemble_bulk_mass(hyp)), area, 0.01 * area);
    EXPECT_NEAR(sum_entries(assemble_boundary_mass(hyp)), perimeter, 0.01 * perimeter);
}

TEST(BoundaryStiffness, KernelSupportAndLinearity) {
    const auto mesh = with_random_weights(generate_disk_mesh(3, Geometry::Hyperbolic), 8);
    const SparseMatrix kb = assemble_boundary_stiffness(mesh);
    EXPECT_LT((kb * VectorXd::Ones(kb.rows())).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index k = 0; k < kb.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(kb, k); it; ++it) {
            EXPECT_TRUE(mesh.is_boundary_vertex(static_cast<int>(it.row())));
            EXPECT_TRUE(mesh.is_boundary_vertex(static_cast<int>(it.col())));
        }
    auto beta = mesh.beta();
    for (auto& b : beta) b *= 2.0;
    const auto doubled = with_weights(mesh, mesh.alpha(), beta);
    EXPECT_EQ(MatrixXd(assemble_boundary_stiffness(doubled)), 2.0 * MatrixXd(kb));
    EXPECT_EQ(MatrixXd(assemble_boundary_mass(doubled)), 2.0 * MatrixXd(assemble_boundary_mass(mesh)));
}

TEST(BoundaryStiffness, CircleSpectrum) {
    const auto mesh = generate_disk_mesh(5, Geometry::Euclidean);
    const VectorXd ev = dense_eigenvalues(assemble_boundary_stiffness(mesh), assemble_boundary_mass(mesh),
                                          mesh.boundary_vertices());
    EXPECT_NEAR(ev(0), 0.0, 1e-10);
    EXPECT_NEAR(ev(1), 1.0, 0.01);
    EXPECT_NEAR(ev(2), 1.0, 0.01);
    EXPECT_NEAR(ev(3), 4.0, 0.04);
}

TEST(AssembledForms, MatchIndependentQuadrature) {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss;
    for (const auto& mesh : sample_meshes())
        for (int trial = 0; trial < 10; ++trial) {
            VectorXd u = VectorXd::NullaryExpr(static_cast<Eigen::Index>(mesh.vertex_count()), [&]() { return gauss(rng); });
            const auto q = quadrature(mesh, u);
            const auto sr = assemble_problem(mesh, ProblemKind::sticky_reflection());
            const double expected_sr = q.bulk_energy / (q.bulk_mass + q.boundary_mass);
            EXPECT_NEAR(rayleigh_quotient(sr, u), expected_sr, 1e-10 * expected_sr);

            const double delta = 0.75;
            const auto srbd = assemble_problem(mesh, ProblemKind::boundary_diffusion(delta));
            const double expected_srbd = (q.bulk_energy + delta * q.boundary_energy) / (q.bulk_mass + q.boundary_mass);
            EXPECT_NEAR(rayleigh_quotient(srbd, u), expected_srbd, 1e-10 * expected_srbd);

            const auto neumann = assemble_problem(mesh, ProblemKind::neumann());
            EXPECT_NEAR(rayleigh_quotient(neumann, u), q.bulk_energy / q.bulk_mass, 1e-10 * q.bulk_energy / q.bulk_mass);
        }
}

TEST(AssembledForms, SymmetricSemidefiniteWithConstantKernel) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    for (const auto& mesh : sample_meshes()) {
        const SparseMatrix k = assemble_bulk_stiffness(mesh);
        EXPECT_LT((k * VectorXd::Ones(k.rows())).cwiseAbs().maxCoeff(), 1e-12);
        for (const auto& kind : {ProblemKind::neumann(), ProblemKind::dirichlet(), ProblemKind::steklov(),
                                 ProblemKind::sticky_reflection(), ProblemKind::boundary_diffusion(2.0)}) {
            const auto p = assemble_problem(mesh, kind);
            EXPECT_LE(max_asymmetry(p.stiffness), 1e-12) << kind.name();
            EXPECT_LE(max_asymmetry(p.mass), 1e-12) << kind.name();
            EXPECT_EQ(p.dof_map.size(), static_cast<std::size_t>(p.dimension()));
            for (int trial = 0; trial < 20; ++trial) {
                const VectorXd u = VectorXd::NullaryExpr(p.dimension(), [&]() { return gauss(rng); });
                EXPECT_GE(u.dot(p.stiffness * u) / u.squaredNorm(), -1e-10);
                EXPECT_GT(u.dot(p.mass * u), 0.0);
            }
            if (kind.has_constant_kernel())
                EXPECT_LT((p.stiffness * VectorXd::Ones(p.dimension())).cwiseAbs().maxCoeff(), 1e-12) << kind.name();
        }
    }
}

TEST(AssembleProblem, StickyReflectionIsZeroDiffusion) {
    const auto mesh = with_random_weights(generate_disk_mesh(2, Geometry::Hyperbolic), 6);
    const auto sr = assemble_problem(mesh, ProblemKind::sticky_reflection());
    const auto srbd = assemble_problem(mesh, ProblemKind::boundary_diffusion(0.0));
    EXPECT_EQ(MatrixXd(sr.stiffness), MatrixXd(srbd.stiffness));
    EXPECT_EQ(MatrixXd(sr.mass), MatrixXd(srbd.mass));
}

TEST(AssembleProblem, QuotientNondecreasingInDelta) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    const auto mesh = with_random_weights(generate_dumbbell_mesh(1.0, 0.5, 0.5, 2), 6);
    for (int trial = 0; trial < 20; ++trial) {
        const VectorXd u = VectorXd::NullaryExpr(static_cast<Eigen::Index>(mesh.vertex_count()), [&]() { return gauss(rng); });
        double previous = -1.0;
        for (double delta : {0.0, 0.1, 0.5, 1.0, 2.0, 10.0}) {
            const double q = rayleigh_quotient(assemble_problem(mesh, ProblemKind::boundary_diffusion(delta)), u);
            EXPECT_GE(q, previous);
            previous = q;
        }
    }
}

TEST(AssembleProblem, JointWeightScalingLeavesSpectrumUnchanged) {
    const auto mesh = with_random_weights(generate_disk_mesh(2, Geometry::Euclidean), 12);
    auto alpha = mesh.alpha();
    auto beta = mesh.beta();
    for (auto& a : alpha) a *= 3.5;
    for (auto& b : beta) b *= 3.5;
    const auto scaled = with_weights(mesh, alpha, beta);
    for (const auto& kind : {ProblemKind::neumann(), ProblemKind::dirichlet(), ProblemKind::steklov(),
                             ProblemKind::sticky_reflection(), ProblemKind::boundary_diffusion(1.0)}) {
        const auto a = solve_generalized(assemble_problem(mesh, kind), 6);
        const auto b = solve_generalized(assemble_problem(scaled, kind), 6);
        for (std::size_t k = 0; k < a.eigenvalues.size(); ++k)
            EXPECT_NEAR(b.eigenvalues[k], a.eigenvalues[k], 1e-10 * std::max(1.0, a.eigenvalues[k])) << kind.name();
    }
}

TEST(AssembleProblem, DofMaps) {
    const auto mesh = generate_disk_mesh(2, Geometry::Euclidean);
    EXPECT_EQ(assemble_problem(mesh, ProblemKind::dirichlet()).dof_map, mesh.interior_vertices());
    EXPECT_EQ(assemble_problem(mesh, ProblemKind::steklov()).dof_map, mesh.boundary_vertices());
    EXPECT_EQ(assemble_problem(mesh, ProblemKind::neumann()).dof_map.size(), mesh.vertex_count());
}

TEST(AssembleProblem, NeedsInteriorVertexForDirichletAndSteklov) {
    const auto single = WeightedMesh::with_unit_weights({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    EXPECT_THROW(assemble_problem(single, ProblemKind::dirichlet()), std::invalid_argument);
    EXPECT_THROW(assemble_problem(single, ProblemKind::steklov()), std::invalid_argument);
    EXPECT_NO_THROW(assemble_problem(single, ProblemKind::sticky_reflection()));
}

TEST(Steklov, DiskEigenvalueIsAlphaOverBeta) {
    const auto base = generate_disk_mesh(5, Geometry::Euclidean);
    const std::vector<double> alpha(base.vertex_count(), 1.0);
    std::vector<double> beta(base.vertex_count(), 0.0);
    for (int v : base.boundary_vertices()) beta[static_cast<std::size_t>(v)] = 0.25;
    const auto mesh = with_weights(base, alpha, beta);
    const auto result = solve_generalized(assemble_problem(mesh, ProblemKind::steklov()), 4);
    EXPECT_NEAR(result.eigenvalues[1], 4.0, 0.04);
    EXPECT_NEAR(result.eigenvalues[2], 4.0, 0.04);
    EXPECT_NEAR(result.eigenvalues[3], 8.0, 0.08);
}

TEST(Neumann, UnitDiskGap) {
    const auto mesh = generate_disk_mesh(5, Geometry::Euclidean);
    const auto result = solve_generalized(assemble_problem(mesh, ProblemKind::neumann()), 2);
    EXPECT_NEAR(result.eigenvalues[1], 3.39, 0.01 * 3.39);
}

TEST(MatrixMarket, RoundTrip) {
    const auto mesh = with_random_weights(generate_disk_mesh(1, Geometry::Euclidean), 3);
    const auto problem = assemble_problem(mesh, ProblemKind::boundary_diffusion(1.0));
    const auto path = std::filesystem::temp_directory_path() / "sticky_stiffness.mtx";
    write_matrix_market(problem.stiffness, path);
    SparseMatrix loaded;
    ASSERT_TRUE(Eigen::loadMarket(loaded, path.string()));
    EXPECT_LT(MatrixXd(loaded - problem.stiffness).cwiseAbs().maxCoeff(), 1e-12);
    std::filesystem::remove(path);
}
