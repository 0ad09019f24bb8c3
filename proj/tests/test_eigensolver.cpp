#include "sticky/eigensolver.hpp"
#include "sticky/error.hpp"
#include "sticky/mesh_generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sticky;
using Eigen::VectorXd;

namespace {

const std::vector<ProblemKind> kAllKinds = {ProblemKind::neumann(), ProblemKind::dirichlet(), ProblemKind::steklov(),
                                            ProblemKind::sticky_reflection(), ProblemKind::boundary_diffusion(1.0)};

SolverOptions with_method(SolverOptions::Method m) {
    SolverOptions o;
    o.method = m;
    return o;
}

void expect_orderings(const EigenvalueTable& table, int first, int last) {
    // kinds: neumann, dirichlet, steklov, sr, srbd
    const auto& n = table.values[0];
    const auto& d = table.values[1];
    const auto& s = table.values[2];
    const auto& sr = table.values[3];
    const auto& srbd = table.values[4];
    for (int k = first; k <= last; ++k) {
        const auto i = static_cast<std::size_t>(k);
        EXPECT_GE(n[i] - sr[i], -1e-8) << "k=" << k;
        EXPECT_GE(d[i] - sr[i], -1e-8) << "k=" << k;
        EXPECT_GE(s[i] - sr[i], -1e-8) << "k=" << k;
        EXPECT_GE(srbd[i] - sr[i], -1e-8) << "k=" << k;
    }
}

}  // namespace

TEST(SolveGeneralized, ZeroModeIsExactConstant) {
    const auto mesh = with_constant_weights(generate_disk_mesh(3, Geometry::Euclidean), 0.5);
    for (auto method : {SolverOptions::Method::Dense, SolverOptions::Method::Iterative}) {
        const auto r = solve_generalized(assemble_problem(mesh, ProblemKind::sticky_reflection()), 3, with_method(method));
        EXPECT_NEAR(r.eigenvalues[0], 0.0, 1e-8);
        const VectorXd& v0 = r.eigenvectors[0];
        EXPECT_LT((v0.array() - v0.mean()).abs().maxCoeff() / std::abs(v0.mean()), 1e-6);
        EXPECT_GT(r.eigenvalues[1], 0.0);
    }
}

TEST(SolveGeneralized, CertificatesAndOrthonormality) {
    const auto mesh = with_random_weights(generate_dumbbell_mesh(1.0, 0.4, 0.8, 2), 21);
    for (const auto& kind : kAllKinds)
        for (auto method : {SolverOptions::Method::Dense, SolverOptions::Method::Iterative}) {
            const auto problem = assemble_problem(mesh, kind);
            const auto r = solve_generalized(problem, 6, with_method(method));
            ASSERT_EQ(r.eigenvalues.size(), 6u);
            for (std::size_t i = 0; i < 6; ++i) {
                EXPECT_LE(r.residuals[i], 1e-9);
                if (i > 0) EXPECT_LE(r.eigenvalues[i - 1], r.eigenvalues[i]);
                for (std::size_t j = 0; j < 6; ++j)
                    EXPECT_NEAR(r.eigenvectors[i].dot(problem.mass * r.eigenvectors[j]), i == j ? 1.0 : 0.0, 1e-8);
            }
        }
}

TEST(SolveGeneralized, DenseAndIterativeAgree) {
    const auto disk = with_random_weights(generate_disk_mesh(4, Geometry::Hyperbolic), 4);  // 817 dofs
    const auto flat = with_constant_weights(generate_disk_mesh(4, Geometry::Euclidean), 0.3);
    for (const auto* mesh : {&disk, &flat})
        for (const auto& kind : kAllKinds) {
            const auto problem = assemble_problem(*mesh, kind);
            if (kind.type() != ProblemKind::Type::Steklov) {
                EXPECT_GE(problem.dimension(), 500);
                EXPECT_LE(problem.dimension(), 1500);
            }
            const auto dense = solve_generalized(problem, 6, with_method(SolverOptions::Method::Dense));
            const auto iter = solve_generalized(problem, 6, with_method(SolverOptions::Method::Iterative));
            EXPECT_TRUE(dense.dense);
            EXPECT_FALSE(iter.dense);
            for (std::size_t k = 1; k < 6; ++k)
                EXPECT_NEAR(iter.eigenvalues[k], dense.eigenvalues[k], 1e-7 * dense.eigenvalues[k]) << kind.name();
        }
}

TEST(SolveGeneralized, DiskNeumannGaps) {
    const auto flat = generate_disk_mesh(5, Geometry::Euclidean);
    const auto hyp = generate_disk_mesh(5, Geometry::Hyperbolic);
    EXPECT_NEAR(solve_generalized(assemble_problem(flat, ProblemKind::neumann()), 2).eigenvalues[1], 3.39, 0.01 * 3.39);
    EXPECT_NEAR(solve_generalized(assemble_problem(hyp, ProblemKind::neumann()), 2).eigenvalues[1], 2.96, 0.02 * 2.96);
}

TEST(SolveGeneralized, RejectsBadArguments) {
    const auto problem = assemble_problem(generate_disk_mesh(1, Geometry::Euclidean), ProblemKind::neumann());
    EXPECT_THROW(solve_generalized(problem, 0), std::invalid_argument);
    EXPECT_THROW(solve_generalized(problem, static_cast<int>(problem.dimension()) + 1), std::invalid_argument);
    SolverOptions bad;
    bad.tolerance = 0.0;
    EXPECT_THROW(solve_generalized(problem, 2, bad), std::invalid_argument);

    auto indefinite = problem;
    indefinite.mass = -indefinite.mass;
    EXPECT_THROW(solve_generalized(indefinite, 2, with_method(SolverOptions::Method::Dense)), SolverError);
    EXPECT_THROW(solve_generalized(indefinite, 2, with_method(SolverOptions::Method::Iterative)), SolverError);
}

TEST(SolveGeneralized, UnreachableToleranceCarriesResiduals) {
    const auto problem = assemble_problem(generate_disk_mesh(3, Geometry::Euclidean), ProblemKind::neumann());
    SolverOptions tight = with_method(SolverOptions::Method::Iterative);
    tight.tolerance = 1e-30;
    tight.max_basis = 40;
    try {
        solve_generalized(problem, 4, tight);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_EQ(e.residuals().size(), 3u);
    }
}

TEST(RayleighQuotient, ConstantsEigenvectorsAndMinMax) {
    const auto mesh = with_random_weights(generate_disk_mesh(3, Geometry::Hyperbolic), 13);
    const auto problem = assemble_problem(mesh, ProblemKind::sticky_reflection());
    const auto r = solve_generalized(problem, 3);
    EXPECT_NEAR(rayleigh_quotient(problem, VectorXd::Ones(problem.dimension())), 0.0, 1e-14);
    EXPECT_NEAR(rayleigh_quotient(problem, r.eigenvectors[1]), r.eigenvalues[1], 1e-9 * r.eigenvalues[1]);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    const VectorXd one = VectorXd::Ones(problem.dimension());
    for (int trial = 0; trial < 100; ++trial) {
        VectorXd u = VectorXd::NullaryExpr(problem.dimension(), [&]() { return gauss(rng); });
        u -= one * (one.dot(problem.mass * u) / one.dot(problem.mass * one));
        EXPECT_GE(rayleigh_quotient(problem, u), r.eigenvalues[1] - 1e-10);
    }
    EXPECT_THROW(rayleigh_quotient(problem, VectorXd::Zero(problem.dimension())), std::invalid_argument);
}

TEST(EigenvalueTableTest, OrderingsOnDisk) {
    const auto mesh = with_constant_weights(generate_disk_mesh(4, Geometry::Euclidean), 0.5);
    const auto table = eigenvalue_table(mesh, kAllKinds, 4);
    expect_orderings(table, 1, 3);
}

TEST(EigenvalueTableTest, OrderingsOnDumbbellAndRandomWeights) {
    for (const auto& mesh : {with_constant_weights(generate_dumbbell_mesh(1.0, 0.3, 1.0, 3), 0.5),
                             with_random_weights(generate_dumbbell_mesh(1.0, 0.6, 0.4, 2), 8),
                             with_random_weights(generate_disk_mesh(3, Geometry::Hyperbolic), 9)}) {
        expect_orderings(eigenvalue_table(mesh, kAllKinds, 6), 0, 5);
    }
}

TEST(EigenvalueTableTest, SerialAndParallelAgree) {
    const auto mesh = with_random_weights(generate_disk_mesh(2, Geometry::Euclidean), 2);
    const auto a = eigenvalue_table(mesh, kAllKinds, 4, {}, Execution::Serial);
    const auto b = eigenvalue_table(mesh, kAllKinds, 4, {}, Execution::Parallel);
    EXPECT_EQ(a.values, b.values);
    const auto doc = to_json(a);
    EXPECT_EQ(doc.at("rows").size(), kAllKinds.size());
    EXPECT_EQ(doc.at("mesh_hash"), hash_hex(mesh.hash()));
}

TEST(EigenvalueTableTest, GapNondecreasingInDelta) {
    const auto mesh = with_constant_weights(generate_disk_mesh(3, Geometry::Euclidean), 0.5);
    std::vector<ProblemKind> kinds;
    for (double d : {0.0, 0.5, 1.0, 2.0}) kinds.push_back(ProblemKind::boundary_diffusion(d));
    const auto table = eigenvalue_table(mesh, kinds, 2);
    for (std::size_t i = 1; i < kinds.size(); ++i) EXPECT_GE(table.values[i][1] - table.values[i - 1][1], -1e-8);
}

TEST(Convergence, GapChangesShrinkUnderRefinement) {
    for (const auto& kind : kAllKinds) {
        std::vector<double> gaps;
        for (int level = 2; level <= 5; ++level) {
            const auto mesh = with_constant_weights(generate_disk_mesh(level, Geometry::Euclidean), 0.5);
            const auto r = solve_generalized(assemble_problem(mesh, kind), 2, with_method(SolverOptions::Method::Iterative));
            gaps.push_back(r.eigenvalues[kind.has_constant_kernel() ? 1 : 0]);
        }
        for (std::size_t i = 2; i < gaps.size(); ++i)
            EXPECT_LT(std::abs(gaps[i] - gaps[i - 1]), std::abs(gaps[i - 1] - gaps[i - 2])) << kind.name();
    }
}

TEST(MetricScaling, MeasurePreservingScalingDividesByFactorSquared) {
    for (Geometry g : {Geometry::Euclidean, Geometry::Hyperbolic}) {
        const auto mesh = with_random_weights(generate_disk_mesh(3, g), 31);
        for (double s : {0.5, 2.0}) {
            const auto scaled = scale_metric_preserving_measure(mesh, s);
            for (const auto& kind : kAllKinds) {
                const int k = kind.has_constant_kernel() ? 1 : 0;
                const double base = solve_generalized(assemble_problem(mesh, kind), 2).eigenvalues[static_cast<std::size_t>(k)];
                const double lam =
                    solve_generalized(assemble_problem(scaled, kind), 2).eigenvalues[static_cast<std::size_t>(k)];
                EXPECT_NEAR(lam, base / (s * s), 1e-6 * base / (s * s)) << kind.name() << " s=" << s;
            }
        }
    }
}

TEST(MetricScaling, JointRenormalizationScalesOnlyNeumannAndDirichlet) {
    const auto mesh = with_constant_weights(generate_disk_mesh(3, Geometry::Euclidean), 0.5);
    const double s = 2.0;
    const auto scaled = normalize_weights(scale_metric(mesh, s));
    for (const auto& kind : {ProblemKind::neumann(), ProblemKind::dirichlet()}) {
        const int k = kind.has_constant_kernel() ? 1 : 0;
        const double base = solve_generalized(assemble_problem(mesh, kind), 2).eigenvalues[static_cast<std::size_t>(k)];
        const double lam = solve_generalized(assemble_problem(scaled, kind), 2).eigenvalues[static_cast<std::size_t>(k)];
        EXPECT_NEAR(lam, base / (s * s), 1e-6 * base);
    }
    // The bulk and boundary parts of the mass scale by s^2 and s respectively, so the
    // sticky-reflection gap does not follow 1/s^2 under this scaling.
    const double sr = solve_generalized(assemble_problem(mesh, ProblemKind::sticky_reflection()), 2).eigenvalues[1];
    const double sr_scaled =
        solve_generalized(assemble_problem(scaled, ProblemKind::sticky_reflection()), 2).eigenvalues[1];
    EXPECT_GT(std::abs(sr_scaled - sr / (s * s)), 1e-3 * sr);
}

TEST(SpectralResultJson, Fields) {
    const auto mesh = generate_disk_mesh(1, Geometry::Hyperbolic);
    const auto r = solve_generalized(assemble_problem(mesh, ProblemKind::boundary_diffusion(0.5)), 3);
    const auto doc = to_json(r);
    EXPECT_EQ(doc.at("kind"), "srbd(0.5)");
    EXPECT_EQ(doc.at("eigenvalues").size(), 3u);
    EXPECT_EQ(doc.at("residuals").size(), 3u);
    EXPECT_EQ(doc.at("mesh_hash"), hash_hex(mesh.hash()));
    EXPECT_EQ(doc.at("mesh_hash").get<std::string>().size(), 16u);
}
