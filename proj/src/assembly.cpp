#include "sticky/assembly.hpp"

#include "sticky/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/SparseExtra>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sticky {

ProblemKind ProblemKind::boundary_diffusion(double delta) {
    if (!std::isfinite(delta) || delta < 0.0)
        throw std::invalid_argument("boundary diffusion delta must be finite and nonnegative");
    return ProblemKind(Type::StickyReflectionBoundaryDiffusion, delta);
}

bool ProblemKind::has_constant_kernel() const {
    return type_ != Type::Dirichlet;
}

std::string ProblemKind::name() const {
    switch (type_) {
        case Type::Neumann: return "neumann";
        case Type::Dirichlet: return "dirichlet";
        case Type::Steklov: return "steklov";
        case Type::StickyReflection: return "sr";
        case Type::StickyReflectionBoundaryDiffusion: {
            std::ostringstream out;
            out << "srbd(" << delta_ << ")";
            return out.str();
        }
    }
    return {};
}

ProblemKind ProblemKind::parse(const std::string& text, double delta) {
    if (text == "neumann") return neumann();
    if (text == "dirichlet") return dirichlet();
    if (text == "steklov") return steklov();
    if (text == "sr") return sticky_reflection();
    if (text == "srbd") return boundary_diffusion(delta);
    if (text.rfind("srbd(", 0) == 0 && text.back() == ')') {
        const std::string inner = text.substr(5, text.size() - 6);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(inner, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == inner.size() && used > 0) return boundary_diffusion(value);
    }
    throw std::invalid_argument("unknown problem kind '" + text + "'");
}

namespace {

using Triplet = Eigen::Triplet<double>;

// Every element writes a fixed-size block of triplets into its own slot, so the serial and
// OpenMP loops produce the same triplet list and setFromTriplets sums it in the same order.
template <int N, class ElementFn>
SparseMatrix assemble_elements(Eigen::Index size, std::size_t element_count, Execution execution,
                               ElementFn element) {
    std::vector<Triplet> triplets(element_count * N * N);
    const auto count = static_cast<std::ptrdiff_t>(element_count);
    if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < count; ++k) element(k, triplets.data() + k * N * N);
    } else {
        for (std::ptrdiff_t k = 0; k < count; ++k) element(k, triplets.data() + k * N * N);
    }
    SparseMatrix matrix(size, size);
    matrix.setFromTriplets(triplets.begin(), triplets.end());
    matrix.prune(0.0);
    return matrix;
}

Vec2 minus(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }

}  // namespace

SparseMatrix assemble_bulk_stiffness(const WeightedMesh& mesh, const AssemblyOptions& options) {
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
        if (!(mesh.chart_area(static_cast<int>(t)) > 0.0)) throw MeshError("degenerate triangle " + std::to_string(t));
    const auto& verts = mesh.vertices();
    const auto& tris = mesh.triangles();
    return assemble_elements<3>(
        static_cast<Eigen::Index>(mesh.vertex_count()), mesh.triangle_count(), options.execution,
        [&](std::ptrdiff_t t, Triplet* out) {
            const Triangle& tri = tris[static_cast<std::size_t>(t)];
            const double area = mesh.chart_area(static_cast<int>(t));
            // Edge vectors opposite each vertex; grad(phi_i) is the rotated edge / (2 area).
            std::array<Vec2, 3> e;
            for (int i = 0; i < 3; ++i)
                e[static_cast<std::size_t>(i)] = minus(verts[static_cast<std::size_t>(tri[(i + 2) % 3])],
                                                       verts[static_cast<std::size_t>(tri[(i + 1) % 3])]);
            const double w = mesh.triangle_alpha(static_cast<int>(t)) / (4.0 * area);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const auto& a = e[static_cast<std::size_t>(i)];
                    const auto& b = e[static_cast<std::size_t>(j)];
                    *out++ = Triplet(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)],
                                     w * (a.x * b.x + a.y * b.y));
                }
        });
}

SparseMatrix assemble_bulk_mass(const WeightedMesh& mesh, const AssemblyOptions& options) {
    const auto& tris = mesh.triangles();
    return assemble_elements<3>(
        static_cast<Eigen::Index>(mesh.vertex_count()), mesh.triangle_count(), options.execution,
        [&](std::ptrdiff_t t, Triplet* out) {
            const Triangle& tri = tris[static_cast<std::size_t>(t)];
            const double total = mesh.weighted_area(static_cast<int>(t));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double value = 0.0;
                    if (options.lumped_mass)
                        value = i == j ? total / 3.0 : 0.0;
                    else
                        value = total * (i == j ? 2.0 : 1.0) / 12.0;
                    *out++ = Triplet(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)], value);
                }
        });
}

SparseMatrix assemble_boundary_stiffness(const WeightedMesh& mesh, const AssemblyOptions& options) {
    const auto& ids = mesh.boundary_edges();
    for (int id : ids)
        if (!(mesh.metric_length(id) > 0.0)) throw MeshError("zero-length boundary edge " + std::to_string(id));
    return assemble_elements<2>(
        static_cast<Eigen::Index>(mesh.vertex_count()), ids.size(), options.execution,
        [&](std::ptrdiff_t k, Triplet* out) {
            const int id = ids[static_cast<std::size_t>(k)];
            const Edge& edge = mesh.edges()[static_cast<std::size_t>(id)];
            const double w = mesh.edge_beta(id) / mesh.metric_length(id);
            *out++ = Triplet(edge.v0, edge.v0, w);
            *out++ = Triplet(edge.v0, edge.v1, -w);
            *out++ = Triplet(edge.v1, edge.v0, -w);
            *out++ = Triplet(edge.v1, edge.v1, w);
        });
}

SparseMatrix assemble_boundary_mass(const WeightedMesh& mesh, const AssemblyOptions& options) {
    const auto& ids = mesh.boundary_edges();
    return assemble_elements<2>(
        static_cast<Eigen::Index>(mesh.vertex_count()), ids.size(), options.execution,
        [&](std::ptrdiff_t k, Triplet* out) {
            const int id = ids[static_cast<std::size_t>(k)];
            const Edge& edge = mesh.edges()[static_cast<std::size_t>(id)];
            const double total = mesh.weighted_arc(id);
            const double diag = options.lumped_mass ? total / 2.0 : total / 3.0;
            const double off = options.lumped_mass ? 0.0 : total / 6.0;
            *out++ = Triplet(edge.v0, edge.v0, diag);
            *out++ = Triplet(edge.v0, edge.v1, off);
            *out++ = Triplet(edge.v1, edge.v0, off);
            *out++ = Triplet(edge.v1, edge.v1, diag);
        });
}

namespace {

// Submatrix with the given rows and columns, in the given order.
SparseMatrix restrict_to(const SparseMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    std::vector<int> row_pos(static_cast<std::size_t>(m.rows()), -1);
    std::vector<int> col_pos(static_cast<std::size_t>(m.cols()), -1);
    for (std::size_t i = 0; i < rows.size(); ++i) row_pos[static_cast<std::size_t>(rows[i])] = static_cast<int>(i);
    for (std::size_t i = 0; i < cols.size(); ++i) col_pos[static_cast<std::size_t>(cols[i])] = static_cast<int>(i);
    std::vector<Triplet> triplets;
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            const int r = row_pos[static_cast<std::size_t>(it.row())];
            const int c = col_pos[static_cast<std::size_t>(it.col())];
            if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
        }
    SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

std::vector<int> all_vertices(const WeightedMesh& mesh) {
    std::vector<int> dofs(mesh.vertex_count());
    for (std::size_t i = 0; i < dofs.size(); ++i) dofs[i] = static_cast<int>(i);
    return dofs;
}

SparseMatrix schur_complement(const SparseMatrix& k, const std::vector<int>& interior,
                              const std::vector<int>& boundary) {
    const SparseMatrix kii = restrict_to(k, interior, interior);
    const SparseMatrix kib = restrict_to(k, interior, boundary);
    const SparseMatrix kbb = restrict_to(k, boundary, boundary);

    Eigen::SimplicialLDLT<SparseMatrix> factor(kii);
    if (factor.info() != Eigen::Success || (factor.vectorD().array() <= 0.0).any())
        throw SolverError("interior stiffness block is singular; Steklov reduction failed");
    const Eigen::MatrixXd x = factor.solve(Eigen::MatrixXd(kib));
    Eigen::MatrixXd s = Eigen::MatrixXd(kbb) - Eigen::MatrixXd(kib.transpose()) * x;
    s = 0.5 * (s + s.transpose()).eval();
    return s.sparseView();
}

}  // namespace

SpectralProblem assemble_problem(const WeightedMesh& mesh, const ProblemKind& kind, const AssemblyOptions& options) {
    using Type = ProblemKind::Type;
    SpectralProblem problem;
    problem.kind = kind;
    problem.mesh_hash = mesh.hash();

    const SparseMatrix k = assemble_bulk_stiffness(mesh, options);
    switch (kind.type()) {
        case Type::Neumann:
            problem.stiffness = k;
            problem.mass = assemble_bulk_mass(mesh, options);
            problem.dof_map = all_vertices(mesh);
            break;
        case Type::Dirichlet: {
            const auto& interior = mesh.interior_vertices();
            if (interior.empty()) throw std::invalid_argument("Dirichlet problem needs an interior vertex");
            problem.stiffness = restrict_to(k, interior, interior);
            problem.mass = restrict_to(assemble_bulk_mass(mesh, options), interior, interior);
            problem.dof_map = interior;
            break;
        }
        case Type::StickyReflection:
        case Type::StickyReflectionBoundaryDiffusion: {
            problem.stiffness = k;
            if (kind.delta() != 0.0) problem.stiffness += kind.delta() * assemble_boundary_stiffness(mesh, options);
            problem.mass = assemble_bulk_mass(mesh, options) + assemble_boundary_mass(mesh, options);
            problem.dof_map = all_vertices(mesh);
            break;
        }
        case Type::Steklov: {
            const auto& interior = mesh.interior_vertices();
            const auto& boundary = mesh.boundary_vertices();
            if (interior.empty()) throw std::invalid_argument("Steklov problem needs an interior vertex");
            problem.stiffness = schur_complement(k, interior, boundary);
            problem.mass = restrict_to(assemble_boundary_mass(mesh, options), boundary, boundary);
            problem.dof_map = boundary;
            break;
        }
    }
    problem.stiffness.makeCompressed();
    problem.mass.makeCompressed();
    return problem;
}

void write_matrix_market(const SparseMatrix& matrix, const std::filesystem::path& path) {
    if (!Eigen::saveMarket(matrix, path.string()))
        throw std::runtime_error("cannot write " + path.string());
}

}  // namespace sticky
