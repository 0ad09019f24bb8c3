#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sticky {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

using Triangle = std::array<int, 3>;

enum class Geometry { Euclidean, Hyperbolic };

/// Conformal metric on the chart. Lengths are multiplied by factor(p), areas by factor(p)^2.
///
/// Poincare is the disk model of the hyperbolic plane, factor 2/(1-|x|^2). `scale` is a
/// constant multiplier applied on top of the conformal factor (metric scaling).
struct Metric {
    enum class Kind { Euclidean, Poincare };

    Kind kind = Kind::Euclidean;
    double scale = 1.0;

    double factor(Vec2 p) const;

    static Metric euclidean() { return {}; }
    static Metric poincare() { return {Kind::Poincare, 1.0}; }
};

/// Undirected mesh edge. `right` is -1 on boundary edges.
struct Edge {
    int v0 = -1;
    int v1 = -1;
    int left = -1;
    int right = -1;

    bool on_boundary() const { return right < 0; }
};

/// A boundary vertex together with the two boundary edges meeting at it (in loop order).
struct BoundaryCorner {
    int vertex = -1;
    int incoming_edge = -1;
    int outgoing_edge = -1;
};

/// Triangulated planar domain with bulk weight alpha (per vertex) and boundary weight
/// beta (per boundary vertex). Immutable after construction; all invariants are checked
/// by the constructor, which throws MeshError on violation.
///
/// Weighted measures use the vertex mean of the weight over a simplex:
///   |T|_alpha      = metric area of T    * mean(alpha over T's vertices)
///   |e|_alpha      = metric length of e  * mean(alpha over e's endpoints)
///   |e|_beta       = metric length of e  * mean(beta over e's endpoints)   (boundary e)
/// The conformal factor is sampled at the triangle centroid resp. edge midpoint.
class WeightedMesh {
public:
    /// `beta` has one entry per vertex; entries of interior vertices must be zero.
    /// An empty `boundary_loops` means "extract from the topology"; a non-empty one is
    /// checked against the topology and kept as given.
    WeightedMesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                 std::vector<double> alpha, std::vector<double> beta, Metric metric = {},
                 std::vector<std::vector<int>> boundary_loops = {});

    /// Mesh with alpha = 1 everywhere and beta = 1 on the boundary (not normalized).
    static WeightedMesh with_unit_weights(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                                          Metric metric = {});

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t triangle_count() const { return triangles_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<double>& alpha() const { return alpha_; }
    const std::vector<double>& beta() const { return beta_; }
    const Metric& metric() const { return metric_; }
    const std::vector<std::vector<int>>& boundary_loops() const { return boundary_loops_; }

    const std::vector<Edge>& edges() const { return edges_; }
    /// Edge ids of the three edges of each triangle (opposite to vertex 0, 1, 2).
    const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }
    /// Boundary edge ids, loop by loop, in traversal order.
    const std::vector<int>& boundary_edges() const { return boundary_edges_; }
    const std::vector<BoundaryCorner>& boundary_corners() const { return corners_; }
    const std::vector<int>& interior_vertices() const { return interior_vertices_; }
    /// Boundary vertices, loop by loop, in traversal order.
    const std::vector<int>& boundary_vertices() const { return boundary_vertices_; }
    bool is_boundary_vertex(int v) const { return on_boundary_[static_cast<std::size_t>(v)] != 0; }

    double chart_area(int t) const;
    double metric_area(int t) const { return metric_area_[static_cast<std::size_t>(t)]; }
    double metric_length(int e) const { return metric_length_[static_cast<std::size_t>(e)]; }
    double triangle_alpha(int t) const;
    double edge_alpha(int e) const;
    double edge_beta(int e) const;

    /// |T|_alpha
    double weighted_area(int t) const { return weighted_area_[static_cast<std::size_t>(t)]; }
    /// |e|_alpha (any edge)
    double weighted_cut(int e) const { return weighted_cut_[static_cast<std::size_t>(e)]; }
    /// |e|_beta (boundary edges; zero elsewhere)
    double weighted_arc(int e) const { return weighted_arc_[static_cast<std::size_t>(e)]; }

    /// |Omega|_alpha
    double bulk_measure() const { return bulk_measure_; }
    /// |dOmega|_beta
    double boundary_measure() const { return boundary_measure_; }
    /// Unweighted metric area and perimeter.
    double total_metric_area() const;
    double total_metric_perimeter() const;

    /// FNV-1a hash over geometry, topology, weights and metric.
    std::uint64_t hash() const;

private:
    void build_topology(std::vector<std::vector<int>> given_loops);
    void check_weights() const;
    void compute_measures();

    std::vector<Vec2> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<double> alpha_;
    std::vector<double> beta_;
    Metric metric_;
    std::vector<std::vector<int>> boundary_loops_;

    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> triangle_edges_;
    std::vector<int> boundary_edges_;
    std::vector<BoundaryCorner> corners_;
    std::vector<int> interior_vertices_;
    std::vector<int> boundary_vertices_;
    std::vector<char> on_boundary_;

    std::vector<double> metric_area_;
    std::vector<double> metric_length_;
    std::vector<double> weighted_area_;
    std::vector<double> weighted_cut_;
    std::vector<double> weighted_arc_;
    double bulk_measure_ = 0.0;
    double boundary_measure_ = 0.0;
};

/// Scales alpha and beta by one common constant so that |Omega|_alpha + |dOmega|_beta = 1.
WeightedMesh normalize_weights(const WeightedMesh& mesh);

/// Multiplies all metric lengths by `factor` (areas by factor^2). Weights are untouched.
WeightedMesh scale_metric(const WeightedMesh& mesh, double factor);

/// Scales the metric by `factor` and divides alpha by factor^2 and beta by factor, so the
/// measure mu = alpha*lambda + beta*sigma is the same measure before and after.
WeightedMesh scale_metric_preserving_measure(const WeightedMesh& mesh, double factor);

/// Replaces the weights (same topology and metric).
WeightedMesh with_weights(const WeightedMesh& mesh, std::vector<double> alpha, std::vector<double> beta);

/// Constant weights alpha = abar/|Omega|, beta = (1-abar)/|dOmega| using the mesh's own
/// metric area and perimeter. The result is normalized.
WeightedMesh with_constant_weights(const WeightedMesh& mesh, double alpha_bar);

/// Weights drawn uniformly from [lo, hi] per vertex (beta only on boundary vertices),
/// then normalized. Deterministic in `seed`.
WeightedMesh with_random_weights(const WeightedMesh& mesh, std::uint64_t seed, double lo = 0.5,
                                 double hi = 1.5);

struct SubsetMeasures {
    double bulk = 0.0;           // |A|_alpha
    double interior_cut = 0.0;   // |d_I A|_alpha
    double exterior_arc = 0.0;   // |d_E A|_beta
    double arc_endpoints = 0.0;  // |dd_E A|_beta, beta-weighted count of arc endpoints
};

/// A union of closed triangles of a parent mesh. The parent must outlive the subset.
class TriangleSubset {
public:
    TriangleSubset(const WeightedMesh& parent, std::vector<int> members);

    static TriangleSubset empty(const WeightedMesh& parent) { return {parent, {}}; }
    static TriangleSubset full(const WeightedMesh& parent);
    static TriangleSubset from_predicate(const WeightedMesh& parent, const std::function<bool(int)>& keep);
    /// Bit t of `mask` selects triangle t. Requires triangle_count() <= 64.
    static TriangleSubset from_mask(const WeightedMesh& parent, std::uint64_t mask);

    const WeightedMesh& parent() const { return *parent_; }
    const std::vector<int>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    bool contains(int t) const;
    std::vector<char> membership() const;
    TriangleSubset complement() const;

private:
    const WeightedMesh* parent_;
    std::vector<int> members_;  // sorted, unique
};

SubsetMeasures subset_measures(const TriangleSubset& subset);

/// Measures from a per-triangle membership flag vector (size triangle_count()).
SubsetMeasures subset_measures(const WeightedMesh& mesh, std::span<const char> membership);

}  // namespace sticky
