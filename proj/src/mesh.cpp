#include "sticky/mesh.hpp"

#include "sticky/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace sticky {

double Metric::factor(Vec2 p) const {
    if (kind == Kind::Euclidean) return scale;
    return scale * 2.0 / (1.0 - (p.x * p.x + p.y * p.y));
}

namespace {

double signed_chart_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Vec2 midpoint(const Vec2& a, const Vec2& b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

Vec2 centroid(const Vec2& a, const Vec2& b, const Vec2& c) {
    return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

void fnv_mix(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
}

}  // namespace

WeightedMesh::WeightedMesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                           std::vector<double> alpha, std::vector<double> beta, Metric metric,
                           std::vector<std::vector<int>> boundary_loops)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      metric_(metric) {
    const auto nv = vertices_.size();
    if (nv < 3 || triangles_.empty()) throw MeshError("mesh needs at least one triangle");
    if (alpha_.size() != nv) throw MeshError("alpha must have one entry per vertex");
    if (beta_.size() != nv) throw MeshError("beta must have one entry per vertex");
    if (!(metric_.scale > 0.0) || !std::isfinite(metric_.scale)) throw MeshError("metric scale must be positive");

    std::vector<char> used(nv, 0);
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int v : tri) {
            if (v < 0 || static_cast<std::size_t>(v) >= nv)
                throw MeshError("triangle " + std::to_string(t) + " references vertex " + std::to_string(v) +
                                " out of range");
            used[static_cast<std::size_t>(v)] = 1;
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
        const double a = signed_chart_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
        if (!(a > 0.0) || !std::isfinite(a))
            throw MeshError("triangle " + std::to_string(t) + " is degenerate or clockwise (area " +
                            std::to_string(a) + ")");
    }
    for (std::size_t v = 0; v < nv; ++v) {
        if (!used[v]) throw MeshError("vertex " + std::to_string(v) + " is not used by any triangle");
        if (metric_.kind == Metric::Kind::Poincare) {
            const auto& p = vertices_[v];
            if (p.x * p.x + p.y * p.y >= 1.0)
                throw MeshError("vertex " + std::to_string(v) + " lies outside the Poincare disk");
        }
    }

    build_topology(std::move(boundary_loops));
    check_weights();
    compute_measures();
}

WeightedMesh WeightedMesh::with_unit_weights(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                                             Metric metric) {
    const auto nv = vertices.size();
    std::vector<double> alpha(nv, 1.0);
    // Boundary flags are only known after the topology pass, so build once with beta = 0
    // placeholders and then fill beta on the boundary.
    std::vector<double> beta(nv, 0.0);
    std::vector<Triangle> tris = triangles;
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : tris)
        for (int i = 0; i < 3; ++i) {
            int a = t[i], b = t[(i + 1) % 3];
            if (a > b) std::swap(a, b);
            ++count[{a, b}];
        }
    for (const auto& [edge, c] : count)
        if (c == 1) {
            if (edge.first >= 0 && static_cast<std::size_t>(edge.first) < nv) beta[edge.first] = 1.0;
            if (edge.second >= 0 && static_cast<std::size_t>(edge.second) < nv) beta[edge.second] = 1.0;
        }
    return WeightedMesh(std::move(vertices), std::move(tris), std::move(alpha), std::move(beta), metric);
}

void WeightedMesh::build_topology(std::vector<std::vector<int>> given_loops) {
    const auto nv = vertices_.size();
    std::map<std::pair<int, int>, int> edge_index;
    triangle_edges_.assign(triangles_.size(), {-1, -1, -1});

    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int i = 0; i < 3; ++i) {
            // Edge opposite to local vertex i.
            int a = tri[(i + 1) % 3];
            int b = tri[(i + 2) % 3];
            const auto key = std::minmax(a, b);
            auto it = edge_index.find({key.first, key.second});
            if (it == edge_index.end()) {
                edge_index.emplace(std::pair{key.first, key.second}, static_cast<int>(edges_.size()));
                triangle_edges_[t][i] = static_cast<int>(edges_.size());
                edges_.push_back({key.first, key.second, static_cast<int>(t), -1});
            } else {
                Edge& e = edges_[static_cast<std::size_t>(it->second)];
                if (e.right >= 0)
                    throw MeshError("edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                                    ") is shared by more than two triangles");
                e.right = static_cast<int>(t);
                triangle_edges_[t][i] = it->second;
            }
        }
    }

    // Directed boundary edges follow the orientation of their triangle, which puts the
    // domain on the left (counterclockwise outer loops).
    std::vector<int> next(nv, -1);
    std::vector<int> next_edge(nv, -1);
    std::size_t boundary_edge_count = 0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int i = 0; i < 3; ++i) {
            const int e = triangle_edges_[t][i];
            if (!edges_[static_cast<std::size_t>(e)].on_boundary()) continue;
            const int a = tri[(i + 1) % 3];
            const int b = tri[(i + 2) % 3];
            if (next[static_cast<std::size_t>(a)] != -1)
                throw MeshError("boundary is not a manifold at vertex " + std::to_string(a));
            next[static_cast<std::size_t>(a)] = b;
            next_edge[static_cast<std::size_t>(a)] = e;
            ++boundary_edge_count;
        }
    }
    if (boundary_edge_count == 0) throw MeshError("mesh has no boundary");

    on_boundary_.assign(nv, 0);
    for (std::size_t v = 0; v < nv; ++v)
        if (next[v] != -1) on_boundary_[v] = 1;
    for (std::size_t v = 0; v < nv; ++v)
        if (next[v] != -1 && !on_boundary_[static_cast<std::size_t>(next[v])])
            throw MeshError("boundary is not closed at vertex " + std::to_string(next[v]));

    std::vector<std::vector<int>> loops;
    std::vector<char> visited(nv, 0);
    for (std::size_t start = 0; start < nv; ++start) {
        if (next[start] == -1 || visited[start]) continue;
        std::vector<int> loop;
        int v = static_cast<int>(start);
        while (!visited[static_cast<std::size_t>(v)]) {
            visited[static_cast<std::size_t>(v)] = 1;
            loop.push_back(v);
            v = next[static_cast<std::size_t>(v)];
            if (v < 0) throw MeshError("boundary loop is open");
        }
        if (v != static_cast<int>(start)) throw MeshError("boundary loops are not simple cycles");
        loops.push_back(std::move(loop));
    }

    if (!given_loops.empty()) {
        // Every directed or reversed boundary edge must be traversed exactly once.
        std::map<std::pair<int, int>, int> seen;
        for (const auto& loop : given_loops) {
            if (loop.size() < 3) throw MeshError("boundary loop with fewer than three vertices");
            for (std::size_t i = 0; i < loop.size(); ++i) {
                const int a = loop[i];
                const int b = loop[(i + 1) % loop.size()];
                if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= nv || static_cast<std::size_t>(b) >= nv)
                    throw MeshError("boundary loop references a vertex out of range");
                const auto key = std::minmax(a, b);
                auto it = edge_index.find({key.first, key.second});
                if (it == edge_index.end() || !edges_[static_cast<std::size_t>(it->second)].on_boundary())
                    throw MeshError("boundary loop edge (" + std::to_string(a) + "," + std::to_string(b) +
                                    ") is not a boundary edge");
                if (++seen[{key.first, key.second}] > 1)
                    throw MeshError("boundary loops traverse an edge twice");
            }
        }
        if (seen.size() != boundary_edge_count) throw MeshError("boundary loops do not cover the boundary");
        // Keep the given cycles but orient each one counterclockwise with respect to the domain.
        for (auto& loop : given_loops) {
            const int a = loop[0];
            const int b = loop[1];
            if (next[static_cast<std::size_t>(a)] != b) std::reverse(loop.begin(), loop.end());
            for (std::size_t i = 0; i < loop.size(); ++i)
                if (next[static_cast<std::size_t>(loop[i])] != loop[(i + 1) % loop.size()])
                    throw MeshError("boundary loop is not consistently oriented");
        }
        loops = std::move(given_loops);
    }
    boundary_loops_ = std::move(loops);

    for (const auto& loop : boundary_loops_) {
        const std::size_t first = boundary_edges_.size();
        for (int v : loop) {
            boundary_vertices_.push_back(v);
            boundary_edges_.push_back(next_edge[static_cast<std::size_t>(v)]);
        }
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const int in = boundary_edges_[first + (i + n - 1) % n];
            const int out = boundary_edges_[first + i];
            corners_.push_back({loop[i], in, out});
        }
    }
    for (std::size_t v = 0; v < nv; ++v)
        if (!on_boundary_[v]) interior_vertices_.push_back(static_cast<int>(v));
}

void WeightedMesh::check_weights() const {
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
        if (!(alpha_[v] >= 0.0) || !std::isfinite(alpha_[v]))
            throw MeshError("alpha at vertex " + std::to_string(v) + " must be finite and nonnegative");
        if (!(beta_[v] >= 0.0) || !std::isfinite(beta_[v]))
            throw MeshError("beta at vertex " + std::to_string(v) + " must be finite and nonnegative");
        if (!on_boundary_[v] && beta_[v] != 0.0)
            throw MeshError("beta is set on interior vertex " + std::to_string(v));
    }
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        if (alpha_[tri[0]] <= 0.0 && alpha_[tri[1]] <= 0.0 && alpha_[tri[2]] <= 0.0)
            throw MeshError("alpha vanishes on all vertices of triangle " + std::to_string(t));
    }
    for (int e : boundary_edges_) {
        const auto& edge = edges_[static_cast<std::size_t>(e)];
        if (beta_[edge.v0] <= 0.0 && beta_[edge.v1] <= 0.0)
            throw MeshError("beta vanishes on both ends of boundary edge (" + std::to_string(edge.v0) + "," +
                            std::to_string(edge.v1) + ")");
    }
}

void WeightedMesh::compute_measures() {
    const auto nt = triangles_.size();
    const auto ne = edges_.size();
    metric_area_.resize(nt);
    weighted_area_.resize(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tri = triangles_[t];
        const auto& a = vertices_[tri[0]];
        const auto& b = vertices_[tri[1]];
        const auto& c = vertices_[tri[2]];
        const double phi = metric_.factor(centroid(a, b, c));
        metric_area_[t] = signed_chart_area(a, b, c) * phi * phi;
        weighted_area_[t] = metric_area_[t] * triangle_alpha(static_cast<int>(t));
    }
    metric_length_.resize(ne);
    weighted_cut_.resize(ne);
    weighted_arc_.assign(ne, 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
        const auto& edge = edges_[e];
        const auto& a = vertices_[edge.v0];
        const auto& b = vertices_[edge.v1];
        const double chart = std::hypot(b.x - a.x, b.y - a.y);
        metric_length_[e] = chart * metric_.factor(midpoint(a, b));
        weighted_cut_[e] = metric_length_[e] * edge_alpha(static_cast<int>(e));
        if (edge.on_boundary()) weighted_arc_[e] = metric_length_[e] * edge_beta(static_cast<int>(e));
    }
    bulk_measure_ = 0.0;
    for (double w : weighted_area_) bulk_measure_ += w;
    boundary_measure_ = 0.0;
    for (int e : boundary_edges_) boundary_measure_ += weighted_arc_[static_cast<std::size_t>(e)];
}

double WeightedMesh::chart_area(int t) const {
    const auto& tri = triangles_[static_cast<std::size_t>(t)];
    return signed_chart_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double WeightedMesh::triangle_alpha(int t) const {
    const auto& tri = triangles_[static_cast<std::size_t>(t)];
    return (alpha_[tri[0]] + alpha_[tri[1]] + alpha_[tri[2]]) / 3.0;
}

double WeightedMesh::edge_alpha(int e) const {
    const auto& edge = edges_[static_cast<std::size_t>(e)];
    return 0.5 * (alpha_[edge.v0] + alpha_[edge.v1]);
}

double WeightedMesh::edge_beta(int e) const {
    const auto& edge = edges_[static_cast<std::size_t>(e)];
    return 0.5 * (beta_[edge.v0] + beta_[edge.v1]);
}

double WeightedMesh::total_metric_area() const {
    double sum = 0.0;
    for (double a : metric_area_) sum += a;
    return sum;
}

double WeightedMesh::total_metric_perimeter() const {
    double sum = 0.0;
    for (int e : boundary_edges_) sum += metric_length_[static_cast<std::size_t>(e)];
    return sum;
}

std::uint64_t WeightedMesh::hash() const {
    std::uint64_t h = 14695981039346656037ULL;
    for (const auto& v : vertices_) {
        fnv_mix(h, &v.x, sizeof v.x);
        fnv_mix(h, &v.y, sizeof v.y);
    }
    for (const auto& t : triangles_) fnv_mix(h, t.data(), sizeof(int) * 3);
    fnv_mix(h, alpha_.data(), sizeof(double) * alpha_.size());
    fnv_mix(h, beta_.data(), sizeof(double) * beta_.size());
    const int kind = static_cast<int>(metric_.kind);
    fnv_mix(h, &kind, sizeof kind);
    fnv_mix(h, &metric_.scale, sizeof metric_.scale);
    return h;
}

WeightedMesh with_weights(const WeightedMesh& mesh, std::vector<double> alpha, std::vector<double> beta) {
    return WeightedMesh(mesh.vertices(), mesh.triangles(), std::move(alpha), std::move(beta), mesh.metric(),
                        mesh.boundary_loops());
}

WeightedMesh normalize_weights(const WeightedMesh& mesh) {
    const double total = mesh.bulk_measure() + mesh.boundary_measure();
    if (!(total > 0.0)) throw MeshError("cannot normalize weights with zero total measure");
    const double c = 1.0 / total;
    std::vector<double> alpha = mesh.alpha();
    std::vector<double> beta = mesh.beta();
    for (double& a : alpha) a *= c;
    for (double& b : beta) b *= c;
    return with_weights(mesh, std::move(alpha), std::move(beta));
}

WeightedMesh scale_metric(const WeightedMesh& mesh, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw std::invalid_argument("metric scale factor must be positive");
    if (mesh.metric().kind == Metric::Kind::Euclidean && mesh.metric().scale == 1.0) {
        std::vector<Vec2> vertices = mesh.vertices();
        for (auto& v : vertices) {
            v.x *= factor;
            v.y *= factor;
        }
        return WeightedMesh(std::move(vertices), mesh.triangles(), mesh.alpha(), mesh.beta(), mesh.metric(),
                            mesh.boundary_loops());
    }
    Metric metric = mesh.metric();
    metric.scale *= factor;
    return WeightedMesh(mesh.vertices(), mesh.triangles(), mesh.alpha(), mesh.beta(), metric,
                        mesh.boundary_loops());
}

WeightedMesh scale_metric_preserving_measure(const WeightedMesh& mesh, double factor) {
    const WeightedMesh scaled = scale_metric(mesh, factor);
    std::vector<double> alpha = mesh.alpha();
    std::vector<double> beta = mesh.beta();
    for (double& a : alpha) a /= factor * factor;
    for (double& b : beta) b /= factor;
    return with_weights(scaled, std::move(alpha), std::move(beta));
}

WeightedMesh with_constant_weights(const WeightedMesh& mesh, double alpha_bar) {
    if (!(alpha_bar > 0.0 && alpha_bar < 1.0)) throw std::invalid_argument("alpha_bar must lie in (0,1)");
    const double a = alpha_bar / mesh.total_metric_area();
    const double b = (1.0 - alpha_bar) / mesh.total_metric_perimeter();
    std::vector<double> alpha(mesh.vertex_count(), a);
    std::vector<double> beta(mesh.vertex_count(), 0.0);
    for (int v : mesh.boundary_vertices()) beta[static_cast<std::size_t>(v)] = b;
    return with_weights(mesh, std::move(alpha), std::move(beta));
}

WeightedMesh with_random_weights(const WeightedMesh& mesh, std::uint64_t seed, double lo, double hi) {
    if (!(lo > 0.0 && hi >= lo)) throw std::invalid_argument("random weight range must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> alpha(mesh.vertex_count());
    std::vector<double> beta(mesh.vertex_count(), 0.0);
    for (auto& a : alpha) a = dist(rng);
    for (int v : mesh.boundary_vertices()) beta[static_cast<std::size_t>(v)] = dist(rng);
    return normalize_weights(with_weights(mesh, std::move(alpha), std::move(beta)));
}

TriangleSubset::TriangleSubset(const WeightedMesh& parent, std::vector<int> members)
    : parent_(&parent), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
        throw std::invalid_argument("triangle subset contains duplicates");
    if (!members_.empty() &&
        (members_.front() < 0 || static_cast<std::size_t>(members_.back()) >= parent.triangle_count()))
        throw std::invalid_argument("triangle subset index out of range");
}

TriangleSubset TriangleSubset::full(const WeightedMesh& parent) {
    std::vector<int> all(parent.triangle_count());
    for (std::size_t t = 0; t < all.size(); ++t) all[t] = static_cast<int>(t);
    return {parent, std::move(all)};
}

TriangleSubset TriangleSubset::from_predicate(const WeightedMesh& parent, const std::function<bool(int)>& keep) {
    std::vector<int> members;
    for (std::size_t t = 0; t < parent.triangle_count(); ++t)
        if (keep(static_cast<int>(t))) members.push_back(static_cast<int>(t));
    return {parent, std::move(members)};
}

TriangleSubset TriangleSubset::from_mask(const WeightedMesh& parent, std::uint64_t mask) {
    if (parent.triangle_count() > 64) throw std::invalid_argument("mask subsets need at most 64 triangles");
    std::vector<int> members;
    for (std::size_t t = 0; t < parent.triangle_count(); ++t)
        if (mask >> t & 1U) members.push_back(static_cast<int>(t));
    return {parent, std::move(members)};
}

bool TriangleSubset::contains(int t) const { return std::binary_search(members_.begin(), members_.end(), t); }

std::vector<char> TriangleSubset::membership() const {
    std::vector<char> in(parent_->triangle_count(), 0);
    for (int t : members_) in[static_cast<std::size_t>(t)] = 1;
    return in;
}

TriangleSubset TriangleSubset::complement() const {
    const auto in = membership();
    std::vector<int> rest;
    for (std::size_t t = 0; t < in.size(); ++t)
        if (!in[t]) rest.push_back(static_cast<int>(t));
    return {*parent_, std::move(rest)};
}

SubsetMeasures subset_measures(const WeightedMesh& mesh, std::span<const char> in) {
    if (in.size() != mesh.triangle_count()) throw std::invalid_argument("membership size mismatch");
    SubsetMeasures m;
    for (std::size_t t = 0; t < in.size(); ++t)
        if (in[t]) m.bulk += mesh.weighted_area(static_cast<int>(t));
    const auto& edges = mesh.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& edge = edges[e];
        if (edge.on_boundary()) continue;
        if (in[static_cast<std::size_t>(edge.left)] != in[static_cast<std::size_t>(edge.right)])
            m.interior_cut += mesh.weighted_cut(static_cast<int>(e));
    }
    for (int e : mesh.boundary_edges())
        if (in[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].left)]) m.exterior_arc += mesh.weighted_arc(e);
    for (const auto& corner : mesh.boundary_corners()) {
        const bool a = in[static_cast<std::size_t>(edges[static_cast<std::size_t>(corner.incoming_edge)].left)] != 0;
        const bool b = in[static_cast<std::size_t>(edges[static_cast<std::size_t>(corner.outgoing_edge)].left)] != 0;
        if (a != b) m.arc_endpoints += mesh.beta()[static_cast<std::size_t>(corner.vertex)];
    }
    return m;
}

SubsetMeasures subset_measures(const TriangleSubset& subset) {
    const auto in = subset.membership();
    return subset_measures(subset.parent(), in);
}

}  // namespace sticky
