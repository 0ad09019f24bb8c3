#include "sticky/mesh_generators.hpp"

#include "sticky/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sticky {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct RingVertex {
    int index;
    double angle;
};

using Ring = std::vector<RingVertex>;

class Builder {
public:
    int add_vertex(Vec2 p) {
        vertices.push_back(p);
        return static_cast<int>(vertices.size()) - 1;
    }

    void add_triangle(int a, int b, int c) {
        const Vec2& pa = vertices[static_cast<std::size_t>(a)];
        const Vec2& pb = vertices[static_cast<std::size_t>(b)];
        const Vec2& pc = vertices[static_cast<std::size_t>(c)];
        const double area2 = (pb.x - pa.x) * (pc.y - pa.y) - (pc.x - pa.x) * (pb.y - pa.y);
        if (area2 < 0.0) std::swap(b, c);
        triangles.push_back({a, b, c});
    }

    // Fan from a center vertex to a closed ring.
    void fan(int center, const Ring& ring) {
        const std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; ++i) add_triangle(center, ring[i].index, ring[(i + 1) % n].index);
    }

    // Triangulates the annular strip between two closed rings sorted by angle, advancing
    // along whichever ring has the smaller next angle.
    void stitch(const Ring& inner, const Ring& outer) {
        const std::size_t p = inner.size();
        const std::size_t q = outer.size();
        const double a0 = inner[0].angle;

        std::size_t j0 = 0;
        double best = kTwoPi;
        for (std::size_t j = 0; j < q; ++j) {
            const double d = std::abs(std::remainder(outer[j].angle - a0, kTwoPi));
            if (d < best) {
                best = d;
                j0 = j;
            }
        }
        auto unwrap = [](const Ring& ring, std::size_t first, double origin) {
            const std::size_t n = ring.size();
            std::vector<double> out(n + 1);
            out[0] = origin;
            for (std::size_t k = 1; k <= n; ++k) {
                double d = std::fmod(ring[(first + k) % n].angle - ring[(first + k - 1) % n].angle, kTwoPi);
                if (d <= 0.0) d += kTwoPi;
                out[k] = out[k - 1] + d;
            }
            return out;
        };
        const std::vector<double> inner_unwrapped = unwrap(inner, 0, a0);
        const std::vector<double> outer_unwrapped =
            unwrap(outer, j0, a0 + std::remainder(outer[j0].angle - a0, kTwoPi));
        auto inner_angle = [&](std::size_t k) { return inner_unwrapped[k]; };
        auto outer_angle = [&](std::size_t k) { return outer_unwrapped[k]; };
        auto inner_index = [&](std::size_t k) { return inner[k % p].index; };
        auto outer_index = [&](std::size_t k) { return outer[(j0 + k) % q].index; };

        std::size_t i = 0;
        std::size_t j = 0;
        while (i < p || j < q) {
            const bool advance_inner = (j == q) || (i < p && inner_angle(i + 1) < outer_angle(j + 1));
            if (advance_inner) {
                add_triangle(inner_index(i), outer_index(j), inner_index(i + 1));
                ++i;
            } else {
                add_triangle(inner_index(i), outer_index(j), outer_index(j + 1));
                ++j;
            }
        }
    }

    std::vector<Vec2> vertices;
    std::vector<Triangle> triangles;
};

Ring make_ring(Builder& b, Vec2 center, double radius, int count, double offset) {
    Ring ring;
    ring.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double angle = offset + kTwoPi * i / count;
        const int idx = b.add_vertex({center.x + radius * std::cos(angle), center.y + radius * std::sin(angle)});
        ring.push_back({idx, angle});
    }
    return ring;
}

void check_level(int level) {
    if (level < 0) throw std::invalid_argument("refinement level must be nonnegative");
    if (level > 9) throw std::invalid_argument("refinement level above 9 is not supported");
}

}  // namespace

double poincare_unit_ball_radius() { return std::tanh(0.5); }

WeightedMesh generate_disk_mesh(int refinement_level, Geometry geometry) {
    check_level(refinement_level);
    const int rings = 1 << refinement_level;
    const double radius = geometry == Geometry::Euclidean ? 1.0 : poincare_unit_ball_radius();
    const double offset = 0.5 * std::numbers::pi;

    Builder b;
    const int center = b.add_vertex({0.0, 0.0});
    Ring previous = make_ring(b, {0.0, 0.0}, radius / rings, 6, offset);
    b.fan(center, previous);
    for (int j = 2; j <= rings; ++j) {
        Ring ring = make_ring(b, {0.0, 0.0}, radius * j / rings, 6 * j, offset);
        b.stitch(previous, ring);
        previous = std::move(ring);
    }
    const Metric metric = geometry == Geometry::Euclidean ? Metric::euclidean() : Metric::poincare();
    return WeightedMesh::with_unit_weights(std::move(b.vertices), std::move(b.triangles), metric);
}

WeightedMesh generate_ring_disk(int inner_count, int outer_count, Geometry geometry) {
    if (inner_count < 3 || outer_count < 3) throw std::invalid_argument("ring disk needs at least 3 vertices per ring");
    const double radius = geometry == Geometry::Euclidean ? 1.0 : poincare_unit_ball_radius();
    const double offset = 0.5 * std::numbers::pi;
    Builder b;
    const int center = b.add_vertex({0.0, 0.0});
    // Half-step offset on the inner ring keeps the strip triangles away from slivers.
    const Ring inner = make_ring(b, {0.0, 0.0}, 0.5 * radius, inner_count, offset + std::numbers::pi / inner_count);
    const Ring outer = make_ring(b, {0.0, 0.0}, radius, outer_count, offset);
    b.fan(center, inner);
    b.stitch(inner, outer);
    const Metric metric = geometry == Geometry::Euclidean ? Metric::euclidean() : Metric::poincare();
    return WeightedMesh::with_unit_weights(std::move(b.vertices), std::move(b.triangles), metric);
}

WeightedMesh generate_small_disk(int triangle_count, Geometry geometry) {
    if (triangle_count < 9 || triangle_count > 40)
        throw std::invalid_argument("small disk supports 9 to 40 triangles");
    const int inner = std::max(3, triangle_count / 4);
    const int outer = triangle_count - 2 * inner;
    return generate_ring_disk(inner, outer, geometry);
}

WeightedMesh generate_dumbbell_mesh(double ball_radius, double neck_width, double neck_length, int refinement_level) {
    check_level(refinement_level);
    if (!(ball_radius > 0.0)) throw std::invalid_argument("dumbbell ball radius must be positive");
    if (!(neck_width > 0.0) || !(neck_width < ball_radius))
        throw std::invalid_argument("dumbbell neck width must lie in (0, ball_radius)");
    if (!(neck_length > 0.0)) throw std::invalid_argument("dumbbell neck length must be positive");

    const int rings = 1 << refinement_level;
    const double spacing = kTwoPi / (6 * rings);
    const double attach = std::asin(0.5 * neck_width / ball_radius);
    const int arc_segments = std::max(1, static_cast<int>(std::ceil(2.0 * attach / spacing)));
    const double cx = ball_radius + 0.5 * neck_length;

    Builder b;

    // Left ball, neck attachment around angle 0. Returns the attachment arc sorted by y.
    auto build_ball = [&](double sign) {
        const Vec2 c{-sign * cx, 0.0};
        auto place = [&](double angle, double r) {
            return Vec2{c.x + sign * r * std::cos(angle), c.y + r * std::sin(angle)};
        };
        auto ring_at = [&](double r, int count) {
            Ring ring;
            for (int i = 0; i < count; ++i) {
                const double angle = std::remainder(kTwoPi * i / count, kTwoPi);
                ring.push_back({b.add_vertex(place(angle, r)), angle});
            }
            std::sort(ring.begin(), ring.end(), [](const RingVertex& u, const RingVertex& v) { return u.angle < v.angle; });
            return ring;
        };

        const int center = b.add_vertex(c);
        Ring previous;
        for (int j = 1; j < rings; ++j) {
            Ring ring = ring_at(ball_radius * j / rings, 6 * j);
            if (j == 1)
                b.fan(center, ring);
            else
                b.stitch(previous, ring);
            previous = std::move(ring);
        }

        Ring outer;
        std::vector<RingVertex> arc;
        for (int i = 0; i < 6 * rings; ++i) {
            const double angle = std::remainder(kTwoPi * i / (6 * rings), kTwoPi);
            if (std::abs(angle) > attach + 0.5 * spacing)
                outer.push_back({b.add_vertex(place(angle, ball_radius)), angle});
        }
        for (int k = 0; k <= arc_segments; ++k) {
            const double angle = -attach + 2.0 * attach * k / arc_segments;
            RingVertex rv{b.add_vertex(place(angle, ball_radius)), angle};
            outer.push_back(rv);
            arc.push_back(rv);
        }
        std::sort(outer.begin(), outer.end(), [](const RingVertex& u, const RingVertex& v) { return u.angle < v.angle; });
        if (rings == 1)
            b.fan(center, outer);
        else
            b.stitch(previous, outer);
        return arc;  // ascending angle == ascending y
    };

    const auto left_arc = build_ball(1.0);
    const auto right_arc = build_ball(-1.0);

    const double h = ball_radius / rings;
    const int columns = std::max(1, static_cast<int>(std::lround(neck_length / h)));
    std::vector<std::vector<int>> grid(left_arc.size());
    for (std::size_t r = 0; r < left_arc.size(); ++r) {
        const int li = left_arc[r].index;
        const int ri = right_arc[r].index;
        const Vec2 pl = b.vertices[static_cast<std::size_t>(li)];
        const Vec2 pr = b.vertices[static_cast<std::size_t>(ri)];
        grid[r].push_back(li);
        for (int col = 1; col < columns; ++col) {
            const double s = static_cast<double>(col) / columns;
            grid[r].push_back(b.add_vertex({pl.x + s * (pr.x - pl.x), pl.y}));
        }
        grid[r].push_back(ri);
    }
    for (std::size_t r = 0; r + 1 < grid.size(); ++r)
        for (int col = 0; col < columns; ++col) {
            const int a = grid[r][col];
            const int bb = grid[r][col + 1];
            const int c = grid[r + 1][col + 1];
            const int d = grid[r + 1][col];
            b.add_triangle(a, bb, c);
            b.add_triangle(a, c, d);
        }

    return WeightedMesh::with_unit_weights(std::move(b.vertices), std::move(b.triangles));
}

WeightedMesh generate_square_disk_dumbbell() {
    Builder b;
    // Square [-3,-1] x [-1,1], fanned from its center.
    const int sc = b.add_vertex({-2.0, 0.0});
    const Ring square = {
        {b.add_vertex({-1.0, -0.3}), 0},  {b.add_vertex({-1.0, 0.3}), 0},  {b.add_vertex({-1.0, 1.0}), 0},
        {b.add_vertex({-3.0, 1.0}), 0},   {b.add_vertex({-3.0, -1.0}), 0}, {b.add_vertex({-1.0, -1.0}), 0},
    };
    b.fan(sc, square);

    // Octagon inscribed in a circle of area 4, with two vertices at y = +-0.3 facing the neck.
    const double radius = 2.0 / std::sqrt(std::numbers::pi);
    const double attach = std::asin(0.3 / radius);
    const double cx = radius * std::cos(attach);  // neck spans x in [-1, 0]
    const int dc = b.add_vertex({cx, 0.0});
    Ring disk;
    disk.push_back({b.add_vertex({0.0, 0.3}), 0});
    const double start = std::numbers::pi - attach;
    const double sweep = kTwoPi - 2.0 * attach;
    for (int k = 1; k <= 6; ++k) {
        const double angle = start - sweep * k / 7.0;
        disk.push_back({b.add_vertex({cx + radius * std::cos(angle), radius * std::sin(angle)}), 0});
    }
    disk.push_back({b.add_vertex({0.0, -0.3}), 0});
    std::reverse(disk.begin(), disk.end());
    b.fan(dc, disk);

    // Neck quad between x = -1 and x = 0.
    b.add_triangle(square[0].index, disk[0].index, disk[7].index);
    b.add_triangle(square[0].index, disk[7].index, square[1].index);

    return WeightedMesh::with_unit_weights(std::move(b.vertices), std::move(b.triangles));
}

}  // namespace sticky
