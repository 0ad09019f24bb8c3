#pragma once

#include "sticky/mesh.hpp"

namespace sticky {

/// Radius of the hyperbolic unit ball in the Poincare-disk chart, tanh(1/2).
double poincare_unit_ball_radius();

/// Concentric-ring triangulation of the unit disk (Euclidean) or of the hyperbolic unit
/// ball (Poincare chart disk of radius tanh(1/2) with conformal metric). Level L uses
/// 2^L rings, ring j carrying 6j vertices; one ring vertex sits on the positive y axis so
/// the y axis is a union of mesh edges. Weights are alpha = beta = 1 (not normalized).
WeightedMesh generate_disk_mesh(int refinement_level, Geometry geometry);

/// Coarse disk for exhaustive enumeration: a center vertex, an inner ring of
/// `inner_count` vertices at half radius and an outer ring of `outer_count` boundary
/// vertices. Triangle count is 2*inner_count + outer_count. Unit weights.
WeightedMesh generate_ring_disk(int inner_count, int outer_count, Geometry geometry);

/// Coarse disk with the requested number of triangles (9..40), built by
/// generate_ring_disk with inner ring size max(3, triangle_count/4).
WeightedMesh generate_small_disk(int triangle_count, Geometry geometry);

/// Two disks of radius `ball_radius` joined by a straight neck of width `neck_width`
/// whose length (distance between the disks along the axis) is `neck_length`.
/// Throws std::invalid_argument unless 0 < neck_width < ball_radius and neck_length > 0.
WeightedMesh generate_dumbbell_mesh(double ball_radius, double neck_width, double neck_length,
                                    int refinement_level);

/// Sixteen-triangle dumbbell with a 2x2 square on the left, a short neck, and an octagonal
/// disk of equal area on the right. Small enough for exhaustive enumeration.
WeightedMesh generate_square_disk_dumbbell();

}  // namespace sticky
