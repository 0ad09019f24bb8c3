#pragma once

#include "sticky/mesh.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace sticky {

/// Mesh file layout:
///   {"vertices": [[x,y],...], "triangles": [[i,j,k],...], "boundary_loops": [[...],...],
///    "alpha": [...], "beta": {"<vertex>": value, ...},
///    "metric": "euclidean" | {"conformal": "poincare"}}
/// A Poincare metric with a non-unit scale is written as {"conformal":"poincare","scale":s}.
nlohmann::json mesh_to_json(const WeightedMesh& mesh);
WeightedMesh mesh_from_json(const nlohmann::json& doc);

void save_mesh(const WeightedMesh& mesh, const std::filesystem::path& path);
/// Throws std::runtime_error when the file cannot be opened or parsed.
WeightedMesh load_mesh(const std::filesystem::path& path);

}  // namespace sticky
