#include "sticky/mesh_io.hpp"

#include "sticky/error.hpp"

#include <fstream>
#include <string>

namespace sticky {

using nlohmann::json;

json mesh_to_json(const WeightedMesh& mesh) {
    json doc;
    json vertices = json::array();
    for (const auto& v : mesh.vertices()) vertices.push_back({v.x, v.y});
    json triangles = json::array();
    for (const auto& t : mesh.triangles()) triangles.push_back({t[0], t[1], t[2]});
    json beta = json::object();
    for (int v : mesh.boundary_vertices()) beta[std::to_string(v)] = mesh.beta()[static_cast<std::size_t>(v)];

    doc["vertices"] = std::move(vertices);
    doc["triangles"] = std::move(triangles);
    doc["boundary_loops"] = mesh.boundary_loops();
    doc["alpha"] = mesh.alpha();
    doc["beta"] = std::move(beta);

    const auto& metric = mesh.metric();
    if (metric.kind == Metric::Kind::Euclidean) {
        if (metric.scale == 1.0)
            doc["metric"] = "euclidean";
        else
            doc["metric"] = {{"euclidean", true}, {"scale", metric.scale}};
    } else {
        json m = {{"conformal", "poincare"}};
        if (metric.scale != 1.0) m["scale"] = metric.scale;
        doc["metric"] = std::move(m);
    }
    return doc;
}

WeightedMesh mesh_from_json(const json& doc) {
    try {
        std::vector<Vec2> vertices;
        for (const auto& v : doc.at("vertices")) {
            if (v.size() != 2) throw MeshError("vertex entries must be [x, y]");
            vertices.push_back({v[0].get<double>(), v[1].get<double>()});
        }
        std::vector<Triangle> triangles;
        for (const auto& t : doc.at("triangles")) {
            if (t.size() != 3) throw MeshError("triangle entries must be [i, j, k]");
            triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
        }
        std::vector<std::vector<int>> loops = doc.value("boundary_loops", std::vector<std::vector<int>>{});
        std::vector<double> alpha = doc.at("alpha").get<std::vector<double>>();
        std::vector<double> beta(vertices.size(), 0.0);
        for (const auto& [key, value] : doc.at("beta").items()) {
            const int v = std::stoi(key);
            if (v < 0 || static_cast<std::size_t>(v) >= vertices.size())
                throw MeshError("beta key " + key + " is not a vertex index");
            beta[static_cast<std::size_t>(v)] = value.get<double>();
        }

        Metric metric;
        const json& m = doc.value("metric", json("euclidean"));
        if (m.is_string()) {
            if (m.get<std::string>() != "euclidean") throw MeshError("unknown metric " + m.get<std::string>());
        } else if (m.is_object()) {
            if (m.contains("conformal")) {
                if (m.at("conformal").get<std::string>() != "poincare")
                    throw MeshError("unknown conformal model " + m.at("conformal").get<std::string>());
                metric.kind = Metric::Kind::Poincare;
            }
            metric.scale = m.value("scale", 1.0);
        } else {
            throw MeshError("metric must be a string or an object");
        }
        return WeightedMesh(std::move(vertices), std::move(triangles), std::move(alpha), std::move(beta), metric,
                            std::move(loops));
    } catch (const json::exception& e) {
        throw MeshError(std::string("malformed mesh document: ") + e.what());
    }
}

void save_mesh(const WeightedMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mesh file " + path.string());
    out << mesh_to_json(mesh).dump(1) << '\n';
}

WeightedMesh load_mesh(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("cannot parse mesh file " + path.string() + ": " + e.what());
    }
    return mesh_from_json(doc);
}

}  // namespace sticky
