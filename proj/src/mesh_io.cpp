#include "usrecon/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace usrecon {

namespace {

// Shortest round-trippable decimal form; stable across runs.
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_ply(const std::string& path, const TriangleMesh& mesh,
               const std::optional<MeshScaleInfo>& scale) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_ply: cannot open " + path);
    out << "ply\nformat ascii 1.0\n";
    if (scale) {
        out << "comment unit_from_mm_scale " << fmt(scale->unit_from_mm.scale) << "\n";
        out << "comment unit_from_mm_translation " << fmt(scale->unit_from_mm.translation.x())
            << " " << fmt(scale->unit_from_mm.translation.y()) << " "
            << fmt(scale->unit_from_mm.translation.z()) << "\n";
    }
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "element face " << mesh.triangles.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";
    for (const auto& v : mesh.vertices)
        out << fmt(v.x()) << " " << fmt(v.y()) << " " << fmt(v.z()) << "\n";
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    if (!out) throw std::runtime_error("write_ply: write failed for " + path);
}

void write_obj(const std::string& path, const TriangleMesh& mesh,
               const std::optional<MeshScaleInfo>& scale) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_obj: cannot open " + path);
    if (scale) {
        out << "# unit_from_mm_scale " << fmt(scale->unit_from_mm.scale) << "\n";
        out << "# unit_from_mm_translation " << fmt(scale->unit_from_mm.translation.x()) << " "
            << fmt(scale->unit_from_mm.translation.y()) << " "
            << fmt(scale->unit_from_mm.translation.z()) << "\n";
    }
    for (const auto& v : mesh.vertices)
        out << "v " << fmt(v.x()) << " " << fmt(v.y()) << " " << fmt(v.z()) << "\n";
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    if (!out) throw std::runtime_error("write_obj: write failed for " + path);
}

TriangleMesh read_ply(const std::string& path, std::optional<MeshScaleInfo>* scale) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_ply: cannot open " + path);

    std::string line;
    std::getline(in, line);
    if (line != "ply") throw std::runtime_error("read_ply: not a PLY file: " + path);

    size_t n_vertices = 0, n_faces = 0;
    MeshScaleInfo info;
    bool has_scale = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        if (token == "end_header") break;
        if (token == "format") {
            std::string kind;
            ls >> kind;
            if (kind != "ascii") throw std::runtime_error("read_ply: only ascii supported");
        } else if (token == "element") {
            std::string what;
            size_t count = 0;
            ls >> what >> count;
            if (what == "vertex") n_vertices = count;
            if (what == "face") n_faces = count;
        } else if (token == "comment") {
            std::string key;
            ls >> key;
            if (key == "unit_from_mm_scale") {
                ls >> info.unit_from_mm.scale;
                has_scale = true;
            } else if (key == "unit_from_mm_translation") {
                ls >> info.unit_from_mm.translation.x() >> info.unit_from_mm.translation.y() >>
                    info.unit_from_mm.translation.z();
                has_scale = true;
            }
        }
    }

    TriangleMesh mesh;
    mesh.vertices.resize(n_vertices);
    for (auto& v : mesh.vertices) {
        if (!(in >> v.x() >> v.y() >> v.z()))
            throw std::runtime_error("read_ply: truncated vertex list in " + path);
    }
    mesh.triangles.resize(n_faces);
    for (auto& t : mesh.triangles) {
        int arity = 0;
        if (!(in >> arity >> t[0] >> t[1] >> t[2]) || arity != 3)
            throw std::runtime_error("read_ply: only triangle faces supported in " + path);
    }
    if (scale) *scale = has_scale ? std::optional<MeshScaleInfo>(info) : std::nullopt;
    return mesh;
}

}  // namespace usrecon
