#include "temo/geo/mesh.hpp"

#include <cmath>

#include "temo/util/error.hpp"

namespace temo::geo {

void compute_face_normals(Mesh& mesh) {
    mesh.face_normals.resize(mesh.faces.size());
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& [a, b, c] = mesh.faces[f];
        Vec3 n = cross(mesh.vertices[b] - mesh.vertices[a],
                       mesh.vertices[c] - mesh.vertices[a]);
        double len = norm(n);
        if (len < 1e-12)
            raise(ErrorKind::Parse, "degenerate face with zero area");
        mesh.face_normals[f] = n / len;
    }
}

void normalize_unit_sphere(Mesh& mesh) {
    if (mesh.vertices.empty())
        raise(ErrorKind::Parse, "cannot normalize an empty mesh");
    Vec3 centroid{0, 0, 0};
    for (const Vec3& v : mesh.vertices) centroid += v;
    centroid = centroid / static_cast<double>(mesh.vertices.size());
    double max_norm = 0.0;
    for (Vec3& v : mesh.vertices) {
        v -= centroid;
        max_norm = std::max(max_norm, norm(v));
    }
    if (max_norm < 1e-12)
        raise(ErrorKind::Parse, "all mesh vertices coincide");
    double inv = 1.0 / max_norm;
    for (Vec3& v : mesh.vertices) v *= inv;
    // normals are scale- and translation-invariant; nothing to redo
}

std::pair<int, int> append_translated(Mesh& mesh, const Mesh& other,
                                      const Vec3& offset) {
    int vbase = static_cast<int>(mesh.vertices.size());
    int fbase = static_cast<int>(mesh.faces.size());
    for (const Vec3& v : other.vertices) mesh.vertices.push_back(v + offset);
    for (const auto& f : other.faces)
        mesh.faces.push_back({f[0] + vbase, f[1] + vbase, f[2] + vbase});
    for (const Vec3& n : other.face_normals) mesh.face_normals.push_back(n);
    return {fbase, static_cast<int>(mesh.faces.size())};
}

}  // namespace temo::geo
