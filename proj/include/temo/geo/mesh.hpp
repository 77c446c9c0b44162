#pragma once

#include <array>
#include <utility>
#include <vector>

#include "temo/util/vec3.hpp"

namespace temo::geo {

// Triangle mesh. Face indices are 0-based internally; the OBJ loader
// converts from the format's 1-based indices.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<Vec3> face_normals;  // unit length, one per face
};

// Normalized cross product of the edge vectors, for every face.
void compute_face_normals(Mesh& mesh);

// Translates by -centroid (vertex mean), then scales by 1/max vertex norm.
// Idempotent; raises when all vertices coincide.
void normalize_unit_sphere(Mesh& mesh);

// Appends a translated copy of other into mesh (multi-object scenes are
// built from per-object meshes placed side by side). Returns the face id
// range [first, last) the copy occupies.
std::pair<int, int> append_translated(Mesh& mesh, const Mesh& other,
                                      const Vec3& offset);

}  // namespace temo::geo
