#pragma once

#include <string>

#include "temo/geo/mesh.hpp"

namespace temo::geo {

// Wavefront OBJ. Reads v and f records; vn/vt and other records are
// ignored. Faces with more than three vertices are fan-triangulated.
// Face normals are computed on load.
Mesh load_obj(const std::string& path);

void save_obj(const Mesh& mesh, const std::string& path);

}  // namespace temo::geo
