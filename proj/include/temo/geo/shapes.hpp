#pragma once

#include "temo/geo/mesh.hpp"

namespace temo::geo {

// Latitude-longitude sphere centered at the origin. stacks >= 2, slices >= 3.
Mesh make_uv_sphere(double radius, int stacks, int slices);

// Two triangles covering [-half, half]^2 in the z = 0 plane, normal +z.
Mesh make_quad(double half);

}  // namespace temo::geo
