#pragma once

#include <utility>

#include "temo/geo/bvh.hpp"
#include "temo/geo/camera.hpp"
#include "temo/geo/mesh.hpp"
#include "temo/geo/raycast.hpp"

namespace temo::geo {

// Casts one ray per pixel and records the nearest intersection. The pixel
// grid is partitioned into row blocks, one per worker; every pixel is
// written by exactly one worker, so results do not depend on worker count.
std::pair<IntersectionBuffer, HitMap> render_geometry_pass(
    const Mesh& mesh, const Bvh& bvh, const CameraPose& pose, std::size_t h,
    std::size_t w, int workers = 1);

// Convenience overload that builds the acceleration structure itself.
std::pair<IntersectionBuffer, HitMap> render_geometry_pass(
    const Mesh& mesh, const CameraPose& pose, std::size_t h, std::size_t w,
    int workers = 1);

}  // namespace temo::geo
