#pragma once

#include <cstdint>
#include <vector>

#include "temo/util/vec3.hpp"

namespace temo::geo {

struct CameraPose {
    Vec3 position{0, 0, 2.0};
    Vec3 look_at{0, 0, 0};
    Vec3 up{0, 1, 0};
    double fov_deg = 45.0;
};

// Orthonormal frame derived from a pose. When the viewing direction is
// nearly parallel to the up hint, (0,0,1) then (1,0,0) are tried instead.
struct CameraFrame {
    Vec3 origin;
    Vec3 forward, right, up;
    double tan_half_fov;
};

CameraFrame make_frame(const CameraPose& pose);

// Unit ray direction through pixel (px, py) of an h x w image; pixel centers,
// row 0 at the top, unit focal length.
Vec3 pixel_ray(const CameraFrame& frame, std::size_t px, std::size_t py,
               std::size_t w, std::size_t h);

// Positions drawn as mean_radius * unit(g1) + sigma * g2 with g1, g2 standard
// 3d gaussians; draws landing inside radius 1.05 are rejected so cameras stay
// outside the normalized mesh. All poses look at the origin.
std::vector<CameraPose> sample_camera_poses(std::uint64_t rng_seed,
                                            std::size_t count,
                                            double mean_radius, double sigma);

}  // namespace temo::geo
