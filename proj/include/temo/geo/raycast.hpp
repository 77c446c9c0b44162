#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "temo/geo/camera.hpp"
#include "temo/geo/mesh.hpp"
#include "temo/util/vec3.hpp"

namespace temo::geo {

struct TriangleHit {
    double t;
    Vec3 bary;  // sums to 1, each component in [0, 1]
};

// Determinant-based (Moller-Trumbore) test, backface-agnostic, eps = 1e-8.
// Misses when the ray is parallel to the plane or t <= eps.
std::optional<TriangleHit> ray_triangle_intersect(const Vec3& origin,
                                                  const Vec3& dir,
                                                  const Vec3& v0,
                                                  const Vec3& v1,
                                                  const Vec3& v2);

struct Intersection {
    bool hit = false;
    Vec3 point{};
    Vec3 normal{};
    int face_id = -1;
    Vec3 view_dir{};  // unit ray direction, camera into the scene
    double t = 0.0;
};

struct IntersectionBuffer {
    std::size_t h = 0, w = 0;
    std::vector<Intersection> px;  // row-major

    const Intersection& at(std::size_t y, std::size_t x) const {
        return px[y * w + x];
    }
};

struct HitMap {
    std::size_t h = 0, w = 0;
    std::vector<std::uint8_t> data;  // 1 = hit

    std::uint8_t at(std::size_t y, std::size_t x) const {
        return data[y * w + x];
    }
};

}  // namespace temo::geo
