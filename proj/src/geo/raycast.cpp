#include "temo/geo/raycast.hpp"

namespace temo::geo {

std::optional<TriangleHit> ray_triangle_intersect(const Vec3& origin,
                                                  const Vec3& dir,
                                                  const Vec3& v0,
                                                  const Vec3& v1,
                                                  const Vec3& v2) {
    constexpr double eps = 1e-8;
    Vec3 e1 = v1 - v0;
    Vec3 e2 = v2 - v0;
    Vec3 pvec = cross(dir, e2);
    double det = dot(e1, pvec);
    if (det > -eps && det < eps) return std::nullopt;
    double inv_det = 1.0 / det;
    Vec3 tvec = origin - v0;
    double u = dot(tvec, pvec) * inv_det;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    Vec3 qvec = cross(tvec, e1);
    double v = dot(dir, qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    double t = dot(e2, qvec) * inv_det;
    if (t <= eps) return std::nullopt;
    return TriangleHit{t, Vec3{1.0 - u - v, u, v}};
}

}  // namespace temo::geo
