#include "temo/geo/geometry_pass.hpp"

#include <algorithm>
#include <thread>
#include <vector>

#include "temo/util/error.hpp"

namespace temo::geo {
namespace {

void trace_rows(const Mesh& mesh, const Bvh& bvh, const CameraFrame& frame,
                std::size_t h, std::size_t w, std::size_t row0,
                std::size_t row1, IntersectionBuffer& buf, HitMap& hits) {
    for (std::size_t y = row0; y < row1; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            Vec3 dir = pixel_ray(frame, x, y, w, h);
            Intersection& px = buf.px[y * w + x];
            px.view_dir = dir;
            auto hit = bvh.nearest(frame.origin, dir);
            if (hit) {
                px.hit = true;
                px.t = hit->t;
                px.face_id = hit->face;
                px.point = frame.origin + dir * hit->t;
                px.normal = mesh.face_normals[hit->face];
                hits.data[y * w + x] = 1;
            }
        }
    }
}

}  // namespace

std::pair<IntersectionBuffer, HitMap> render_geometry_pass(
    const Mesh& mesh, const Bvh& bvh, const CameraPose& pose, std::size_t h,
    std::size_t w, int workers) {
    if (h == 0 || w == 0)
        raise(ErrorKind::Config, "geometry pass needs a nonzero resolution");
    CameraFrame frame = make_frame(pose);
    IntersectionBuffer buf;
    buf.h = h;
    buf.w = w;
    buf.px.resize(h * w);
    HitMap hits;
    hits.h = h;
    hits.w = w;
    hits.data.assign(h * w, 0);

    int n = std::max(1, std::min<int>(workers, static_cast<int>(h)));
    if (n == 1) {
        trace_rows(mesh, bvh, frame, h, w, 0, h, buf, hits);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n);
        std::size_t chunk = (h + n - 1) / n;
        for (int i = 0; i < n; ++i) {
            std::size_t r0 = i * chunk;
            std::size_t r1 = std::min(h, r0 + chunk);
            if (r0 >= r1) break;
            pool.emplace_back([&, r0, r1] {
                trace_rows(mesh, bvh, frame, h, w, r0, r1, buf, hits);
            });
        }
        for (auto& t : pool) t.join();
    }
    return {std::move(buf), std::move(hits)};
}

std::pair<IntersectionBuffer, HitMap> render_geometry_pass(
    const Mesh& mesh, const CameraPose& pose, std::size_t h, std::size_t w,
    int workers) {
    Bvh bvh(mesh);
    return render_geometry_pass(mesh, bvh, pose, h, w, workers);
}

}  // namespace temo::geo
