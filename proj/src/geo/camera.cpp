#include "temo/geo/camera.hpp"

#include <cmath>

#include "temo/util/error.hpp"
#include "temo/util/rng.hpp"

namespace temo::geo {

CameraFrame make_frame(const CameraPose& pose) {
    Vec3 f = pose.look_at - pose.position;
    double flen = norm(f);
    if (flen < 1e-12)
        raise(ErrorKind::Config, "camera position equals its look-at point");
    CameraFrame frame;
    frame.origin = pose.position;
    frame.forward = f / flen;
    Vec3 hint = pose.up;
    Vec3 r = cross(frame.forward, hint);
    if (norm(r) < 1e-9) {
        hint = Vec3{0, 0, 1};
        r = cross(frame.forward, hint);
        if (norm(r) < 1e-9) {
            hint = Vec3{1, 0, 0};
            r = cross(frame.forward, hint);
        }
    }
    frame.right = normalized(r);
    frame.up = cross(frame.right, frame.forward);
    frame.tan_half_fov = std::tan(pose.fov_deg * 0.5 * M_PI / 180.0);
    return frame;
}

Vec3 pixel_ray(const CameraFrame& frame, std::size_t px, std::size_t py,
               std::size_t w, std::size_t h) {
    double aspect = static_cast<double>(w) / static_cast<double>(h);
    double u = ((static_cast<double>(px) + 0.5) / static_cast<double>(w)) * 2.0 - 1.0;
    double v = 1.0 - ((static_cast<double>(py) + 0.5) / static_cast<double>(h)) * 2.0;
    Vec3 dir = frame.forward + frame.right * (u * frame.tan_half_fov * aspect) +
               frame.up * (v * frame.tan_half_fov);
    return normalized(dir);
}

std::vector<CameraPose> sample_camera_poses(std::uint64_t rng_seed,
                                            std::size_t count,
                                            double mean_radius, double sigma) {
    if (count < 1) raise(ErrorKind::Config, "camera pose count must be >= 1");
    if (mean_radius <= 1.0)
        raise(ErrorKind::Config, "camera mean_radius must exceed 1");
    if (sigma < 0.0) raise(ErrorKind::Config, "camera sigma must be >= 0");
    Rng rng(rng_seed);
    std::vector<CameraPose> poses;
    poses.reserve(count);
    int rejections = 0;
    while (poses.size() < count) {
        if (rejections > 100000)
            raise(ErrorKind::Config,
                  "camera sampling rejects everything; raise mean_radius");
        Vec3 g1 = rng.gaussian3();
        double len = norm(g1);
        if (len < 1e-9) continue;
        Vec3 pos = g1 * (mean_radius / len) + rng.gaussian3() * sigma;
        if (norm(pos) < 1.05) {  // keep cameras outside the mesh
            ++rejections;
            continue;
        }
        rejections = 0;
        CameraPose pose;
        pose.position = pos;
        poses.push_back(pose);
    }
    return poses;
}

}  // namespace temo::geo
