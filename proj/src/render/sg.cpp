#include "temo/render/sg.hpp"

#include <cmath>

#include "temo/util/error.hpp"

namespace temo::render {

Vec3 sg_eval(const SGLight& light, const Vec3& w) {
    double e = std::exp(light.sharpness * (dot(light.axis, w) - 1.0));
    return light.amplitude * e;
}

double sg_sphere_integral(double sharpness) {
    return 2.0 * M_PI * (1.0 - std::exp(-2.0 * sharpness)) / sharpness;
}

std::vector<SGLight> default_lights() {
    auto lobe = [](Vec3 axis, double sharpness, double amp) {
        return SGLight{normalized(axis), sharpness, Vec3{amp, amp, amp}};
    };
    return {
        lobe(Vec3{0.45, 0.6, 0.66}, 8.0, 3.5),    // key
        lobe(Vec3{-0.6, 0.2, 0.77}, 3.0, 0.8),    // fill
        lobe(Vec3{0.1, 0.4, -0.91}, 10.0, 1.2),   // rim
    };
}

SGLight frontal_light(const Vec3& eye) {
    double n = norm(eye);
    if (n < 1e-9) raise(ErrorKind::Config, "frontal light needs a nonzero eye");
    return SGLight{eye / n, 4.0, Vec3{2.5, 2.5, 2.5}};
}

}  // namespace temo::render
