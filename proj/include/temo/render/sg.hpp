#pragma once

#include <vector>

#include "temo/util/vec3.hpp"

namespace temo::render {

// One spherical-Gaussian light lobe over directions:
// L(w) = amplitude * exp(sharpness * (dot(axis, w) - 1)).
struct SGLight {
    Vec3 axis;         // unit
    double sharpness;  // in [1, 1e4]
    Vec3 amplitude;    // per channel, >= 0
};

Vec3 sg_eval(const SGLight& light, const Vec3& w);

// Integral of a unit-amplitude lobe over the full sphere:
// 2*pi*(1 - exp(-2*lambda)) / lambda.
double sg_sphere_integral(double sharpness);

// Fixed three-lobe environment (key, fill, rim) in world space.
std::vector<SGLight> default_lights();

// Single lobe shining from the eye position toward the scene; used for the
// neutral renders that drive phrase-object matching.
SGLight frontal_light(const Vec3& eye);

}  // namespace temo::render
