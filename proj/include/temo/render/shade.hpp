#pragma once

#include <vector>

#include "temo/ad/tape.hpp"
#include "temo/field/style_field.hpp"
#include "temo/geo/raycast.hpp"
#include "temo/render/sg.hpp"

namespace temo::render {

// Closed-form hemisphere shading under spherical-Gaussian lights:
// diffuse uses a fitted clamped-cosine/SG irradiance, specular an isotropic
// microfacet whose SG distribution lobe is warped into reflection space and
// integrated against each light analytically (Fresnel = the specular value,
// geometry term folded into the 1/(4 max(n.v, eps)) denominator).
//
// to_eye: [P x 3] unit vectors from the surface toward the camera (data).
// normals: [P x 3] unit shading normals (tape). diffuse/specular: [P x 3],
// roughness: [P x 1], all within their declared ranges. Radiance is
// non-negative and unclamped above.
ad::Tensor shade_points(const ad::Mat& to_eye, ad::Tensor normals,
                        ad::Tensor diffuse, ad::Tensor roughness,
                        ad::Tensor specular, const std::vector<SGLight>& lights);

// Scalar convenience over a throwaway tape. normal and to_eye must be unit
// length within 1e-6; degenerate normals raise.
Vec3 shade_pixel(const Vec3& normal, const Vec3& to_eye, const Vec3& diffuse,
                 double roughness, const Vec3& specular,
                 const std::vector<SGLight>& lights);

// The same reflectance model evaluated directly for one incoming direction
// w (unit, toward the light). Used by quadrature oracles; shade_points is
// the closed-form approximation of integrating
//   L(w) * brdf(...) * max(dot(n, w), 0)
// over the hemisphere.
Vec3 brdf_times_cosine(const Vec3& normal, const Vec3& to_eye, const Vec3& w,
                       const Vec3& diffuse, double roughness,
                       const Vec3& specular);

// Full differentiable render of one view: evaluates the style field on the
// hit points (base normals flipped toward the eye), shades them, and
// scatters radiance over a constant-background image.
struct RenderResult {
    ad::Tensor image;        // [h*w x 3], linear radiance
    ad::Tensor diffuse;      // [P x 3] hit-point diffuse albedo
    std::vector<int> hit_rows;  // pixel row of each shaded point
};
RenderResult render_image(ad::Tape& tape, const geo::IntersectionBuffer& buffer,
                          const geo::HitMap& hitmap,
                          const field::StyleField& field,
                          const std::vector<ad::Tensor>& params,
                          const field::DgaContext* dga,
                          const std::vector<SGLight>& lights, Vec3 background);

}  // namespace temo::render
