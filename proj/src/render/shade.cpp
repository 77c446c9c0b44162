#include "temo/render/shade.hpp"

#include <cmath>

#include "temo/util/error.hpp"

namespace temo::render {
namespace {

constexpr double kMinCos = 1e-4;

// Fitted SG-times-clamped-cosine irradiance (shape factor in [0, 1+]):
// scale * y + bias, where y blends saturate(mu.n) with a smooth quadratic
// near the horizon. The fit constants follow the standard c0 = 0.36,
// c1 = 1/(4 c0) formulation.
ad::Tensor irradiance_shape(ad::Tensor mu_dot_n, double sharpness) {
    const double c0 = 0.36;
    const double c1 = 1.0 / (4.0 * c0);
    double eml = std::exp(-sharpness);
    double em2l = eml * eml;
    double rl = 1.0 / sharpness;
    double scale_s = 1.0 + 2.0 * em2l - rl;
    double bias_s = (eml - em2l) * rl - em2l;
    double x = std::sqrt(std::max(1.0 - scale_s, 1e-12));
    double x1 = c1 * x;

    ad::Tensor x0 = ad::scale(mu_dot_n, c0);
    ad::Tensor n_lin = ad::add_scalar(x0, x1);
    ad::Tensor y_smooth = ad::scale(ad::mul(n_lin, n_lin), 1.0 / x);
    ad::Tensor y_sat = ad::clamp(mu_dot_n, 0.0, 1.0);

    // smooth branch where |x0| <= x1 (mask from values; the fit is
    // continuous across the boundary)
    const ad::Mat& x0v = x0.value();
    ad::Mat mask(x0v.rows, x0v.cols);
    for (std::size_t i = 0; i < x0v.size(); ++i)
        mask.data[i] = std::fabs(x0v.data[i]) <= x1 ? 1.0 : 0.0;
    ad::Tensor y = ad::where(mask, y_smooth, y_sat);
    return ad::clamp_min(ad::add_scalar(ad::scale(y, scale_s), bias_s), 0.0);
}

ad::Mat row3(const Vec3& v) {
    ad::Mat m(1, 3);
    m.at(0, 0) = v.x;
    m.at(0, 1) = v.y;
    m.at(0, 2) = v.z;
    return m;
}

ad::Mat col3(const Vec3& v) {
    ad::Mat m(3, 1);
    m.at(0, 0) = v.x;
    m.at(1, 0) = v.y;
    m.at(2, 0) = v.z;
    return m;
}

// Fraction of an SG lobe's mass above the horizon plane, as a smooth
// function of s = (axis.n) * sqrt(sharpness) and the sharpness itself.
// Fitted against the exact 1D reduction over sharpness in [1.5, 200] and
// all axis elevations; relative error < 1.2% wherever the fraction
// exceeds 0.3. Saturates correctly for very sharp lobes.
ad::Tensor horizon_fraction(ad::Tensor axis_dot_n_scaled, ad::Tensor sharpness) {
    const double k1 = 1.55412959, k2 = -0.979961983, k3 = 0.587602568;
    const double k4 = 0.0848832298, k5 = -0.143326031, k6 = 0.0753852771;
    ad::Tensor s = axis_dot_n_scaled;
    ad::Tensor inv_l = ad::recip(sharpness);
    ad::Tensor s2 = ad::mul(s, s);
    ad::Tensor s3 = ad::mul(s2, s);
    ad::Tensor s5 = ad::mul(s3, s2);
    ad::Tensor logit =
        ad::mul(s, ad::add_scalar(ad::scale(ad::exp(ad::scale(sharpness, -k3)), k2), k1));
    logit = ad::add(logit, ad::mul(s3, ad::add_scalar(ad::scale(inv_l, k5), k4)));
    logit = ad::add(logit, ad::scale(ad::mul(s5, inv_l), k6));
    return ad::sigmoid(logit);
}

}  // namespace

ad::Tensor shade_points(const ad::Mat& to_eye, ad::Tensor normals,
                        ad::Tensor diffuse, ad::Tensor roughness,
                        ad::Tensor specular,
                        const std::vector<SGLight>& lights) {
    ad::Tape& tape = *normals.tape;
    const std::size_t P = normals.rows();
    if (to_eye.rows != P || to_eye.cols != 3 || normals.cols() != 3 ||
        diffuse.rows() != P || roughness.rows() != P || specular.rows() != P)
        raise(ErrorKind::Internal, "shade_points: shape mismatch");
    if (lights.empty()) raise(ErrorKind::Config, "shade_points: no lights");
    for (const SGLight& l : lights) {
        if (std::fabs(norm(l.axis) - 1.0) > 1e-6)
            raise(ErrorKind::Config, "light axis must be unit length");
        if (!(l.sharpness >= 1.0) || !(l.sharpness <= 1e4))
            raise(ErrorKind::Config, "light sharpness out of [1, 1e4]");
        if (l.amplitude.x < 0 || l.amplitude.y < 0 || l.amplitude.z < 0)
            raise(ErrorKind::Config, "light amplitude must be nonnegative");
    }

    ad::Tensor v_const = tape.constant(to_eye);
    // cos between shading normal and eye direction, clamped for denominators
    ad::Tensor cos_v = ad::row_sum(ad::mul(normals, v_const));
    ad::Tensor cos_v_pos = ad::clamp_min(cos_v, kMinCos);
    // reflection of the eye ray: 2 (n.v) n - v
    ad::Tensor refl =
        ad::sub(ad::mul_colvec(normals, ad::scale(cos_v, 2.0)), v_const);

    // specular lobe from the roughness: sharpness 2/r^2, amplitude 1/(pi r^2),
    // warped into reflection space by dividing the sharpness by 4 (n.v)
    ad::Tensor r2 = ad::clamp_min(ad::mul(roughness, roughness), 1e-6);
    ad::Tensor lambda_d = ad::scale(ad::recip(r2), 2.0);
    ad::Tensor amp_d = ad::scale(ad::recip(r2), 1.0 / M_PI);
    ad::Tensor lambda_w = ad::div(lambda_d, ad::scale(cos_v_pos, 4.0));

    ad::Tensor irradiance;  // [P x 3]
    ad::Tensor spec_sum;    // [P x 3]
    bool first = true;
    for (const SGLight& light : lights) {
        // diffuse: fitted irradiance shape times the lobe's sphere integral
        ad::Tensor mu_dot_n = ad::matmul(normals, tape.constant(col3(light.axis)));
        ad::Tensor shape = irradiance_shape(mu_dot_n, light.sharpness);
        Vec3 e_amp = light.amplitude * sg_sphere_integral(light.sharpness);
        ad::Tensor e_rgb = ad::matmul(shape, tape.constant(row3(e_amp)));

        // specular: inner product of the warped lobe with the light lobe
        ad::Tensor um = ad::add_rowvec(ad::mul_colvec(refl, lambda_w),
                                       tape.constant(row3(light.sharpness * light.axis)));
        ad::Tensor um_len =
            ad::sqrt(ad::clamp_min(ad::row_sum(ad::mul(um, um)), 1e-18));
        ad::Tensor expo =
            ad::exp(ad::sub(um_len, ad::add_scalar(lambda_w, light.sharpness)));
        ad::Tensor one_minus = ad::rsub_scalar(1.0, ad::exp(ad::scale(um_len, -2.0)));
        ad::Tensor inner = ad::scale(
            ad::div(ad::mul(ad::mul(amp_d, expo), one_minus), um_len), 2.0 * M_PI);
        // the product lobe integrates over the whole sphere; discount the
        // mass below the surface's horizon
        ad::Tensor um_dot_n = ad::row_sum(ad::mul(um, normals));
        ad::Tensor s_scaled = ad::div(um_dot_n, ad::sqrt(um_len));
        inner = ad::mul(inner, horizon_fraction(s_scaled, um_len));
        ad::Tensor spec_shape = ad::div(inner, ad::scale(cos_v_pos, 4.0));
        ad::Tensor spec_rgb =
            ad::mul(specular, ad::matmul(spec_shape, tape.constant(row3(light.amplitude))));

        if (first) {
            irradiance = e_rgb;
            spec_sum = spec_rgb;
            first = false;
        } else {
            irradiance = ad::add(irradiance, e_rgb);
            spec_sum = ad::add(spec_sum, spec_rgb);
        }
    }
    return ad::add(ad::mul(diffuse, ad::scale(irradiance, 1.0 / M_PI)), spec_sum);
}

Vec3 shade_pixel(const Vec3& normal, const Vec3& to_eye, const Vec3& diffuse,
                 double roughness, const Vec3& specular,
                 const std::vector<SGLight>& lights) {
    if (std::fabs(norm(normal) - 1.0) > 1e-6)
        raise(ErrorKind::Numeric, "shade_pixel: normal must be unit length");
    if (std::fabs(norm(to_eye) - 1.0) > 1e-6)
        raise(ErrorKind::Numeric, "shade_pixel: view vector must be unit length");
    ad::Tape tape;
    ad::Mat v(1, 3);
    v.at(0, 0) = to_eye.x;
    v.at(0, 1) = to_eye.y;
    v.at(0, 2) = to_eye.z;
    ad::Tensor out = shade_points(
        v, tape.constant(row3(normal)), tape.constant(row3(diffuse)),
        tape.constant(ad::Mat::scalar(roughness)), tape.constant(row3(specular)),
        lights);
    const ad::Mat& o = out.value();
    return Vec3{o.at(0, 0), o.at(0, 1), o.at(0, 2)};
}

Vec3 brdf_times_cosine(const Vec3& normal, const Vec3& to_eye, const Vec3& w,
                       const Vec3& diffuse, double roughness,
                       const Vec3& specular) {
    double cos_l = dot(normal, w);
    if (cos_l <= 0.0) return Vec3{0, 0, 0};
    Vec3 out = (1.0 / M_PI) * cos_l * diffuse;

    double cos_v = std::max(dot(normal, to_eye), kMinCos);
    Vec3 h = normalized(to_eye + w);
    double r2 = std::max(roughness * roughness, 1e-6);
    // SG distribution lobe about the normal evaluated at the half vector
    double d = std::exp((2.0 / r2) * (dot(normal, h) - 1.0)) / (M_PI * r2);
    // microfacet with G folded to 1: D * F / (4 cos_v cos_l) times cos_l
    out += d / (4.0 * cos_v) * specular;
    return out;
}

RenderResult render_image(ad::Tape& tape, const geo::IntersectionBuffer& buffer,
                          const geo::HitMap& hitmap,
                          const field::StyleField& field,
                          const std::vector<ad::Tensor>& params,
                          const field::DgaContext* dga,
                          const std::vector<SGLight>& lights, Vec3 background) {
    const std::size_t h = buffer.h, w = buffer.w;
    if (hitmap.h != h || hitmap.w != w)
        raise(ErrorKind::Internal, "render_image: buffer and hitmap disagree");

    std::vector<int> hit_rows;
    for (std::size_t p = 0; p < h * w; ++p)
        if (hitmap.data[p]) hit_rows.push_back(static_cast<int>(p));
    const std::size_t P = hit_rows.size();

    ad::Mat bg(h * w, 3);
    for (std::size_t p = 0; p < h * w; ++p) {
        bg.at(p, 0) = background.x;
        bg.at(p, 1) = background.y;
        bg.at(p, 2) = background.z;
    }
    if (P == 0) {
        RenderResult out;
        out.image = tape.constant(std::move(bg));
        out.diffuse = tape.constant(ad::Mat(0, 3));
        return out;
    }

    ad::Mat X(P, 3), N0(P, 3), V(P, 3);
    for (std::size_t i = 0; i < P; ++i) {
        const geo::Intersection& it = buffer.px[static_cast<std::size_t>(hit_rows[i])];
        Vec3 to_eye = -1.0 * it.view_dir;
        Vec3 n = it.normal;
        if (dot(n, to_eye) < 0.0) n = -1.0 * n;  // face the camera
        X.at(i, 0) = it.point.x;
        X.at(i, 1) = it.point.y;
        X.at(i, 2) = it.point.z;
        N0.at(i, 0) = n.x;
        N0.at(i, 1) = n.y;
        N0.at(i, 2) = n.z;
        V.at(i, 0) = to_eye.x;
        V.at(i, 1) = to_eye.y;
        V.at(i, 2) = to_eye.z;
    }

    ad::Tensor offsets = field.normal_offset(tape, params, X, N0, dga);
    ad::Tensor nhat = ad::l2_normalize_rows(ad::add(tape.constant(N0), offsets));
    field::StyleField::Reflectance refl =
        field.reflectance(tape, params, X, V, dga);
    ad::Tensor radiance = shade_points(V, nhat, refl.diffuse, refl.roughness,
                                       refl.specular, lights);

    RenderResult out;
    out.image = ad::scatter_rows(radiance, hit_rows, std::move(bg));
    out.diffuse = refl.diffuse;
    out.hit_rows = std::move(hit_rows);
    return out;
}

}  // namespace temo::render
