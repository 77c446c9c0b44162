#include "temo/parse/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "temo/util/error.hpp"
#include "temo/util/rng.hpp"

namespace temo::parse {
namespace {

constexpr double kEigFloor = 1e-6;
constexpr double kLogTwoPi = 1.8378770664093453;  // log(2*pi)

// Symmetric PSD repair: clamp eigenvalues from below, rebuild, and hand back
// the pieces the density needs.
struct CovInfo {
    Mat3 cov;
    Mat3 inv;
    double log_det;
};

CovInfo floor_covariance(const Mat3& raw) {
    EigenSym3 eig = eigen_sym3(raw);
    Vec3 lam = eig.values;
    for (int i = 0; i < 3; ++i) lam[i] = std::max(lam[i], kEigFloor);
    CovInfo out;
    out.log_det = std::log(lam.x) + std::log(lam.y) + std::log(lam.z);
    Mat3 v = eig.vectors;
    Mat3 d{}, dinv{};
    for (int i = 0; i < 3; ++i) {
        d(i, i) = lam[i];
        dinv(i, i) = 1.0 / lam[i];
    }
    out.cov = v * d * v.transposed();
    out.inv = v * dinv * v.transposed();
    return out;
}

double log_gauss(const Vec3& x, const Vec3& mean, const CovInfo& ci) {
    Vec3 d = x - mean;
    double maha = dot(d, ci.inv * d);
    return -0.5 * (3.0 * kLogTwoPi + ci.log_det + maha);
}

std::vector<Vec3> kmeanspp_init(const std::vector<Vec3>& pts, int k,
                                temo::Rng& rng) {
    std::vector<Vec3> means;
    means.push_back(pts[rng.uniform_index(pts.size())]);
    std::vector<double> d2(pts.size());
    while (static_cast<int>(means.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec3& m : means)
                best = std::min(best, norm2(pts[i] - m));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            // all remaining points coincide with chosen means
            means.push_back(pts[rng.uniform_index(pts.size())]);
            continue;
        }
        double r = rng.uniform() * total;
        std::size_t pick = pts.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            acc += d2[i];
            if (acc >= r) {
                pick = i;
                break;
            }
        }
        means.push_back(pts[pick]);
    }
    return means;
}

}  // namespace

GmmModel gmm_fit(const std::vector<Vec3>& points, int k, std::uint64_t seed) {
    if (k < 1) raise(ErrorKind::Config, "gmm: k must be >= 1");
    if (static_cast<std::size_t>(k) > points.size())
        raise(ErrorKind::Config, "gmm: k exceeds the point count");
    const std::size_t n = points.size();
    temo::Rng rng(seed);

    GmmModel model;
    model.k = k;
    model.means = kmeanspp_init(points, k, rng);
    model.weights.assign(k, 1.0 / k);

    // shared isotropic start: the data's mean squared deviation
    Vec3 centroid{0, 0, 0};
    for (const Vec3& p : points) centroid += p;
    centroid = centroid / static_cast<double>(n);
    double var = 0.0;
    for (const Vec3& p : points) var += norm2(p - centroid);
    var = std::max(var / (3.0 * static_cast<double>(n)), kEigFloor);
    std::vector<CovInfo> cov(k);
    model.covariances.assign(k, Mat3{});
    for (int c = 0; c < k; ++c) {
        Mat3 iso{};
        iso(0, 0) = iso(1, 1) = iso(2, 2) = var;
        cov[c] = floor_covariance(iso);
        model.covariances[c] = cov[c].cov;
    }

    std::vector<double> resp(n * k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 200; ++iter) {
        // E-step with log-sum-exp
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double mx = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double lg = std::log(std::max(model.weights[c], 1e-300)) +
                            log_gauss(points[i], model.means[c], cov[c]);
                resp[i * k + c] = lg;
                mx = std::max(mx, lg);
            }
            double z = 0.0;
            for (int c = 0; c < k; ++c) z += std::exp(resp[i * k + c] - mx);
            double lse = mx + std::log(z);
            ll += lse;
            for (int c = 0; c < k; ++c)
                resp[i * k + c] = std::exp(resp[i * k + c] - lse);
        }
        model.log_likelihood_trace.push_back(ll);
        if (ll - prev_ll < 1e-6 && iter > 0) break;
        prev_ll = ll;

        // M-step
        for (int c = 0; c < k; ++c) {
            double nc = 0.0;
            Vec3 mu{0, 0, 0};
            for (std::size_t i = 0; i < n; ++i) {
                nc += resp[i * k + c];
                mu += points[i] * resp[i * k + c];
            }
            if (nc < 1e-12) {
                // dead component: keep its parameters, it stays negligible
                model.weights[c] = nc / static_cast<double>(n);
                continue;
            }
            mu = mu / nc;
            Mat3 sigma{};
            for (std::size_t i = 0; i < n; ++i) {
                Vec3 d = points[i] - mu;
                sigma = sigma + resp[i * k + c] * Mat3::outer(d, d);
            }
            sigma = (1.0 / nc) * sigma;
            model.means[c] = mu;
            cov[c] = floor_covariance(sigma);
            model.covariances[c] = cov[c].cov;
            model.weights[c] = nc / static_cast<double>(n);
        }
        // guard drift from floating point
        double wsum = 0.0;
        for (double w : model.weights) wsum += w;
        for (double& w : model.weights) w /= wsum;
    }
    return model;
}

std::vector<int> assign_clusters(const GmmModel& model,
                                 const std::vector<Vec3>& points) {
    if (model.k < 1) raise(ErrorKind::Config, "assign_clusters: unfitted model");
    std::vector<CovInfo> cov(model.k);
    for (int c = 0; c < model.k; ++c) cov[c] = floor_covariance(model.covariances[c]);
    std::vector<int> labels(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < model.k; ++c) {
            double s = std::log(std::max(model.weights[c], 1e-300)) +
                       log_gauss(points[i], model.means[c], cov[c]);
            if (s > best_score) {  // strict: ties stay at the lowest index
                best_score = s;
                best = c;
            }
        }
        labels[i] = best;
    }
    return labels;
}

}  // namespace temo::parse
