#include "temo/train/optimizer.hpp"

#include <cmath>

#include "temo/util/error.hpp"

namespace temo::train {

double lr_at(int iter, double lr0, double decay, int interval) {
    if (iter < 0) raise(ErrorKind::Config, "lr_at: negative iteration");
    if (lr0 <= 0.0) raise(ErrorKind::Config, "lr_at: lr0 must be positive");
    if (interval < 1) raise(ErrorKind::Config, "lr_at: interval must be >= 1");
    return lr0 * std::pow(decay, static_cast<double>(iter / interval));
}

AdamW::AdamW(const field::ParamSet& params, AdamWConfig cfg) : cfg_(cfg) {
    if (cfg_.beta1 < 0.0 || cfg_.beta1 >= 1.0 || cfg_.beta2 < 0.0 ||
        cfg_.beta2 >= 1.0)
        raise(ErrorKind::Config, "AdamW betas must lie in [0, 1)");
    if (cfg_.eps <= 0.0) raise(ErrorKind::Config, "AdamW eps must be positive");
    if (cfg_.weight_decay < 0.0)
        raise(ErrorKind::Config, "AdamW weight decay must be non-negative");
    m_.reserve(params.count());
    v_.reserve(params.count());
    for (int i = 0; i < static_cast<int>(params.count()); ++i) {
        const ad::Mat& val = params.entry(i).value;
        m_.emplace_back(val.rows, val.cols);
        v_.emplace_back(val.rows, val.cols);
    }
}

void AdamW::step(field::ParamSet& params, const std::vector<ad::Mat>& grads,
                 double lr) {
    if (grads.size() != params.count() || params.count() != m_.size())
        raise(ErrorKind::Config, "AdamW step: parameter count mismatch");
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (int i = 0; i < static_cast<int>(params.count()); ++i) {
        field::ParamSet::Entry& e = params.entry(i);
        const ad::Mat& g = grads[static_cast<std::size_t>(i)];
        ad::Mat& m = m_[static_cast<std::size_t>(i)];
        ad::Mat& v = v_[static_cast<std::size_t>(i)];
        if (g.rows != e.value.rows || g.cols != e.value.cols)
            raise(ErrorKind::Config, "AdamW step: gradient shape mismatch for " + e.name);
        for (std::size_t j = 0; j < g.data.size(); ++j) {
            const double gj = g.data[j];
            if (!std::isfinite(gj))
                raise(ErrorKind::Numeric, "non-finite gradient in " + e.name);
            double& p = e.value.data[j];
            p -= lr * cfg_.weight_decay * p;
            m.data[j] = cfg_.beta1 * m.data[j] + (1.0 - cfg_.beta1) * gj;
            v.data[j] = cfg_.beta2 * v.data[j] + (1.0 - cfg_.beta2) * gj * gj;
            const double mhat = m.data[j] / bc1;
            const double vhat = v.data[j] / bc2;
            p -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

void AdamW::restore(std::vector<ad::Mat> m, std::vector<ad::Mat> v,
                    std::int64_t step) {
    if (m.size() != m_.size() || v.size() != v_.size())
        raise(ErrorKind::Config, "AdamW restore: moment count mismatch");
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i].rows != m_[i].rows || m[i].cols != m_[i].cols ||
            v[i].rows != v_[i].rows || v[i].cols != v_[i].cols)
            raise(ErrorKind::Config, "AdamW restore: moment shape mismatch");
    if (step < 0) raise(ErrorKind::Config, "AdamW restore: negative step");
    m_ = std::move(m);
    v_ = std::move(v);
    step_ = step;
}

}  // namespace temo::train
