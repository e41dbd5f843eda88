#include "slt/models/conjugate_normal.hpp"

#include <cmath>
#include <numbers>

namespace slt {

ConjugateNormalMeanModel::ConjugateNormalMeanModel(Config cfg) : cfg_(std::move(cfg)) {
    require(cfg_.dim >= 1, "conjugate model: dim must be >= 1");
    require(cfg_.sigma > 0.0 && std::isfinite(cfg_.sigma), "conjugate model: sigma must be > 0");
    require(cfg_.tau > 0.0 && std::isfinite(cfg_.tau), "conjugate model: tau must be > 0");
    if (cfg_.mu0.empty()) cfg_.mu0.assign(cfg_.dim, 0.0);
    if (cfg_.prior_mean.empty()) cfg_.prior_mean.assign(cfg_.dim, 0.0);
    require(cfg_.mu0.size() == cfg_.dim, "conjugate model: mu0 dimension mismatch");
    require(cfg_.prior_mean.size() == cfg_.dim, "conjugate model: prior_mean dimension mismatch");
    bounds_ = Bounds::cube(cfg_.dim, cfg_.bound);
    require(bounds_.contains(cfg_.mu0), "conjugate model: mu0 must lie inside the bounds box");
    log_norm_ = -0.5 * static_cast<double>(cfg_.dim) *
                std::log(2.0 * std::numbers::pi * cfg_.sigma * cfg_.sigma);
}

double ConjugateNormalMeanModel::log_density(std::span<const double> x,
                                             std::span<const double> w) const {
    require(x.size() == cfg_.dim && w.size() == cfg_.dim, "conjugate model: dimension mismatch");
    double ss = 0.0;
    for (std::size_t j = 0; j < cfg_.dim; ++j) {
        const double r = x[j] - w[j];
        ss += r * r;
    }
    return log_norm_ - ss / (2.0 * cfg_.sigma * cfg_.sigma);
}

void ConjugateNormalMeanModel::log_density_all(const Dataset& data, std::span<const double> w,
                                               std::span<double> out) const {
    const std::size_t d = cfg_.dim;
    const double inv2s2 = 1.0 / (2.0 * cfg_.sigma * cfg_.sigma);
    const double* x = data.flat().data();
    for (std::size_t i = 0; i < data.size(); ++i, x += d) {
        double ss = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double r = x[j] - w[j];
            ss += r * r;
        }
        out[i] = log_norm_ - ss * inv2s2;
    }
}

void ConjugateNormalMeanModel::log_density_gradient(std::span<const double> x,
                                                    std::span<const double> w,
                                                    std::span<double> grad) const {
    const double inv_s2 = 1.0 / (cfg_.sigma * cfg_.sigma);
    for (std::size_t j = 0; j < cfg_.dim; ++j) grad[j] = (x[j] - w[j]) * inv_s2;
}

double ConjugateNormalMeanModel::log_prior(std::span<const double> w) const {
    double ss = 0.0;
    for (std::size_t j = 0; j < cfg_.dim; ++j) {
        const double r = w[j] - cfg_.prior_mean[j];
        ss += r * r;
    }
    return -ss / (2.0 * cfg_.tau * cfg_.tau);
}

void ConjugateNormalMeanModel::log_prior_gradient(std::span<const double> w,
                                                  std::span<double> grad) const {
    const double inv_t2 = 1.0 / (cfg_.tau * cfg_.tau);
    for (std::size_t j = 0; j < cfg_.dim; ++j) grad[j] = (cfg_.prior_mean[j] - w[j]) * inv_t2;
}

void ConjugateNormalMeanModel::draw_truth(Rng& rng, std::span<double> out) const {
    for (std::size_t j = 0; j < cfg_.dim; ++j) out[j] = rng.normal(cfg_.mu0[j], cfg_.sigma);
}

std::optional<TruthMeta> ConjugateNormalMeanModel::truth_meta() const {
    TruthMeta meta;
    meta.w0 = cfg_.mu0;
    meta.optimal_loss = -log_norm_ + 0.5 * static_cast<double>(cfg_.dim);
    meta.known_lambda = 0.5 * static_cast<double>(cfg_.dim);
    meta.known_lambda_source = "regular realizable model: lambda = d/2";
    return meta;
}

LogLikelihood ConjugateNormalMeanModel::bind_log_likelihood(const Dataset& data) const {
    require(data.dim() == cfg_.dim, "conjugate model: data dimension mismatch");
    const std::size_t d = cfg_.dim;
    const std::size_t n = data.size();

    // sum_i log p(X_i|w) = n log_norm - (scatter + n |w - xbar|^2) / (2 sigma^2)
    auto xbar = std::make_shared<std::vector<double>>(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto x = data.observation(i);
        for (std::size_t j = 0; j < d; ++j) (*xbar)[j] += x[j];
    }
    for (std::size_t j = 0; j < d; ++j) (*xbar)[j] /= static_cast<double>(n);
    CompensatedSum scatter_acc;
    for (std::size_t i = 0; i < n; ++i) {
        auto x = data.observation(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double r = x[j] - (*xbar)[j];
            scatter_acc.add(r * r);
        }
    }
    const double scatter = scatter_acc.value();
    const double base = static_cast<double>(n) * log_norm_;
    const double inv2s2 = 1.0 / (2.0 * cfg_.sigma * cfg_.sigma);
    const double nn = static_cast<double>(n);
    const double inv_s2 = 1.0 / (cfg_.sigma * cfg_.sigma);

    LogLikelihood ll;
    ll.value = [xbar, scatter, base, inv2s2, nn](std::span<const double> w) {
        double ss = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double r = w[j] - (*xbar)[j];
            ss += r * r;
        }
        return base - (scatter + nn * ss) * inv2s2;
    };
    ll.has_gradient = true;
    ll.gradient = [xbar, nn, inv_s2](std::span<const double> w, std::span<double> grad) {
        for (std::size_t j = 0; j < w.size(); ++j) grad[j] = nn * ((*xbar)[j] - w[j]) * inv_s2;
    };
    return ll;
}

}  // namespace slt
