#include "slt/models/gaussian_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace slt {

namespace {
constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 log(2 pi)

double std_normal_logpdf(double z) { return -kHalfLog2Pi - 0.5 * z * z; }

/// log((1-a) exp(l0) + a exp(lb)), max-shifted; exact at a = 0 and a = 1.
double mix_log(double a, double l0, double lb) {
    if (a <= 0.0) return l0;
    if (a >= 1.0) return lb;
    const double m = std::max(l0, lb);
    return m + std::log((1.0 - a) * std::exp(l0 - m) + a * std::exp(lb - m));
}
}  // namespace

GaussianMixtureModel::GaussianMixtureModel(Config cfg) : cfg_(cfg) {
    require(cfg_.b_bound > 0.0 && std::isfinite(cfg_.b_bound),
            "mixture model: b_bound must be > 0");
    if (cfg_.fixed_b) {
        require(std::isfinite(*cfg_.fixed_b) && std::abs(*cfg_.fixed_b) <= cfg_.b_bound,
                "mixture model: fixed_b must lie in [-b_bound, b_bound]");
        bounds_.lo = {0.0};
        bounds_.hi = {1.0};
    } else {
        bounds_.lo = {0.0, -cfg_.b_bound};
        bounds_.hi = {1.0, cfg_.b_bound};
    }
}

double GaussianMixtureModel::log_density(std::span<const double> x,
                                         std::span<const double> w) const {
    require(x.size() == 1 && w.size() == parameter_dim(), "mixture model: dimension mismatch");
    const double a = mix_a(w);
    require(a >= 0.0 && a <= 1.0, "mixture model: mixing weight a outside [0, 1]");
    const double l0 = std_normal_logpdf(x[0]);
    const double lb = std_normal_logpdf(x[0] - mix_b(w));
    return mix_log(a, l0, lb);
}

void GaussianMixtureModel::log_density_all(const Dataset& data, std::span<const double> w,
                                           std::span<double> out) const {
    const double a = mix_a(w);
    require(a >= 0.0 && a <= 1.0, "mixture model: mixing weight a outside [0, 1]");
    const double b = mix_b(w);
    const double* x = data.flat().data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double l0 = std_normal_logpdf(x[i]);
        const double lb = std_normal_logpdf(x[i] - b);
        out[i] = mix_log(a, l0, lb);
    }
}

void GaussianMixtureModel::log_density_gradient(std::span<const double> x,
                                                std::span<const double> w,
                                                std::span<double> grad) const {
    const double a = mix_a(w);
    const double b = mix_b(w);
    const double l0 = std_normal_logpdf(x[0]);
    const double lb = std_normal_logpdf(x[0] - b);
    const double m = std::max(l0, lb);
    const double e0 = std::exp(l0 - m), eb = std::exp(lb - m);
    const double dens = (1.0 - a) * e0 + a * eb;  // times exp(m)
    grad[0] = (eb - e0) / dens;
    if (!cfg_.fixed_b) grad[1] = a * eb * (x[0] - b) / dens;
}

void GaussianMixtureModel::draw_truth(Rng& rng, std::span<double> out) const {
    out[0] = rng.normal();
}

std::optional<TruthMeta> GaussianMixtureModel::truth_meta() const {
    TruthMeta meta;
    meta.w0.assign(parameter_dim(), 0.0);  // a = 0 (one of the optima)
    meta.optimal_loss = kHalfLog2Pi + 0.5;
    return meta;  // known_lambda left unset: supplied by the experimenter if at all
}

LogLikelihood GaussianMixtureModel::bind_log_likelihood(const Dataset& data) const {
    if (!cfg_.fixed_b) return ModelSpec::bind_log_likelihood(data);

    const double b = *cfg_.fixed_b;
    const std::size_t n = data.size();
    struct Cache {
        std::vector<double> l0, lb;
    };
    auto cache = std::make_shared<Cache>();
    cache->l0.resize(n);
    cache->lb.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = data.observation(i)[0];
        cache->l0[i] = std_normal_logpdf(x);
        cache->lb[i] = std_normal_logpdf(x - b);
    }

    LogLikelihood ll;
    ll.value = [cache](std::span<const double> w) {
        const double a = w[0];
        CompensatedSum acc;
        for (std::size_t i = 0; i < cache->l0.size(); ++i)
            acc.add(mix_log(a, cache->l0[i], cache->lb[i]));
        return acc.value();
    };
    ll.has_gradient = true;
    ll.gradient = [cache](std::span<const double> w, std::span<double> grad) {
        const double a = w[0];
        CompensatedSum acc;
        for (std::size_t i = 0; i < cache->l0.size(); ++i) {
            const double m = std::max(cache->l0[i], cache->lb[i]);
            const double e0 = std::exp(cache->l0[i] - m), eb = std::exp(cache->lb[i] - m);
            acc.add((eb - e0) / ((1.0 - a) * e0 + a * eb));
        }
        grad[0] = acc.value();
    };
    return ll;
}

}  // namespace slt
