#pragma once

#include "slt/model.hpp"

namespace slt {

/// Gaussian mean model p(x|w) = N(x | w, sigma^2 I_d) with conjugate prior
/// N(prior_mean, tau^2 I_d) truncated to the box [-B, B]^d and true
/// distribution q = N(mu0, sigma^2 I_d). Regular and realizable, so
/// lambda = nu = d/2; the closed-form oracle in oracle.hpp covers it.
class ConjugateNormalMeanModel final : public ModelSpec {
  public:
    struct Config {
        std::size_t dim = 1;
        double sigma = 1.0;
        double tau = 1.0;
        std::vector<double> mu0;         // defaults to zeros
        std::vector<double> prior_mean;  // defaults to zeros
        double bound = 20.0;             // box half-width B
    };

    explicit ConjugateNormalMeanModel(Config cfg);

    std::string name() const override { return "conjugate_normal_mean"; }
    std::size_t parameter_dim() const override { return cfg_.dim; }
    std::size_t observation_dim() const override { return cfg_.dim; }
    const Bounds& bounds() const override { return bounds_; }

    double log_density(std::span<const double> x, std::span<const double> w) const override;
    void log_density_all(const Dataset& data, std::span<const double> w,
                         std::span<double> out) const override;
    bool has_gradient() const override { return true; }
    void log_density_gradient(std::span<const double> x, std::span<const double> w,
                              std::span<double> grad) const override;

    double log_prior(std::span<const double> w) const override;
    void log_prior_gradient(std::span<const double> w, std::span<double> grad) const override;

    bool has_truth_sampler() const override { return true; }
    void draw_truth(Rng& rng, std::span<double> out) const override;
    std::optional<TruthMeta> truth_meta() const override;

    /// O(d)-per-call likelihood via the sufficient statistics (xbar, scatter).
    LogLikelihood bind_log_likelihood(const Dataset& data) const override;

    const Config& config() const noexcept { return cfg_; }

  private:
    Config cfg_;
    Bounds bounds_;
    double log_norm_;  // -(d/2) log(2 pi sigma^2)
};

}  // namespace slt
