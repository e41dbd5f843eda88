#pragma once

#include <optional>

#include "slt/model.hpp"

namespace slt {

/// Two-component Gaussian mixture p(x|a,b) = (1-a) N(x|0,1) + a N(x|b,1)
/// with true distribution N(0,1) (realizable along the singular set a = 0 or
/// b = 0). Parameters are (a, b) with a in [0, 1] and b in [-b_bound, b_bound];
/// fixing b collapses the model to the one-dimensional free parameter a.
/// Uniform prior on the parameter box.
class GaussianMixtureModel final : public ModelSpec {
  public:
    struct Config {
        double b_bound = 5.0;
        std::optional<double> fixed_b;  // set => d = 1 (a only)
    };

    explicit GaussianMixtureModel(Config cfg = {});

    std::string name() const override { return "gaussian_mixture"; }
    std::size_t parameter_dim() const override { return cfg_.fixed_b ? 1 : 2; }
    std::size_t observation_dim() const override { return 1; }
    const Bounds& bounds() const override { return bounds_; }

    double log_density(std::span<const double> x, std::span<const double> w) const override;
    void log_density_all(const Dataset& data, std::span<const double> w,
                         std::span<double> out) const override;
    bool has_gradient() const override { return true; }
    void log_density_gradient(std::span<const double> x, std::span<const double> w,
                              std::span<double> grad) const override;

    double log_prior(std::span<const double>) const override { return 0.0; }

    bool has_truth_sampler() const override { return true; }
    void draw_truth(Rng& rng, std::span<double> out) const override;
    std::optional<TruthMeta> truth_meta() const override;

    /// With b fixed the two component densities per datum are parameter-free;
    /// caching them makes each likelihood call O(n) cheap multiplies.
    LogLikelihood bind_log_likelihood(const Dataset& data) const override;

    const Config& config() const noexcept { return cfg_; }

  private:
    double mix_a(std::span<const double> w) const { return w[0]; }
    double mix_b(std::span<const double> w) const { return cfg_.fixed_b ? *cfg_.fixed_b : w[1]; }

    Config cfg_;
    Bounds bounds_;
};

}  // namespace slt
