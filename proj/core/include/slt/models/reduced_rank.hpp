#pragma once

#include "slt/model.hpp"

namespace slt {

/// Reduced rank regression y = B A x + eps, eps ~ N(0, I_N), x ~ N(0, I_M).
/// An observation packs (x, y) into one vector of length M + N; parameters
/// pack A (H x M, row-major) then B (N x H, row-major) into d = H (M + N)
/// coordinates. The model conditions on x; the exogenous x-marginal is taken
/// to be the true N(0, I_M) density, an additive constant shared by all
/// parameters, so criteria differences are unaffected. The map (A, B) ->
/// (cA, B/c) leaves the density unchanged, which is the source of
/// singularity. Uniform prior on the parameter box.
class ReducedRankRegressionModel final : public ModelSpec {
  public:
    struct Config {
        std::size_t input_dim = 1;   // M
        std::size_t output_dim = 1;  // N
        std::size_t rank = 1;        // H
        std::vector<double> true_coeff;  // N x M row-major; defaults to zeros (rank 0)
        double bound = 10.0;             // parameter box half-width
    };

    explicit ReducedRankRegressionModel(Config cfg);

    std::string name() const override { return "reduced_rank_regression"; }
    std::size_t parameter_dim() const override {
        return cfg_.rank * (cfg_.input_dim + cfg_.output_dim);
    }
    std::size_t observation_dim() const override { return cfg_.input_dim + cfg_.output_dim; }
    const Bounds& bounds() const override { return bounds_; }

    double log_density(std::span<const double> xy, std::span<const double> w) const override;
    bool has_gradient() const override { return true; }
    void log_density_gradient(std::span<const double> xy, std::span<const double> w,
                              std::span<double> grad) const override;

    double log_prior(std::span<const double>) const override { return 0.0; }

    bool has_truth_sampler() const override { return true; }
    void draw_truth(Rng& rng, std::span<double> out) const override;

    const Config& config() const noexcept { return cfg_; }

  private:
    // w layout: A[h][m] = w[h*M + m], B[i][h] = w[H*M + i*H + h]
    void apply_map(std::span<const double> w, std::span<const double> x,
                   std::span<double> ax, std::span<double> bax) const;

    Config cfg_;
    Bounds bounds_;
    double log_norm_;  // -(M+N)/2 log(2 pi)
};

}  // namespace slt
