#pragma once

#include <cstdint>
#include <functional>

#include "slt/model.hpp"

namespace slt {

enum class Algorithm { RandomWalkMetropolis, Mala };

struct SamplerConfig {
    Algorithm algorithm = Algorithm::RandomWalkMetropolis;
    double step_size = 0.5;
    std::size_t n_steps = 30000;
    std::size_t burn_in = 5000;
    std::size_t thin = 10;
    std::size_t n_chains = 1;
    std::uint64_t seed = 1;
    bool adapt = true;  // step-size adaptation during burn-in, frozen afterwards

    void validate() const;
};

/// Ordered tempered-posterior draws (post burn-in, post thinning) with the
/// per-draw unnormalised log posterior beta * sum_i log p(X_i|w) + log phi(w),
/// the realised acceptance rate, and per-coordinate effective sample sizes.
struct Chain {
    double beta = 1.0;
    std::size_t dim = 0;
    std::vector<double> draws;  // row-major, draw_count x dim
    std::vector<double> log_unnorm_posterior;
    double acceptance_rate = 0.0;
    std::vector<double> ess;  // per coordinate
    std::uint64_t seed = 0;
    double step_size_used = 0.0;

    std::size_t draw_count() const noexcept { return dim == 0 ? 0 : draws.size() / dim; }
    std::span<const double> draw(std::size_t s) const noexcept {
        return {draws.data() + s * dim, dim};
    }
};

/// Metropolis(-adjusted Langevin) chain targeting the tempered posterior of
/// (model, data) at inverse temperature beta, restricted to the model's
/// bounds box. Deterministic given the seed.
Chain run_chain(const ModelSpec& model, const Dataset& data, InverseTemperature beta,
                const SamplerConfig& cfg);

/// cfg.n_chains chains with sub-seeds derived from cfg.seed.
std::vector<Chain> run_chains(const ModelSpec& model, const Dataset& data, InverseTemperature beta,
                              const SamplerConfig& cfg);

/// Posterior mean of a per-draw functional with its Monte Carlo standard
/// error sd(f)/sqrt(ESS_f); mc_se is +inf for a single draw.
struct ExpectationResult {
    double estimate;
    double mc_se;
};
ExpectationResult posterior_expectation(const Chain& chain,
                                        const std::function<double(std::span<const double>)>& f);

/// Unbiased (divisor count-1) posterior variance of a per-draw functional.
double posterior_variance(const Chain& chain,
                          const std::function<double(std::span<const double>)>& f);

/// Split-Rhat per coordinate; 1.0 when a coordinate has zero variance.
std::vector<double> rhat(const std::vector<Chain>& chains);

/// Effective sample size of a scalar series via Geyer's initial positive
/// sequence truncation of the autocorrelation sum.
double effective_sample_size(std::span<const double> series);

/// One draw per row: coordinates then log_unnorm_posterior.
void write_chain_csv(const Chain& chain, const std::string& path);

}  // namespace slt
