#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slt/rng.hpp"
#include "slt/types.hpp"

namespace slt {

/// Optional closed-form knowledge about the data-generating process: the
/// optimal parameter w0, its loss L(w0), and a learning coefficient lambda
/// when the experimenter supplies one (never asserted by the library itself
/// unless it is derivable, as for the regular realizable Gaussian-mean case).
struct TruthMeta {
    std::vector<double> w0;
    double optimal_loss = kNaN;
    std::optional<double> known_lambda;
    std::string known_lambda_source;
};

/// Log-likelihood of the whole dataset bound to one (model, data) pair.
/// `value(w)` returns sum_i log p(X_i | w); models with sufficient statistics
/// override bind_log_likelihood to make this O(d) instead of O(n d) per call.
struct LogLikelihood {
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;  // d(sum log p)/dw
    bool has_gradient = false;
};

/// Statistical model contract: an evaluable log density log p(x|w), a log
/// prior known up to an additive constant, a compact parameter box, and an
/// optional truth sampler for q(x). Implementations are pure functions of
/// their inputs and safe to call from multiple threads.
class ModelSpec {
  public:
    virtual ~ModelSpec() = default;

    virtual std::string name() const = 0;
    virtual std::size_t parameter_dim() const = 0;
    virtual std::size_t observation_dim() const = 0;
    virtual const Bounds& bounds() const = 0;

    virtual double log_density(std::span<const double> x, std::span<const double> w) const = 0;

    /// log p(X_i|w) for every observation into `out` (size n). The hot path of
    /// posterior-functional evaluation; default loops over log_density.
    virtual void log_density_all(const Dataset& data, std::span<const double> w,
                                 std::span<double> out) const {
        for (std::size_t i = 0; i < data.size(); ++i) out[i] = log_density(data.observation(i), w);
    }

    virtual bool has_gradient() const { return false; }
    /// d log p(x|w) / dw into `grad` (size d). Only called when has_gradient().
    virtual void log_density_gradient(std::span<const double> x, std::span<const double> w,
                                      std::span<double> grad) const;

    /// Log prior up to an additive constant; every criterion is invariant to
    /// that constant.
    virtual double log_prior(std::span<const double> w) const = 0;
    virtual void log_prior_gradient(std::span<const double> w, std::span<double> grad) const {
        for (auto& g : grad) g = 0.0;  // uniform-on-box default
    }

    virtual bool has_truth_sampler() const { return false; }
    /// One observation from q(x) into `out` (size p).
    virtual void draw_truth(Rng& rng, std::span<double> out) const;

    virtual std::optional<TruthMeta> truth_meta() const { return std::nullopt; }

    /// Dataset-bound likelihood closures used by the sampler. The returned
    /// object references both the model and the data; keep them alive.
    virtual LogLikelihood bind_log_likelihood(const Dataset& data) const;
};

}  // namespace slt
