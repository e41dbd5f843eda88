#pragma once

#include "slt/model.hpp"

namespace slt {

/// Empirical loss L_n(w) = -(1/n) sum_i log p(X_i|w).
double empirical_loss(const ModelSpec& model, const Dataset& data, std::span<const double> w);

/// Monte Carlo estimate of the expected loss L(w) = -E_q[log p(X|w)] from
/// fresh draws of the true distribution; identical to empirical_loss on the
/// test set.
double expected_loss_mc(const ModelSpec& model, std::span<const double> w,
                        const Dataset& test_draws);

/// n i.i.d. observations from the model's true distribution, deterministic in
/// the seed.
Dataset sample_truth(const ModelSpec& model, std::size_t n, std::uint64_t seed);

}  // namespace slt
