#include "slt/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace slt {

void ModelSpec::log_density_gradient(std::span<const double>, std::span<const double>,
                                     std::span<double>) const {
    throw std::logic_error(name() + ": log_density_gradient not available");
}

void ModelSpec::draw_truth(Rng&, std::span<double>) const {
    throw std::logic_error(name() +
                           ": no truth sampler; ingest external data via read_dataset_csv");
}

LogLikelihood ModelSpec::bind_log_likelihood(const Dataset& data) const {
    LogLikelihood ll;
    ll.value = [this, &data](std::span<const double> w) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < data.size(); ++i) acc.add(log_density(data.observation(i), w));
        return acc.value();
    };
    if (has_gradient()) {
        ll.has_gradient = true;
        ll.gradient = [this, &data](std::span<const double> w, std::span<double> grad) {
            std::vector<double> g(w.size());
            for (auto& v : grad) v = 0.0;
            for (std::size_t i = 0; i < data.size(); ++i) {
                log_density_gradient(data.observation(i), w, g);
                for (std::size_t j = 0; j < w.size(); ++j) grad[j] += g[j];
            }
        };
    }
    return ll;
}

double empirical_loss(const ModelSpec& model, const Dataset& data, std::span<const double> w) {
    require(w.size() == model.parameter_dim(), "empirical_loss: parameter dimension mismatch");
    require(data.dim() == model.observation_dim(), "empirical_loss: observation dimension mismatch");
    CompensatedSum acc;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double lp = model.log_density(data.observation(i), w);
        if (!std::isfinite(lp))
            throw std::runtime_error("empirical_loss: non-finite log density at observation " +
                                     std::to_string(i));
        acc.add(lp);
    }
    return -acc.value() / static_cast<double>(data.size());
}

double expected_loss_mc(const ModelSpec& model, std::span<const double> w,
                        const Dataset& test_draws) {
    return empirical_loss(model, test_draws, w);
}

Dataset sample_truth(const ModelSpec& model, std::size_t n, std::uint64_t seed) {
    require(n >= 2, "sample_truth: n must be >= 2");
    const std::size_t p = model.observation_dim();
    std::vector<double> values(n * p);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) model.draw_truth(rng, {values.data() + i * p, p});
    return Dataset(p, std::move(values));
}

}  // namespace slt
