#include "slt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace slt {

void SamplerConfig::validate() const {
    require(step_size >= 0.0 && std::isfinite(step_size), "sampler: step_size must be finite, >= 0");
    require(n_steps >= 1, "sampler: n_steps must be >= 1");
    require(burn_in < n_steps, "sampler: burn_in must be < n_steps");
    require(thin >= 1, "sampler: thin must be >= 1");
    require(n_chains >= 1, "sampler: n_chains must be >= 1");
}

namespace {

constexpr double kTargetAcceptRwm = 0.234;
constexpr double kTargetAcceptMala = 0.574;

struct Target {
    const ModelSpec* model;
    const LogLikelihood* loglik;
    double beta;

    double operator()(std::span<const double> w) const {
        return beta * loglik->value(w) + model->log_prior(w);
    }
    void gradient(std::span<const double> w, std::span<double> g) const {
        loglik->gradient(w, g);
        std::vector<double> pg(w.size());
        model->log_prior_gradient(w, pg);
        for (std::size_t j = 0; j < w.size(); ++j) g[j] = beta * g[j] + pg[j];
    }
};

}  // namespace

Chain run_chain(const ModelSpec& model, const Dataset& data, InverseTemperature beta,
                const SamplerConfig& cfg) {
    cfg.validate();
    require(data.dim() == model.observation_dim(), "run_chain: data dimension mismatch");
    const std::size_t d = model.parameter_dim();
    const Bounds& box = model.bounds();
    const bool mala = cfg.algorithm == Algorithm::Mala;

    const LogLikelihood loglik = model.bind_log_likelihood(data);
    if (mala && !loglik.has_gradient)
        throw std::invalid_argument("run_chain: MALA requires a model with gradients");
    Target target{&model, &loglik, beta.beta};

    Rng rng(cfg.seed);

    // Start inside the central 50% of the box; dispersed inits support Rhat.
    std::vector<double> w(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double half = 0.25 * (box.hi[j] - box.lo[j]);
        const double mid = 0.5 * (box.lo[j] + box.hi[j]);
        w[j] = rng.uniform(mid - half, mid + half);
    }
    double logp = target(w);
    if (!std::isfinite(logp))
        throw std::runtime_error("run_chain: non-finite log target at the initial point");

    std::vector<double> grad(d), prop(d), prop_grad(d);
    if (mala) target.gradient(w, grad);

    double step = cfg.step_size;
    const double target_rate = mala ? kTargetAcceptMala : kTargetAcceptRwm;

    const std::size_t kept = (cfg.n_steps - cfg.burn_in + cfg.thin - 1) / cfg.thin;
    Chain chain;
    chain.beta = beta.beta;
    chain.dim = d;
    chain.seed = cfg.seed;
    chain.draws.reserve(kept * d);
    chain.log_unnorm_posterior.reserve(kept);

    std::size_t accepted = 0, post_burn_steps = 0;
    double adapt_log_step = std::log(std::max(step, 1e-300));

    for (std::size_t t = 0; t < cfg.n_steps; ++t) {
        bool accept = false;
        if (step == 0.0) {
            accept = true;  // degenerate proposal: stays put, Delta = 0
        } else if (!mala) {
            for (std::size_t j = 0; j < d; ++j) prop[j] = w[j] + step * rng.normal();
            if (box.contains(prop)) {
                const double lp = target(prop);
                const double log_ratio = lp - logp;  // acceptance in log space
                if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
                    w = prop;
                    logp = lp;
                    accept = true;
                }
            }
        } else {
            const double h = 0.5 * step * step;
            for (std::size_t j = 0; j < d; ++j) prop[j] = w[j] + h * grad[j] + step * rng.normal();
            if (box.contains(prop)) {
                const double lp = target(prop);
                if (std::isfinite(lp)) {
                    target.gradient(prop, prop_grad);
                    double fwd = 0.0, rev = 0.0;  // |w' - w - h grad|^2 terms
                    for (std::size_t j = 0; j < d; ++j) {
                        const double df = prop[j] - w[j] - h * grad[j];
                        const double dr = w[j] - prop[j] - h * prop_grad[j];
                        fwd += df * df;
                        rev += dr * dr;
                    }
                    const double log_ratio = lp - logp + (fwd - rev) / (2.0 * step * step);
                    if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
                        w = prop;
                        logp = lp;
                        grad = prop_grad;
                        accept = true;
                    }
                }
            }
        }

        if (t < cfg.burn_in) {
            if (cfg.adapt && step > 0.0) {
                // Robbins-Monro on log step, frozen at the end of burn-in.
                const double gain = 1.0 / std::pow(static_cast<double>(t + 1), 0.6);
                adapt_log_step += gain * ((accept ? 1.0 : 0.0) - target_rate);
                step = std::exp(adapt_log_step);
            }
            continue;
        }
        ++post_burn_steps;
        if (accept) ++accepted;
        if ((t - cfg.burn_in) % cfg.thin == 0) {
            chain.draws.insert(chain.draws.end(), w.begin(), w.end());
            chain.log_unnorm_posterior.push_back(logp);
        }
    }

    chain.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(post_burn_steps);
    chain.step_size_used = step;

    const std::size_t S = chain.draw_count();
    chain.ess.resize(d);
    std::vector<double> coord(S);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t s = 0; s < S; ++s) coord[s] = chain.draws[s * d + j];
        chain.ess[j] = effective_sample_size(coord);
    }
    return chain;
}

std::vector<Chain> run_chains(const ModelSpec& model, const Dataset& data, InverseTemperature beta,
                              const SamplerConfig& cfg) {
    std::vector<Chain> chains;
    chains.reserve(cfg.n_chains);
    for (std::size_t c = 0; c < cfg.n_chains; ++c) {
        SamplerConfig one = cfg;
        one.n_chains = 1;
        one.seed = cfg.n_chains == 1 ? cfg.seed : substream_seed(cfg.seed, c);
        chains.push_back(run_chain(model, data, beta, one));
    }
    return chains;
}

double effective_sample_size(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 2) return static_cast<double>(n);
    const double m = mean(series);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - m;
    double c0 = 0.0;
    for (double v : centered) c0 += v * v;
    c0 /= static_cast<double>(n);
    if (c0 <= 0.0) return static_cast<double>(n);  // constant series

    auto autocov = [&](std::size_t k) {
        double s = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) s += centered[i] * centered[i + k];
        return s / static_cast<double>(n);
    };

    // Geyer initial positive sequence: sum pair sums while they stay positive.
    double tau = 1.0;
    for (std::size_t k = 1; k + 1 < n; k += 2) {
        const double pair = autocov(k) + autocov(k + 1);
        if (pair <= 0.0) break;
        tau += 2.0 * pair / c0;
    }
    const double ess = static_cast<double>(n) / tau;
    return std::clamp(ess, 1.0, static_cast<double>(n));
}

ExpectationResult posterior_expectation(
    const Chain& chain, const std::function<double(std::span<const double>)>& f) {
    const std::size_t S = chain.draw_count();
    require(S >= 1, "posterior_expectation: empty chain");
    std::vector<double> vals(S);
    for (std::size_t s = 0; s < S; ++s) {
        vals[s] = f(chain.draw(s));
        if (!std::isfinite(vals[s]))
            throw std::runtime_error("posterior_expectation: non-finite functional at draw " +
                                     std::to_string(s));
    }
    const double est = mean(vals);
    if (S == 1) return {est, kInf};
    const double sd = std::sqrt(sample_variance(vals));
    const double ess = effective_sample_size(vals);
    return {est, sd / std::sqrt(ess)};
}

double posterior_variance(const Chain& chain,
                          const std::function<double(std::span<const double>)>& f) {
    const std::size_t S = chain.draw_count();
    require(S >= 2, "posterior_variance: need at least 2 draws");
    std::vector<double> vals(S);
    for (std::size_t s = 0; s < S; ++s) {
        vals[s] = f(chain.draw(s));
        if (!std::isfinite(vals[s]))
            throw std::runtime_error("posterior_variance: non-finite functional at draw " +
                                     std::to_string(s));
    }
    return sample_variance(vals);
}

std::vector<double> rhat(const std::vector<Chain>& chains) {
    require(chains.size() >= 2, "rhat: need at least 2 chains");
    const std::size_t S = chains[0].draw_count();
    const std::size_t d = chains[0].dim;
    for (const auto& c : chains)
        require(c.draw_count() == S && c.dim == d, "rhat: chains must have equal lengths");
    const std::size_t half = S / 2;
    require(half >= 2, "rhat: chains too short to split");

    std::vector<double> out(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<Welford> seqs;
        for (const auto& c : chains) {
            Welford a, b;
            for (std::size_t s = 0; s < half; ++s) a.add(c.draws[s * d + j]);
            for (std::size_t s = half; s < 2 * half; ++s) b.add(c.draws[s * d + j]);
            seqs.push_back(a);
            seqs.push_back(b);
        }
        const double m = static_cast<double>(seqs.size());
        const double len = static_cast<double>(half);
        Welford between;
        double within = 0.0;
        for (const auto& s : seqs) {
            between.add(s.mean);
            within += s.variance();
        }
        within /= m;
        if (within <= 0.0) {
            out[j] = 1.0;  // zero-variance convention
            continue;
        }
        const double b_over_n = between.variance();  // var of sequence means
        const double var_plus = (len - 1.0) / len * within + b_over_n;
        out[j] = std::sqrt(var_plus / within);
    }
    return out;
}

void write_chain_csv(const Chain& chain, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_chain_csv: cannot open " + path);
    for (std::size_t j = 0; j < chain.dim; ++j) os << "w" << j << ",";
    os << "log_unnorm_posterior\n";
    char buf[32];
    for (std::size_t s = 0; s < chain.draw_count(); ++s) {
        auto w = chain.draw(s);
        for (std::size_t j = 0; j < chain.dim; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", w[j]);
            os << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", chain.log_unnorm_posterior[s]);
        os << buf << "\n";
    }
}

}  // namespace slt
