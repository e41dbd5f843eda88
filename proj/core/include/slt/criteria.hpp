#pragma once

#include <cstdint>
#include <string>

#include "slt/sampler.hpp"

namespace slt {

/// Per-datum posterior functionals of log p(X_i|w) under one tempered
/// posterior, plus the posterior mean/variance of n L_n(w). Everything any
/// criterion needs, whether the posterior came from MCMC, quadrature, or a
/// closed form.
struct PosteriorFunctionals {
    double beta = 1.0;
    std::size_t n = 0;
    std::size_t draw_count = 0;

    std::vector<double> per_datum_logp_mean;  // E_w^beta[log p(X_i|w)]
    std::vector<double> per_datum_logp_var;   // V_w^beta[log p(X_i|w)]
    std::vector<double> per_datum_pred_logp;  // log E_w^beta[p(X_i|w)], max-shifted log-mean-exp

    double E_nLn = 0.0;  // E_w^beta[n L_n(w)]
    double V_nLn = 0.0;  // V_w^beta[n L_n(w)], 0 for a single draw

    struct EssSummary {
        double ess_nl = kInf;         // effective sample size of the n L_n(w) series
        double min_coord_ess = kInf;  // min over coordinates, summed across chains
    } ess;

    /// Contiguous-draw batch summaries used for Monte Carlo standard errors of
    /// composite criteria; empty for exact (oracle/quadrature) functionals.
    struct Batch {
        double T_n, V_n, E_nLn, V_nLn;
    };
    std::vector<Batch> batches;
    bool exact = false;
};

/// Evaluate the per-datum functionals over the draws of one or more chains at
/// a common temperature. Deterministic for fixed chains regardless of caller
/// threading.
PosteriorFunctionals functionals(const ModelSpec& model, const Dataset& data,
                                 std::span<const Chain> chains);
PosteriorFunctionals functionals(const ModelSpec& model, const Dataset& data, const Chain& chain);

/// Bayes training loss T_n(beta) = -(1/n) sum_i log E_w^beta[p(X_i|w)].
double bayes_training_loss(const PosteriorFunctionals& pf);

/// Functional variance V_n(beta) = sum_i V_w^beta[log p(X_i|w)].
double functional_variance(const PosteriorFunctionals& pf);

/// WAIC at the functionals' temperature: T_n(beta) + beta V_n(beta) / n.
double waic(const PosteriorFunctionals& pf);

/// WBIC = E_w^{1/log n}[n L_n(w)]. The functionals must be at exactly the
/// WBIC temperature (|beta - 1/log n| <= 1e-12); a silent mismatch is the
/// likeliest field bug, so this throws rather than warns.
double wbic(const PosteriorFunctionals& pf_at_wbic_temp);

/// Gibbs training loss T'_n(beta) = -(1/n) sum_i E_w^beta[log p(X_i|w)].
double gibbs_training_loss(const PosteriorFunctionals& pf);

/// Gibbs generalization loss estimate: mean over chain draws of the Monte
/// Carlo expected loss on fresh test draws.
double gibbs_generalization_loss(const ModelSpec& model, const Chain& chain,
                                 const Dataset& test_draws);

/// RLCT estimator from the WBIC-temperature posterior:
/// lambda_hat = (1/log n)^2 V_w^{1/log n}[n L_n(w)].
double imai_lambda(const PosteriorFunctionals& pf_at_wbic_temp);

/// Plug-in singular fluctuation nu_hat(beta) = (beta/2) V_n(beta); dataset
/// expectation is the harness's replication average.
double singular_fluctuation_hat(const PosteriorFunctionals& pf);

/// WAIC estimate computable from the WBIC-temperature posterior alone:
/// raw       = WBIC - lambda_hat (log n - 1) + V_n(1/log n) / (2 log n)
/// per_datum = raw / n.
/// `raw` estimates n E[WAIC(beta=1)]; the per-datum scale is the one
/// comparable to WAIC itself.
struct LinkedWaic {
    double raw;
    double per_datum;
};
LinkedWaic linked_waic(const PosteriorFunctionals& pf_at_wbic_temp, std::size_t n);

/// General-beta variant; needs the second posterior at `beta`:
/// raw = WBIC - lambda_hat (log n - 1/beta) + V_n(1/log n)/(2 log n)
///       + (beta/2) V_n(beta) (1 - 1/beta).
/// Reduces exactly to linked_waic at beta = 1.
LinkedWaic linked_waic_general_beta(const PosteriorFunctionals& pf_at_wbic_temp,
                                    const PosteriorFunctionals& pf_at_beta, std::size_t n);

/// Estimate of the optimum empirical loss L_n(w0) from the WBIC posterior:
/// WBIC/n - lambda_hat log n / n.
double optimum_loss_estimate(const PosteriorFunctionals& pf_at_wbic_temp, std::size_t n);

/// Residuals of the equation of state linking Bayes and Gibbs losses:
/// r1 = (G - T) - 2 beta (T' - T), r2 = (G' - T') - 2 beta (T' - T).
struct EosResiduals {
    double r1;
    double r2;
};
EosResiduals equation_of_state_residuals(double bayes_gen, double bayes_train, double gibbs_gen,
                                         double gibbs_train, double beta);

/// Every criterion at one main temperature plus the WBIC-chain quantities,
/// each with a Monte Carlo standard error (batch means over contiguous draw
/// batches; 0 for exact functionals).
struct CriteriaReport {
    std::size_t n = 0;
    double beta_main = 1.0;

    double waic = kNaN, waic_mc_se = kNaN;
    double waic_Tn = kNaN, waic_Tn_mc_se = kNaN;
    double waic_Vn = kNaN, waic_Vn_mc_se = kNaN;
    double wbic = kNaN, wbic_mc_se = kNaN;
    double lambda_hat = kNaN, lambda_hat_mc_se = kNaN;
    double nu_hat_at_wbic_temp = kNaN, nu_hat_at_wbic_temp_mc_se = kNaN;
    double nu_hat_at_beta = kNaN, nu_hat_at_beta_mc_se = kNaN;
    double linked_waic = kNaN, linked_waic_mc_se = kNaN;  // per-datum scale
    double linked_waic_raw = kNaN, linked_waic_raw_mc_se = kNaN;  // n-scaled
    double gibbs_train = kNaN, gibbs_train_mc_se = kNaN;
    double optimum_loss_est = kNaN, optimum_loss_est_mc_se = kNaN;

    struct Provenance {
        std::uint64_t chain_seed_main = 0;
        std::uint64_t chain_seed_wbic = 0;
        std::string config_digest;
        double ess_nl_main = kNaN;
        double ess_nl_wbic = kNaN;
        double min_coord_ess = kNaN;
        double acceptance_rate_main = kNaN;
        double acceptance_rate_wbic = kNaN;
    } provenance;
};

/// Assemble a report from the main-temperature functionals and the
/// WBIC-temperature functionals (which may be the same object when
/// beta_main == 1/log n).
CriteriaReport build_criteria_report(const PosteriorFunctionals& pf_main,
                                     const PosteriorFunctionals& pf_wbic, std::size_t n);

std::string criteria_report_json(const CriteriaReport& r);
std::string criteria_report_csv_header();
std::string criteria_report_csv_row(const CriteriaReport& r);

}  // namespace slt
