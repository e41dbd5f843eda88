#pragma once

#include <optional>

#include "slt/criteria.hpp"
#include "slt/models/conjugate_normal.hpp"

namespace slt {

/// Exact tempered-posterior criteria for the conjugate Gaussian mean model.
/// Ground-truth hierarchy: these closed forms are trusted only because the
/// test suite validates every exported field against the quadrature oracle
/// (d = 1, 1e-8 relative) before they back any other test.
struct ConjugateOracleResult {
    double beta = 1.0;
    std::vector<double> posterior_mean;
    double posterior_variance = 0.0;  // isotropic, per coordinate

    double E_nLn = 0.0;
    double V_nLn = 0.0;
    std::vector<double> per_datum_logp_mean;
    std::vector<double> per_datum_logp_var;
    std::vector<double> predictive_logp;  // log E_w^beta[p(X_i|w)]

    double T_n = 0.0;           // Bayes training loss
    double V_n = 0.0;           // functional variance
    double bayes_gen_loss = 0.0;
    double gibbs_train_loss = 0.0;
    double gibbs_gen_loss = 0.0;
    double waic = 0.0;

    struct WbicComponentTerms {
        double F_hat = 0.0;             // WBIC = E_w^{1/log n}[n L_n]
        double lambda_hat = 0.0;        // Imai estimator at 1/log n
        double Vn_at_wbic_temp = 0.0;   // V_n(1/log n)
    } wbic_component_terms;
};

/// All fields exact to floating point; throws when the posterior mass outside
/// the bounds box exceeds 1e-12 (the closed forms ignore truncation).
ConjugateOracleResult conjugate_exact(const ConjugateNormalMeanModel& model, const Dataset& data,
                                      InverseTemperature beta);

/// Exact Bayes generalization loss G_n(beta): the Bayes predictive is
/// Gaussian, so -integral q log p* is a closed-form Gaussian cross-entropy.
double conjugate_bayes_gen_loss(const ConjugateNormalMeanModel& model, const Dataset& data,
                                InverseTemperature beta);

/// Exact Gibbs generalization loss G'_n(beta) = E_w^beta[L(w)].
double conjugate_gibbs_gen_loss(const ConjugateNormalMeanModel& model, const Dataset& data,
                                InverseTemperature beta);

/// Exact PosteriorFunctionals bridge so every criterion op can run on the
/// oracle path (mc_se = 0).
PosteriorFunctionals conjugate_functionals(const ConjugateNormalMeanModel& model,
                                           const Dataset& data, InverseTemperature beta);

/// Deterministic tensor-grid reference posterior for low-dimensional models:
/// uniform nodes per axis, log weights = tempered log posterior, normalised by
/// log-sum-exp (the uniform cell volume cancels).
struct QuadratureOracle {
    std::vector<std::vector<double>> axes;  // node positions per axis, d <= 2
    std::vector<double> nodes;              // flattened node_count x d
    std::vector<double> log_weights;        // normalised: logsumexp = 0
    double beta = 1.0;

    std::size_t dim() const noexcept { return axes.size(); }
    std::size_t node_count() const noexcept { return dim() == 0 ? 0 : nodes.size() / dim(); }
    std::span<const double> node(std::size_t k) const noexcept {
        return {nodes.data() + k * dim(), dim()};
    }
};

/// Per-axis node count <= 401, d <= 2. `ranges` restricts the grid to a
/// sub-box of the parameter bounds (the posterior bulk may be far narrower
/// than the box); defaults to the full bounds.
QuadratureOracle build_quadrature(const ModelSpec& model, const Dataset& data,
                                  InverseTemperature beta, std::size_t nodes_per_axis,
                                  std::optional<Bounds> ranges = std::nullopt);

/// sum_k w_k f_k with normalised weights; errors on non-finite node values.
double quadrature_expectation(const QuadratureOracle& q, std::span<const double> f_at_nodes);
double quadrature_variance(const QuadratureOracle& q, std::span<const double> f_at_nodes);

/// PosteriorFunctionals under the quadrature posterior (exact = true).
PosteriorFunctionals quadrature_functionals(const ModelSpec& model, const Dataset& data,
                                            const QuadratureOracle& q);

/// Bayes / Gibbs generalization losses by one-dimensional x-quadrature for
/// realizable models with observation_dim == 1 and truth_meta()->w0 (the true
/// density is evaluated as p(x|w0)). Trapezoid rule on [x_lo, x_hi].
double quadrature_bayes_gen_loss(const ModelSpec& model, const QuadratureOracle& q, double x_lo,
                                 double x_hi, std::size_t x_nodes);
double quadrature_gibbs_gen_loss(const ModelSpec& model, const QuadratureOracle& q, double x_lo,
                                 double x_hi, std::size_t x_nodes);

}  // namespace slt
