#include "slt/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace slt {

namespace {

void check_wbic_temperature(const PosteriorFunctionals& pf) {
    const double want = 1.0 / std::log(static_cast<double>(pf.n));
    if (std::abs(pf.beta - want) > 1e-12)
        throw std::invalid_argument(
            "expected functionals at the WBIC temperature 1/log n = " + std::to_string(want) +
            ", got beta = " + std::to_string(pf.beta));
}

std::size_t batch_count_for(std::size_t draws) {
    if (draws < 20) return 1;
    return std::clamp<std::size_t>(draws / 100, 10, 50);
}

double batch_se(const std::vector<double>& vals) {
    if (vals.size() < 2) return kInf;
    return std::sqrt(sample_variance(vals) / static_cast<double>(vals.size()));
}

}  // namespace

PosteriorFunctionals functionals(const ModelSpec& model, const Dataset& data,
                                 std::span<const Chain> chains) {
    require(!chains.empty(), "functionals: no chains");
    const std::size_t n = data.size();
    const double beta = chains[0].beta;
    for (const auto& c : chains) {
        require(c.beta == beta, "functionals: chains at different temperatures");
        require(c.dim == model.parameter_dim(), "functionals: chain dimension mismatch");
        require(c.draw_count() >= 1, "functionals: empty chain");
    }

    PosteriorFunctionals pf;
    pf.beta = beta;
    pf.n = n;

    std::vector<Welford> mean_acc(n);
    std::vector<LogSumExp> pred_acc(n);
    std::vector<double> nl_all;
    std::vector<double> buf(n);

    std::vector<Welford> batch_mean(n);
    std::vector<LogSumExp> batch_pred(n);

    double ess_nl = 0.0;
    std::vector<double> coord_ess_sum(model.parameter_dim(), 0.0);

    for (const auto& chain : chains) {
        const std::size_t S = chain.draw_count();
        const std::size_t K = batch_count_for(S);
        std::vector<double> nl_chain;
        nl_chain.reserve(S);

        for (std::size_t b = 0; b < K; ++b) {
            const std::size_t s0 = b * S / K;
            const std::size_t s1 = (b + 1) * S / K;
            for (auto& w : batch_mean) w = Welford{};
            for (auto& l : batch_pred) l = LogSumExp{};
            std::vector<double> nl_batch;
            nl_batch.reserve(s1 - s0);

            for (std::size_t s = s0; s < s1; ++s) {
                model.log_density_all(data, chain.draw(s), buf);
                CompensatedSum nl;
                for (std::size_t i = 0; i < n; ++i) {
                    const double v = buf[i];
                    if (!std::isfinite(v))
                        throw std::runtime_error("functionals: non-finite log density at draw " +
                                                 std::to_string(s) + ", observation " +
                                                 std::to_string(i));
                    batch_mean[i].add(v);
                    batch_pred[i].add(v);
                    nl.add(v);
                }
                nl_batch.push_back(-nl.value());
            }

            PosteriorFunctionals::Batch summary;
            CompensatedSum t_acc, v_acc;
            for (std::size_t i = 0; i < n; ++i) {
                t_acc.add(batch_pred[i].log_mean());
                v_acc.add(batch_mean[i].variance());
            }
            summary.T_n = -t_acc.value() / static_cast<double>(n);
            summary.V_n = v_acc.value();
            summary.E_nLn = mean(nl_batch);
            summary.V_nLn = nl_batch.size() >= 2 ? sample_variance(nl_batch) : 0.0;
            pf.batches.push_back(summary);

            for (std::size_t i = 0; i < n; ++i) {
                mean_acc[i].merge(batch_mean[i]);
                pred_acc[i].merge(batch_pred[i]);
            }
            nl_chain.insert(nl_chain.end(), nl_batch.begin(), nl_batch.end());
        }

        ess_nl += effective_sample_size(nl_chain);
        for (std::size_t j = 0; j < chain.ess.size(); ++j) coord_ess_sum[j] += chain.ess[j];
        nl_all.insert(nl_all.end(), nl_chain.begin(), nl_chain.end());
    }

    pf.draw_count = nl_all.size();
    pf.per_datum_logp_mean.resize(n);
    pf.per_datum_logp_var.resize(n);
    pf.per_datum_pred_logp.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pf.per_datum_logp_mean[i] = mean_acc[i].mean;
        pf.per_datum_logp_var[i] = mean_acc[i].variance();
        pf.per_datum_pred_logp[i] = pred_acc[i].log_mean();
    }
    pf.E_nLn = mean(nl_all);
    pf.V_nLn = nl_all.size() >= 2 ? sample_variance(nl_all) : 0.0;
    pf.ess.ess_nl = ess_nl;
    pf.ess.min_coord_ess = coord_ess_sum.empty()
                               ? kInf
                               : *std::min_element(coord_ess_sum.begin(), coord_ess_sum.end());
    return pf;
}

PosteriorFunctionals functionals(const ModelSpec& model, const Dataset& data, const Chain& chain) {
    return functionals(model, data, std::span<const Chain>(&chain, 1));
}

double bayes_training_loss(const PosteriorFunctionals& pf) {
    return -mean(pf.per_datum_pred_logp);
}

double functional_variance(const PosteriorFunctionals& pf) {
    return compensated_sum(pf.per_datum_logp_var);
}

double waic(const PosteriorFunctionals& pf) {
    return bayes_training_loss(pf) +
           pf.beta * functional_variance(pf) / static_cast<double>(pf.n);
}

double wbic(const PosteriorFunctionals& pf_at_wbic_temp) {
    check_wbic_temperature(pf_at_wbic_temp);
    return pf_at_wbic_temp.E_nLn;
}

double gibbs_training_loss(const PosteriorFunctionals& pf) {
    return -mean(pf.per_datum_logp_mean);
}

double gibbs_generalization_loss(const ModelSpec& model, const Chain& chain,
                                 const Dataset& test_draws) {
    const std::size_t S = chain.draw_count();
    require(S >= 1, "gibbs_generalization_loss: empty chain");
    std::vector<double> buf(test_draws.size());
    CompensatedSum acc;
    for (std::size_t s = 0; s < S; ++s) {
        model.log_density_all(test_draws, chain.draw(s), buf);
        for (std::size_t i = 0; i < buf.size(); ++i)
            if (!std::isfinite(buf[i]))
                throw std::runtime_error(
                    "gibbs_generalization_loss: non-finite log density at draw " +
                    std::to_string(s) + ", test observation " + std::to_string(i));
        acc.add(-compensated_sum(buf) / static_cast<double>(test_draws.size()));
    }
    return acc.value() / static_cast<double>(S);
}

double imai_lambda(const PosteriorFunctionals& pf_at_wbic_temp) {
    check_wbic_temperature(pf_at_wbic_temp);
    return pf_at_wbic_temp.beta * pf_at_wbic_temp.beta * pf_at_wbic_temp.V_nLn;
}

double singular_fluctuation_hat(const PosteriorFunctionals& pf) {
    return 0.5 * pf.beta * functional_variance(pf);
}

LinkedWaic linked_waic(const PosteriorFunctionals& pf_at_wbic_temp, std::size_t n) {
    check_wbic_temperature(pf_at_wbic_temp);
    require(n >= 3, "linked_waic: n must be >= 3 so that log n > 1");
    const double logn = std::log(static_cast<double>(n));
    const double raw = wbic(pf_at_wbic_temp) - imai_lambda(pf_at_wbic_temp) * (logn - 1.0) +
                       functional_variance(pf_at_wbic_temp) / (2.0 * logn);
    return {raw, raw / static_cast<double>(n)};
}

LinkedWaic linked_waic_general_beta(const PosteriorFunctionals& pf_at_wbic_temp,
                                    const PosteriorFunctionals& pf_at_beta, std::size_t n) {
    check_wbic_temperature(pf_at_wbic_temp);
    require(pf_at_beta.n == n && pf_at_wbic_temp.n == n,
            "linked_waic_general_beta: dataset size mismatch");
    require(n >= 3, "linked_waic_general_beta: n must be >= 3");
    const double beta = pf_at_beta.beta;
    const double logn = std::log(static_cast<double>(n));
    const double raw = wbic(pf_at_wbic_temp) -
                       imai_lambda(pf_at_wbic_temp) * (logn - 1.0 / beta) +
                       functional_variance(pf_at_wbic_temp) / (2.0 * logn) +
                       0.5 * beta * functional_variance(pf_at_beta) * (1.0 - 1.0 / beta);
    return {raw, raw / static_cast<double>(n)};
}

double optimum_loss_estimate(const PosteriorFunctionals& pf_at_wbic_temp, std::size_t n) {
    check_wbic_temperature(pf_at_wbic_temp);
    const double logn = std::log(static_cast<double>(n));
    return wbic(pf_at_wbic_temp) / static_cast<double>(n) -
           imai_lambda(pf_at_wbic_temp) * logn / static_cast<double>(n);
}

EosResiduals equation_of_state_residuals(double bayes_gen, double bayes_train, double gibbs_gen,
                                         double gibbs_train, double beta) {
    const double gap = 2.0 * beta * (gibbs_train - bayes_train);
    return {(bayes_gen - bayes_train) - gap, (gibbs_gen - gibbs_train) - gap};
}

CriteriaReport build_criteria_report(const PosteriorFunctionals& pf_main,
                                     const PosteriorFunctionals& pf_wbic, std::size_t n) {
    require(pf_main.n == n && pf_wbic.n == n, "build_criteria_report: dataset size mismatch");
    check_wbic_temperature(pf_wbic);
    const double logn = std::log(static_cast<double>(n));
    const double nn = static_cast<double>(n);

    CriteriaReport r;
    r.n = n;
    r.beta_main = pf_main.beta;

    r.waic_Tn = bayes_training_loss(pf_main);
    r.waic_Vn = functional_variance(pf_main);
    r.waic = r.waic_Tn + pf_main.beta * r.waic_Vn / nn;
    r.nu_hat_at_beta = 0.5 * pf_main.beta * r.waic_Vn;
    r.gibbs_train = gibbs_training_loss(pf_main);

    r.wbic = wbic(pf_wbic);
    r.lambda_hat = imai_lambda(pf_wbic);
    r.nu_hat_at_wbic_temp = singular_fluctuation_hat(pf_wbic);
    const LinkedWaic lw = linked_waic(pf_wbic, n);
    r.linked_waic_raw = lw.raw;
    r.linked_waic = lw.per_datum;
    r.optimum_loss_est = optimum_loss_estimate(pf_wbic, n);

    // Batch-means standard errors: recompose each criterion per draw batch.
    if (pf_main.exact) {
        r.waic_mc_se = r.waic_Tn_mc_se = r.waic_Vn_mc_se = 0.0;
        r.nu_hat_at_beta_mc_se = r.gibbs_train_mc_se = 0.0;
    } else {
        std::vector<double> w_b, t_b, v_b, nu_b, g_b;
        for (const auto& b : pf_main.batches) {
            t_b.push_back(b.T_n);
            v_b.push_back(b.V_n);
            w_b.push_back(b.T_n + pf_main.beta * b.V_n / nn);
            nu_b.push_back(0.5 * pf_main.beta * b.V_n);
            g_b.push_back(b.E_nLn / nn);
        }
        r.waic_mc_se = batch_se(w_b);
        r.waic_Tn_mc_se = batch_se(t_b);
        r.waic_Vn_mc_se = batch_se(v_b);
        r.nu_hat_at_beta_mc_se = batch_se(nu_b);
        r.gibbs_train_mc_se = batch_se(g_b);
    }
    if (pf_wbic.exact) {
        r.wbic_mc_se = r.lambda_hat_mc_se = r.nu_hat_at_wbic_temp_mc_se = 0.0;
        r.linked_waic_mc_se = r.linked_waic_raw_mc_se = r.optimum_loss_est_mc_se = 0.0;
    } else {
        const double bw = pf_wbic.beta;
        std::vector<double> f_b, l_b, nu_b, lk_b, op_b;
        for (const auto& b : pf_wbic.batches) {
            const double lam = bw * bw * b.V_nLn;
            f_b.push_back(b.E_nLn);
            l_b.push_back(lam);
            nu_b.push_back(0.5 * bw * b.V_n);
            lk_b.push_back(b.E_nLn - lam * (logn - 1.0) + b.V_n / (2.0 * logn));
            op_b.push_back(b.E_nLn / nn - lam * logn / nn);
        }
        r.wbic_mc_se = batch_se(f_b);
        r.lambda_hat_mc_se = batch_se(l_b);
        r.nu_hat_at_wbic_temp_mc_se = batch_se(nu_b);
        r.linked_waic_raw_mc_se = batch_se(lk_b);
        r.linked_waic_mc_se = r.linked_waic_raw_mc_se / nn;
        r.optimum_loss_est_mc_se = batch_se(op_b);
    }
    return r;
}

namespace {

const char* const kCsvFields[] = {
    "waic", "waic_mc_se", "waic_Tn", "waic_Tn_mc_se", "waic_Vn", "waic_Vn_mc_se",
    "wbic", "wbic_mc_se", "lambda_hat", "lambda_hat_mc_se",
    "nu_hat_at_wbic_temp", "nu_hat_at_wbic_temp_mc_se",
    "nu_hat_at_beta", "nu_hat_at_beta_mc_se",
    "linked_waic", "linked_waic_mc_se", "linked_waic_raw", "linked_waic_raw_mc_se",
    "gibbs_train", "gibbs_train_mc_se", "optimum_loss_est", "optimum_loss_est_mc_se"};

std::vector<double> report_values(const CriteriaReport& r) {
    return {r.waic, r.waic_mc_se, r.waic_Tn, r.waic_Tn_mc_se, r.waic_Vn, r.waic_Vn_mc_se,
            r.wbic, r.wbic_mc_se, r.lambda_hat, r.lambda_hat_mc_se,
            r.nu_hat_at_wbic_temp, r.nu_hat_at_wbic_temp_mc_se,
            r.nu_hat_at_beta, r.nu_hat_at_beta_mc_se,
            r.linked_waic, r.linked_waic_mc_se, r.linked_waic_raw, r.linked_waic_raw_mc_se,
            r.gibbs_train, r.gibbs_train_mc_se, r.optimum_loss_est, r.optimum_loss_est_mc_se};
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string criteria_report_json(const CriteriaReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["beta_main"] = r.beta_main;
    const auto vals = report_values(r);
    for (std::size_t k = 0; k < vals.size(); ++k)
        j[kCsvFields[k]] = std::isfinite(vals[k]) ? nlohmann::ordered_json(vals[k])
                                                  : nlohmann::ordered_json(nullptr);
    j["chain_provenance"] = {{"chain_seed_main", r.provenance.chain_seed_main},
                             {"chain_seed_wbic", r.provenance.chain_seed_wbic},
                             {"config_digest", r.provenance.config_digest},
                             {"ess_nl_main", r.provenance.ess_nl_main},
                             {"ess_nl_wbic", r.provenance.ess_nl_wbic},
                             {"min_coord_ess", r.provenance.min_coord_ess}};
    return j.dump(2);
}

std::string criteria_report_csv_header() {
    std::string s = "n,beta_main";
    for (const char* f : kCsvFields) {
        s += ',';
        s += f;
    }
    return s;
}

std::string criteria_report_csv_row(const CriteriaReport& r) {
    std::string s = std::to_string(r.n) + "," + fmt_double(r.beta_main);
    for (double v : report_values(r)) {
        s += ',';
        s += fmt_double(v);
    }
    return s;
}

}  // namespace slt
