#include "slt/models/reduced_rank.hpp"

#include <cmath>
#include <numbers>

namespace slt {

ReducedRankRegressionModel::ReducedRankRegressionModel(Config cfg) : cfg_(std::move(cfg)) {
    require(cfg_.input_dim >= 1 && cfg_.output_dim >= 1 && cfg_.rank >= 1,
            "rrr model: dimensions must be >= 1");
    if (cfg_.true_coeff.empty()) cfg_.true_coeff.assign(cfg_.output_dim * cfg_.input_dim, 0.0);
    require(cfg_.true_coeff.size() == cfg_.output_dim * cfg_.input_dim,
            "rrr model: true_coeff must be output_dim x input_dim");
    bounds_ = Bounds::cube(parameter_dim(), cfg_.bound);
    log_norm_ = -0.5 * static_cast<double>(cfg_.input_dim + cfg_.output_dim) *
                std::log(2.0 * std::numbers::pi);
}

void ReducedRankRegressionModel::apply_map(std::span<const double> w, std::span<const double> x,
                                           std::span<double> ax, std::span<double> bax) const {
    const std::size_t M = cfg_.input_dim, N = cfg_.output_dim, H = cfg_.rank;
    for (std::size_t h = 0; h < H; ++h) {
        double s = 0.0;
        for (std::size_t m = 0; m < M; ++m) s += w[h * M + m] * x[m];
        ax[h] = s;
    }
    const double* B = w.data() + H * M;
    for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        for (std::size_t h = 0; h < H; ++h) s += B[i * H + h] * ax[h];
        bax[i] = s;
    }
}

double ReducedRankRegressionModel::log_density(std::span<const double> xy,
                                               std::span<const double> w) const {
    const std::size_t M = cfg_.input_dim, N = cfg_.output_dim, H = cfg_.rank;
    require(xy.size() == M + N && w.size() == H * (M + N), "rrr model: shape mismatch");
    std::vector<double> ax(H), bax(N);
    auto x = xy.first(M);
    auto y = xy.subspan(M, N);
    apply_map(w, x, ax, bax);
    double ss = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double r = y[i] - bax[i];
        ss += r * r;
    }
    double xx = 0.0;
    for (std::size_t m = 0; m < M; ++m) xx += x[m] * x[m];
    return log_norm_ - 0.5 * ss - 0.5 * xx;
}

void ReducedRankRegressionModel::log_density_gradient(std::span<const double> xy,
                                                      std::span<const double> w,
                                                      std::span<double> grad) const {
    const std::size_t M = cfg_.input_dim, N = cfg_.output_dim, H = cfg_.rank;
    std::vector<double> ax(H), bax(N);
    auto x = xy.first(M);
    auto y = xy.subspan(M, N);
    apply_map(w, x, ax, bax);
    std::vector<double> e(N);
    for (std::size_t i = 0; i < N; ++i) e[i] = y[i] - bax[i];
    const double* B = w.data() + H * M;
    // d/dA[h][m] = (B^T e)_h x_m ; d/dB[i][h] = e_i (A x)_h
    for (std::size_t h = 0; h < H; ++h) {
        double bte = 0.0;
        for (std::size_t i = 0; i < N; ++i) bte += B[i * H + h] * e[i];
        for (std::size_t m = 0; m < M; ++m) grad[h * M + m] = bte * x[m];
    }
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t h = 0; h < H; ++h) grad[H * M + i * H + h] = e[i] * ax[h];
}

void ReducedRankRegressionModel::draw_truth(Rng& rng, std::span<double> out) const {
    const std::size_t M = cfg_.input_dim, N = cfg_.output_dim;
    for (std::size_t m = 0; m < M; ++m) out[m] = rng.normal();
    for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        for (std::size_t m = 0; m < M; ++m) s += cfg_.true_coeff[i * M + m] * out[m];
        out[M + i] = s + rng.normal();
    }
}

}  // namespace slt
