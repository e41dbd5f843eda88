#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace slt {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Compensated (Neumaier) accumulator. Used for every cross-block reduction so
/// results are stable in the last bits regardless of how work was partitioned.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) noexcept {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const noexcept { return sum + comp; }
};

inline double compensated_sum(std::span<const double> xs) noexcept {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty input");
    return compensated_sum(xs) / static_cast<double>(xs.size());
}

/// Unbiased sample variance (divisor count-1), two-pass.
inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_variance: fewer than 2 values");
    const double m = mean(xs);
    CompensatedSum acc;
    for (double x : xs) {
        const double dx = x - m;
        acc.add(dx * dx);
    }
    const double v = acc.value() / static_cast<double>(xs.size() - 1);
    return v < 0.0 ? 0.0 : v;
}

/// Streaming mean/variance accumulator with exact pairwise merge.
struct Welford {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept {
        ++count;
        const double d1 = x - mean;
        mean += d1 / static_cast<double>(count);
        m2 += d1 * (x - mean);
    }
    void merge(const Welford& o) noexcept {
        if (o.count == 0) return;
        if (count == 0) { *this = o; return; }
        const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
        const double d = o.mean - mean;
        const double n = na + nb;
        mean += d * nb / n;
        m2 += o.m2 + d * d * na * nb / n;
        count += o.count;
    }
    /// Unbiased variance; 0 when fewer than 2 samples (point-posterior convention).
    double variance() const noexcept {
        if (count < 2) return 0.0;
        const double v = m2 / static_cast<double>(count - 1);
        return v < 0.0 ? 0.0 : v;
    }
};

/// Streaming max-shifted log-sum-exp: log sum_k exp(v_k) without overflow.
struct LogSumExp {
    double shift = -kInf;  // running max
    double total = 0.0;    // sum exp(v - shift)
    std::size_t count = 0;

    void add(double v) noexcept {
        ++count;
        if (v <= shift) {
            total += std::exp(v - shift);
        } else {
            total = total * std::exp(shift - v) + 1.0;
            shift = v;
        }
    }
    void merge(const LogSumExp& o) noexcept {
        if (o.count == 0) return;
        if (count == 0) { *this = o; return; }
        if (o.shift <= shift) {
            total += o.total * std::exp(o.shift - shift);
        } else {
            total = total * std::exp(shift - o.shift) + o.total;
            shift = o.shift;
        }
        count += o.count;
    }
    double log_sum() const noexcept { return shift + std::log(total); }
    double log_mean() const noexcept { return shift + std::log(total / static_cast<double>(count)); }
};

inline double log_sum_exp(std::span<const double> xs) {
    LogSumExp acc;
    for (double x : xs) acc.add(x);
    return acc.log_sum();
}

inline bool all_finite(std::span<const double> xs) noexcept {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace slt
