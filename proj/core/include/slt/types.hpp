#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "slt/numeric.hpp"

namespace slt {

/// Immutable set of n observations of fixed dimension p, stored row-major.
/// n >= 2 so that log n > 0 and the WBIC temperature 1/log n is finite and < 1.
class Dataset {
  public:
    Dataset(std::size_t dim, std::vector<double> values)
        : dim_(dim), values_(std::move(values)) {
        require(dim_ >= 1, "Dataset: observation dimension must be >= 1");
        require(values_.size() % dim_ == 0,
                "Dataset: value count " + std::to_string(values_.size()) +
                    " is not a multiple of dimension " + std::to_string(dim_));
        require(values_.size() / dim_ >= 2, "Dataset: need at least 2 observations");
        for (std::size_t i = 0; i < values_.size(); ++i)
            require(std::isfinite(values_[i]),
                    "Dataset: non-finite value at flat index " + std::to_string(i));
    }

    std::size_t size() const noexcept { return values_.size() / dim_; }
    std::size_t dim() const noexcept { return dim_; }
    std::span<const double> observation(std::size_t i) const noexcept {
        return {values_.data() + i * dim_, dim_};
    }
    std::span<const double> flat() const noexcept { return values_; }

  private:
    std::size_t dim_;
    std::vector<double> values_;
};

/// Inverse temperature of a tempered posterior; beta = 1 is the standard
/// posterior, beta = 1/log n the WBIC temperature.
struct InverseTemperature {
    double beta;

    explicit InverseTemperature(double b) : beta(b) {
        require(std::isfinite(b) && b > 0.0, "InverseTemperature: beta must be finite and > 0");
    }
    static InverseTemperature wbic(std::size_t n) {
        require(n >= 2, "InverseTemperature::wbic: n must be >= 2");
        return InverseTemperature(1.0 / std::log(static_cast<double>(n)));
    }
};

/// Axis-aligned compact parameter box [lo_j, hi_j]^d.
struct Bounds {
    std::vector<double> lo;
    std::vector<double> hi;

    static Bounds cube(std::size_t dim, double half_width) {
        require(half_width > 0.0 && std::isfinite(half_width), "Bounds: half width must be positive");
        Bounds b;
        b.lo.assign(dim, -half_width);
        b.hi.assign(dim, half_width);
        return b;
    }
    std::size_t dim() const noexcept { return lo.size(); }
    bool contains(std::span<const double> w) const noexcept {
        if (w.size() != lo.size()) return false;
        for (std::size_t j = 0; j < lo.size(); ++j)
            if (!(w[j] >= lo[j] && w[j] <= hi[j])) return false;
        return true;
    }
    void validate() const {
        require(lo.size() == hi.size(), "Bounds: lo/hi dimension mismatch");
        for (std::size_t j = 0; j < lo.size(); ++j)
            require(std::isfinite(lo[j]) && std::isfinite(hi[j]) && lo[j] < hi[j],
                    "Bounds: need finite lo < hi on every axis");
    }
};

}  // namespace slt
