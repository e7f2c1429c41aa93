#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace coss {

/// Relative floor below which a computed variance is treated as zero. Two-pass
/// variance of a numerically constant vector lands around 1e-32, far below
/// this, while any real spread in desk-scale data sits far above it.
inline constexpr double kVarianceFloor = 1e-24;

inline double mean(std::span<const double> v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Sample variance (n-1 denominator), two-pass. Zero when n < 2.
inline double sample_variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (const double x : v) {
        const double d = x - m;
        ss += d * d;
    }
    return ss / static_cast<double>(v.size() - 1);
}

inline double sample_sd(std::span<const double> v) { return std::sqrt(sample_variance(v)); }

/// Sample covariance (n-1 denominator); spans must be equally sized.
inline double sample_covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2) return 0.0;
    const double mx = mean(x);
    const double my = mean(y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return s / static_cast<double>(x.size() - 1);
}

inline bool variance_is_degenerate(double variance, double scale_mean) {
    return variance <= kVarianceFloor * (1.0 + scale_mean * scale_mean);
}

/// Pearson correlation; 0 when either side is (numerically) constant.
inline double correlation(std::span<const double> x, std::span<const double> y) {
    const double vx = sample_variance(x);
    const double vy = sample_variance(y);
    if (variance_is_degenerate(vx, mean(x)) || variance_is_degenerate(vy, mean(y))) return 0.0;
    return sample_covariance(x, y) / std::sqrt(vx * vy);
}

/// Streaming mean/variance accumulator (Welford).
class RunningMoments {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double sample_variance() const {
        return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
    }
    double std_error_of_mean() const {
        return n_ < 2 ? 0.0 : std::sqrt(sample_variance() / static_cast<double>(n_));
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace coss
