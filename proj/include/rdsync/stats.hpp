#pragma once

#include <span>
#include <vector>

namespace rdsync::stats {

double mean(std::span<const double> v);
/// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> v);
double correlation(std::span<const double> a, std::span<const double> b);
/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> v, double q);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
LineFit least_squares(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};
/// One-sample Kolmogorov-Smirnov test against the standard normal.
KsResult ks_test_normal(std::vector<double> sample);

} // namespace rdsync::stats
