#pragma once

#include <functional>
#include <span>

#include "wou/common.hpp"

namespace wou::stats {

double normal_cdf(double x);
double normal_quantile(double u);

/// Sample mean with its standard error (unbiased variance). A single sample
/// has an undefined error, reported as NaN.
Estimate mean_estimate(std::span<const double> xs);

/// Unbiased sample variance; NaN for fewer than two samples.
double sample_variance(std::span<const double> xs);

/// Standard error of the unbiased variance estimator from the fourth central
/// moment, sqrt((m4 - s^4) / n).
double variance_std_error(std::span<const double> xs);

double sample_correlation(std::span<const double> xs, std::span<const double> ys);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// One-sample Kolmogorov-Smirnov test against a continuous CDF (Stephens'
/// small-sample correction of the asymptotic distribution).
KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test.
KsResult ks_test_two_sample(std::span<const double> a, std::span<const double> b);

/// Jarque-Bera normality test (chi-square with 2 degrees of freedom).
KsResult jarque_bera(std::span<const double> sample);

}  // namespace wou::stats
