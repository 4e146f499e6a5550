#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "wou/gaussian_field.hpp"
#include "wou/stats.hpp"

using namespace wou;
using wou::test::check_within_sigmas;

namespace {

std::vector<double> mode_values(const GaussianSampleBatch& b, std::size_t n) {
  std::vector<double> out;
  out.reserve(b.vectors.size());
  for (const auto& h : b.vectors) out.push_back(h[n - 1]);
  return out;
}

}  // namespace

TEST_CASE("G_Q coefficients: centred with variance 1/q_n") {
  const Spectrum s = Spectrum::squares(8);
  const GaussianSampleBatch b = sample_gq(s, 100000, 2024);
  const auto st = coefficient_stats(b);
  for (std::size_t n = 1; n <= 8; ++n) {
    CAPTURE(n);
    check_within_sigmas(st[n - 1].mean, 0.0);
    check_within_sigmas({st[n - 1].variance, st[n - 1].variance_std_error}, 1.0 / s.q(n));
  }
  std::vector<double> norms;
  for (const auto& h : b.vectors) norms.push_back(h.norm_squared());
  check_within_sigmas(stats::mean_estimate(norms), validate_spectrum(s).partial_trace);
}

TEST_CASE("distinct modes are uncorrelated") {
  const std::size_t m = 100000;
  const GaussianSampleBatch b = sample_gq(Spectrum::squares(5), m, 9);
  for (std::size_t i = 1; i <= 5; ++i) {
    for (std::size_t j = i + 1; j <= 5; ++j) {
      CHECK(std::abs(stats::sample_correlation(mode_values(b, i), mode_values(b, j))) <= 4.0 / std::sqrt(double(m)));
    }
  }
}

TEST_CASE("normalized coefficients are standard normal") {
  const Spectrum s = Spectrum::squares(4);
  const GaussianSampleBatch b = sample_gq(s, 100000, 77);
  for (std::size_t n = 1; n <= 4; ++n) {
    auto xs = mode_values(b, n);
    for (double& x : xs) x *= std::sqrt(s.q(n));
    CHECK(stats::ks_test(xs, stats::normal_cdf).p_value > 0.01);
    CHECK(stats::jarque_bera(xs).p_value > 0.01);
  }
}

TEST_CASE("sample_gq_one matches the batch") {
  const Spectrum s = Spectrum::squares(6);
  const GaussianSampleBatch b = sample_gq(s, 10, 5);
  for (std::size_t k = 0; k < 10; ++k) CHECK(sample_gq_one(s, 5, k) == b.vectors[k]);
}

TEST_CASE("sampled measures are the pushforwards of sampled tangent vectors") {
  const Spectrum s = Spectrum::squares(6);
  const std::size_t m = 20, p = 40;
  const auto mus = sample_n_mu0_q(s, m, p, 31);
  const GaussianSampleBatch b = sample_gq(s, m, 31);
  for (std::size_t k = 0; k < m; ++k) CHECK(mus[k] == pushforward(b.vectors[k], p, measure_base_seed(31, k)));
}

TEST_CASE("means of sampled measures are N(0, 1/q1)") {
  const Spectrum s = Spectrum::squares(8);
  const auto mus = sample_n_mu0_q(s, 10000, 1000, 4);
  std::vector<double> means;
  for (const auto& mu : mus) means.push_back(mu.mean());
  const double sd = 1.0 / std::sqrt(s.q(1));
  CHECK(stats::ks_test(means, [sd](double x) { return stats::normal_cdf(x / sd); }).p_value > 0.01);
}

TEST_CASE("one-mode spectrum gives Dirac measures") {
  const Spectrum s = Spectrum::squares(1);
  const auto mus = sample_n_mu0_q(s, 200, 10, 8);
  std::vector<double> locations;
  for (const auto& mu : mus) {
    for (std::size_t i = 1; i < mu.size(); ++i) CHECK(mu.point(i) == mu.point(0));
    locations.push_back(mu.point(0));
  }
  CHECK(stats::ks_test(locations, stats::normal_cdf).p_value > 0.01);
}

TEST_CASE("second moments of sampled measures stay finite") {
  const auto mus = sample_n_mu0_q(Spectrum::squares(64), 1000, 200, 6);
  std::vector<double> second;
  for (const auto& mu : mus) second.push_back(mu.integrate([](double x) { return x * x; }));
  const Estimate e = stats::mean_estimate(second);
  CHECK(std::isfinite(e.value));
  CHECK(std::isfinite(e.std_error));
}

TEST_CASE("coefficient stats: degenerate batches") {
  const Spectrum s = Spectrum::squares(3);
  GaussianSampleBatch one{{TangentVector(std::vector<double>{0.5, -1.0, 2.0})}, s, 0};
  const auto st = coefficient_stats(one);
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK_FALSE(st[n].variance_defined);
    CHECK(st[n].mean.value == one.vectors[0][n]);
  }
  GaussianSampleBatch zero{{TangentVector(3)}, s, 0};
  for (const auto& m : coefficient_stats(zero)) CHECK(m.mean.value == 0.0);
}

TEST_CASE("divergent spectra are refused by the sampler") {
  CHECK_THROWS_AS(sample_gq(Spectrum::power_law(1.0, 1.0, 10), 5, 1), InputError);
  CHECK_THROWS_AS(sample_n_mu0_q(Spectrum::power_law(1.0, 0.5, 10), 5, 5, 1), InputError);
}
