#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "wou/functional_inequalities.hpp"
#include "wou/gaussian_oracle.hpp"
#include "wou/rng.hpp"

using namespace wou;
using wou::test::check_within_sigmas;

TEST_CASE("entropy decay of the exponential tilt") {
  const auto at_zero = entropy_decay_experiment(1.0, 1.0, {0.0}, 10000, 3);
  REQUIRE(at_zero.size() == 1);
  CHECK(at_zero[0].ratio.value == 1.0);
  check_within_sigmas(at_zero[0].initial_entropy, 0.5);

  const auto half = entropy_decay_experiment(1.0, 1.0, {0.5}, 1000000, 42);
  CHECK(half[0].predicted_ratio == doctest::Approx(std::exp(-1.0)));
  CHECK(half[0].relative_error <= 0.02);
  CHECK(half[0].verdict == Verdict::pass);
  check_within_sigmas(half[0].ratio, std::exp(-1.0));

  CHECK_THROWS_AS(entropy_decay_experiment(25.0, 1.0, {0.5}, 100, 1), InputError);
  CHECK_THROWS_AS(entropy_decay_experiment(1.0, 1.0, {-0.5}, 100, 1), InputError);
}

TEST_CASE("entropy decay is monotone in time") {
  const auto pts = entropy_decay_experiment(0.8, 2.0, {0.1, 0.2, 0.4, 0.8}, 20000, 9);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].entropy.value < pts[i - 1].entropy.value);
}

TEST_CASE("entropy estimator") {
  CHECK(entropy_estimate({2.0, 2.0, 2.0}).value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(entropy_estimate({1.0, 3.0}).value > 0.0);
  CHECK_THROWS_AS(entropy_estimate({1.0}), InputError);
  CHECK_THROWS_AS(entropy_estimate({1.0, -1.0}), InputError);
}

TEST_CASE("log-Sobolev: exponential tilts saturate") {
  const Spectrum s = Spectrum::squares(2);
  std::uint64_t child = 1;
  for (double lambda : {0.5, 1.0}) {
    CAPTURE(lambda);
    const InequalityReport r =
        lsi_check(LsiFunction::exponential_tilt(lambda), s, 200000, rng::derive_seed(42, child++));
    check_within_sigmas(r.ratio, 1.0);
    CHECK(r.verdict == Verdict::pass);
  }
}

TEST_CASE("log-Sobolev: constants are degenerate, bumps are strict") {
  const Spectrum s = Spectrum::squares(2);
  const InequalityReport flat = lsi_check(LsiFunction::constant(2.0), s, 16, 5);
  CHECK(flat.degenerate);
  CHECK(flat.verdict == Verdict::pass);
  const InequalityReport bump = lsi_check(LsiFunction::sine_bump(0.1, 2), s, 100000, 6);
  CHECK(bump.ratio.value < 1.0);
  CHECK_THROWS_AS(lsi_check(LsiFunction::sine_bump(0.1, 3), s, 100, 6), InputError);
}

TEST_CASE("hypercontractivity at the critical exponent") {
  const double q1 = 1.0, t = std::log(2.0) / 2.0;
  const HypercontractivityReport r = hypercontractivity_check(2.0, t, 1.0, q1, 20000, 7);
  CHECK(r.p_t == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(r.log_norm_semigroup - r.log_norm_f) <= 1e-12);
  CHECK(r.criticality == Verdict::pass);
  CHECK(r.supercritical_gap > 0.0);
  CHECK(r.negative_control == Verdict::pass);
  CHECK(std::abs(r.quadrature_log_norm_f - r.log_norm_f) <= 1e-9);
  CHECK(std::abs(r.quadrature_log_norm_semigroup - r.log_norm_semigroup) <= 1e-9);
  check_within_sigmas(r.mc_log_norm_semigroup, r.log_norm_semigroup);

  CHECK_THROWS_AS(hypercontractivity_check(1.0, t, 1.0, q1, 100, 7), InputError);
  CHECK_THROWS_AS(hypercontractivity_check(0.5, t, 1.0, q1, 100, 7), InputError);
}

TEST_CASE("hypercontractive norms grow past the critical exponent") {
  const double q = 2.0, t = 0.3, lambda = 0.7;
  const double pt = gaussian_oracle::critical_exponent(3.0, q, t);
  double prev = gaussian_oracle::log_norm_semigroup_tilt(lambda, q, t, pt);
  for (double r = pt + 0.25; r < pt + 3.0; r += 0.25) {
    const double cur = gaussian_oracle::log_norm_semigroup_tilt(lambda, q, t, r);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("spectrum: product Hermite eigenfunctions decay at k q_n") {
  const Spectrum s = Spectrum::squares(2);
  const SpectrumCheckResult one = spectrum_check({{1, 1}}, s, 0.25, 200000, 11);
  CHECK(one.predicted_rate == 1.0);
  check_within_sigmas(one.measured_rate, 1.0);

  const SpectrumCheckResult flat = spectrum_check({{1, 0}}, s, 0.25, 100, 11);
  CHECK(flat.measured_rate.value == 0.0);
  CHECK(flat.verdict == Verdict::pass);

  const SpectrumCheckResult pair = spectrum_check({{1, 1}, {2, 1}}, s, 0.05, 200000, 12);
  CHECK(pair.predicted_rate == 5.0);
  check_within_sigmas(pair.measured_rate, 5.0);

  CHECK(spectrum_check({{2, 3}}, s, 0.02, 50, 13).widened);
  CHECK_THROWS_AS(spectrum_check({{3, 1}}, s, 0.1, 100, 1), InputError);
  CHECK_THROWS_AS(spectrum_check({{1, 1}}, s, 0.0, 100, 1), InputError);
}

TEST_CASE("eigenfunctions of distinct modes are orthogonal") {
  const Spectrum s = Spectrum::squares(3);
  TangentVector h(3);
  h[0] = 0.5;
  h[1] = -0.25;
  // He_1(1 * 0.5) He_2(2 * -0.25) = 0.5 * (0.25 - 1)
  CHECK(eigenfunction_value({{1, 1}, {2, 2}}, s, h) == doctest::Approx(0.5 * -0.75).epsilon(1e-15));
  CHECK(eigenfunction_value({}, s, h) == 1.0);
  CHECK_THROWS_AS(eigenfunction_value({{4, 1}}, s, h), InputError);
}
