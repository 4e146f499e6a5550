#include <cmath>
#include <numbers>

#include <doctest.h>

#include "helpers.hpp"
#include "wou/gaussian_field.hpp"
#include "wou/ou_dynamics.hpp"
#include "wou/parallel.hpp"
#include "wou/stats.hpp"

using namespace wou;
using wou::test::check_within_sigmas;

namespace {

TangentVector first_mode(double c1, std::size_t modes) {
  TangentVector h(modes);
  h[0] = c1;
  return h;
}

Estimate variance_of(const std::vector<double>& xs) { return {stats::sample_variance(xs), stats::variance_std_error(xs)}; }

}  // namespace

TEST_CASE("zero time step leaves the state unchanged") {
  const Spectrum s = Spectrum::squares(5);
  const TangentVector h = sample_gq_one(s, 3, 0);
  CHECK(transition(s, h, 0.0, 1) == h);
  CHECK_THROWS_AS(transition(s, h, -0.1, 1), InputError);
  CHECK_THROWS_AS(transition(s, TangentVector(4), 0.1, 1), InputError);
}

TEST_CASE("transition moments for q1 = 1, dt = ln 2") {
  const Spectrum s = Spectrum::squares(1);
  const std::size_t m = 100000;
  const auto xs = map_indices(m, [&](std::size_t k) { return transition(s, first_mode(1.0, 1), std::numbers::ln2, 17, k)[0]; });
  check_within_sigmas(stats::mean_estimate(xs), 0.5);
  check_within_sigmas(variance_of(xs), 0.75);
}

TEST_CASE("G_Q is invariant under the transition") {
  const Spectrum s = Spectrum::squares(4);
  const std::size_t m = 100000;
  std::vector<std::vector<double>> before(4, std::vector<double>(m)), after(4, std::vector<double>(m));
  for (std::size_t k = 0; k < m; ++k) {
    const TangentVector h = sample_gq_one(s, 1, k);
    const TangentVector g = transition(s, h, 0.3, 2, k);
    for (std::size_t n = 0; n < 4; ++n) {
      before[n][k] = h[n];
      after[n][k] = g[n];
    }
  }
  for (std::size_t n = 0; n < 4; ++n) {
    const double sd = 1.0 / std::sqrt(s.q(n + 1));
    CHECK(stats::ks_test(after[n], [sd](double x) { return stats::normal_cdf(x / sd); }).p_value > 0.01);
    CHECK(stats::ks_test_two_sample(before[n], after[n]).p_value > 0.01);
  }
}

TEST_CASE("paths") {
  const Spectrum s = Spectrum::squares(3);
  const TangentVector h0 = first_mode(2.0, 3);
  const OUPath single = simulate_path(s, h0, {0.0}, 5);
  REQUIRE(single.states.size() == 1);
  CHECK(single.states[0] == h0);
  CHECK_THROWS_AS(simulate_path(s, h0, {0.0, 0.5, 0.4}, 5), InputError);
}

TEST_CASE("two half steps compose to one step in law") {
  const Spectrum s = Spectrum::squares(2);
  const std::size_t m = 100000;
  const double t = 0.8;
  const TangentVector h0 = first_mode(1.5, 2);
  const auto two = map_indices(m, [&](std::size_t k) { return simulate_path(s, h0, {0.0, t / 2, t}, 8, k).states[2][0]; });
  const auto one = map_indices(m, [&](std::size_t k) { return transition(s, h0, t, 9, k)[0]; });
  const Estimate a = stats::mean_estimate(two), b = stats::mean_estimate(one);
  CHECK(std::abs(a.value - b.value) <= 4.0 * std::hypot(a.std_error, b.std_error));
  const Estimate va = variance_of(two), vb = variance_of(one);
  CHECK(std::abs(va.value - vb.value) <= 4.0 * std::hypot(va.std_error, vb.std_error));
}

TEST_CASE("long runs forget the start") {
  const Spectrum s = Spectrum::squares(2);
  const auto xs = map_indices(100000, [&](std::size_t k) { return transition(s, first_mode(5.0, 2), 10.0, 12, k)[0]; });
  CHECK(stats::ks_test(xs, stats::normal_cdf).p_value > 0.01);
}

TEST_CASE("the mean functional is a one-dimensional OU process") {
  const Spectrum s = Spectrum::squares(6);
  const double t = 0.4;
  const TangentVector h0 = first_mode(-1.0, 6);
  const auto xs = map_indices(100000, [&](std::size_t k) { return transition(s, h0, t, 13, k)[0]; });
  const double mean = -std::exp(-t), var = -std::expm1(-2.0 * t);
  CHECK(stats::ks_test(xs, [&](double x) { return stats::normal_cdf((x - mean) / std::sqrt(var)); }).p_value > 0.01);
}

TEST_CASE("semigroup of linear and exponential functions") {
  const Spectrum s1 = Spectrum::squares(1);
  const LiftedFunction linear = [](const TangentVector& h) { return h[0]; };
  check_within_sigmas(semigroup_mc(linear, s1, first_mode(1.0, 1), 1.0, 1000000, 3), std::exp(-1.0));

  const Estimate one = semigroup_mc([](const TangentVector&) { return 1.0; }, s1, first_mode(1.0, 1), 1.0, 1000, 3);
  CHECK(one.value == 1.0);
  CHECK(one.std_error == 0.0);

  const double lambda = 0.5, t = 0.7;
  const Estimate e = semigroup_mc([&](const TangentVector& h) { return std::exp(lambda * h[0]); }, s1, first_mode(0.0, 1), t,
                                  200000, 4);
  check_within_sigmas(e, std::exp(lambda * lambda * -std::expm1(-2.0 * t) / 2.0));
}

TEST_CASE("semigroup property on the linear family") {
  const Spectrum s = Spectrum::squares(2);
  const TangentVector h0 = first_mode(1.2, 2);
  const LiftedFunction linear = [](const TangentVector& h) { return h[0]; };
  const double a = 0.3, b = 0.5;
  const Estimate direct = semigroup_mc(linear, s, h0, a + b, 200000, 21);
  // P_a (P_b f) with P_b f(h) = e^{-q1 b} c1.
  const Estimate nested =
      semigroup_mc([&](const TangentVector& h) { return std::exp(-s.q(1) * b) * h[0]; }, s, h0, a, 200000, 22);
  CHECK(std::abs(direct.value - nested.value) <= 4.0 * std::hypot(direct.std_error, nested.std_error));
}

TEST_CASE("non-finite values are rejected with the sample index") {
  const Spectrum s = Spectrum::squares(1);
  try {
    semigroup_mc([](const TangentVector& h) { return h[0] > 1.0 ? NAN : 0.0; }, s, first_mode(1.0, 1), 0.1, 1000, 1);
    FAIL("expected rejection");
  } catch (const InputError& e) {
    CHECK(e.index().has_value());
  }
}

TEST_CASE("mode quadrature agrees with the closed-form semigroup") {
  const double q = 2.0, c0 = 0.7, t = 0.3, lambda = 0.8;
  const double v = semigroup_mode_quadrature([&](double c) { return std::exp(lambda * c); }, q, c0, t, gauss_hermite_rule(32));
  const double ref = std::exp(lambda * std::exp(-q * t) * c0 + lambda * lambda * -std::expm1(-2.0 * q * t) / (2.0 * q));
  CHECK(std::abs(v / ref - 1.0) < 1e-12);
}

TEST_CASE("bismut estimator: corrected weight matches, paper weight doubles") {
  const Spectrum s = Spectrum::squares(2);
  const TangentVector h0 = first_mode(0.2, 2);
  const double t = 0.5;
  for (std::size_t n : {1, 2}) {
    CAPTURE(n);
    const LiftedFunction f = [n](const TangentVector& h) { return h[n - 1]; };
    const BismutResult c = bismut_gradient(f, s, h0, t, n, 400000, 5, BismutNormalization::corrected);
    const double truth = std::exp(-s.q(n) * t);
    check_within_sigmas(c.estimate, truth);
    CHECK(std::abs(c.fd_reference.value - truth) < 1e-9);
    const BismutResult p = bismut_gradient(f, s, h0, t, n, 400000, 5, BismutNormalization::paper);
    check_within_sigmas(p.estimate, 2.0 * truth);
  }
  CHECK(bismut_kappa(BismutNormalization::paper) == doctest::Approx(std::sqrt(2.0)));
  CHECK(bismut_kappa(BismutNormalization::corrected) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("bismut estimator: constant and even functions have zero gradient") {
  const Spectrum s = Spectrum::squares(2);
  const BismutResult c = bismut_gradient([](const TangentVector&) { return 1.0; }, s, first_mode(0.4, 2), 0.5, 1, 100000, 6);
  check_within_sigmas(c.estimate, 0.0);
  const BismutResult sq =
      bismut_gradient([](const TangentVector& h) { return h[0] * h[0]; }, s, TangentVector(2), 0.5, 1, 100000, 7);
  check_within_sigmas(sq.estimate, 0.0);
  CHECK_THROWS_AS(bismut_gradient([](const TangentVector&) { return 1.0; }, s, TangentVector(2), 0.0, 1, 10, 1),
                  InputError);
}

TEST_CASE("harnack inequality on the Gaussian MGF family") {
  const Spectrum s = Spectrum::squares(2);
  const double a = 0.3, p = 2.0, t = 1.0;
  const LiftedFunction f = [a](const TangentVector& h) { return std::exp(a * h[0]); };
  const TangentVector h(2);
  const TangentVector v = first_mode(1.0, 2);
  const HarnackReport r = harnack_check(f, s, h, v, p, t, 200000, 8);
  const double var = -std::expm1(-2.0 * t);
  // (P_t f(h + v))^p and P_t f^p(h) e^{p |v|^2 / (2 (p - 1))} in closed form.
  check_within_sigmas(r.lhs, std::exp(p * (a * std::exp(-t) + a * a * var / 2.0)));
  check_within_sigmas(r.rhs, std::exp(p * p * a * a * var / 2.0 + p / (2.0 * (p - 1.0))));
  CHECK(r.margin > 0.5);
  CHECK(r.verdict == Verdict::pass);
}

TEST_CASE("harnack: Jensen case, constants, negatives and short times") {
  const Spectrum s = Spectrum::squares(2);
  const TangentVector h = first_mode(0.3, 2);
  const LiftedFunction f = [](const TangentVector& x) { return std::exp(0.5 * x[0]); };
  CHECK(harnack_check(f, s, h, TangentVector(2), 2.0, 1.0, 50000, 9).verdict == Verdict::pass);
  const HarnackReport one = harnack_check([](const TangentVector&) { return 1.0; }, s, h, first_mode(1.0, 2), 3.0, 1.0, 100, 9);
  CHECK(one.verdict == Verdict::pass);
  CHECK(one.lhs.value == 1.0);
  CHECK_THROWS_AS(harnack_check([](const TangentVector& x) { return x[0]; }, s, h, TangentVector(2), 2.0, 1.0, 1000, 9),
                  InputError);
  CHECK(harnack_check(f, s, h, TangentVector(2), 2.0, 0.5 * harnack_min_time(s), 100, 9).verdict == Verdict::not_asserted);
}
