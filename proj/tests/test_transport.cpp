#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "wou/rng.hpp"
#include "wou/stats.hpp"
#include "wou/transport.hpp"

using namespace wou;

namespace {

EmpiricalMeasure random_cloud(std::uint64_t seed, std::size_t n, std::size_t dim = 1, bool weighted = false) {
  std::vector<double> xs(n * dim), ws(n, 1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n * dim; ++i) {
    xs[i] = 2.0 * rng::normal(seed, {rng::Purpose::cloud, static_cast<std::uint32_t>(i), 0}) + 0.3;
  }
  if (weighted) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += ws[i] = 0.1 + rng::uniform(seed, {rng::Purpose::cloud, static_cast<std::uint32_t>(i), 1});
    for (double& w : ws) w /= total;
  }
  return EmpiricalMeasure::weighted_nd(dim, std::move(xs), std::move(ws));
}

/// Cost of the sorted (monotone) coupling of two uniform clouds of equal size.
double sorted_cost(EmpiricalMeasure a, EmpiricalMeasure b) {
  std::vector<double> x(a.coordinates().begin(), a.coordinates().end());
  std::vector<double> y(b.coordinates().begin(), b.coordinates().end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) c += (x[i] - y[i]) * (x[i] - y[i]);
  return c / static_cast<double>(x.size());
}

double gaussian_quantile(double m, double s, double u) { return m + s * stats::normal_quantile(u); }

}  // namespace

TEST_CASE("quantile W2 between Gaussians") {
  const auto std_normal = [](double u) { return gaussian_quantile(0, 1, u); };
  CHECK(w2_quantile_1d(std_normal, std_normal, 1000) == 0.0);
  CHECK(std::abs(w2_quantile_1d(std_normal, [](double u) { return gaussian_quantile(1, 1, u); }, 10000) - 1.0) < 1e-3);
  CHECK(std::abs(w2_quantile_1d(std_normal, [](double u) { return gaussian_quantile(0, 2, u); }, 10000) - 1.0) < 1e-3);
  CHECK_THROWS_AS(w2_quantile_1d(QuantileGrid{{1.0}}, QuantileGrid{{1.0, 2.0}}), InputError);
  CHECK_THROWS_AS(w2_quantile_1d(QuantileGrid{}, QuantileGrid{}), InputError);
}

TEST_CASE("exact discrete W2") {
  const EmpiricalMeasure mu = random_cloud(3, 40);
  const DiscreteTransport self = w2_lp_discrete(mu, mu);
  CHECK(self.distance < 1e-12);
  for (std::size_t i = 0; i < mu.size(); ++i) CHECK(self.plan.at(i, i) == doctest::Approx(mu.weight(i)));

  const DiscreteTransport two = w2_lp_discrete(EmpiricalMeasure::uniform({0.0}), EmpiricalMeasure::uniform({3.0}));
  CHECK(two.distance == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("LP agrees with the 1D monotone coupling") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const EmpiricalMeasure a = random_cloud(seed, 128), b = random_cloud(seed + 1000, 128);
    const DiscreteTransport lp = w2_lp_discrete(a, b);
    CHECK(std::abs(lp.plan.cost - sorted_cost(a, b)) <= 1e-9);
    CHECK(std::abs(lp.distance - w2_quantile_1d(a, b)) <= 1e-9);
    CHECK(lp.plan.marginal_violation() < 1e-12);
  }
}

TEST_CASE("min-cost flow handles unequal weighted clouds") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const EmpiricalMeasure a = random_cloud(seed, 60, 1, true), b = random_cloud(seed + 50, 90, 1, true);
    const DiscreteTransport lp = w2_lp_discrete(a, b);
    const double q = w2_quantile_1d(a, b);
    CHECK(std::abs(lp.plan.cost - q * q) <= 1e-9);
    CHECK(lp.plan.marginal_violation() < 1e-9);
  }
}

TEST_CASE("metric axioms for the exact solver") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (std::size_t dim : {1, 2}) {
      const EmpiricalMeasure a = random_cloud(seed, 30, dim), b = random_cloud(seed + 10, 30, dim, true),
                             c = random_cloud(seed + 20, 25, dim, true);
      const double ab = w2_lp_discrete(a, b).distance, ba = w2_lp_discrete(b, a).distance;
      const double bc = w2_lp_discrete(b, c).distance, ac = w2_lp_discrete(a, c).distance;
      CHECK(std::abs(ab - ba) < 1e-12);
      CHECK(ac <= ab + bc + 1e-9);
    }
  }
}

TEST_CASE("transport input validation") {
  const std::vector<double> a{0.5, 0.5}, b{0.5, 0.5 + 1e-6}, cost{0, 1, 1, 0};
  CHECK_THROWS_AS(solve_transport(a, b, cost), InputError);
  CHECK_THROWS_AS(solve_transport(a, a, std::vector<double>{0, 1, 1}), InputError);
  CHECK_THROWS_AS(w2_lp_discrete(random_cloud(1, 257), random_cloud(2, 3)), InputError);
  CHECK_THROWS_AS(w2_lp_discrete(random_cloud(1, 5, 2), random_cloud(2, 5, 1)), InputError);
}

TEST_CASE("sinkhorn") {
  const EmpiricalMeasure mu = random_cloud(4, 30);
  // Self transport at small epsilon converges sublinearly; the contract is the bias bound, not the flag.
  const SinkhornResult self = w2_sinkhorn(mu, mu, 1e-3);
  CHECK(self.diagnostics.marginal_violation < 1e-6);
  CHECK(self.distance <= self.diagnostics.distance_bias_bound + 1e-9);

  const SinkhornResult two = w2_sinkhorn(EmpiricalMeasure::uniform({0.0}), EmpiricalMeasure::uniform({3.0}), 1e-3);
  CHECK(two.distance == doctest::Approx(3.0).epsilon(1e-12));

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const EmpiricalMeasure a = random_cloud(seed, 40), b = random_cloud(seed + 7, 50, 1, true);
    const SinkhornResult s = w2_sinkhorn(a, b, 1e-2, 50000);
    const DiscreteTransport lp = w2_lp_discrete(a, b);
    CHECK(s.diagnostics.converged);
    CHECK(s.plan.cost >= lp.plan.cost - 1e-9);
    CHECK(s.plan.cost - lp.plan.cost <= s.diagnostics.cost_bias_bound + 1e-9);
    CHECK(std::abs(s.distance - lp.distance) <= s.diagnostics.distance_bias_bound + 1e-9);
  }
}

TEST_CASE("sinkhorn flags non-convergence instead of throwing") {
  const SinkhornResult s = w2_sinkhorn(random_cloud(1, 30), random_cloud(2, 30), 1e-3, 1);
  CHECK_FALSE(s.diagnostics.converged);
  CHECK(s.diagnostics.iterations == 1);
  CHECK(std::isfinite(s.distance));
}

TEST_CASE("geodesic endpoints and constant paths") {
  const TangentVector h1 = TangentVector::affine(1.0, 2.0, 3), h2 = TangentVector::affine(-0.5, 0.5, 3);
  CHECK(geodesic_measure(h1, h2, 1.0, 100, 3) == pushforward(h1, 100, 3));
  CHECK(geodesic_measure(h1, h2, 0.0, 100, 3) == pushforward(h2, 100, 3));
  CHECK(geodesic_measure(h1, h1, 0.37, 100, 3) == pushforward(h1, 100, 3));
  CHECK_THROWS_AS(geodesic_measure(h1, h2, 1.5, 10, 3), InputError);
  CHECK_THROWS_AS(geodesic_check(h1, h2, -0.1, 0.5, 100), InputError);
}

TEST_CASE("affine geodesics interpolate mean and scale") {
  const TangentVector h1 = TangentVector::affine(2.0, 3.0, 2), h2 = TangentVector::affine(-1.0, 1.0, 2);
  for (double t : {0.0, 0.25, 0.6, 1.0}) {
    const QuantileGrid g = quantile_pushforward(t * h1 + (1.0 - t) * h2, 2000);
    const double m = 2.0 * t - (1.0 - t), s = 3.0 * t + (1.0 - t);
    const double w = w2_quantile_1d(g, quantile_grid([&](double u) { return gaussian_quantile(m, s, u); }, 2000));
    CHECK(w < 1e-12);
  }
}

TEST_CASE("geodesic residuals") {
  const TangentVector id = TangentVector::identity(2);
  CHECK(geodesic_check(TangentVector::affine(1, 2, 2), id, 0.4, 0.4, 1000).residual == 0.0);
  const GeodesicResidual tr = geodesic_check(TangentVector::affine(2.0, 1.0, 2), id, 0.25, 0.75, 10000);
  CHECK(tr.w2_endpoints == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(tr.residual <= 1e-9);
  CHECK(geodesic_check(TangentVector::affine(0.0, 2.0, 2), id, 0.0, 0.5, 10000).residual <= 1e-3);
  for (double s : {0.0, 0.3, 0.8}) {
    for (double t : {0.1, 0.5, 1.0}) {
      CHECK(geodesic_check(TangentVector::affine(-1.0, 0.5, 2), TangentVector::affine(0.5, 3.0, 2), s, t, 10000).residual <=
            1e-3);
    }
  }
  TangentVector wavy(4);
  wavy[1] = 0.1;
  wavy[3] = 1.0;
  CHECK_THROWS_AS(geodesic_check(wavy, id, 0.0, 1.0, 1000), InputError);
}

TEST_CASE("psi is 1-Lipschitz on monotone pairs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TangentVector h(4), g(4);
    const auto draw = [&](std::uint32_t i) { return rng::normal(seed, {rng::Purpose::auxiliary, i}); };
    h[0] = draw(0);
    h[1] = 1.0 + std::abs(draw(1));
    h[3] = 0.05 * draw(2);
    g[0] = draw(3);
    g[1] = 0.5 + std::abs(draw(4));
    g[2] = 0.03 * draw(5);
    REQUIRE(is_nondecreasing(h, 10000));
    REQUIRE(is_nondecreasing(g, 10000));
    const double w = w2_quantile_1d(quantile_pushforward(h, 10000), quantile_pushforward(g, 10000));
    CHECK(w <= std::sqrt((h - g).norm_squared()) + 1e-3);
  }
}
