#include <cmath>
#include <numbers>

#include <doctest.h>

#include "wou/rng.hpp"
#include "wou/spectral_core.hpp"

using namespace wou;

TEST_CASE("partial trace of q_n = n^2 approaches pi^2/6") {
  const Spectrum s = Spectrum::squares(1000000);
  const TraceReport r = validate_spectrum(s);
  CHECK(r.finite);
  CHECK(std::string(r.verdict()) == "finite");
  CHECK(std::abs(r.partial_trace - std::numbers::pi * std::numbers::pi / 6.0) < 1e-6);
  // The integral-comparison tail bound brackets the full sum.
  CHECK(r.partial_trace <= std::numbers::pi * std::numbers::pi / 6.0);
  CHECK(r.partial_trace + r.tail_bound >= std::numbers::pi * std::numbers::pi / 6.0);
}

TEST_CASE("single mode has trace 1") {
  const TraceReport r = validate_spectrum(Spectrum::from_values({1.0}));
  CHECK(r.partial_trace == 1.0);
  CHECK(r.finite);
}

TEST_CASE("harmonic tail is divergent") {
  const TraceReport r = validate_spectrum(Spectrum::power_law(1.0, 1.0, 1000));
  CHECK_FALSE(r.finite);
  CHECK(std::string(r.verdict()) == "divergent");
  CHECK(std::isinf(r.tail_bound));
}

TEST_CASE("invalid eigenvalues are rejected with their index") {
  const auto index_of = [](std::vector<double> q) -> std::optional<std::size_t> {
    try {
      Spectrum::from_values(std::move(q));
    } catch (const InputError& e) {
      return e.index();
    }
    return std::nullopt;
  };
  CHECK(index_of({1.0, 0.5, 2.0}) == std::optional<std::size_t>(1));
  CHECK(index_of({1.0, 4.0, -1.0}) == std::optional<std::size_t>(2));
  CHECK(index_of({0.0}) == std::optional<std::size_t>(0));
  CHECK(index_of({1.0, std::nan("")}) == std::optional<std::size_t>(1));
  CHECK_THROWS_AS(Spectrum::from_values({}), InputError);
}

TEST_CASE("partial trace is nondecreasing in N") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::vector<double> q;
    double cur = 0.5;
    for (std::uint32_t i = 0; i < 50; ++i) {
      cur += rng::uniform(seed, {rng::Purpose::auxiliary, i});
      q.push_back(cur);
    }
    double prev = 0.0;
    for (std::size_t n = 1; n <= q.size(); ++n) {
      const double t = validate_spectrum(std::span<const double>(q.data(), n), {}).partial_trace;
      CHECK(t >= prev);
      prev = t;
    }
  }
}

TEST_CASE("hermite basis values") {
  for (double x : {-3.0, -0.2, 0.0, 1.7, 10.0}) CHECK(hermite_eval(1, x) == 1.0);
  CHECK(std::abs(hermite_eval(3, 1.0)) < 1e-15);
  CHECK(hermite_eval(2, 2.5) == 2.5);
  CHECK_THROWS_AS(hermite_eval(0, 1.0), InputError);
}

TEST_CASE("recurrence agrees with the explicit polynomials") {
  const auto direct = [](std::size_t n, double x) {
    const double he[] = {1.0,
                         x,
                         x * x - 1.0,
                         x * x * x - 3.0 * x,
                         x * x * x * x - 6.0 * x * x + 3.0,
                         x * x * x * x * x - 10.0 * x * x * x + 15.0 * x};
    return he[n - 1] / std::sqrt(std::tgamma(static_cast<double>(n)));
  };
  std::vector<double> all(6);
  for (std::uint32_t i = 0; i < 100; ++i) {
    const double x = 6.0 * rng::uniform(7, {rng::Purpose::auxiliary, i}) - 3.0;
    hermite_eval_all(x, all);
    for (std::size_t n = 1; n <= 6; ++n) {
      const double ref = direct(n, x);
      CHECK(std::abs(hermite_eval(n, x) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
      CHECK(std::abs(all[n - 1] - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("gauss-hermite rule") {
  const QuadratureRule one = gauss_hermite_nodes(1);
  CHECK(one.nodes == std::vector<double>{0.0});
  CHECK(one.weights == std::vector<double>{1.0});
  CHECK_THROWS_AS(gauss_hermite_nodes(0), InputError);

  for (std::size_t order : {2, 3, 8, 32, 64}) {
    const QuadratureRule& r = gauss_hermite_rule(order);
    double total = 0.0;
    for (double w : r.weights) {
      CHECK(w > 0.0);
      total += w;
    }
    CHECK(std::abs(total - 1.0) < 1e-14);
    CHECK(std::abs(integrate_mu0([](double x) { return x * x; }, r) - 1.0) < 1e-12);
    if (order >= 3) CHECK(std::abs(integrate_mu0([](double x) { return x * x * x * x; }, r) - 3.0) < 1e-12);
  }
}

TEST_CASE("inner products under mu0") {
  const QuadratureRule& r = gauss_hermite_rule(32);
  CHECK(std::abs(inner_product_mu0([](double) { return 1.0; }, [](double x) { return x; }, r)) < 1e-15);
  CHECK(std::abs(inner_product_mu0([](double x) { return x; }, [](double x) { return x; }, r) - 1.0) < 1e-13);
  for (std::size_t i = 1; i <= 12; ++i) {
    for (std::size_t j = 1; j <= 12; ++j) {
      const double v =
          inner_product_mu0([i](double x) { return hermite_eval(i, x); }, [j](double x) { return hermite_eval(j, x); }, r);
      CHECK(std::abs(v - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("non-finite evaluations are rejected with the node index") {
  const QuadratureRule& r = gauss_hermite_rule(4);
  try {
    inner_product_mu0([](double x) { return x > 0 ? std::nan("") : 1.0; }, [](double) { return 1.0; }, r);
    FAIL("expected rejection");
  } catch (const InputError& e) {
    REQUIRE(e.index().has_value());
    CHECK(r.nodes[*e.index()] > 0.0);
  }
}
