#pragma once

// The operator Q (through its eigenvalues), the standard Gaussian reference
// measure mu0, the normalized Hermite basis of L^2(mu0) and Gauss-Hermite
// quadrature for integrals against mu0.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wou/common.hpp"

namespace wou {

/// Declared asymptotics of q_n beyond the stored eigenvalues.
struct TailRule {
  enum class Kind { none, power };

  Kind kind = Kind::none;
  double scale = 1.0;     // q_n ~ scale * n^exponent
  double exponent = 0.0;

  static TailRule power(double scale, double exponent) { return {Kind::power, scale, exponent}; }

  /// True when sum 1/q_n diverges under this rule (integral comparison with n^-exponent).
  bool implies_divergence() const { return kind == Kind::power && exponent <= 1.0; }

  std::string describe() const;
};

/// Eigenvalues q_1 <= q_2 <= ... <= q_N of Q, in rate units (1/time).
class Spectrum {
 public:
  /// Validates positivity and monotonicity; throws InputError carrying the
  /// zero-based index of the first violation.
  static Spectrum from_values(std::vector<double> eigenvalues, TailRule tail = {});

  /// q_n = scale * n^exponent for n = 1..modes.
  static Spectrum power_law(double scale, double exponent, std::size_t modes);

  /// The default operator, q_n = n^2.
  static Spectrum squares(std::size_t modes) { return power_law(1.0, 2.0, modes); }

  std::size_t size() const { return q_.size(); }

  /// Eigenvalue of mode n, one-based.
  double q(std::size_t n) const { return q_.at(n - 1); }

  std::span<const double> eigenvalues() const { return q_; }
  const TailRule& tail() const { return tail_; }

  /// The first `modes` eigenvalues, keeping the tail rule.
  Spectrum truncated(std::size_t modes) const;

 private:
  Spectrum(std::vector<double> q, TailRule tail) : q_(std::move(q)), tail_(tail) {}

  std::vector<double> q_;
  TailRule tail_;
};

struct TraceReport {
  double partial_trace = 0.0;   // sum_{n <= N} 1/q_n
  std::size_t truncation = 0;
  bool finite = true;
  /// Integral-comparison bound on sum_{n > N} 1/q_n; infinite when divergent,
  /// NaN when no tail rule is declared.
  double tail_bound = 0.0;

  const char* verdict() const { return finite ? "finite" : "divergent"; }
};

TraceReport validate_spectrum(std::span<const double> eigenvalues, const TailRule& tail);
TraceReport validate_spectrum(const Spectrum& spectrum);

/// Normalized probabilists' Hermite polynomial h_n = He_{n-1} / sqrt((n-1)!), n >= 1.
double hermite_eval(std::size_t n, double x);

/// Writes h_1(x), ..., h_N(x) into out (N = out.size()).
void hermite_eval_all(double x, std::span<double> out);

/// Gauss-Hermite rule for the standard Gaussian measure: weights are positive
/// and sum to one, exact for polynomials of degree <= 2 * order - 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

QuadratureRule gauss_hermite_nodes(std::size_t order);

/// Shared, lazily built rule for the given order. Thread-safe.
const QuadratureRule& gauss_hermite_rule(std::size_t order);

constexpr std::size_t kDefaultQuadratureOrder = 64;

/// The standard Gaussian mu0 on the real line.
struct ReferenceMeasure {
  std::size_t quadrature_order = kDefaultQuadratureOrder;

  static double density(double x);
  const QuadratureRule& rule() const { return gauss_hermite_rule(quadrature_order); }
};

double integrate_mu0(const std::function<double(double)>& fn, const QuadratureRule& rule);

/// Quadrature approximation of the L^2(mu0) inner product. Rejects non-finite
/// evaluations with the offending node index.
double inner_product_mu0(const std::function<double(double)>& phi, const std::function<double(double)>& psi,
                         const QuadratureRule& rule);

}  // namespace wou
