#pragma once

// Tangent vectors h in L^2(mu0) expanded in the Hermite basis, the measures
// they push mu0 forward to, and displacement of measures along vector fields.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wou/common.hpp"
#include "wou/spectral_core.hpp"

namespace wou {

using ScalarField = std::function<double(double)>;

/// h = sum_n c_n h_n; coefficients stored for n = 1..N.
class TangentVector {
 public:
  TangentVector() = default;
  explicit TangentVector(std::size_t modes) : c_(modes, 0.0) {}
  explicit TangentVector(std::vector<double> coefficients) : c_(std::move(coefficients)) {}

  /// The identity map x -> x (c_2 = 1).
  static TangentVector identity(std::size_t modes);
  /// The constant map x -> value (c_1 = value).
  static TangentVector constant(double value, std::size_t modes);
  /// x -> offset + slope * x.
  static TangentVector affine(double offset, double slope, std::size_t modes);

  std::size_t size() const { return c_.size(); }

  /// Coefficient of h_n, one-based; zero beyond the stored modes.
  double coefficient(std::size_t n) const { return n >= 1 && n <= c_.size() ? c_[n - 1] : 0.0; }
  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }

  std::span<const double> coefficients() const { return c_; }
  std::span<double> coefficients() { return c_; }

  /// Parseval: ||h||^2 = sum c_n^2.
  double norm_squared() const;

  double operator()(double x) const;

  TangentVector& operator+=(const TangentVector& other);
  TangentVector& operator*=(double s);
  friend TangentVector operator+(TangentVector a, const TangentVector& b) { return a += b; }
  friend TangentVector operator-(TangentVector a, const TangentVector& b);
  friend TangentVector operator*(double s, TangentVector a) { return a *= s; }
  friend bool operator==(const TangentVector&, const TangentVector&) = default;

 private:
  std::vector<double> c_;
};

/// sum_n c_n h_n(x)
double evaluate(const TangentVector& h, double x);

/// Projects a function onto h_1..h_N by quadrature.
TangentVector project(const ScalarField& fn, std::size_t modes, const QuadratureRule& rule);

/// Weighted atoms in R^d. Weights are nonnegative and sum to one; atoms may coincide.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;

  static EmpiricalMeasure uniform(std::vector<double> points);
  static EmpiricalMeasure weighted(std::vector<double> points, std::vector<double> weights);
  /// Row-major coordinates, `dimension` values per atom.
  static EmpiricalMeasure uniform_nd(std::size_t dimension, std::vector<double> coordinates);
  static EmpiricalMeasure weighted_nd(std::size_t dimension, std::vector<double> coordinates, std::vector<double> weights);

  std::size_t size() const { return weights_.size(); }
  std::size_t dimension() const { return dim_; }

  /// Location of atom i (d = 1 only).
  double point(std::size_t i) const { return coords_[i]; }
  std::span<const double> atom(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  double weight(std::size_t i) const { return weights_[i]; }

  std::span<const double> coordinates() const { return coords_; }
  std::span<const double> weights() const { return weights_; }

  /// mu(fn) for d = 1.
  double integrate(const ScalarField& fn) const;
  double mean() const;
  double variance() const;

  friend bool operator==(const EmpiricalMeasure&, const EmpiricalMeasure&) = default;

 private:
  EmpiricalMeasure(std::size_t dim, std::vector<double> coords, std::vector<double> weights);

  std::size_t dim_ = 1;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

/// i.i.d. mu0 base points x_1..x_P for the seed; base point i depends only on (seed, i).
std::vector<double> base_points(std::size_t particles, std::uint64_t seed);

/// Psi(h) as the uniform cloud {h(x_i)} over base_points(particles, seed).
EmpiricalMeasure pushforward(const TangentVector& h, std::size_t particles, std::uint64_t seed);

/// Psi(h) as the weighted cloud {h(x_i), w_i} over a Gauss-Hermite rule; integrals
/// of polynomials in h are exact up to the rule's degree.
EmpiricalMeasure pushforward_quadrature(const TangentVector& h, const QuadratureRule& rule);

/// Quantile values of a 1D law at midpoints u_k = (k - 1/2) / K.
struct QuantileGrid {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// mu0 quantile nodes Phi^{-1}(u_k).
std::vector<double> quantile_nodes(std::size_t count);

/// Quantile grid of Psi(h): the sorted values h(Phi^{-1}(u_k)). For
/// nondecreasing h this is exactly u -> h(Phi^{-1}(u)) on the grid.
QuantileGrid quantile_pushforward(const TangentVector& h, std::size_t nodes);

/// Quantile grid from a quantile function evaluated at the midpoints.
QuantileGrid quantile_grid(const std::function<double(double)>& quantile, std::size_t nodes);

/// True when h is nondecreasing across the quantile nodes.
bool is_nondecreasing(const TangentVector& h, std::size_t nodes);

/// The optimal map pushing mu0 to a target law: x -> F_target^{-1}(Phi(x)).
class MongeMap {
 public:
  explicit MongeMap(std::function<double(double)> target_quantile) : quantile_(std::move(target_quantile)) {}

  double operator()(double x) const;

  /// ||id - map||_{L^2(mu0)} by the midpoint rule in u; equals W2(mu0, target).
  double distance_to_identity(std::size_t nodes) const;

 private:
  std::function<double(double)> quantile_;
};

/// Builds the Monge map after checking that the quantile is nondecreasing on a
/// grid of `check_nodes` midpoints of (0, 1).
MongeMap monge_map(std::function<double(double)> target_quantile, std::size_t check_nodes = 10000);

/// mu o (id + s phi)^{-1}: atoms x_i -> x_i + s phi(x_i), weights unchanged (d = 1).
EmpiricalMeasure displace(const EmpiricalMeasure& mu, const ScalarField& phi, double s);

/// Same, with phi given by its values at the atoms (an element of T_mu for atomic mu).
EmpiricalMeasure displace(const EmpiricalMeasure& mu, std::span<const double> phi_at_atoms, double s);

/// <phi, psi>_{T_mu} = sum_i w_i phi(x_i) psi(x_i) (d = 1).
double inner_product_Tmu(const EmpiricalMeasure& mu, const ScalarField& phi, const ScalarField& psi);

}  // namespace wou
