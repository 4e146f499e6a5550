#pragma once

// Calculus on P2 for cylindrical functions f(mu) = g(mu(phi_1), ..., mu(phi_k)):
// intrinsic derivative, its finite-difference check, the intrinsic Laplacian
// (analytic and brute force over an orthonormal basis of T_mu), the lifted
// gradient on the tangent space, the Dirichlet form and the OU generator.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wou/common.hpp"
#include "wou/spectral_core.hpp"
#include "wou/tangent_space.hpp"

namespace wou {

/// A smooth scalar function with its first two derivatives.
struct ScalarProfile {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;

  static ScalarProfile identity();
  static ScalarProfile half_square();  // r^2 / 2
  static ScalarProfile sine();
  static ScalarProfile cosine();
  static ScalarProfile constant(double c);
  static ScalarProfile exponential(double rate);  // e^{rate r}
};

/// Inner functional phi_j: R -> R.
struct InnerFunctional {
  ScalarProfile profile;
  bool affine = false;

  static InnerFunctional identity();
  static InnerFunctional affine_map(double offset, double slope);
  static InnerFunctional of(ScalarProfile profile);  // treated as non-affine
};

/// Outer function g: R^k -> R with gradient and row-major Hessian.
struct OuterFunction {
  std::size_t arity = 1;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  std::function<void(std::span<const double>, std::span<double>)> hessian;

  /// g(y) = profile(y_0).
  static OuterFunction univariate(ScalarProfile profile);
  /// g(y) = y_0 * y_1.
  static OuterFunction product();
};

class CylindricalFunction {
 public:
  CylindricalFunction(std::vector<InnerFunctional> inner, OuterFunction outer);

  /// f(mu) = g(mu(id)).
  static CylindricalFunction of_mean(ScalarProfile g);
  static CylindricalFunction constant(double c);

  std::size_t arity() const { return inner_.size(); }
  const std::vector<InnerFunctional>& inner() const { return inner_; }
  const OuterFunction& outer() const { return outer_; }

  /// Every phi_j affine, so that the derivative Df(mu) is constant in x.
  bool coordinate_affine() const;

  /// (mu(phi_1), ..., mu(phi_k)) for a one-dimensional measure.
  std::vector<double> coordinates(const EmpiricalMeasure& mu) const;

  double operator()(const EmpiricalMeasure& mu) const;

  /// Df(mu)(x) given the coordinates of mu.
  double derivative_at(std::span<const double> coords, double x) const;

  /// f(Psi(h)); exact in closed form for coordinate-affine f (mu(a + b x) = a + b c_1),
  /// by quadrature of the pushforward otherwise.
  double lifted(const TangentVector& h, const QuadratureRule& rule = gauss_hermite_rule(kDefaultQuadratureOrder)) const;

 private:
  std::vector<InnerFunctional> inner_;
  OuterFunction outer_;
};

/// Df(mu)(x_i) at each atom.
std::vector<double> intrinsic_derivative(const CylindricalFunction& f, const EmpiricalMeasure& mu);

/// [f(mu o (id + eps phi)^{-1}) - f(mu o (id - eps phi)^{-1})] / (2 eps).
double fd_directional_derivative(const CylindricalFunction& f, const EmpiricalMeasure& mu, const ScalarField& phi,
                                 double epsilon);

/// sum_{j,l} d_j d_l g * b_j b_l for coordinate-affine f with phi_j = a_j + b_j x.
/// Rejects other cylindrical functions: they are not in the Laplacian's domain.
double intrinsic_laplacian(const CylindricalFunction& f, const EmpiricalMeasure& mu);

enum class BasisChoice { indicator, random };

constexpr std::size_t kMaxBruteForceAtoms = 64;

/// Sum of second differences of f along the displacements of an orthonormal
/// basis of T_mu. mu must have distinct atoms with positive weights and at most
/// 64 of them. The indicator basis is phi_m = 1_{x_m} / sqrt(w_m); the random
/// basis rotates it by an orthogonal matrix drawn from `seed`.
double laplacian_bruteforce(const CylindricalFunction& f, const EmpiricalMeasure& mu, double epsilon,
                            BasisChoice basis = BasisChoice::indicator, std::uint64_t seed = 0);

struct LiftedGradient {
  TangentVector gradient;
  /// ||Df(Psi(h)) o h||^2 in L^2(mu0), by quadrature.
  double norm_squared = 0.0;
  /// Fraction of that norm not captured by the first N basis coefficients.
  double tail_fraction = 0.0;
  bool tail_warning = false;  // tail_fraction > 1%
};

/// Coefficients of grad(f o Psi)(h) = (Df(Psi(h))) o h on h_1..h_modes. Psi(h) is
/// represented by the Gauss-Hermite pushforward, so no sampling is involved.
LiftedGradient lifted_gradient(const CylindricalFunction& f, const TangentVector& h, std::size_t modes,
                               const QuadratureRule& rule = gauss_hermite_rule(kDefaultQuadratureOrder));

struct DirichletOptions {
  std::size_t measures = 10000;
  /// Atoms per measure; 0 represents each Psi(h_k) by Gauss-Hermite quadrature instead.
  std::size_t particles = 0;
  std::size_t quadrature_order = kDefaultQuadratureOrder;
};

/// E(f, g) = E_N <Df(mu), Dg(mu)>_{T_mu}, mu ~ N_{mu0,Q}.
Estimate dirichlet_form_mc(const CylindricalFunction& f, const CylindricalFunction& g, const Spectrum& spectrum,
                           const DirichletOptions& options, std::uint64_t seed);

struct ClassDReport {
  double residual_fraction = 0.0;  // unprojected part of (Df o Psi(h)) o h
  double q_tail_fraction = 0.0;    // share of sum q_n^2 a_n^2 in the upper half of the modes
  bool member = false;             // both below 1%
};

ClassDReport class_d_check(const CylindricalFunction& f, const TangentVector& h, const Spectrum& spectrum,
                           const QuadratureRule& rule = gauss_hermite_rule(kDefaultQuadratureOrder));

/// Lf(Psi(h)) = Laplacian f(Psi(h)) - <h, Q[(Df(Psi(h))) o h]>. Requires coordinate-affine f
/// passing the class-D tail check.
double generator_apply(const CylindricalFunction& f, const TangentVector& h, const Spectrum& spectrum,
                       const QuadratureRule& rule = gauss_hermite_rule(kDefaultQuadratureOrder));

struct IbpReport {
  Estimate energy;           // E(f, g)
  Estimate minus_g_lf;       // -E[g Lf]
  Estimate difference;       // paired per-sample difference
};

/// Integration by parts on the lifted space with paired samples h_k ~ G_Q.
IbpReport ibp_check(const CylindricalFunction& f, const CylindricalFunction& g, const Spectrum& spectrum,
                    std::size_t samples, std::uint64_t seed);

}  // namespace wou
