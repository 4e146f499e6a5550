#include "wou/wasserstein_calculus.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "wou/gaussian_field.hpp"
#include "wou/parallel.hpp"
#include "wou/rng.hpp"
#include "wou/stats.hpp"

namespace wou {

ScalarProfile ScalarProfile::identity() {
  return {"id", [](double r) { return r; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

ScalarProfile ScalarProfile::half_square() {
  return {"half_square", [](double r) { return 0.5 * r * r; }, [](double r) { return r; }, [](double) { return 1.0; }};
}

ScalarProfile ScalarProfile::sine() {
  return {"sin", [](double r) { return std::sin(r); }, [](double r) { return std::cos(r); },
          [](double r) { return -std::sin(r); }};
}

ScalarProfile ScalarProfile::cosine() {
  return {"cos", [](double r) { return std::cos(r); }, [](double r) { return -std::sin(r); },
          [](double r) { return -std::cos(r); }};
}

ScalarProfile ScalarProfile::constant(double c) {
  return {"const", [c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

ScalarProfile ScalarProfile::exponential(double rate) {
  return {"exp", [rate](double r) { return std::exp(rate * r); }, [rate](double r) { return rate * std::exp(rate * r); },
          [rate](double r) { return rate * rate * std::exp(rate * r); }};
}

InnerFunctional InnerFunctional::identity() { return {ScalarProfile::identity(), true}; }

InnerFunctional InnerFunctional::affine_map(double offset, double slope) {
  return {{"affine", [=](double x) { return offset + slope * x; }, [=](double) { return slope; },
           [](double) { return 0.0; }},
          true};
}

InnerFunctional InnerFunctional::of(ScalarProfile profile) { return {std::move(profile), false}; }

OuterFunction OuterFunction::univariate(ScalarProfile p) {
  OuterFunction g;
  g.arity = 1;
  g.value = [v = p.value](std::span<const double> y) { return v(y[0]); };
  g.gradient = [d = p.derivative](std::span<const double> y, std::span<double> out) { out[0] = d(y[0]); };
  g.hessian = [d2 = p.second_derivative](std::span<const double> y, std::span<double> out) { out[0] = d2(y[0]); };
  return g;
}

OuterFunction OuterFunction::product() {
  OuterFunction g;
  g.arity = 2;
  g.value = [](std::span<const double> y) { return y[0] * y[1]; };
  g.gradient = [](std::span<const double> y, std::span<double> out) {
    out[0] = y[1];
    out[1] = y[0];
  };
  g.hessian = [](std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
    out[1] = 1.0;
    out[2] = 1.0;
    out[3] = 0.0;
  };
  return g;
}

CylindricalFunction::CylindricalFunction(std::vector<InnerFunctional> inner, OuterFunction outer)
    : inner_(std::move(inner)), outer_(std::move(outer)) {
  if (inner_.size() != outer_.arity) throw InputError("CylindricalFunction: outer arity does not match inner count");
}

CylindricalFunction CylindricalFunction::of_mean(ScalarProfile g) {
  return CylindricalFunction({InnerFunctional::identity()}, OuterFunction::univariate(std::move(g)));
}

CylindricalFunction CylindricalFunction::constant(double c) { return of_mean(ScalarProfile::constant(c)); }

bool CylindricalFunction::coordinate_affine() const {
  return std::all_of(inner_.begin(), inner_.end(), [](const InnerFunctional& p) { return p.affine; });
}

std::vector<double> CylindricalFunction::coordinates(const EmpiricalMeasure& mu) const {
  std::vector<double> y(inner_.size());
  for (std::size_t j = 0; j < inner_.size(); ++j) y[j] = mu.integrate(inner_[j].profile.value);
  return y;
}

double CylindricalFunction::operator()(const EmpiricalMeasure& mu) const { return outer_.value(coordinates(mu)); }

double CylindricalFunction::derivative_at(std::span<const double> coords, double x) const {
  std::vector<double> grad(inner_.size());
  outer_.gradient(coords, grad);
  double s = 0.0;
  for (std::size_t j = 0; j < inner_.size(); ++j) s += grad[j] * inner_[j].profile.derivative(x);
  return s;
}

double CylindricalFunction::lifted(const TangentVector& h, const QuadratureRule& rule) const {
  if (coordinate_affine()) {
    const double mean = h.coefficient(1);
    std::vector<double> y(inner_.size());
    for (std::size_t j = 0; j < inner_.size(); ++j) {
      const auto& p = inner_[j].profile;
      y[j] = p.value(0.0) + p.derivative(0.0) * mean;
    }
    return outer_.value(y);
  }
  return (*this)(pushforward_quadrature(h, rule));
}

std::vector<double> intrinsic_derivative(const CylindricalFunction& f, const EmpiricalMeasure& mu) {
  const auto y = f.coordinates(mu);
  std::vector<double> out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    out[i] = f.derivative_at(y, mu.point(i));
    if (!std::isfinite(out[i])) throw InputError("intrinsic_derivative: non-finite partial at atom", i);
  }
  return out;
}

double fd_directional_derivative(const CylindricalFunction& f, const EmpiricalMeasure& mu, const ScalarField& phi,
                                 double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("fd_directional_derivative: epsilon must be positive");
  return (f(displace(mu, phi, epsilon)) - f(displace(mu, phi, -epsilon))) / (2.0 * epsilon);
}

double intrinsic_laplacian(const CylindricalFunction& f, const EmpiricalMeasure& mu) {
  for (std::size_t j = 0; j < f.arity(); ++j) {
    if (!f.inner()[j].affine) {
      throw InputError(
          "intrinsic_laplacian: inner functional '" + f.inner()[j].profile.name +
              "' is not affine; generic cylindrical functions are outside the Laplacian's domain",
          j);
    }
  }
  const std::size_t k = f.arity();
  const auto y = f.coordinates(mu);
  std::vector<double> hess(k * k);
  f.outer().hessian(y, hess);
  double s = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double bj = f.inner()[j].profile.derivative(0.0);
    for (std::size_t l = 0; l < k; ++l) s += hess[j * k + l] * bj * f.inner()[l].profile.derivative(0.0);
  }
  return s;
}

double laplacian_bruteforce(const CylindricalFunction& f, const EmpiricalMeasure& mu, double epsilon,
                            BasisChoice basis, std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw InputError("laplacian_bruteforce: epsilon must be positive");
  if (mu.dimension() != 1) throw InputError("laplacian_bruteforce: one-dimensional measures only");
  const std::size_t p = mu.size();
  if (p > kMaxBruteForceAtoms) throw InputError("laplacian_bruteforce: at most 64 atoms");
  for (std::size_t i = 0; i < p; ++i) {
    if (!(mu.weight(i) > 0.0)) throw InputError("laplacian_bruteforce: zero-weight atom", i);
    for (std::size_t j = 0; j < i; ++j) {
      if (mu.point(i) == mu.point(j)) throw InputError("laplacian_bruteforce: coincident atoms", i);
    }
  }

  // Columns of `rot` give the basis in the indicator coordinates.
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  if (basis == BasisChoice::random) {
    Eigen::MatrixXd g(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            rng::normal(seed, {rng::Purpose::orthonormal_basis, static_cast<std::uint32_t>(i),
                               static_cast<std::uint32_t>(j)});
      }
    }
    rot = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  }

  const double f0 = f(mu);
  std::vector<double> phi(p);
  double total = 0.0;
  for (std::size_t m = 0; m < p; ++m) {
    for (std::size_t i = 0; i < p; ++i) {
      phi[i] = rot(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) / std::sqrt(mu.weight(i));
    }
    const double up = f(displace(mu, phi, epsilon));
    const double down = f(displace(mu, phi, -epsilon));
    total += (up - 2.0 * f0 + down) / (epsilon * epsilon);
  }
  return total;
}

LiftedGradient lifted_gradient(const CylindricalFunction& f, const TangentVector& h, std::size_t modes,
                               const QuadratureRule& rule) {
  if (modes == 0) throw InputError("lifted_gradient: at least one mode is required");
  const EmpiricalMeasure mu = pushforward_quadrature(h, rule);
  const auto y = f.coordinates(mu);
  LiftedGradient out{TangentVector(modes)};
  std::vector<double> basis(modes);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double d = f.derivative_at(y, mu.point(i));
    if (!std::isfinite(d)) throw InputError("lifted_gradient: non-finite derivative at quadrature node", i);
    out.norm_squared += rule.weights[i] * d * d;
    hermite_eval_all(rule.nodes[i], basis);
    for (std::size_t n = 0; n < modes; ++n) out.gradient[n] += rule.weights[i] * d * basis[n];
  }
  const double captured = out.gradient.norm_squared();
  out.tail_fraction = out.norm_squared > 0.0 ? std::max(0.0, out.norm_squared - captured) / out.norm_squared : 0.0;
  out.tail_warning = out.tail_fraction > 0.01;
  return out;
}

Estimate dirichlet_form_mc(const CylindricalFunction& f, const CylindricalFunction& g, const Spectrum& spectrum,
                           const DirichletOptions& options, std::uint64_t seed) {
  if (options.measures < 2) throw InputError("dirichlet_form_mc: at least two measures are required");
  if (spectrum.tail().implies_divergence()) throw InputError("dirichlet_form_mc: spectrum is not trace class");
  const QuadratureRule* rule = options.particles == 0 ? &gauss_hermite_rule(options.quadrature_order) : nullptr;
  const auto values = map_indices(options.measures, [&](std::size_t k) {
    const TangentVector h = sample_gq_one(spectrum, seed, k);
    const EmpiricalMeasure mu = rule ? pushforward_quadrature(h, *rule)
                                     : pushforward(h, options.particles, measure_base_seed(seed, k));
    const auto df = intrinsic_derivative(f, mu);
    const auto dg = intrinsic_derivative(g, mu);
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu.weight(i) * df[i] * dg[i];
    return s;
  });
  return stats::mean_estimate(values);
}

ClassDReport class_d_check(const CylindricalFunction& f, const TangentVector& h, const Spectrum& spectrum,
                           const QuadratureRule& rule) {
  const LiftedGradient grad = lifted_gradient(f, h, spectrum.size(), rule);
  ClassDReport r;
  r.residual_fraction = grad.tail_fraction;
  double total = 0.0;
  double upper = 0.0;
  const std::size_t half = spectrum.size() / 2;
  for (std::size_t n = 1; n <= spectrum.size(); ++n) {
    const double w = spectrum.q(n) * spectrum.q(n) * grad.gradient[n - 1] * grad.gradient[n - 1];
    total += w;
    if (n > half) upper += w;
  }
  r.q_tail_fraction = total > 0.0 ? upper / total : 0.0;
  r.member = r.residual_fraction <= 0.01 && r.q_tail_fraction <= 0.01;
  return r;
}

double generator_apply(const CylindricalFunction& f, const TangentVector& h, const Spectrum& spectrum,
                       const QuadratureRule& rule) {
  if (h.size() != spectrum.size()) throw InputError("generator_apply: state and spectrum sizes differ");
  const ClassDReport d = class_d_check(f, h, spectrum, rule);
  if (!d.member) {
    throw InputError("generator_apply: f is not in class D at this state (projection tail " +
                     std::to_string(d.residual_fraction) + ", q-weighted tail " + std::to_string(d.q_tail_fraction) +
                     ")");
  }
  const EmpiricalMeasure mu = pushforward_quadrature(h, rule);
  const double laplacian = intrinsic_laplacian(f, mu);
  const LiftedGradient grad = lifted_gradient(f, h, spectrum.size(), rule);
  double drift = 0.0;
  for (std::size_t n = 1; n <= spectrum.size(); ++n) drift += spectrum.q(n) * h[n - 1] * grad.gradient[n - 1];
  return laplacian - drift;
}

IbpReport ibp_check(const CylindricalFunction& f, const CylindricalFunction& g, const Spectrum& spectrum,
                    std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw InputError("ibp_check: at least two samples are required");
  const QuadratureRule& rule = gauss_hermite_rule(kDefaultQuadratureOrder);
  std::vector<double> energy(samples), minus_glf(samples), diff(samples);
  parallel_for(samples, [&](std::size_t k) {
    const TangentVector h = sample_gq_one(spectrum, seed, k);
    const EmpiricalMeasure mu = pushforward_quadrature(h, rule);
    const auto df = intrinsic_derivative(f, mu);
    const auto dg = intrinsic_derivative(g, mu);
    double e = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) e += mu.weight(i) * df[i] * dg[i];
    energy[k] = e;
    minus_glf[k] = -g(mu) * generator_apply(f, h, spectrum, rule);
    diff[k] = energy[k] - minus_glf[k];
  });
  return {stats::mean_estimate(energy), stats::mean_estimate(minus_glf), stats::mean_estimate(diff)};
}

}  // namespace wou
