#pragma once

// Closed-form Gaussian moment algebra for the exponential family
// f(h) = exp(lambda <h, h_1>) with <h, h_1> ~ N(0, 1/q) under G_Q.
// Kept free of any Monte Carlo or quadrature code on purpose: the checks in
// functional_inequalities compare their numerical paths against these values.

#include <cmath>

namespace wou::gaussian_oracle {

/// Ent(f) for the normalized tilt f = exp(lambda c - lambda^2 / (2q)).
inline double tilt_entropy(double lambda, double q) { return lambda * lambda / (2.0 * q); }

/// Ent(P_t f) / Ent(f) for the same tilt.
inline double entropy_decay_factor(double q, double t) { return std::exp(-2.0 * q * t); }

/// Nelson's critical exponent p_t = 1 + (p - 1) e^{2 q t}.
inline double critical_exponent(double p, double q, double t) { return 1.0 + (p - 1.0) * std::exp(2.0 * q * t); }

/// log ||exp(lambda c)||_p = p lambda^2 / (2q).
inline double log_norm_tilt(double lambda, double q, double p) { return p * lambda * lambda / (2.0 * q); }

/// log ||P_t exp(lambda c)||_r = lambda^2 / (2q) (1 - e^{-2qt} + r e^{-2qt}).
inline double log_norm_semigroup_tilt(double lambda, double q, double t, double r) {
  const double e = std::exp(-2.0 * q * t);
  return lambda * lambda / (2.0 * q) * (1.0 - e + r * e);
}

/// P_t exp(lambda c)(c0) = exp(lambda e^{-qt} c0 + lambda^2 (1 - e^{-2qt}) / (2q)).
inline double semigroup_tilt(double lambda, double q, double t, double c0) {
  return std::exp(lambda * std::exp(-q * t) * c0 + lambda * lambda * (1.0 - std::exp(-2.0 * q * t)) / (2.0 * q));
}

/// The log-Sobolev constant 2 / q_1.
inline double lsi_constant(double q1) { return 2.0 / q1; }

}  // namespace wou::gaussian_oracle
