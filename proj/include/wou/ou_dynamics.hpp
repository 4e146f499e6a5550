#pragma once

// Exact simulation of the lifted OU process dh = -Q h dt + sqrt(2) dW on the
// tangent space, Monte Carlo evaluation of its semigroup, the Bismut gradient
// estimator and the Harnack inequality check.
//
// Noise is addressed by (seed, sample, step, mode), so two calls that share a
// seed and sample index reuse the same Gaussian increments (common random numbers).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "wou/common.hpp"
#include "wou/spectral_core.hpp"
#include "wou/tangent_space.hpp"

namespace wou {

using LiftedFunction = std::function<double(const TangentVector&)>;

/// Standard normal driving mode `mode` of step `step` of path `sample`.
double transition_noise(std::uint64_t seed, std::size_t sample, std::size_t step, std::size_t mode);

/// Exact in law: c_n' = e^{-q_n dt} c_n + sqrt((1 - e^{-2 q_n dt}) / q_n) xi_n.
/// The state must carry exactly one coefficient per eigenvalue.
TangentVector transition(const Spectrum& spectrum, const TangentVector& h, double dt, std::uint64_t seed,
                         std::size_t sample = 0, std::size_t step = 0);

struct OUPath {
  std::vector<double> times;
  std::vector<TangentVector> states;
  std::uint64_t seed = 0;
};

/// Chains transitions over a strictly increasing grid starting at 0.
OUPath simulate_path(const Spectrum& spectrum, const TangentVector& h0, const std::vector<double>& times,
                     std::uint64_t seed, std::size_t sample = 0);

/// E f(h_t | h_0 = h0) over M exact transitions.
Estimate semigroup_mc(const LiftedFunction& f, const Spectrum& spectrum, const TangentVector& h0, double t,
                      std::size_t samples, std::uint64_t seed);

/// P_t f for f depending on one mode only: E f(e^{-qt} c0 + sigma_t xi) by Gauss-Hermite quadrature.
double semigroup_mode_quadrature(const std::function<double(double)>& f, double q, double c0, double t,
                                 const QuadratureRule& rule);

enum class BismutNormalization { paper, corrected };

/// Prefactor kappa of the weight (kappa / t) int_0^t e^{-q_n s} dB_s^n.
double bismut_kappa(BismutNormalization normalization);

struct BismutResult {
  Estimate estimate;
  /// Central difference of P_t f along h_n, with common random numbers.
  Estimate fd_reference;
  double kappa = 0.0;
};

/// Directional derivative of P_t f at h0 along basis vector h_mode (one-based).
BismutResult bismut_gradient(const LiftedFunction& f, const Spectrum& spectrum, const TangentVector& h0, double t,
                             std::size_t mode, std::size_t samples, std::uint64_t seed,
                             BismutNormalization normalization = BismutNormalization::corrected);

struct HarnackReport {
  Estimate lhs;  // (P_t f (h + v))^p
  Estimate rhs;  // P_t f^p (h) exp(p |v|^2 / (2 (p - 1)))
  double margin = 0.0;
  Verdict verdict = Verdict::fail;
};

/// Below this time the inequality is evaluated but not asserted.
inline double harnack_min_time(const Spectrum& spectrum) { return 0.1 / spectrum.q(1); }

HarnackReport harnack_check(const LiftedFunction& f, const Spectrum& spectrum, const TangentVector& h,
                            const TangentVector& v, double p, double t, std::size_t samples, std::uint64_t seed);

}  // namespace wou
