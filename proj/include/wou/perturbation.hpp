#pragma once

// Bounded perturbations V(mu) = v(mu(id)) of the Gaussian measure: the
// perturbed spectral gap of the mode-1 operator by a finite-volume
// discretization, the Holley-Stroock bound, a preconditioned MALA sampler for
// the perturbed measure and the integrability conditions on V.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wou/common.hpp"
#include "wou/spectral_core.hpp"

namespace wou {

struct PotentialSpec {
  std::string name;
  std::function<double(double)> v;
  std::function<double(double)> dv;
  std::function<double(double)> d2v;
  double sup = 0.0;  // declared sup v
  double inf = 0.0;  // declared inf v
  double sup_abs_derivative = 0.0;

  double osc() const { return sup - inf; }

  static PotentialSpec zero();
  static PotentialSpec constant(double c);
  /// amplitude * cos(r)
  static PotentialSpec cosine(double amplitude);
};

/// Spot-checks the declared bounds on a uniform grid of [-halfwidth, halfwidth].
/// Throws when v or v' escapes them or when the declared oscillation is not finite.
void verify_declared_bounds(const PotentialSpec& v, double halfwidth, std::size_t grid = 10001);

struct GapResult {
  double gap = 0.0;           // at G cells
  double gap_refined = 0.0;   // at 2G cells
  double relative_change = 0.0;
  bool converged = false;     // relative_change <= 1e-3
  std::size_t grid_points = 0;
  double halfwidth = 0.0;
};

/// Smallest nonzero eigenvalue of -(d^2/dr^2 - (q1 r - v'(r)) d/dr) on
/// L^2(e^{v} N(0, 1/q1)), discretized in divergence form on [-R, R] with
/// reflecting ends. halfwidth <= 0 selects R = 8 / sqrt(q1).
GapResult perturbed_gap_1d(const PotentialSpec& v, double q1, std::size_t grid_points = 2000, double halfwidth = 0.0);

/// Log-Sobolev constant bound (2 / q1) e^{osc v}; its spectral-gap consequence is q1 e^{-osc v}.
double holley_stroock_bound(const PotentialSpec& v, double q1);

/// Normalized density proportional to e^{v(r) - q1 r^2 / 2}, tabulated on a fine grid.
class PerturbedMarginal {
 public:
  PerturbedMarginal(const PotentialSpec& v, double q1, std::size_t grid = 20001);

  double cdf(double x) const;

 private:
  double lo_ = 0.0;
  double step_ = 0.0;
  std::vector<double> cumulative_;
};

struct MalaOptions {
  std::size_t steps = 100000;
  double step_size = 0.5;
  std::size_t burn_in = 1000;
  std::size_t thin = 10;
};

struct MalaResult {
  /// Thinned post-burn-in draws, one vector per mode.
  std::vector<std::vector<double>> mode_samples;
  double acceptance_rate = 0.0;
  bool tuning_flag = false;  // acceptance outside [0.1, 0.9]
};

/// MALA targeting exp(v(c_1) - sum q_n c_n^2 / 2), preconditioned by Q^{-1}:
/// c' = c + tau Q^{-1} grad log pi(c) + sqrt(2 tau) Q^{-1/2} xi, with the exact
/// Metropolis-Hastings correction for this proposal.
MalaResult mala_sample(const PotentialSpec& v, const Spectrum& spectrum, const MalaOptions& options,
                       std::uint64_t seed);

struct ConditionReport {
  Estimate a_integral;         // E[|DV| e^{V+} + |DV|^p]
  double a_envelope = 0.0;
  Estimate c1_gradient_term;   // E[exp((1 + eps) |DV|^2 / (2 q1))]
  double c1_gradient_envelope = 0.0;
  Estimate c1_integral;        // gradient term + E[exp(V+ + eps V-)]
  double c1_envelope = 0.0;
  /// E[exp(lambda |DV|^2)] at lambda = (1 + eps) / (2 q1) > 1 / (2 q1), the compactness condition.
  Estimate compactness_integral;
  double compactness_lambda = 0.0;
  bool certifiable = true;
  std::string status;
};

/// Monte Carlo of the integrability conditions under N_{mu0,Q}, where
/// ||DV(mu)||_{T_mu} = |v'(mu(id))| and mu(id) ~ N(0, 1/q1).
ConditionReport condition_check(const PotentialSpec& v, const Spectrum& spectrum, double epsilon, double p,
                                std::size_t samples, std::uint64_t seed);

}  // namespace wou
