#pragma once

// The centred Gaussian measure G_Q on the tangent space (covariance Q^{-1}),
// sampled through its Karhunen-Loeve coordinates, and its image N_{mu0,Q}
// under the pushforward.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wou/spectral_core.hpp"
#include "wou/tangent_space.hpp"

namespace wou {

struct GaussianSampleBatch {
  std::vector<TangentVector> vectors;
  Spectrum spectrum;
  std::uint64_t seed = 0;
};

/// Coefficient n (one-based) of sample k: xi / sqrt(q_n), xi drawn from (seed, k, n).
double gq_coefficient(const Spectrum& spectrum, std::uint64_t seed, std::size_t sample, std::size_t mode);

/// One G_Q draw; identical to entry `sample` of sample_gq for the same seed.
TangentVector sample_gq_one(const Spectrum& spectrum, std::uint64_t seed, std::size_t sample);

/// M independent draws. Rejects spectra whose declared tail makes the trace diverge.
GaussianSampleBatch sample_gq(const Spectrum& spectrum, std::size_t count, std::uint64_t seed);

/// Seed of the base points used for the k-th measure of sample_n_mu0_q.
std::uint64_t measure_base_seed(std::uint64_t seed, std::size_t sample);

/// Measures Psi(h_k) with h_k ~ G_Q, each carried by `particles` atoms.
std::vector<EmpiricalMeasure> sample_n_mu0_q(const Spectrum& spectrum, std::size_t count, std::size_t particles,
                                             std::uint64_t seed);

struct ModeStats {
  Estimate mean;
  double variance = 0.0;           // NaN for a single sample
  double variance_std_error = 0.0;
  bool variance_defined = false;
};

std::vector<ModeStats> coefficient_stats(const GaussianSampleBatch& batch);

}  // namespace wou
