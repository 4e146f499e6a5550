#include "wou/gaussian_field.hpp"

#include <cmath>
#include <limits>

#include "wou/parallel.hpp"
#include "wou/rng.hpp"
#include "wou/stats.hpp"

namespace wou {

namespace {

void require_finite_trace(const Spectrum& spectrum) {
  if (spectrum.tail().implies_divergence()) {
    throw InputError("G_Q requires a trace-class inverse; declared tail " + spectrum.tail().describe() +
                     " makes sum 1/q_n diverge");
  }
}

}  // namespace

double gq_coefficient(const Spectrum& spectrum, std::uint64_t seed, std::size_t sample, std::size_t mode) {
  const double xi = rng::normal(seed, {rng::Purpose::coefficient, static_cast<std::uint32_t>(sample),
                                       static_cast<std::uint32_t>(sample >> 32), static_cast<std::uint32_t>(mode)});
  return xi / std::sqrt(spectrum.q(mode));
}

TangentVector sample_gq_one(const Spectrum& spectrum, std::uint64_t seed, std::size_t sample) {
  TangentVector h(spectrum.size());
  for (std::size_t n = 1; n <= spectrum.size(); ++n) h[n - 1] = gq_coefficient(spectrum, seed, sample, n);
  return h;
}

GaussianSampleBatch sample_gq(const Spectrum& spectrum, std::size_t count, std::uint64_t seed) {
  require_finite_trace(spectrum);
  if (count == 0) throw InputError("sample_gq: count must be at least 1");
  GaussianSampleBatch batch{std::vector<TangentVector>(count), spectrum, seed};
  parallel_for(count, [&](std::size_t k) { batch.vectors[k] = sample_gq_one(spectrum, seed, k); });
  return batch;
}

std::uint64_t measure_base_seed(std::uint64_t seed, std::size_t sample) {
  return rng::derive_seed(seed, 0x1000000000ull + sample);
}

std::vector<EmpiricalMeasure> sample_n_mu0_q(const Spectrum& spectrum, std::size_t count, std::size_t particles,
                                             std::uint64_t seed) {
  if (particles == 0) throw InputError("sample_n_mu0_q: particle count must be at least 1");
  const GaussianSampleBatch batch = sample_gq(spectrum, count, seed);
  std::vector<EmpiricalMeasure> out(count);
  parallel_for(count, [&](std::size_t k) {
    out[k] = pushforward(batch.vectors[k], particles, measure_base_seed(seed, k));
  });
  return out;
}

std::vector<ModeStats> coefficient_stats(const GaussianSampleBatch& batch) {
  if (batch.vectors.empty()) throw InputError("coefficient_stats: empty batch");
  const std::size_t modes = batch.vectors.front().size();
  std::vector<ModeStats> out(modes);
  std::vector<double> column(batch.vectors.size());
  for (std::size_t n = 0; n < modes; ++n) {
    for (std::size_t k = 0; k < batch.vectors.size(); ++k) column[k] = batch.vectors[k][n];
    ModeStats& s = out[n];
    s.mean = stats::mean_estimate(column);
    s.variance_defined = column.size() >= 2;
    s.variance = stats::sample_variance(column);
    s.variance_std_error = stats::variance_std_error(column);
  }
  return out;
}

}  // namespace wou
