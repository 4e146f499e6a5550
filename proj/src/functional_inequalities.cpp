#include "wou/functional_inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wou/gaussian_field.hpp"
#include "wou/gaussian_oracle.hpp"
#include "wou/ou_dynamics.hpp"
#include "wou/parallel.hpp"
#include "wou/stats.hpp"

namespace wou {

namespace {

constexpr std::size_t kKernelOrder = 32;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double standard_deviation(const std::vector<double>& xs) {
  const double v = stats::sample_variance(xs);
  return std::isnan(v) ? 0.0 : std::sqrt(v);
}

// Probabilists' Hermite polynomial He_k.
double hermite_he(unsigned k, double x) {
  double prev = 0.0;
  double cur = 1.0;
  for (unsigned j = 0; j < k; ++j) {
    const double next = x * cur - static_cast<double>(j) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace

Estimate entropy_estimate(const std::vector<double>& values) {
  if (values.size() < 2) throw InputError("entropy_estimate: at least two samples are required");
  double a = 0.0;
  double b = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw InputError("entropy_estimate: negative or non-finite value at sample", i);
    }
    a += xlogx(values[i]);
    b += values[i];
  }
  const auto n = static_cast<double>(values.size());
  a /= n;
  b /= n;
  const double logb = b > 0.0 ? std::log(b) : 0.0;
  std::vector<double> influence(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) influence[i] = xlogx(values[i]) - (logb + 1.0) * values[i];
  return {a - xlogx(b), standard_deviation(influence) / std::sqrt(n)};
}

std::vector<EntropyDecayPoint> entropy_decay_experiment(double lambda, double q1, const std::vector<double>& times,
                                                        std::size_t samples, std::uint64_t seed) {
  if (!(q1 > 0.0)) throw InputError("entropy_decay_experiment: q1 must be positive");
  if (std::abs(lambda) / std::sqrt(q1) > 20.0) {
    throw InputError("entropy_decay_experiment: lambda too large; the tilt's moments overflow");
  }
  if (samples < 2) throw InputError("entropy_decay_experiment: at least two samples are required");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0)) throw InputError("entropy_decay_experiment: negative time", i);
  }
  const Spectrum spectrum = Spectrum::from_values({q1});
  const QuadratureRule& rule = gauss_hermite_rule(kKernelOrder);
  const double shift = lambda * lambda / (2.0 * q1);
  const auto f = [=](double c) { return std::exp(lambda * c - shift); };

  std::vector<double> starts(samples);
  for (std::size_t k = 0; k < samples; ++k) starts[k] = gq_coefficient(spectrum, seed, k, 1);

  const auto entropy_at = [&](double t) {
    const auto values =
        map_indices(samples, [&](std::size_t k) { return semigroup_mode_quadrature(f, q1, starts[k], t, rule); });
    return entropy_estimate(values);
  };

  const Estimate initial = entropy_at(0.0);
  std::vector<EntropyDecayPoint> out;
  for (double t : times) {
    EntropyDecayPoint pt;
    pt.t = t;
    pt.entropy = entropy_at(t);
    pt.initial_entropy = initial;
    const double r = pt.entropy.value / initial.value;
    pt.ratio = {r, std::hypot(pt.entropy.std_error / initial.value, r * initial.std_error / initial.value)};
    pt.predicted_ratio = gaussian_oracle::entropy_decay_factor(q1, t);
    pt.relative_error = std::abs(r / pt.predicted_ratio - 1.0);
    pt.verdict = pt.relative_error <= 0.02 ? Verdict::pass : Verdict::fail;
    out.push_back(pt);
  }
  return out;
}

LsiFunction LsiFunction::exponential_tilt(double lambda) {
  return {"exp_tilt", [lambda](const TangentVector& h) { return std::exp(0.5 * lambda * h[0]); },
          [lambda](const TangentVector& h) {
            const double f = std::exp(0.5 * lambda * h[0]);
            return 0.25 * lambda * lambda * f * f;
          },
          1};
}

LsiFunction LsiFunction::sine_bump(double amplitude, std::size_t mode) {
  if (mode == 0) throw InputError("LsiFunction::sine_bump: modes are one-based");
  return {"sine_bump", [=](const TangentVector& h) { return 1.0 + amplitude * std::sin(h[mode - 1]); },
          [=](const TangentVector& h) {
            const double d = amplitude * std::cos(h[mode - 1]);
            return d * d;
          },
          mode};
}

LsiFunction LsiFunction::constant(double c) {
  return {"constant", [c](const TangentVector&) { return c; }, [](const TangentVector&) { return 0.0; }, 1};
}

InequalityReport lsi_check(const LsiFunction& f, const Spectrum& spectrum, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw InputError("lsi_check: at least two samples are required");
  if (f.modes > spectrum.size()) throw InputError("lsi_check: function reads more modes than the spectrum has");
  const Spectrum used = spectrum.truncated(std::max<std::size_t>(1, f.modes));
  const double c = gaussian_oracle::lsi_constant(spectrum.q(1));

  std::vector<double> sq(samples), grad(samples);
  parallel_for(samples, [&](std::size_t k) {
    const TangentVector h = sample_gq_one(used, seed, k);
    const double v = f.value(h);
    sq[k] = v * v;
    grad[k] = f.gradient_norm_squared(h);
  });
  for (std::size_t k = 0; k < samples; ++k) {
    if (!std::isfinite(sq[k]) || !std::isfinite(grad[k])) throw InputError("lsi_check: non-finite value at sample", k);
  }

  const auto n = static_cast<double>(samples);
  double a = 0.0, b = 0.0, d = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    a += xlogx(sq[k]);
    b += sq[k];
    d += grad[k];
  }
  a /= n;
  b /= n;
  d /= n;

  InequalityReport r;
  if (d == 0.0 && std::all_of(sq.begin(), sq.end(), [&](double x) { return x == sq[0]; })) {
    r.degenerate = true;
    r.ratio = {1.0, 0.0};
    r.verdict = Verdict::pass;
    return r;
  }
  if (!(b > 0.0)) throw InputError("lsi_check: f vanishes on every sample");

  const double logb = std::log(b);
  const double ent = a - xlogx(b);
  const double energy = c * d;
  const double ratio = ent / energy;
  // Influence functions of the normalized sides and the ratio.
  std::vector<double> lhs_inf(samples), rhs_inf(samples), ratio_inf(samples), diff_inf(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double ent_k = xlogx(sq[k]) - (logb + 1.0) * sq[k];
    lhs_inf[k] = (ent_k - ent / b * sq[k]) / b;
    rhs_inf[k] = (c * grad[k] - energy / b * sq[k]) / b;
    ratio_inf[k] = (ent_k - ratio * c * grad[k]) / energy;
    diff_inf[k] = (ent_k - c * grad[k]) / b;
  }
  const double root_n = std::sqrt(n);
  r.lhs = {ent / b, standard_deviation(lhs_inf) / root_n};
  r.rhs = {energy / b, standard_deviation(rhs_inf) / root_n};
  r.ratio = {ratio, standard_deviation(ratio_inf) / root_n};
  const double diff_se = standard_deviation(diff_inf) / root_n;
  r.verdict = r.lhs.value <= r.rhs.value + 4.0 * diff_se ? Verdict::pass : Verdict::fail;
  return r;
}

HypercontractivityReport hypercontractivity_check(double p, double t, double lambda, double q1, std::size_t samples,
                                                  std::uint64_t seed) {
  if (!(p > 1.0)) throw InputError("hypercontractivity_check: p must exceed 1");
  if (!(t >= 0.0)) throw InputError("hypercontractivity_check: t must be nonnegative");
  if (!(q1 > 0.0)) throw InputError("hypercontractivity_check: q1 must be positive");
  if (samples < 2) throw InputError("hypercontractivity_check: at least two samples are required");

  HypercontractivityReport r;
  r.p = p;
  r.t = t;
  r.lambda = lambda;
  r.q1 = q1;
  r.p_t = gaussian_oracle::critical_exponent(p, q1, t);
  if (r.p_t * std::abs(lambda) / std::sqrt(q1) > 20.0) {
    throw InputError("hypercontractivity_check: exponent too large; the norms overflow");
  }
  r.log_norm_f = gaussian_oracle::log_norm_tilt(lambda, q1, p);
  r.log_norm_semigroup = gaussian_oracle::log_norm_semigroup_tilt(lambda, q1, t, r.p_t);
  r.supercritical_gap = gaussian_oracle::log_norm_semigroup_tilt(lambda, q1, t, r.p_t + 0.5) - r.log_norm_f;
  r.criticality = std::abs(r.log_norm_semigroup - r.log_norm_f) <= 1e-12 ? Verdict::pass : Verdict::fail;
  r.negative_control = r.supercritical_gap > 0.0 ? Verdict::pass : Verdict::fail;

  // Independent numerical path: Gauss-Hermite for both the kernel and the outer law.
  const QuadratureRule& outer = gauss_hermite_rule(kDefaultQuadratureOrder);
  const QuadratureRule& kernel = gauss_hermite_rule(kKernelOrder);
  const auto f = [lambda](double c) { return std::exp(lambda * c); };
  const double scale = 1.0 / std::sqrt(q1);
  double fp = 0.0;
  double ptf = 0.0;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const double c = scale * outer.nodes[i];
    fp += outer.weights[i] * std::pow(f(c), p);
    ptf += outer.weights[i] * std::pow(semigroup_mode_quadrature(f, q1, c, t, kernel), r.p_t);
  }
  r.quadrature_log_norm_f = std::log(fp) / p;
  r.quadrature_log_norm_semigroup = std::log(ptf) / r.p_t;

  const Spectrum spectrum = Spectrum::from_values({q1});
  const auto values = map_indices(samples, [&](std::size_t k) {
    const double c = gq_coefficient(spectrum, seed, k, 1);
    return std::pow(semigroup_mode_quadrature(f, q1, c, t, kernel), r.p_t);
  });
  const Estimate m = stats::mean_estimate(values);
  r.mc_log_norm_semigroup = {std::log(m.value) / r.p_t, m.std_error / (m.value * r.p_t)};
  return r;
}

double eigenfunction_value(const std::vector<ModeExcitation>& excitations, const Spectrum& spectrum,
                           const TangentVector& h) {
  double u = 1.0;
  for (const auto& e : excitations) {
    if (e.mode == 0 || e.mode > spectrum.size() || e.mode > h.size()) {
      throw InputError("eigenfunction_value: mode outside the truncation");
    }
    u *= hermite_he(e.degree, std::sqrt(spectrum.q(e.mode)) * h[e.mode - 1]);
  }
  return u;
}

SpectrumCheckResult spectrum_check(const std::vector<ModeExcitation>& excitations, const Spectrum& spectrum, double t,
                                   std::size_t samples, std::uint64_t seed, const TangentVector* h0) {
  if (!(t > 0.0)) throw InputError("spectrum_check: t must be positive");
  if (samples < 2) throw InputError("spectrum_check: at least two samples are required");
  SpectrumCheckResult r;
  r.t = t;
  for (const auto& e : excitations) {
    if (e.mode == 0 || e.mode > spectrum.size()) throw InputError("spectrum_check: mode outside the truncation");
    r.predicted_rate += e.degree * spectrum.q(e.mode);
  }
  const bool trivial =
      std::all_of(excitations.begin(), excitations.end(), [](const ModeExcitation& e) { return e.degree == 0; });
  if (trivial) {
    r.measured_rate = {0.0, 0.0};
    r.verdict = Verdict::pass;
    return r;
  }

  // Modes above the highest excited one never enter u and evolve independently.
  std::size_t top = 1;
  for (const auto& e : excitations) top = std::max(top, e.mode);
  const Spectrum used = spectrum.truncated(top);
  TangentVector start(top);
  if (h0) {
    if (h0->size() != spectrum.size()) throw InputError("spectrum_check: start state has the wrong size");
    for (std::size_t n = 0; n < top; ++n) start[n] = (*h0)[n];
  } else {
    for (const auto& e : excitations) start[e.mode - 1] = 3.0 / std::sqrt(spectrum.q(e.mode));
  }

  std::vector<double> u1(samples), u2(samples);
  parallel_for(samples, [&](std::size_t k) {
    u1[k] = eigenfunction_value(excitations, used, transition(used, start, t, seed, k));
    u2[k] = eigenfunction_value(excitations, used, transition(used, start, 2.0 * t, seed, k));
  });
  const double p1 = stats::mean_estimate(u1).value;
  const double p2 = stats::mean_estimate(u2).value;
  if (!(p1 / p2 > 0.0)) {
    r.measured_rate = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()};
    r.widened = true;
    r.relative_error = std::numeric_limits<double>::infinity();
    return r;
  }
  std::vector<double> influence(samples);
  for (std::size_t k = 0; k < samples; ++k) influence[k] = (u1[k] / p1 - u2[k] / p2) / t;
  r.measured_rate = {std::log(p1 / p2) / t, standard_deviation(influence) / std::sqrt(static_cast<double>(samples))};
  r.relative_error = std::abs(r.measured_rate.value / r.predicted_rate - 1.0);
  r.widened = 4.0 * r.measured_rate.std_error > 0.05 * r.predicted_rate;
  r.verdict = r.relative_error <= 0.05 ? Verdict::pass : Verdict::fail;
  return r;
}

}  // namespace wou
