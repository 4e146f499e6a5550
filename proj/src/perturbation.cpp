#include "wou/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "wou/gaussian_field.hpp"
#include "wou/rng.hpp"
#include "wou/stats.hpp"

namespace wou {

PotentialSpec PotentialSpec::zero() { return constant(0.0); }

PotentialSpec PotentialSpec::constant(double c) {
  return {"constant", [c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }, c, c, 0.0};
}

PotentialSpec PotentialSpec::cosine(double amplitude) {
  const double a = std::abs(amplitude);
  return {"cosine",
          [amplitude](double r) { return amplitude * std::cos(r); },
          [amplitude](double r) { return -amplitude * std::sin(r); },
          [amplitude](double r) { return -amplitude * std::cos(r); },
          a,
          -a,
          a};
}

void verify_declared_bounds(const PotentialSpec& v, double halfwidth, std::size_t grid) {
  if (!std::isfinite(v.osc()) || v.osc() < 0.0) throw InputError("potential: declared oscillation must be finite");
  if (grid < 2) throw InputError("potential: bound check needs at least two grid points");
  const double slack = 1e-12;
  for (std::size_t i = 0; i < grid; ++i) {
    const double r = -halfwidth + 2.0 * halfwidth * static_cast<double>(i) / static_cast<double>(grid - 1);
    const double val = v.v(r);
    if (!(val <= v.sup + slack && val >= v.inf - slack)) {
      throw InputError("potential '" + v.name + "' leaves its declared range on the check grid", i);
    }
    if (!(std::abs(v.dv(r)) <= v.sup_abs_derivative + slack)) {
      throw InputError("potential '" + v.name + "' exceeds its declared derivative bound on the check grid", i);
    }
  }
}

namespace {

// Cells of width h centred at r_i; mass m_i = rho(r_i) h, conductance between
// neighbours rho(r_{i+1/2}) / h. The symmetrized operator M^{-1/2} K M^{-1/2}
// is tridiagonal; the gap is its second-smallest eigenvalue.
double discrete_gap(const PotentialSpec& v, double q1, std::size_t cells, double halfwidth) {
  const double h = 2.0 * halfwidth / static_cast<double>(cells);
  const auto log_rho = [&](double r) { return v.v(r) - v.sup - 0.5 * q1 * r * r; };
  std::vector<double> mass(cells), cond(cells - 1);
  for (std::size_t i = 0; i < cells; ++i) {
    mass[i] = std::exp(log_rho(-halfwidth + (static_cast<double>(i) + 0.5) * h)) * h;
  }
  for (std::size_t i = 0; i + 1 < cells; ++i) {
    cond[i] = std::exp(log_rho(-halfwidth + static_cast<double>(i + 1) * h)) / h;
  }
  Eigen::VectorXd diag(static_cast<Eigen::Index>(cells));
  Eigen::VectorXd off(static_cast<Eigen::Index>(cells - 1));
  for (std::size_t i = 0; i < cells; ++i) {
    const double left = i > 0 ? cond[i - 1] : 0.0;
    const double right = i + 1 < cells ? cond[i] : 0.0;
    diag[static_cast<Eigen::Index>(i)] = (left + right) / mass[i];
  }
  for (std::size_t i = 0; i + 1 < cells; ++i) {
    off[static_cast<Eigen::Index>(i)] = -cond[i] / std::sqrt(mass[i] * mass[i + 1]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("perturbed_gap_1d: eigensolver did not converge");
  return solver.eigenvalues()[1];
}

}  // namespace

GapResult perturbed_gap_1d(const PotentialSpec& v, double q1, std::size_t grid_points, double halfwidth) {
  if (!(q1 > 0.0)) throw InputError("perturbed_gap_1d: q1 must be positive");
  if (grid_points < 100) throw InputError("perturbed_gap_1d: at least 100 grid points are required");
  GapResult r;
  r.grid_points = grid_points;
  r.halfwidth = halfwidth > 0.0 ? halfwidth : 8.0 / std::sqrt(q1);
  verify_declared_bounds(v, r.halfwidth);
  r.gap = discrete_gap(v, q1, grid_points, r.halfwidth);
  r.gap_refined = discrete_gap(v, q1, 2 * grid_points, r.halfwidth);
  r.relative_change = std::abs(r.gap_refined - r.gap) / std::abs(r.gap_refined);
  r.converged = r.relative_change <= 1e-3;
  return r;
}

double holley_stroock_bound(const PotentialSpec& v, double q1) {
  if (!(q1 > 0.0)) throw InputError("holley_stroock_bound: q1 must be positive");
  if (!std::isfinite(v.osc()) || v.osc() < 0.0) throw InputError("holley_stroock_bound: v must be bounded");
  return 2.0 / q1 * std::exp(v.osc());
}

PerturbedMarginal::PerturbedMarginal(const PotentialSpec& v, double q1, std::size_t grid) {
  if (!(q1 > 0.0) || grid < 3) throw InputError("PerturbedMarginal: invalid parameters");
  const double half = 12.0 / std::sqrt(q1);
  lo_ = -half;
  step_ = 2.0 * half / static_cast<double>(grid - 1);
  std::vector<double> dens(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double r = lo_ + step_ * static_cast<double>(i);
    dens[i] = std::exp(v.v(r) - v.sup - 0.5 * q1 * r * r);
  }
  cumulative_.assign(grid, 0.0);
  for (std::size_t i = 1; i < grid; ++i) cumulative_[i] = cumulative_[i - 1] + 0.5 * step_ * (dens[i - 1] + dens[i]);
  const double total = cumulative_.back();
  for (double& c : cumulative_) c /= total;
}

double PerturbedMarginal::cdf(double x) const {
  const double pos = (x - lo_) / step_;
  if (pos <= 0.0) return 0.0;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= cumulative_.size()) return 1.0;
  const double frac = pos - static_cast<double>(i);
  return cumulative_[i] + frac * (cumulative_[i + 1] - cumulative_[i]);
}

MalaResult mala_sample(const PotentialSpec& v, const Spectrum& spectrum, const MalaOptions& options,
                       std::uint64_t seed) {
  if (!(options.step_size > 0.0)) throw InputError("mala_sample: step size must be positive");
  if (options.thin == 0) throw InputError("mala_sample: thinning must be at least 1");
  if (options.burn_in >= options.steps) throw InputError("mala_sample: burn-in consumes every step");
  const std::size_t n = spectrum.size();
  const double tau = options.step_size;
  const double q1 = spectrum.q(1);

  const auto log_target = [&](const std::vector<double>& c) {
    double s = v.v(c[0]);
    for (std::size_t k = 0; k < n; ++k) s -= 0.5 * spectrum.q(k + 1) * c[k] * c[k];
    return s;
  };
  // Mean of the proposal from c: c + tau Q^{-1} grad log pi(c).
  const auto drift = [&](const std::vector<double>& c, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) out[k] = (1.0 - tau) * c[k];
    out[0] += tau * v.dv(c[0]) / q1;
  };
  const auto log_proposal = [&](const std::vector<double>& to, const std::vector<double>& mean) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = to[k] - mean[k];
      s -= spectrum.q(k + 1) * d * d / (4.0 * tau);
    }
    return s;
  };

  MalaResult result;
  result.mode_samples.assign(n, {});
  std::vector<double> c(n, 0.0), proposal(n), mean_fwd(n), mean_back(n);
  double log_pi = log_target(c);
  std::size_t accepted = 0;
  for (std::size_t step = 0; step < options.steps; ++step) {
    drift(c, mean_fwd);
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = rng::normal(seed, {rng::Purpose::mala_proposal, static_cast<std::uint32_t>(step),
                                           static_cast<std::uint32_t>(k)});
      proposal[k] = mean_fwd[k] + std::sqrt(2.0 * tau / spectrum.q(k + 1)) * xi;
    }
    drift(proposal, mean_back);
    const double log_pi_new = log_target(proposal);
    const double log_alpha =
        log_pi_new - log_pi + log_proposal(c, mean_back) - log_proposal(proposal, mean_fwd);
    const double u = rng::uniform(seed, {rng::Purpose::mala_accept, static_cast<std::uint32_t>(step)});
    if (std::log(u) < log_alpha) {
      c.swap(proposal);
      log_pi = log_pi_new;
      ++accepted;
    }
    if (step >= options.burn_in && (step - options.burn_in) % options.thin == 0) {
      for (std::size_t k = 0; k < n; ++k) result.mode_samples[k].push_back(c[k]);
    }
  }
  result.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(options.steps);
  result.tuning_flag = result.acceptance_rate < 0.1 || result.acceptance_rate > 0.9;
  return result;
}

ConditionReport condition_check(const PotentialSpec& v, const Spectrum& spectrum, double epsilon, double p,
                                std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw InputError("condition_check: at least 1000 samples are required");
  if (!(epsilon > 0.0)) throw InputError("condition_check: epsilon must be positive");
  if (!(p > 1.0)) throw InputError("condition_check: p must exceed 1");
  const double q1 = spectrum.q(1);
  const double lambda = (1.0 + epsilon) / (2.0 * q1);
  const double s = v.sup_abs_derivative;
  const double vplus_max = std::max(v.sup, 0.0);
  const double vminus_max = std::max(-v.inf, 0.0);

  ConditionReport r;
  r.compactness_lambda = lambda;
  const double grad_exponent = lambda * s * s;
  const double level_exponent = vplus_max + epsilon * vminus_max;
  if (grad_exponent > 700.0 || level_exponent > 700.0) {
    r.certifiable = false;
    r.status = "not numerically certifiable";
    return r;
  }
  r.a_envelope = s * std::exp(vplus_max) + std::pow(s, p);
  r.c1_gradient_envelope = std::exp(grad_exponent);
  r.c1_envelope = r.c1_gradient_envelope + std::exp(level_exponent);

  std::vector<double> a(samples), grad(samples), c1(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double m = gq_coefficient(spectrum, seed, k, 1);
    const double val = v.v(m);
    const double d = std::abs(v.dv(m));
    const double vp = std::max(val, 0.0);
    const double vm = std::max(-val, 0.0);
    a[k] = d * std::exp(vp) + std::pow(d, p);
    grad[k] = std::exp(lambda * d * d);
    c1[k] = grad[k] + std::exp(vp + epsilon * vm);
  }
  r.a_integral = stats::mean_estimate(a);
  r.c1_gradient_term = stats::mean_estimate(grad);
  r.c1_integral = stats::mean_estimate(c1);
  r.compactness_integral = r.c1_gradient_term;
  r.status = "finite";
  return r;
}

}  // namespace wou
