#include "wou/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace wou {

std::string TailRule::describe() const {
  if (kind == Kind::none) return "none";
  std::ostringstream os;
  os << "q_n = " << scale << " * n^" << exponent;
  return os.str();
}

namespace {

void check_eigenvalues(std::span<const double> q) {
  if (q.empty()) throw InputError("spectrum: at least one eigenvalue is required");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] > 0.0) || !std::isfinite(q[i])) {
      throw InputError("spectrum: eigenvalue " + std::to_string(i + 1) + " is not a positive finite number", i);
    }
    if (i > 0 && q[i] < q[i - 1]) {
      throw InputError("spectrum: eigenvalue " + std::to_string(i + 1) + " decreases", i);
    }
  }
}

}  // namespace

Spectrum Spectrum::from_values(std::vector<double> eigenvalues, TailRule tail) {
  check_eigenvalues(eigenvalues);
  return Spectrum(std::move(eigenvalues), tail);
}

Spectrum Spectrum::power_law(double scale, double exponent, std::size_t modes) {
  if (!(scale > 0.0)) throw InputError("spectrum: scale must be positive");
  if (exponent < 0.0) throw InputError("spectrum: exponent must be nonnegative");
  std::vector<double> q(modes);
  for (std::size_t n = 1; n <= modes; ++n) q[n - 1] = scale * std::pow(static_cast<double>(n), exponent);
  return from_values(std::move(q), TailRule::power(scale, exponent));
}

Spectrum Spectrum::truncated(std::size_t modes) const {
  if (modes == 0 || modes > q_.size()) throw InputError("spectrum: invalid truncation");
  return Spectrum(std::vector<double>(q_.begin(), q_.begin() + static_cast<std::ptrdiff_t>(modes)), tail_);
}

TraceReport validate_spectrum(std::span<const double> eigenvalues, const TailRule& tail) {
  check_eigenvalues(eigenvalues);
  // Smallest terms first, compensated.
  double sum = 0.0;
  double carry = 0.0;
  for (auto it = eigenvalues.rbegin(); it != eigenvalues.rend(); ++it) {
    const double y = 1.0 / *it - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  TraceReport report;
  report.partial_trace = sum;
  report.truncation = eigenvalues.size();
  report.finite = !tail.implies_divergence();
  if (tail.kind == TailRule::Kind::none) {
    report.tail_bound = std::numeric_limits<double>::quiet_NaN();
  } else if (!report.finite) {
    report.tail_bound = std::numeric_limits<double>::infinity();
  } else {
    const auto n = static_cast<double>(eigenvalues.size());
    report.tail_bound = std::pow(n, 1.0 - tail.exponent) / (tail.scale * (tail.exponent - 1.0));
  }
  return report;
}

TraceReport validate_spectrum(const Spectrum& spectrum) { return validate_spectrum(spectrum.eigenvalues(), spectrum.tail()); }

double hermite_eval(std::size_t n, double x) {
  if (n == 0) throw InputError("hermite_eval: basis index starts at 1");
  double prev = 0.0;
  double cur = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    // sqrt(k) h_{k+1} = x h_k - sqrt(k-1) h_{k-1}
    const double kk = static_cast<double>(k);
    const double next = (x * cur - std::sqrt(kk - 1.0) * prev) / std::sqrt(kk);
    prev = cur;
    cur = next;
  }
  return cur;
}

void hermite_eval_all(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() > 1) out[1] = x;
  for (std::size_t k = 2; k < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k] = (x * out[k - 1] - std::sqrt(kk - 1.0) * out[k - 2]) / std::sqrt(kk);
  }
}

QuadratureRule gauss_hermite_nodes(std::size_t order) {
  if (order == 0) throw InputError("gauss_hermite_nodes: order must be at least 1");
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  if (order == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 1.0;
    return rule;
  }

  // Golub-Welsch: the Jacobi matrix of the monic recurrence He_{k+1} = x He_k - k He_{k-1}.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(order));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(order - 1));
  for (std::size_t k = 1; k < order; ++k) sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  std::vector<double> h(order + 1);
  for (std::size_t i = 0; i < order; ++i) {
    double x = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    // Newton polish on h_{order+1} = He_order / sqrt(order!); h'_{k+1} = sqrt(k) h_k.
    for (int iter = 0; iter < 3; ++iter) {
      hermite_eval_all(x, h);
      const double dp = std::sqrt(static_cast<double>(order)) * h[order - 1];
      if (dp == 0.0) break;
      x -= h[order] / dp;
    }
    hermite_eval_all(x, std::span<double>(h.data(), order));
    // Christoffel weight 1 / sum_k h_k(x)^2.
    double s = 0.0;
    for (std::size_t k = 0; k < order; ++k) s += h[k] * h[k];
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / s;
  }

  // Exact symmetry about 0.
  for (std::size_t i = 0; i < order / 2; ++i) {
    const std::size_t j = order - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;

  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

const QuadratureRule& gauss_hermite_rule(std::size_t order) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<QuadratureRule>(gauss_hermite_nodes(order));
  return *slot;
}

double ReferenceMeasure::density(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double integrate_mu0(const std::function<double(double)>& fn, const QuadratureRule& rule) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = fn(rule.nodes[i]);
    if (!std::isfinite(v)) throw InputError("integrate_mu0: non-finite value at quadrature node", i);
    s += rule.weights[i] * v;
  }
  return s;
}

double inner_product_mu0(const std::function<double(double)>& phi, const std::function<double(double)>& psi,
                         const QuadratureRule& rule) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double a = phi(rule.nodes[i]);
    const double b = psi(rule.nodes[i]);
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw InputError("inner_product_mu0: non-finite evaluation at quadrature node", i);
    }
    s += rule.weights[i] * a * b;
  }
  return s;
}

}  // namespace wou
