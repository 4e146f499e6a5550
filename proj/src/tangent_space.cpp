#include "wou/tangent_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wou/rng.hpp"
#include "wou/stats.hpp"

namespace wou {

TangentVector TangentVector::identity(std::size_t modes) { return affine(0.0, 1.0, modes); }

TangentVector TangentVector::constant(double value, std::size_t modes) { return affine(value, 0.0, modes); }

TangentVector TangentVector::affine(double offset, double slope, std::size_t modes) {
  if (modes == 0 || (slope != 0.0 && modes < 2)) throw InputError("TangentVector: too few modes for the map");
  TangentVector h(modes);
  h.c_[0] = offset;
  if (modes > 1) h.c_[1] = slope;
  return h;
}

double TangentVector::norm_squared() const {
  double s = 0.0;
  for (double c : c_) s += c * c;
  return s;
}

double TangentVector::operator()(double x) const { return evaluate(*this, x); }

TangentVector& TangentVector::operator+=(const TangentVector& other) {
  if (other.size() > c_.size()) c_.resize(other.size(), 0.0);
  for (std::size_t i = 0; i < other.size(); ++i) c_[i] += other.c_[i];
  return *this;
}

TangentVector& TangentVector::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

TangentVector operator-(TangentVector a, const TangentVector& b) { return a += (-1.0) * b; }

double evaluate(const TangentVector& h, double x) {
  const std::size_t n = h.size();
  if (n == 0) return 0.0;
  // Forward recurrence, accumulating as we go.
  double prev = 0.0;
  double cur = 1.0;
  double sum = h[0];
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double next = (x * cur - std::sqrt(kk - 1.0) * prev) / std::sqrt(kk);
    prev = cur;
    cur = next;
    sum += h[k] * cur;
  }
  return sum;
}

TangentVector project(const ScalarField& fn, std::size_t modes, const QuadratureRule& rule) {
  TangentVector out(modes);
  std::vector<double> basis(modes);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = fn(rule.nodes[i]);
    if (!std::isfinite(v)) throw InputError("project: non-finite value at quadrature node", i);
    hermite_eval_all(rule.nodes[i], basis);
    for (std::size_t n = 0; n < modes; ++n) out[n] += rule.weights[i] * v * basis[n];
  }
  return out;
}

EmpiricalMeasure::EmpiricalMeasure(std::size_t dim, std::vector<double> coords, std::vector<double> weights)
    : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)) {
  if (dim_ == 0) throw InputError("EmpiricalMeasure: dimension must be positive");
  if (weights_.empty()) throw InputError("EmpiricalMeasure: at least one atom is required");
  if (coords_.size() != weights_.size() * dim_) throw InputError("EmpiricalMeasure: coordinate count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw InputError("EmpiricalMeasure: negative or non-finite weight", i);
    }
    total += weights_[i];
  }
  // Summation error grows with the atom count.
  const double slack = 1e-12 + 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(weights_.size());
  if (std::abs(total - 1.0) > slack) throw InputError("EmpiricalMeasure: weights must sum to one");
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) throw InputError("EmpiricalMeasure: non-finite atom", i / dim_);
  }
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<double> points) { return uniform_nd(1, std::move(points)); }

EmpiricalMeasure EmpiricalMeasure::weighted(std::vector<double> points, std::vector<double> weights) {
  return weighted_nd(1, std::move(points), std::move(weights));
}

EmpiricalMeasure EmpiricalMeasure::uniform_nd(std::size_t dimension, std::vector<double> coordinates) {
  if (dimension == 0 || coordinates.empty() || coordinates.size() % dimension != 0) {
    throw InputError("EmpiricalMeasure: malformed coordinates");
  }
  const std::size_t n = coordinates.size() / dimension;
  return EmpiricalMeasure(dimension, std::move(coordinates), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

EmpiricalMeasure EmpiricalMeasure::weighted_nd(std::size_t dimension, std::vector<double> coordinates,
                                               std::vector<double> weights) {
  return EmpiricalMeasure(dimension, std::move(coordinates), std::move(weights));
}

double EmpiricalMeasure::integrate(const ScalarField& fn) const {
  if (dim_ != 1) throw InputError("EmpiricalMeasure::integrate: one-dimensional measures only");
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += weights_[i] * fn(coords_[i]);
  return s;
}

double EmpiricalMeasure::mean() const {
  return integrate([](double x) { return x; });
}

double EmpiricalMeasure::variance() const {
  const double m = mean();
  return integrate([m](double x) { return (x - m) * (x - m); });
}

std::vector<double> base_points(std::size_t particles, std::uint64_t seed) {
  std::vector<double> xs(particles);
  for (std::size_t i = 0; i < particles; ++i) {
    xs[i] = rng::normal(seed, {rng::Purpose::base_point, static_cast<std::uint32_t>(i)});
  }
  return xs;
}

EmpiricalMeasure pushforward(const TangentVector& h, std::size_t particles, std::uint64_t seed) {
  if (particles == 0) throw InputError("pushforward: particle count must be at least 1");
  std::vector<double> xs = base_points(particles, seed);
  for (double& x : xs) x = evaluate(h, x);
  return EmpiricalMeasure::uniform(std::move(xs));
}

EmpiricalMeasure pushforward_quadrature(const TangentVector& h, const QuadratureRule& rule) {
  std::vector<double> xs(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) xs[i] = evaluate(h, rule.nodes[i]);
  return EmpiricalMeasure::weighted(std::move(xs), rule.weights);
}

std::vector<double> quantile_nodes(std::size_t count) {
  if (count == 0) throw InputError("quantile_nodes: at least one node is required");
  std::vector<double> z(count);
  const auto k = static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) z[i] = stats::normal_quantile((static_cast<double>(i) + 0.5) / k);
  return z;
}

QuantileGrid quantile_pushforward(const TangentVector& h, std::size_t nodes) {
  QuantileGrid grid{quantile_nodes(nodes)};
  for (double& v : grid.values) v = evaluate(h, v);
  std::sort(grid.values.begin(), grid.values.end());
  return grid;
}

QuantileGrid quantile_grid(const std::function<double(double)>& quantile, std::size_t nodes) {
  if (nodes == 0) throw InputError("quantile_grid: at least one node is required");
  QuantileGrid grid;
  grid.values.resize(nodes);
  const auto k = static_cast<double>(nodes);
  for (std::size_t i = 0; i < nodes; ++i) grid.values[i] = quantile((static_cast<double>(i) + 0.5) / k);
  return grid;
}

bool is_nondecreasing(const TangentVector& h, std::size_t nodes) {
  const auto z = quantile_nodes(nodes);
  double prev = evaluate(h, z[0]);
  for (std::size_t i = 1; i < z.size(); ++i) {
    const double cur = evaluate(h, z[i]);
    if (cur < prev - 1e-12 * (1.0 + std::abs(prev))) return false;
    prev = cur;
  }
  return true;
}

double MongeMap::operator()(double x) const { return quantile_(stats::normal_cdf(x)); }

double MongeMap::distance_to_identity(std::size_t nodes) const {
  const auto z = quantile_nodes(nodes);
  const auto k = static_cast<double>(nodes);
  double s = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double d = z[i] - quantile_((static_cast<double>(i) + 0.5) / k);
    s += d * d;
  }
  return std::sqrt(s / k);
}

MongeMap monge_map(std::function<double(double)> target_quantile, std::size_t check_nodes) {
  if (check_nodes == 0) throw InputError("monge_map: at least one check node is required");
  const auto k = static_cast<double>(check_nodes);
  double prev = target_quantile(0.5 / k);
  for (std::size_t i = 1; i < check_nodes; ++i) {
    const double cur = target_quantile((static_cast<double>(i) + 0.5) / k);
    if (std::isnan(cur) || cur < prev) throw InputError("monge_map: target quantile is not nondecreasing", i);
    prev = cur;
  }
  return MongeMap(std::move(target_quantile));
}

EmpiricalMeasure displace(const EmpiricalMeasure& mu, const ScalarField& phi, double s) {
  if (mu.dimension() != 1) throw InputError("displace: one-dimensional measures only");
  std::vector<double> values(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) values[i] = phi(mu.point(i));
  return displace(mu, values, s);
}

EmpiricalMeasure displace(const EmpiricalMeasure& mu, std::span<const double> phi_at_atoms, double s) {
  if (mu.dimension() != 1) throw InputError("displace: one-dimensional measures only");
  if (phi_at_atoms.size() != mu.size()) throw InputError("displace: field size does not match atom count");
  std::vector<double> xs(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!std::isfinite(phi_at_atoms[i])) throw InputError("displace: non-finite field value at atom", i);
    xs[i] = mu.point(i) + s * phi_at_atoms[i];
  }
  return EmpiricalMeasure::weighted(std::move(xs), std::vector<double>(mu.weights().begin(), mu.weights().end()));
}

double inner_product_Tmu(const EmpiricalMeasure& mu, const ScalarField& phi, const ScalarField& psi) {
  if (mu.dimension() != 1) throw InputError("inner_product_Tmu: one-dimensional measures only");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double a = phi(mu.point(i));
    const double b = psi(mu.point(i));
    if (!std::isfinite(a) || !std::isfinite(b)) throw InputError("inner_product_Tmu: non-finite evaluation at atom", i);
    s += mu.weight(i) * a * b;
  }
  return s;
}

}  // namespace wou
