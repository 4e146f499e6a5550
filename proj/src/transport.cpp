#include "wou/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wou {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> squared_distances(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dimension() != nu.dimension()) throw InputError("transport: measures live in different dimensions");
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  std::vector<double> c(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = mu.atom(i);
    for (std::size_t j = 0; j < m; ++j) {
      const auto y = nu.atom(j);
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
      c[i * m + j] = s;
    }
  }
  return c;
}

double entropy(std::span<const double> w) {
  double h = 0.0;
  for (double x : w) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

double log_sum_exp(const std::vector<double>& v) {
  double mx = -kInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == -kInf) return -kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

bool uniform_square(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  const double w = 1.0 / static_cast<double>(a.size());
  const auto near = [w](double x) { return std::abs(x - w) <= 1e-15; };
  return std::all_of(a.begin(), a.end(), near) && std::all_of(b.begin(), b.end(), near);
}

// Hungarian algorithm with row/column potentials (O(n^3)); returns the column
// assigned to each row.
std::vector<std::size_t> hungarian(std::size_t n, std::span<const double> cost) {
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

// Successive shortest paths on the complete bipartite network: rows are
// sources, columns sinks, forward arcs uncapacitated, reverse arcs carry the
// current flow. Dense Dijkstra with potentials keeps reduced costs >= 0.
std::vector<double> min_cost_flow(std::span<const double> a, std::span<const double> b, std::span<const double> cost) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  constexpr double tol = 1e-14;
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<double> flow(n * m, 0.0);
  std::vector<double> supply(a.begin(), a.end());
  std::vector<double> demand(b.begin(), b.end());
  std::vector<double> pot_row(n, 0.0), pot_col(m, 0.0);
  std::vector<double> dist_row(n), dist_col(m);
  std::vector<std::size_t> prev_row(n), prev_col(m);
  std::vector<char> done_row(n), done_col(m);

  for (;;) {
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const bool active = supply[i] > tol;
      dist_row[i] = active ? 0.0 : kInf;
      any = any || active;
    }
    if (!any) break;
    std::fill(dist_col.begin(), dist_col.end(), kInf);
    std::fill(prev_row.begin(), prev_row.end(), none);
    std::fill(prev_col.begin(), prev_col.end(), none);
    std::fill(done_row.begin(), done_row.end(), 0);
    std::fill(done_col.begin(), done_col.end(), 0);

    std::size_t target = none;
    double reach = kInf;
    for (;;) {
      double best = kInf;
      std::size_t node = none;
      bool is_row = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (!done_row[i] && dist_row[i] < best) best = dist_row[i], node = i, is_row = true;
      }
      for (std::size_t j = 0; j < m; ++j) {
        if (!done_col[j] && dist_col[j] < best) best = dist_col[j], node = j, is_row = false;
      }
      if (node == none) break;
      if (is_row) {
        done_row[node] = 1;
        for (std::size_t j = 0; j < m; ++j) {
          if (done_col[j]) continue;
          const double nd = best + std::max(0.0, cost[node * m + j] + pot_row[node] - pot_col[j]);
          if (nd < dist_col[j]) dist_col[j] = nd, prev_col[j] = node;
        }
      } else {
        done_col[node] = 1;
        if (demand[node] > tol) {
          target = node;
          reach = best;
          break;
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (done_row[i] || flow[i * m + node] <= 0.0) continue;
          const double nd = best + std::max(0.0, -cost[i * m + node] + pot_col[node] - pot_row[i]);
          if (nd < dist_row[i]) dist_row[i] = nd, prev_row[i] = node;
        }
      }
    }
    if (target == none) break;  // remaining supply has no demand left to meet

    for (std::size_t i = 0; i < n; ++i) pot_row[i] += std::min(dist_row[i], reach);
    for (std::size_t j = 0; j < m; ++j) pot_col[j] += std::min(dist_col[j], reach);

    // Bottleneck along the path.
    double theta = demand[target];
    std::size_t j = target;
    std::size_t start = none;
    for (;;) {
      const std::size_t i = prev_col[j];
      if (prev_row[i] == none) {
        start = i;
        break;
      }
      j = prev_row[i];
      theta = std::min(theta, flow[i * m + j]);
    }
    theta = std::min(theta, supply[start]);

    j = target;
    for (;;) {
      const std::size_t i = prev_col[j];
      flow[i * m + j] += theta;
      if (prev_row[i] == none) break;
      j = prev_row[i];
      double& back = flow[i * m + j];
      back -= theta;
      if (back <= tol) back = 0.0;
    }
    supply[start] -= theta;
    if (supply[start] <= tol) supply[start] = 0.0;
    demand[target] -= theta;
    if (demand[target] <= tol) demand[target] = 0.0;
  }
  return flow;
}

TransportPlan make_plan(std::span<const double> a, std::span<const double> b, std::vector<double> coupling,
                        std::span<const double> cost) {
  TransportPlan plan{{a.begin(), a.end()}, {b.begin(), b.end()}, std::move(coupling), 0.0};
  for (std::size_t k = 0; k < plan.coupling.size(); ++k) plan.cost += plan.coupling[k] * cost[k];
  return plan;
}

}  // namespace

double TransportPlan::marginal_violation() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols(); ++j) s += at(i, j);
    worst = std::max(worst, std::abs(s - row_marginal[i]));
  }
  for (std::size_t j = 0; j < cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) s += at(i, j);
    worst = std::max(worst, std::abs(s - col_marginal[j]));
  }
  return worst;
}

double w2_quantile_1d(const QuantileGrid& mu, const QuantileGrid& nu) {
  if (mu.size() == 0 || nu.size() == 0) throw InputError("w2_quantile_1d: empty quantile grid");
  if (mu.size() != nu.size()) throw InputError("w2_quantile_1d: quantile grids must share the node count");
  double s = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double d = mu.values[k] - nu.values[k];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(mu.size()));
}

double w2_quantile_1d(const std::function<double(double)>& mu_quantile,
                      const std::function<double(double)>& nu_quantile, std::size_t nodes) {
  return w2_quantile_1d(quantile_grid(mu_quantile, nodes), quantile_grid(nu_quantile, nodes));
}

double w2_quantile_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.size() == 0 || nu.size() == 0) throw InputError("w2_quantile_1d: empty cloud");
  if (mu.dimension() != 1 || nu.dimension() != 1) throw InputError("w2_quantile_1d: one-dimensional clouds only");
  const auto order = [](const EmpiricalMeasure& m) {
    std::vector<std::size_t> idx(m.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return m.point(x) < m.point(y); });
    return idx;
  };
  const auto ia = order(mu);
  const auto ib = order(nu);
  std::size_t i = 0, j = 0;
  double wa = mu.weight(ia[0]);
  double wb = nu.weight(ib[0]);
  double s = 0.0;
  while (i < ia.size() && j < ib.size()) {
    const double step = std::min(wa, wb);
    const double d = mu.point(ia[i]) - nu.point(ib[j]);
    s += step * d * d;
    wa -= step;
    wb -= step;
    if (wa <= 0.0 && ++i < ia.size()) wa = mu.weight(ia[i]);
    if (wb <= 0.0 && ++j < ib.size()) wb = nu.weight(ib[j]);
  }
  return std::sqrt(s);
}

TransportPlan solve_transport(std::span<const double> a, std::span<const double> b, std::span<const double> cost) {
  if (a.empty() || b.empty()) throw InputError("solve_transport: empty marginal");
  if (cost.size() != a.size() * b.size()) throw InputError("solve_transport: cost matrix has the wrong size");
  const double ta = std::accumulate(a.begin(), a.end(), 0.0);
  const double tb = std::accumulate(b.begin(), b.end(), 0.0);
  if (std::abs(ta - tb) > 1e-9) throw InputError("solve_transport: marginal totals differ by more than 1e-9");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] >= 0.0)) throw InputError("solve_transport: negative row weight", i);
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!(b[j] >= 0.0)) throw InputError("solve_transport: negative column weight", j);
  }

  if (uniform_square(a, b)) {
    const std::size_t n = a.size();
    const auto assignment = hungarian(n, cost);
    std::vector<double> coupling(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) coupling[i * n + assignment[i]] = a[i];
    return make_plan(a, b, std::move(coupling), cost);
  }
  return make_plan(a, b, min_cost_flow(a, b, cost), cost);
}

DiscreteTransport w2_lp_discrete(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.size() > kMaxLpAtoms || nu.size() > kMaxLpAtoms) {
    throw InputError("w2_lp_discrete: at most 256 atoms per cloud");
  }
  const auto cost = squared_distances(mu, nu);
  TransportPlan plan = solve_transport(mu.weights(), nu.weights(), cost);
  const double d = std::sqrt(std::max(0.0, plan.cost));
  return {d, std::move(plan)};
}

SinkhornResult w2_sinkhorn(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double epsilon,
                           std::size_t max_iters, double tolerance) {
  if (!(epsilon > 0.0)) throw InputError("w2_sinkhorn: epsilon must be positive");
  const auto cost = squared_distances(mu, nu);
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  std::vector<double> loga(n), logb(m);
  for (std::size_t i = 0; i < n; ++i) loga[i] = std::log(mu.weight(i));
  for (std::size_t j = 0; j < m; ++j) logb[j] = std::log(nu.weight(j));

  std::vector<double> f(n, 0.0), g(m, 0.0);
  std::vector<double> row_terms(m), col_terms(n);
  const auto plan_entry = [&](std::size_t i, std::size_t j) {
    return std::exp((f[i] + g[j] - cost[i * m + j]) / epsilon + loga[i] + logb[j]);
  };

  SinkhornResult result;
  auto& diag = result.diagnostics;
  for (diag.iterations = 0; diag.iterations < max_iters; ++diag.iterations) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) row_terms[j] = (g[j] - cost[i * m + j]) / epsilon + logb[j];
      f[i] = -epsilon * log_sum_exp(row_terms);
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) col_terms[i] = (f[i] - cost[i * m + j]) / epsilon + loga[i];
      g[j] = -epsilon * log_sum_exp(col_terms);
    }
    // Columns are exact after the g update; rows carry the residual.
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += plan_entry(i, j);
      worst = std::max(worst, std::abs(s - mu.weight(i)));
    }
    if (worst < tolerance) {
      diag.converged = true;
      ++diag.iterations;
      break;
    }
  }

  std::vector<double> coupling(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) coupling[i * m + j] = plan_entry(i, j);
  }
  result.plan = make_plan(mu.weights(), nu.weights(), std::move(coupling), cost);
  result.distance = std::sqrt(std::max(0.0, result.plan.cost));
  diag.marginal_violation = result.plan.marginal_violation();
  diag.cost_bias_bound = epsilon * std::min(entropy(mu.weights()), entropy(nu.weights()));
  diag.distance_bias_bound = std::sqrt(diag.cost_bias_bound);
  return result;
}

EmpiricalMeasure geodesic_measure(const TangentVector& h1, const TangentVector& h2, double t, std::size_t particles,
                                  std::uint64_t seed) {
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("geodesic_measure: t must lie in [0, 1]");
  return pushforward(t * h1 + (1.0 - t) * h2, particles, seed);
}

GeodesicResidual geodesic_check(const TangentVector& h1, const TangentVector& h2, double s, double t,
                                std::size_t nodes) {
  if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)) throw InputError("geodesic_check: s and t must lie in [0, 1]");
  if (!is_nondecreasing(h1, nodes) || !is_nondecreasing(h2, nodes)) {
    throw InputError("geodesic_check: both maps must be nondecreasing so the shared coupling is optimal");
  }
  GeodesicResidual r;
  r.w2_st = w2_quantile_1d(quantile_pushforward(s * h1 + (1.0 - s) * h2, nodes),
                           quantile_pushforward(t * h1 + (1.0 - t) * h2, nodes));
  r.w2_endpoints = w2_quantile_1d(quantile_pushforward(h1, nodes), quantile_pushforward(h2, nodes));
  r.residual = std::abs(r.w2_st - std::abs(t - s) * r.w2_endpoints);
  return r;
}

}  // namespace wou
