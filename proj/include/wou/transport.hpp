#pragma once

// Quadratic Wasserstein distances: exact 1D via quantile functions, exact
// discrete via assignment / min-cost flow, entropic via Sinkhorn; plus the
// constant-speed geodesics t h1 + (1 - t) h2 pushed forward from mu0.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wou/tangent_space.hpp"

namespace wou {

struct TransportPlan {
  std::vector<double> row_marginal;
  std::vector<double> col_marginal;
  std::vector<double> coupling;  // row-major, rows x cols
  double cost = 0.0;             // sum pi_ij |x_i - y_j|^2

  std::size_t rows() const { return row_marginal.size(); }
  std::size_t cols() const { return col_marginal.size(); }
  double at(std::size_t i, std::size_t j) const { return coupling[i * cols() + j]; }

  /// Largest absolute deviation of a row or column sum from its marginal.
  double marginal_violation() const;
};

/// Midpoint-rule W2 between two quantile grids of equal size.
double w2_quantile_1d(const QuantileGrid& mu, const QuantileGrid& nu);

/// W2 between quantile functions on (0, 1) with a K-node midpoint rule.
double w2_quantile_1d(const std::function<double(double)>& mu_quantile,
                      const std::function<double(double)>& nu_quantile, std::size_t nodes);

/// Exact W2 between weighted 1D clouds: integrates |F^{-1} - G^{-1}|^2 over the
/// merged breakpoints of both CDFs.
double w2_quantile_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

struct DiscreteTransport {
  double distance = 0.0;
  TransportPlan plan;
};

constexpr std::size_t kMaxLpAtoms = 256;

/// Exact optimal transport between clouds in R^d with at most 256 atoms each.
/// Equal-size uniform clouds go through the Hungarian algorithm, everything
/// else through successive shortest paths on the transportation network.
DiscreteTransport w2_lp_discrete(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// Same solver on raw marginals and a rows x cols cost matrix. Rejects
/// marginals whose totals differ by more than 1e-9.
TransportPlan solve_transport(std::span<const double> a, std::span<const double> b, std::span<const double> cost);

struct SinkhornDiagnostics {
  std::size_t iterations = 0;
  bool converged = false;
  double marginal_violation = 0.0;
  /// The entropic plan's cost exceeds the optimum by at most epsilon * min(H(a), H(b)).
  double cost_bias_bound = 0.0;
  /// Matching bound on the distance, sqrt(cost_bias_bound).
  double distance_bias_bound = 0.0;
};

struct SinkhornResult {
  double distance = 0.0;
  TransportPlan plan;
  SinkhornDiagnostics diagnostics;
};

/// Log-domain Sinkhorn iterations. A run that hits max_iters is flagged, not thrown.
SinkhornResult w2_sinkhorn(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double epsilon,
                           std::size_t max_iters = 10000, double tolerance = 1e-10);

/// Psi(t h1 + (1 - t) h2) on the base points of `seed`: nu_0 = Psi(h2), nu_1 = Psi(h1).
EmpiricalMeasure geodesic_measure(const TangentVector& h1, const TangentVector& h2, double t, std::size_t particles,
                                  std::uint64_t seed);

struct GeodesicResidual {
  double w2_st = 0.0;        // W2(nu_s, nu_t)
  double w2_endpoints = 0.0; // W2(Psi(h1), Psi(h2))
  double residual = 0.0;     // |w2_st - |t - s| w2_endpoints|
};

/// Checks constant speed along the geodesic with quantile-grid distances.
/// Both maps must be nondecreasing on the grid.
GeodesicResidual geodesic_check(const TangentVector& h1, const TangentVector& h2, double s, double t,
                                std::size_t nodes);

}  // namespace wou
