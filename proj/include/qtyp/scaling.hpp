#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qtyp/fluctuations.hpp"

namespace qtyp {

/// Coefficients of the window-variance expansion
///   delta^2 = d20 * N^2/4 + d02 * n^2 + O(N):
///   d20 = 2 |m01|^2,  d02 = (m11 - m00)^2 / 12.
/// For even powers d20 vanishes exactly (opposite mode parity).
struct ExpansionCoefficients {
  unsigned power = 0;
  Rational d20;
  Rational d02;
};

/// Coefficients for the physical observable of power 2*nu, nu >= 1.
ExpansionCoefficients analytic_coefficients(
    unsigned nu, unsigned power_limit = kDefaultPowerLimit);
/// Same, for an arbitrary power (odd powers exercise the d20 != 0 branch).
ExpansionCoefficients analytic_coefficients_for_power(
    unsigned power, unsigned power_limit = kDefaultPowerLimit);

/// Exact (mean, total variance) of the power-p collective observable on the
/// window (N, k), evaluated in closed form without building matrices:
///   even p: mean = (N/2)(m00 + m11),
///           delta^2 = (m11 - m00)^2 k(k+1)/3   [= (n^2-1)/12 scale]
///   odd p:  mean = 0,
///           delta^2 = |m01|^2 (N^2/2 + N - 2k(k+1)/3)
struct CaseVariance {
  Rational mean;
  Rational delta_sq;
  std::optional<double> ratio() const;
};

CaseVariance exact_case_variance(unsigned nu, long long total_particles,
                                 long long half_width,
                                 unsigned power_limit = kDefaultPowerLimit);
CaseVariance exact_case_variance_for_power(
    unsigned power, long long total_particles, long long half_width,
    unsigned power_limit = kDefaultPowerLimit);

struct FitPoint {
  long long total_particles;
  long long half_width;
};

/// Cross product of particle numbers and window half widths.
std::vector<FitPoint> cross_grid(std::span<const long long> particle_list,
                                 std::span<const long long> half_width_list);

/// Least-squares fit of exact variances against the basis
/// {N^2/4, n^2, N, 1}. The two nuisance terms keep the fit honest about the
/// O(N) remainder. Requires >= 3 distinct N and >= 3 distinct n; throws
/// std::invalid_argument on a rank-deficient grid.
struct FitResult {
  double d20 = 0.0;
  double d02 = 0.0;
  double linear_term = 0.0;
  double constant_term = 0.0;
  double max_residual = 0.0;
};

FitResult fit_expansion(unsigned power, std::span<const FitPoint> grid,
                        unsigned power_limit = kDefaultPowerLimit);

/// Window half width for the scaling rule n ~ c N^alpha:
/// k = round-half-up(c N^alpha / 2), clamped to [0, N/2].
long long window_half_width_for(double alpha, double prefactor,
                                long long total_particles);

struct SweepRow {
  unsigned nu = 0;
  long long total_particles = 0;
  long long half_width = 0;
  long long window_dimension = 0;
  double mean = 0.0;
  double delta_sq = 0.0;
  std::optional<double> ratio;
  Rational mean_exact;      // valid when !monte_carlo
  Rational delta_sq_exact;  // valid when !monte_carlo
  bool monte_carlo = false;
  double mean_stderr = 0.0;
  double delta_sq_stderr = 0.0;
};

struct McOptions {
  long long num_samples = 0;
  SamplerConfig config;
  unsigned num_workers = 1;
};

struct SweepResult {
  unsigned nu = 0;
  double alpha = 0.0;
  double prefactor = 0.0;
  std::optional<McOptions> mc;
  std::vector<SweepRow> rows;  // sorted by N
};

/// Evaluate (mean, delta^2, ratio) for the power-2nu observable across
/// N_list, with the window chosen by the scaling rule. Rows are exact closed
/// forms unless Monte Carlo options are supplied, in which case each row gets
/// its own sampler stream (stream_index = row position).
SweepResult scaling_sweep(unsigned nu, double alpha, double prefactor,
                          std::vector<long long> particle_list,
                          std::optional<McOptions> mc = std::nullopt,
                          unsigned power_limit = kDefaultPowerLimit);

/// Least-squares slope of y against x.
double fitted_slope(std::span<const std::pair<double, double>> points);

}  // namespace qtyp
