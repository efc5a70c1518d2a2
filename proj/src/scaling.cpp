#include "qtyp/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace qtyp {

namespace {

void check_even_particles(long long total_particles, const char* who) {
  if (total_particles < 0 || total_particles % 2 != 0)
    throw std::invalid_argument(std::string(who) +
                                ": particle number must be even and >= 0");
}

// Householder-QR least squares for a small dense column-major system.
// Columns are scaled to unit max before factorization. Throws on rank
// deficiency.
std::vector<double> least_squares(std::vector<std::vector<double>> cols,
                                  std::vector<double> rhs) {
  const std::size_t m = rhs.size();
  const std::size_t p = cols.size();
  std::vector<double> scale(p, 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    double mx = 0.0;
    for (double v : cols[j]) mx = std::max(mx, std::abs(v));
    if (mx > 0.0) {
      scale[j] = mx;
      for (double& v : cols[j]) v /= mx;
    }
  }

  for (std::size_t j = 0; j < p; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < m; ++i) norm += cols[j][i] * cols[j][i];
    norm = std::sqrt(norm);
    if (norm < 1e-12)
      throw std::invalid_argument(
          "fit_expansion: rank-deficient design matrix (degenerate grid)");
    double head = cols[j][j];
    const double alpha = head >= 0.0 ? -norm : norm;
    // Householder vector v, stored over column j below row j.
    cols[j][j] = head - alpha;
    double vv = 0.0;
    for (std::size_t i = j; i < m; ++i) vv += cols[j][i] * cols[j][i];
    if (vv > 0.0) {
      for (std::size_t jj = j + 1; jj < p; ++jj) {
        double dot = 0.0;
        for (std::size_t i = j; i < m; ++i) dot += cols[j][i] * cols[jj][i];
        const double coef = 2.0 * dot / vv;
        for (std::size_t i = j; i < m; ++i) cols[jj][i] -= coef * cols[j][i];
      }
      double dot = 0.0;
      for (std::size_t i = j; i < m; ++i) dot += cols[j][i] * rhs[i];
      const double coef = 2.0 * dot / vv;
      for (std::size_t i = j; i < m; ++i) rhs[i] -= coef * cols[j][i];
    }
    // R diagonal lands in alpha; zero out the reflector storage.
    for (std::size_t i = j; i < m; ++i) cols[j][i] = 0.0;
    cols[j][j] = alpha;
  }

  std::vector<double> beta(p, 0.0);
  for (std::size_t j = p; j-- > 0;) {
    double acc = rhs[j];
    for (std::size_t jj = j + 1; jj < p; ++jj) acc -= cols[jj][j] * beta[jj];
    if (std::abs(cols[j][j]) < 1e-12)
      throw std::invalid_argument(
          "fit_expansion: rank-deficient design matrix (degenerate grid)");
    beta[j] = acc / cols[j][j];
  }
  for (std::size_t j = 0; j < p; ++j) beta[j] /= scale[j];
  return beta;
}

}  // namespace

std::optional<double> CaseVariance::ratio() const {
  if (mean.is_zero()) return std::nullopt;
  return std::sqrt(delta_sq.to_double()) / mean.to_double();
}

ExpansionCoefficients analytic_coefficients(unsigned nu, unsigned power_limit) {
  if (nu < 1)
    throw std::invalid_argument("analytic_coefficients: nu must be >= 1");
  return analytic_coefficients_for_power(2 * nu, power_limit);
}

ExpansionCoefficients analytic_coefficients_for_power(unsigned power,
                                                      unsigned power_limit) {
  const MomentMatrix m = MomentMatrix::oscillator(power, power_limit);
  ExpansionCoefficients out;
  out.power = power;
  out.d20 = Rational(2) * m.m01.squared();
  const Rational diff = m.m11 - m.m00;
  out.d02 = diff * diff / Rational(12);
  return out;
}

CaseVariance exact_case_variance(unsigned nu, long long total_particles,
                                 long long half_width, unsigned power_limit) {
  if (nu < 1)
    throw std::invalid_argument("exact_case_variance: nu must be >= 1");
  return exact_case_variance_for_power(2 * nu, total_particles, half_width,
                                       power_limit);
}

CaseVariance exact_case_variance_for_power(unsigned power,
                                           long long total_particles,
                                           long long half_width,
                                           unsigned power_limit) {
  check_even_particles(total_particles, "exact_case_variance");
  if (half_width < 0 || half_width > total_particles / 2)
    throw std::invalid_argument(
        "exact_case_variance: window half width must lie in [0, N/2]");

  const MomentMatrix m = MomentMatrix::oscillator(power, power_limit);
  const Rational var_ell(half_width * (half_width + 1), 3);  // k(k+1)/3

  CaseVariance out;
  if (power % 2 == 0) {
    out.mean = Rational(total_particles, 2) * (m.m00 + m.m11);
    const Rational diff = m.m11 - m.m00;
    out.delta_sq = diff * diff * var_ell;
  } else {
    out.mean = Rational(0);
    // window average of (A^2)_{ell,ell} = |m01|^2 (N^2/2 + N - 2 ell^2)
    out.delta_sq =
        m.m01.squared() *
        (Rational(total_particles * total_particles, 2) +
         Rational(total_particles) - Rational(2) * var_ell);
  }
  return out;
}

std::vector<FitPoint> cross_grid(std::span<const long long> particle_list,
                                 std::span<const long long> half_width_list) {
  std::vector<FitPoint> grid;
  grid.reserve(particle_list.size() * half_width_list.size());
  for (long long n : particle_list)
    for (long long k : half_width_list) grid.push_back({n, k});
  return grid;
}

FitResult fit_expansion(unsigned power, std::span<const FitPoint> grid,
                        unsigned power_limit) {
  std::set<long long> distinct_particles;
  std::set<long long> distinct_widths;
  for (const FitPoint& point : grid) {
    distinct_particles.insert(point.total_particles);
    distinct_widths.insert(point.half_width);
  }
  if (distinct_particles.size() < 3 || distinct_widths.size() < 3)
    throw std::invalid_argument(
        "fit_expansion: grid must span at least 3 distinct N and 3 distinct "
        "n");

  const std::size_t rows = grid.size();
  std::vector<std::vector<double>> cols(4, std::vector<double>(rows));
  std::vector<double> rhs(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const double nd = static_cast<double>(grid[i].total_particles);
    const double wd = static_cast<double>(2 * grid[i].half_width + 1);
    cols[0][i] = nd * nd / 4.0;
    cols[1][i] = wd * wd;
    cols[2][i] = nd;
    cols[3][i] = 1.0;
    rhs[i] = exact_case_variance_for_power(power, grid[i].total_particles,
                                           grid[i].half_width, power_limit)
                 .delta_sq.to_double();
  }

  const std::vector<double> beta = least_squares(cols, rhs);

  FitResult out;
  out.d20 = beta[0];
  out.d02 = beta[1];
  out.linear_term = beta[2];
  out.constant_term = beta[3];
  for (std::size_t i = 0; i < rows; ++i) {
    const double nd = static_cast<double>(grid[i].total_particles);
    const double wd = static_cast<double>(2 * grid[i].half_width + 1);
    const double fitted = beta[0] * nd * nd / 4.0 + beta[1] * wd * wd +
                          beta[2] * nd + beta[3];
    out.max_residual = std::max(out.max_residual, std::abs(fitted - rhs[i]));
  }
  return out;
}

long long window_half_width_for(double alpha, double prefactor,
                                long long total_particles) {
  const double target =
      prefactor * std::pow(static_cast<double>(total_particles), alpha) / 2.0;
  long long k = static_cast<long long>(std::floor(target + 0.5));
  k = std::max<long long>(0, std::min(k, total_particles / 2));
  return k;
}

SweepResult scaling_sweep(unsigned nu, double alpha, double prefactor,
                          std::vector<long long> particle_list,
                          std::optional<McOptions> mc, unsigned power_limit) {
  if (nu < 1) throw std::invalid_argument("scaling_sweep: nu must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("scaling_sweep: alpha must lie in [0, 1]");
  if (!(prefactor >= 0.0) || !std::isfinite(prefactor))
    throw std::invalid_argument("scaling_sweep: prefactor must be >= 0");
  if (particle_list.empty())
    throw std::invalid_argument("scaling_sweep: particle list is empty");
  for (long long n : particle_list) check_even_particles(n, "scaling_sweep");
  if (mc && mc->num_samples < 100)
    throw std::invalid_argument("scaling_sweep: need at least 100 samples");

  std::sort(particle_list.begin(), particle_list.end());

  SweepResult result;
  result.nu = nu;
  result.alpha = alpha;
  result.prefactor = prefactor;
  result.mc = mc;

  for (std::size_t row_index = 0; row_index < particle_list.size();
       ++row_index) {
    const long long total = particle_list[row_index];
    const long long k = window_half_width_for(alpha, prefactor, total);

    SweepRow row;
    row.nu = nu;
    row.total_particles = total;
    row.half_width = k;
    row.window_dimension = 2 * k + 1;

    if (!mc) {
      const CaseVariance cv = exact_case_variance(nu, total, k, power_limit);
      row.mean = cv.mean.to_double();
      row.delta_sq = cv.delta_sq.to_double();
      row.ratio = cv.ratio();
      row.mean_exact = cv.mean;
      row.delta_sq_exact = cv.delta_sq;
    } else {
      const TwoModeSpace space(total);
      const CollectiveObservable observable(
          space, MomentMatrix::oscillator(2 * nu, power_limit));
      const Window window(space, k);
      SamplerConfig config = mc->config;
      config.stream_index = static_cast<std::uint64_t>(row_index);
      const FluctuationReport report = mc_decomposition(
          window, observable, config, mc->num_samples, mc->num_workers);
      row.monte_carlo = true;
      row.mean = report.mean;
      row.delta_sq = report.delta_sq;
      row.ratio = report.ratio;
      row.mean_stderr = report.mean_stderr;
      row.delta_sq_stderr = report.delta_stderr;
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

double fitted_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2)
    throw std::invalid_argument("fitted_slope: need at least two points");
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [x, y] : points) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= static_cast<double>(points.size());
  mean_y /= static_cast<double>(points.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("fitted_slope: abscissas are all equal");
  return sxy / sxx;
}

}  // namespace qtyp
