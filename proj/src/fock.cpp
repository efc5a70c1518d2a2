#include "qtyp/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qtyp {

namespace {

// (2m)! / (4^m m!) -- the 2m-th moment of |phi_0|^2.
Rational gaussian_even_moment(unsigned m) {
  Rational four_pow_m(1);
  for (unsigned t = 0; t < m; ++t) four_pow_m *= Rational(4);
  return Rational::factorial(2 * m) / (four_pow_m * Rational::factorial(m));
}

}  // namespace

TwoModeSpace::TwoModeSpace(long long total_particles)
    : particles_(total_particles) {
  if (total_particles < 0)
    throw std::invalid_argument("TwoModeSpace: particle number must be >= 0");
  if (total_particles % 2 != 0)
    throw std::invalid_argument(
        "TwoModeSpace: particle number must be even (occupations N/2 +- ell "
        "must be integers)");
}

double Moment::value() const {
  double v = coeff.to_double();
  return sqrt2 ? v * std::sqrt(2.0) : v;
}

Rational Moment::squared() const {
  Rational s = coeff * coeff;
  return sqrt2 ? s * Rational(2) : s;
}

Moment oscillator_moment(int i, int j, unsigned power, unsigned power_limit) {
  if ((i != 0 && i != 1) || (j != 0 && j != 1))
    throw std::invalid_argument("oscillator_moment: mode index must be 0 or 1");
  if (power > power_limit)
    throw capacity_error("oscillator_moment: power " + std::to_string(power) +
                         " exceeds the exact-arithmetic limit " +
                         std::to_string(power_limit));

  const bool odd = (power % 2 != 0);
  if (i == j) {
    if (odd) return {};  // odd integrand
    const unsigned m = power / 2;
    if (i == 0) return {gaussian_even_moment(m), false};
    return {Rational(2) * gaussian_even_moment(m + 1), false};
  }
  if (!odd) return {};  // opposite mode parity
  return {gaussian_even_moment((power + 1) / 2), true};
}

MomentMatrix MomentMatrix::oscillator(unsigned power, unsigned power_limit) {
  MomentMatrix m;
  m.power = power;
  m.m00 = oscillator_moment(0, 0, power, power_limit).coeff;
  m.m11 = oscillator_moment(1, 1, power, power_limit).coeff;
  m.m01 = oscillator_moment(0, 1, power, power_limit);
  return m;
}

CollectiveObservable::CollectiveObservable(TwoModeSpace space,
                                           MomentMatrix moment)
    : space_(space), moment_(std::move(moment)) {
  const long long dim = space_.dimension();
  const long long half = space_.half();
  diag_.reserve(dim);
  diag_num_.reserve(dim);
  for (long long idx = 0; idx < dim; ++idx) {
    const long long ell = space_.ell_of(idx);
    Rational d = moment_.m00 * Rational(half + ell) +
                 moment_.m11 * Rational(half - ell);
    diag_num_.push_back(d.to_double());
    diag_.push_back(std::move(d));
  }
  const Rational m01_sq = moment_.m01.squared();
  const double m01_val = moment_.m01.value();
  offdiag_sq_.reserve(dim > 0 ? dim - 1 : 0);
  offdiag_num_.reserve(dim > 0 ? dim - 1 : 0);
  for (long long idx = 0; idx + 1 < dim; ++idx) {
    const long long ell = space_.ell_of(idx);
    const long long boson_factor = (half + ell + 1) * (half - ell);
    offdiag_sq_.push_back(m01_sq * Rational(boson_factor));
    offdiag_num_.push_back(
        m01_val * std::sqrt(static_cast<double>(boson_factor)));
  }
  for (long long idx = 0; idx < dim; ++idx) {
    double row = std::abs(diag_num_[idx]);
    if (idx > 0) row += std::abs(offdiag_num_[idx - 1]);
    if (idx + 1 < dim) row += std::abs(offdiag_num_[idx]);
    norm_bound_ = std::max(norm_bound_, row);
  }
}

Rational CollectiveObservable::squared_diagonal(long long index) const {
  Rational s = diag_[index] * diag_[index];
  if (index > 0) s += offdiag_sq_[index - 1];
  if (index + 1 < dimension()) s += offdiag_sq_[index];
  return s;
}

void CollectiveObservable::apply(std::span<const std::complex<double>> in,
                                 std::span<std::complex<double>> out) const {
  const std::size_t dim = static_cast<std::size_t>(dimension());
  if (in.size() != dim || out.size() != dim)
    throw std::invalid_argument(
        "CollectiveObservable::apply: vector length does not match the ladder "
        "dimension");
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::complex<double> acc = diag_num_[idx] * in[idx];
    if (idx > 0) acc += offdiag_num_[idx - 1] * in[idx - 1];
    if (idx + 1 < dim) acc += offdiag_num_[idx] * in[idx + 1];
    out[idx] = acc;
  }
}

std::vector<std::complex<double>> CollectiveObservable::apply(
    const std::vector<std::complex<double>>& in) const {
  std::vector<std::complex<double>> out(in.size());
  apply(in, out);
  return out;
}

CollectiveObservable build_observable(const TwoModeSpace& space,
                                      const MomentMatrix& moment) {
  return CollectiveObservable(space, moment);
}

}  // namespace qtyp
