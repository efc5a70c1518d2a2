#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qtyp/rational.hpp"

namespace qtyp {

/// Largest moment power evaluated exactly by default; beyond it the moment
/// routines raise capacity_error instead of falling back to floats.
inline constexpr unsigned kDefaultPowerLimit = 64;

/// N bosons distributed over two orthogonal modes. Number states are labelled
/// by the imbalance quantum number ell in [-N/2, N/2]; state ell has
/// occupations (N/2 + ell, N/2 - ell), so 2*ell is the particle imbalance.
/// N must be even so the occupations stay integral.
class TwoModeSpace {
 public:
  explicit TwoModeSpace(long long total_particles);

  long long particles() const { return particles_; }
  long long half() const { return particles_ / 2; }
  long long dimension() const { return particles_ + 1; }

  long long index_of(long long ell) const { return ell + half(); }
  long long ell_of(long long index) const { return index - half(); }

 private:
  long long particles_;
};

/// Exact value of a single-particle moment. Odd cross moments carry an
/// overall factor sqrt(2); it is tracked symbolically so that squared
/// magnitudes remain exact rationals.
struct Moment {
  Rational coeff;
  bool sqrt2 = false;

  bool is_zero() const { return coeff.is_zero(); }
  double value() const;
  /// coeff^2 * (sqrt2 ? 2 : 1), always an exact rational.
  Rational squared() const;
};

/// <phi_i | x^power | phi_j> for the harmonic oscillator ground (i=0) and
/// first excited (i=1) modes, in oscillator-length units. Evaluated in closed
/// form from the Gaussian integrals:
///   <phi_0|x^(2m)|phi_0> = (2m)! / (4^m m!)
///   <phi_1|x^(2m)|phi_1> = 2 <phi_0|x^(2m+2)|phi_0>
///   <phi_0|x^(2m+1)|phi_1> = sqrt(2) (2m+2)! / (4^(m+1) (m+1)!)
/// Parity-forbidden combinations are exactly zero.
Moment oscillator_moment(int i, int j, unsigned power,
                         unsigned power_limit = kDefaultPowerLimit);

/// 2x2 real symmetric matrix of single-particle moments. The off-diagonal
/// entry is stored once (m01 == m10).
struct MomentMatrix {
  unsigned power = 0;
  Rational m00;
  Rational m11;
  Moment m01;

  /// The physical matrix <phi_i|x^power|phi_j>; satisfies the parity sieve
  /// (even power -> m01 = 0, odd power -> m00 = m11 = 0).
  static MomentMatrix oscillator(unsigned power,
                                 unsigned power_limit = kDefaultPowerLimit);
};

/// Collective one-body observable sum_ij m_ij a_i^dag a_j on the N-particle
/// ladder: a real symmetric tridiagonal matrix.
///
///   diagonal(ell)           = m00 (N/2 + ell) + m11 (N/2 - ell)
///   offdiagonal(ell, ell+1) = m01 sqrt((N/2 + ell + 1)(N/2 - ell))
///
/// Diagonal entries and the exact squares of off-diagonal entries are kept as
/// rationals; traces of the operator and of its square over any window are
/// therefore exact. Numeric copies back the floating matrix-vector product.
class CollectiveObservable {
 public:
  CollectiveObservable(TwoModeSpace space, MomentMatrix moment);

  const TwoModeSpace& space() const { return space_; }
  const MomentMatrix& moment() const { return moment_; }
  long long dimension() const { return space_.dimension(); }

  const Rational& diagonal(long long index) const { return diag_[index]; }
  double diagonal_value(long long index) const { return diag_num_[index]; }
  /// Entry coupling ladder indices (index, index+1); index in [0, N).
  double offdiagonal_value(long long index) const { return offdiag_num_[index]; }
  const Rational& offdiagonal_squared(long long index) const {
    return offdiag_sq_[index];
  }

  /// Exact diagonal entry of A^2 at a ladder index.
  Rational squared_diagonal(long long index) const;

  /// Upper bound on the operator infinity-norm; used to scale roundoff
  /// tolerances on expectation values.
  double norm_bound() const { return norm_bound_; }

  /// Tridiagonal matrix-vector product. Vector length must equal dimension().
  void apply(std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out) const;
  std::vector<std::complex<double>> apply(
      const std::vector<std::complex<double>>& in) const;

 private:
  TwoModeSpace space_;
  MomentMatrix moment_;
  std::vector<Rational> diag_;
  std::vector<Rational> offdiag_sq_;
  std::vector<double> diag_num_;
  std::vector<double> offdiag_num_;
  double norm_bound_ = 0.0;
};

CollectiveObservable build_observable(const TwoModeSpace& space,
                                      const MomentMatrix& moment);

}  // namespace qtyp
