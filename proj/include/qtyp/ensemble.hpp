#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qtyp/fock.hpp"

namespace qtyp {

/// Default master seed for every sampler and CLI run. Fixed (never
/// time-based) so default runs are reproducible.
inline constexpr std::uint64_t kDefaultSeed = 123456789;

/// Microcanonical window: the symmetric set of imbalance values {-k, ..., +k}
/// on the ladder, dimension n = 2k+1 (always odd). The uniform density matrix
/// P_n / n on the window is represented implicitly as weight 1/n per member.
class Window {
 public:
  Window(TwoModeSpace space, long long half_width);

  const TwoModeSpace& space() const { return space_; }
  long long half_width() const { return half_width_; }
  long long dimension() const { return 2 * half_width_ + 1; }

  /// Ladder index of the first member (ell = -k).
  long long first_index() const { return space_.index_of(-half_width_); }
  /// Ladder index of member m, m in [0, dimension()).
  long long member_index(long long m) const { return first_index() + m; }

 private:
  TwoModeSpace space_;
  long long half_width_;
};

Window make_window(const TwoModeSpace& space, long long half_width);

struct SamplerConfig {
  std::uint64_t master_seed = kDefaultSeed;
  std::uint64_t stream_index = 0;
};

/// Haar-uniform random state on a window. Coefficients are stored embedded in
/// the full ladder so banded operators and their squares apply without
/// truncation.
class RandomState {
 public:
  RandomState(Window window, std::vector<std::complex<double>> amplitudes);

  const Window& window() const { return window_; }
  const std::vector<std::complex<double>>& amplitudes() const {
    return amplitudes_;
  }
  /// The window slice of the amplitude vector (the coefficients z_ell).
  std::span<const std::complex<double>> coefficients() const;

 private:
  Window window_;
  std::vector<std::complex<double>> amplitudes_;
};

/// Deterministic Haar sampler: complex standard Gaussians, normalized. Every
/// draw is generated by a fresh engine keyed on
/// (master_seed, stream_index, draw_index), so sequences reproduce exactly no
/// matter how draws are divided among workers.
class StateSampler {
 public:
  explicit StateSampler(SamplerConfig config) : config_(config) {}

  const SamplerConfig& config() const { return config_; }

  /// Next state in this sampler's sequence.
  RandomState sample(const Window& window);
  /// The draw_index-th state of the sequence, independent of sampler state.
  RandomState sample_at(const Window& window, std::uint64_t draw_index) const;

 private:
  SamplerConfig config_;
  std::uint64_t counter_ = 0;
};

RandomState sample_state(const Window& window, StateSampler& sampler);

struct CoefficientMomentReport {
  long long subspace_dimension = 0;
  long long num_samples = 0;
  /// max_ell | empirical mean of z_ell |
  double max_mean_abs = 0.0;
  /// max over pairs | empirical E[z_l1^* z_l2] - delta_{l1,l2}/n |
  double max_cov_deviation = 0.0;
  /// 1/sqrt(num_samples * n), the per-entry standard-error scale.
  double stderr_scale = 0.0;
};

/// Empirical check of the coefficient moments: mean 0 and covariance
/// delta_{l1,l2}/n. Requires num_samples >= 100.
CoefficientMomentReport coefficient_moment_check(const Window& window,
                                                 const SamplerConfig& config,
                                                 long long num_samples);

/// tr(rho_n A) = (1/n) sum over window members of the diagonal of A. Exact.
Rational micro_average(const Window& window,
                       const CollectiveObservable& observable);

}  // namespace qtyp
