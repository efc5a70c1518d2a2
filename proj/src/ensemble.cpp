#include "qtyp/ensemble.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace qtyp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t draw_seed(const SamplerConfig& cfg, std::uint64_t draw_index) {
  std::uint64_t h = splitmix64(cfg.master_seed);
  h = splitmix64(h ^ cfg.stream_index);
  return splitmix64(h ^ draw_index);
}

// Standard normal pairs via Box-Muller on explicit 53-bit uniforms, so the
// stream depends only on the engine output, not on library internals.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double v = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * M_PI * v;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

Window::Window(TwoModeSpace space, long long half_width) : space_(space) {
  if (half_width < 0)
    throw std::invalid_argument("Window: half width must be >= 0");
  if (half_width > space.half())
    throw std::invalid_argument(
        "Window: half width " + std::to_string(half_width) +
        " exceeds the ladder bound N/2 = " + std::to_string(space.half()));
  half_width_ = half_width;
}

Window make_window(const TwoModeSpace& space, long long half_width) {
  return Window(space, half_width);
}

RandomState::RandomState(Window window,
                         std::vector<std::complex<double>> amplitudes)
    : window_(window), amplitudes_(std::move(amplitudes)) {
  if (static_cast<long long>(amplitudes_.size()) !=
      window_.space().dimension())
    throw std::invalid_argument(
        "RandomState: amplitude vector length does not match the ladder "
        "dimension");
}

std::span<const std::complex<double>> RandomState::coefficients() const {
  return std::span<const std::complex<double>>(amplitudes_)
      .subspan(static_cast<std::size_t>(window_.first_index()),
               static_cast<std::size_t>(window_.dimension()));
}

RandomState StateSampler::sample(const Window& window) {
  return sample_at(window, counter_++);
}

RandomState StateSampler::sample_at(const Window& window,
                                    std::uint64_t draw_index) const {
  GaussianStream gauss(draw_seed(config_, draw_index));
  const long long n = window.dimension();
  std::vector<std::complex<double>> amp(
      static_cast<std::size_t>(window.space().dimension()));
  double norm_sq = 0.0;
  const long long first = window.first_index();
  for (long long m = 0; m < n; ++m) {
    const double re = gauss.next();
    const double im = gauss.next();
    amp[static_cast<std::size_t>(first + m)] = {re, im};
    norm_sq += re * re + im * im;
  }
  const double inv_norm = 1.0 / std::sqrt(norm_sq);
  for (long long m = 0; m < n; ++m)
    amp[static_cast<std::size_t>(first + m)] *= inv_norm;
  return RandomState(window, std::move(amp));
}

RandomState sample_state(const Window& window, StateSampler& sampler) {
  return sampler.sample(window);
}

CoefficientMomentReport coefficient_moment_check(const Window& window,
                                                 const SamplerConfig& config,
                                                 long long num_samples) {
  if (num_samples < 100)
    throw std::invalid_argument(
        "coefficient_moment_check: need at least 100 samples");

  const std::size_t n = static_cast<std::size_t>(window.dimension());
  std::vector<std::complex<double>> mean_acc(n, 0.0);
  std::vector<std::complex<double>> cov_acc(n * n, 0.0);

  StateSampler sampler(config);
  for (long long s = 0; s < num_samples; ++s) {
    const RandomState state = sampler.sample_at(window, static_cast<std::uint64_t>(s));
    const auto z = state.coefficients();
    for (std::size_t a = 0; a < n; ++a) {
      mean_acc[a] += z[a];
      for (std::size_t b = 0; b < n; ++b)
        cov_acc[a * n + b] += std::conj(z[a]) * z[b];
    }
  }

  CoefficientMomentReport report;
  report.subspace_dimension = static_cast<long long>(n);
  report.num_samples = num_samples;
  report.stderr_scale =
      1.0 / std::sqrt(static_cast<double>(num_samples) * static_cast<double>(n));
  const double inv_m = 1.0 / static_cast<double>(num_samples);
  for (std::size_t a = 0; a < n; ++a)
    report.max_mean_abs =
        std::max(report.max_mean_abs, std::abs(mean_acc[a] * inv_m));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      std::complex<double> expected = (a == b) ? inv_n : 0.0;
      report.max_cov_deviation = std::max(
          report.max_cov_deviation, std::abs(cov_acc[a * n + b] * inv_m - expected));
    }
  }
  return report;
}

Rational micro_average(const Window& window,
                       const CollectiveObservable& observable) {
  if (observable.space().particles() != window.space().particles())
    throw std::invalid_argument(
        "micro_average: observable and window live on different ladders");
  Rational sum;
  for (long long m = 0; m < window.dimension(); ++m)
    sum += observable.diagonal(window.member_index(m));
  return sum / Rational(window.dimension());
}

}  // namespace qtyp
