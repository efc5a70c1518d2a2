#include "qtyp/fluctuations.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qtyp {

namespace {

void check_same_ladder(const Window& window,
                       const CollectiveObservable& observable,
                       const char* who) {
  if (observable.space().particles() != window.space().particles())
    throw std::invalid_argument(std::string(who) +
                                ": observable and window live on different "
                                "ladders");
}

// <x|y> with y = A x, plus the Hermiticity check on the imaginary part.
double real_inner(const RandomState& state,
                  const std::vector<std::complex<double>>& applied,
                  const CollectiveObservable& observable) {
  const auto& x = state.amplitudes();
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += std::conj(x[i]) * applied[i];
  const double tol = 1e-12 * std::max(1.0, observable.norm_bound());
  if (std::abs(acc.imag()) > tol)
    throw std::runtime_error(
        "expectation: imaginary part exceeds the Hermiticity tolerance; the "
        "observable is not Hermitian");
  return acc.real();
}

struct SampleStats {
  double expectation = 0.0;
  double quantum_var = 0.0;
};

SampleStats sample_stats(const RandomState& state,
                         const CollectiveObservable& observable) {
  const auto applied = observable.apply(state.amplitudes());
  SampleStats s;
  s.expectation = real_inner(state, applied, observable);
  double norm_sq = 0.0;
  for (const auto& v : applied) norm_sq += std::norm(v);
  s.quantum_var = norm_sq - s.expectation * s.expectation;
  return s;
}

// Jackknife standard error of a statistic given its leave-one-out values.
double jackknife_stderr(const std::vector<long double>& loo) {
  const std::size_t m = loo.size();
  long double mean = 0.0;
  for (long double v : loo) mean += v;
  mean /= static_cast<long double>(m);
  long double ss = 0.0;
  for (long double v : loo) ss += (v - mean) * (v - mean);
  const long double factor =
      static_cast<long double>(m - 1) / static_cast<long double>(m);
  return static_cast<double>(std::sqrt(factor * ss));
}

}  // namespace

double expectation(const RandomState& state,
                   const CollectiveObservable& observable) {
  const auto applied = observable.apply(state.amplitudes());
  return real_inner(state, applied, observable);
}

double quantum_variance(const RandomState& state,
                        const CollectiveObservable& observable) {
  return sample_stats(state, observable).quantum_var;
}

std::optional<double> ExactFluctuations::ratio() const {
  if (mean.is_zero()) return std::nullopt;
  return std::sqrt(delta_sq.to_double()) / mean.to_double();
}

Rational exact_statistical_variance(const Window& window,
                                    const CollectiveObservable& observable) {
  check_same_ladder(window, observable, "exact_statistical_variance");
  const long long n = window.dimension();
  Rational t;   // tr(P A P)
  Rational s;   // tr((P A P)^2)
  for (long long m = 0; m < n; ++m) {
    const long long idx = window.member_index(m);
    t += observable.diagonal(idx);
    s += observable.diagonal(idx) * observable.diagonal(idx);
  }
  for (long long m = 0; m + 1 < n; ++m) {
    // both ends of the coupling lie inside the window
    s += Rational(2) * observable.offdiagonal_squared(window.member_index(m));
  }
  const Rational nn(n);
  return (nn * s - t * t) / (nn * nn * Rational(n + 1));
}

ExactFluctuations exact_total_variance(const Window& window,
                                       const CollectiveObservable& observable) {
  check_same_ladder(window, observable, "exact_total_variance");
  const long long n = window.dimension();
  Rational trace_a;
  Rational trace_a_sq;
  for (long long m = 0; m < n; ++m) {
    const long long idx = window.member_index(m);
    trace_a += observable.diagonal(idx);
    trace_a_sq += observable.squared_diagonal(idx);
  }
  ExactFluctuations out;
  out.mean = trace_a / Rational(n);
  out.delta_sq = trace_a_sq / Rational(n) - out.mean * out.mean;
  out.delta_s_sq = exact_statistical_variance(window, observable);
  out.delta_q_sq = out.delta_sq - out.delta_s_sq;
  return out;
}

std::optional<double> typicality_ratio(const Window& window,
                                       const CollectiveObservable& observable) {
  return exact_total_variance(window, observable).ratio();
}

FluctuationReport to_report(const ExactFluctuations& exact) {
  FluctuationReport r;
  r.method = FluctuationReport::Method::exact;
  r.mean = exact.mean.to_double();
  r.delta_sq = exact.delta_sq.to_double();
  r.delta_s_sq = exact.delta_s_sq.to_double();
  r.delta_q_sq = exact.delta_q_sq.to_double();
  r.ratio = exact.ratio();
  return r;
}

FluctuationReport mc_decomposition(const Window& window,
                                   const CollectiveObservable& observable,
                                   const SamplerConfig& config,
                                   long long num_samples,
                                   unsigned num_workers) {
  check_same_ladder(window, observable, "mc_decomposition");
  if (num_samples < 100)
    throw std::invalid_argument("mc_decomposition: need at least 100 samples");
  if (num_workers == 0) num_workers = 1;

  const std::size_t m = static_cast<std::size_t>(num_samples);
  std::vector<double> expect(m);
  std::vector<double> qvar(m);

  const StateSampler sampler(config);
  auto run_block = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const RandomState state =
          sampler.sample_at(window, static_cast<std::uint64_t>(i));
      const SampleStats s = sample_stats(state, observable);
      expect[i] = s.expectation;
      qvar[i] = s.quantum_var;
    }
  };

  if (num_workers == 1) {
    run_block(0, m);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (m + num_workers - 1) / num_workers;
    for (unsigned w = 0; w < num_workers; ++w) {
      const std::size_t begin = std::min(m, static_cast<std::size_t>(w) * chunk);
      const std::size_t end = std::min(m, begin + chunk);
      if (begin < end) pool.emplace_back(run_block, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  // Sufficient statistics around the sample mean for numerical stability.
  long double sum_a = 0.0;
  long double sum_q = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sum_a += expect[i];
    sum_q += qvar[i];
  }
  const long double md = static_cast<long double>(m);
  const long double mean = sum_a / md;
  long double sum_c = 0.0;   // centered first moment (roundoff remainder)
  long double sum_c2 = 0.0;  // centered second moment
  for (std::size_t i = 0; i < m; ++i) {
    const long double c = static_cast<long double>(expect[i]) - mean;
    sum_c += c;
    sum_c2 += c * c;
  }

  const long double delta_s = sum_c2 / md - (sum_c / md) * (sum_c / md);
  const long double delta_q = sum_q / md;

  std::vector<long double> loo_mean(m), loo_s(m), loo_q(m), loo_sum(m);
  for (std::size_t i = 0; i < m; ++i) {
    const long double c = static_cast<long double>(expect[i]) - mean;
    const long double mean_i = (sum_c - c) / (md - 1);
    const long double var_i = (sum_c2 - c * c) / (md - 1) - mean_i * mean_i;
    const long double q_i = (sum_q - qvar[i]) / (md - 1);
    loo_mean[i] = mean + mean_i;
    loo_s[i] = var_i;
    loo_q[i] = q_i;
    loo_sum[i] = var_i + q_i;
  }

  FluctuationReport r;
  r.method = FluctuationReport::Method::monte_carlo;
  r.num_samples = num_samples;
  r.mean = static_cast<double>(mean);
  r.delta_s_sq = static_cast<double>(delta_s);
  r.delta_q_sq = static_cast<double>(delta_q);
  r.delta_sq = static_cast<double>(delta_s + delta_q);
  r.mean_stderr = jackknife_stderr(loo_mean);
  r.delta_s_stderr = jackknife_stderr(loo_s);
  r.delta_q_stderr = jackknife_stderr(loo_q);
  r.delta_stderr = jackknife_stderr(loo_sum);
  if (r.mean != 0.0)
    r.ratio = std::sqrt(std::max(0.0, r.delta_sq)) / r.mean;
  return r;
}

}  // namespace qtyp
