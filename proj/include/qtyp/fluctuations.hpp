#pragma once

#include <optional>

#include "qtyp/ensemble.hpp"

namespace qtyp {

/// <Phi|A|Phi> for a Hermitian observable. The imaginary part is checked
/// against a roundoff tolerance scaled by the operator norm; anything larger
/// signals a construction bug and raises std::runtime_error instead of being
/// silently dropped.
double expectation(const RandomState& state,
                   const CollectiveObservable& observable);

/// <Phi|A^2|Phi> - <Phi|A|Phi>^2, the quantum fluctuation of A on one state.
/// Evaluated as |A Phi|^2 - <A>^2; roundoff can leave values a tiny amount
/// below zero near eigenstates, which is reported as computed.
double quantum_variance(const RandomState& state,
                        const CollectiveObservable& observable);

/// Exact trace-based fluctuation quantities of an observable on a window:
///   mean       = tr(rho_n A)
///   delta_sq   = tr(rho_n A^2) - tr(rho_n A)^2       (total variance)
///   delta_s_sq = Haar variance of <A> over the window (statistical part)
///   delta_q_sq = delta_sq - delta_s_sq               (mean quantum variance)
struct ExactFluctuations {
  Rational mean;
  Rational delta_sq;
  Rational delta_s_sq;
  Rational delta_q_sq;

  /// sqrt(delta_sq) / mean; empty when mean == 0 (e.g. odd-power
  /// observables), which is a legitimate value rather than an error.
  std::optional<double> ratio() const;
};

ExactFluctuations exact_total_variance(const Window& window,
                                       const CollectiveObservable& observable);

/// Statistical variance of <A> under Haar sampling on the window, from the
/// second Haar moment of the projected operator A_P = P A P:
///   E[<A>^2] = (t^2 + s) / (n (n+1)),  t = tr A_P,  s = tr A_P^2,
/// so delta_s^2 = (n s - t^2) / (n^2 (n+1)). Exact.
Rational exact_statistical_variance(const Window& window,
                                    const CollectiveObservable& observable);

/// delta A / mean(A) from exact traces; empty when the mean vanishes.
std::optional<double> typicality_ratio(const Window& window,
                                       const CollectiveObservable& observable);

struct FluctuationReport {
  enum class Method { exact, monte_carlo };

  Method method = Method::exact;
  double mean = 0.0;
  double delta_sq = 0.0;
  double delta_s_sq = 0.0;
  double delta_q_sq = 0.0;
  std::optional<double> ratio;

  // Monte Carlo only: jackknife standard errors and the sample count.
  double mean_stderr = 0.0;
  double delta_s_stderr = 0.0;
  double delta_q_stderr = 0.0;
  double delta_stderr = 0.0;
  long long num_samples = 0;
};

FluctuationReport to_report(const ExactFluctuations& exact);

/// Monte Carlo decomposition of the total variance: delta_s^2 from the spread
/// of per-sample expectations, delta_q^2 from the mean per-sample quantum
/// variance, delta^2 as their sum. Errors are leave-one-out jackknife.
/// Samples are keyed by index, so the result is bit-identical for any
/// num_workers. Requires num_samples >= 100.
FluctuationReport mc_decomposition(const Window& window,
                                   const CollectiveObservable& observable,
                                   const SamplerConfig& config,
                                   long long num_samples,
                                   unsigned num_workers = 1);

}  // namespace qtyp
