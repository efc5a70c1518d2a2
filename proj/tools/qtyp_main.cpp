// qtyp command-line front end: exact oscillator moments, microcanonical
// window variances, Monte Carlo decomposition, expansion fits, and scaling
// sweeps, emitted as CSV/TSV with reproducible seeding.
//
// Exit codes: 0 success, 2 usage/precondition error, 3 capacity error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qtyp/fluctuations.hpp"
#include "qtyp/scaling.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;

std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string format_ratio(const std::optional<double>& ratio) {
  return ratio ? format_decimal(*ratio) : "undefined";
}

std::string moment_string(const qtyp::Moment& m) {
  if (m.is_zero()) return "0";
  return m.sqrt2 ? m.coeff.str() + "*sqrt(2)" : m.coeff.str();
}

std::vector<long long> parse_int_list(const std::string& flag,
                                      const std::string& text) {
  std::vector<long long> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(flag + ": '" + item + "' is not an integer");
    }
    if (used != item.size())
      throw std::invalid_argument(flag + ": '" + item + "' is not an integer");
    values.push_back(v);
  }
  if (values.empty())
    throw std::invalid_argument(flag + ": list must not be empty");
  return values;
}

// key=value per line, '#' starts a comment, blank lines ignored.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
      throw std::invalid_argument("--config: cannot open '" + path + "'");
    KeyValueConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto strip = [](std::string s) {
        const char* ws = " \t\r";
        const std::size_t b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        const std::size_t e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
      };
      line = strip(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("--config: line " + std::to_string(lineno) +
                                    " is not a key=value assignment");
      const std::string key = strip(line.substr(0, eq));
      const std::string value = strip(line.substr(eq + 1));
      if (key.empty())
        throw std::invalid_argument("--config: line " + std::to_string(lineno) +
                                    " has an empty key");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  std::optional<std::string> raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<std::string, std::string> values_;
};

template <typename T>
T parse_scalar(const std::string& flag, const std::string& text);

template <>
long long parse_scalar<long long>(const std::string& flag,
                                  const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(flag + ": '" + text + "' is not an integer");
  }
  if (used != text.size())
    throw std::invalid_argument(flag + ": '" + text + "' is not an integer");
  return v;
}

template <>
std::uint64_t parse_scalar<std::uint64_t>(const std::string& flag,
                                          const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(flag + ": '" + text + "' is not an unsigned "
                                "integer");
  }
  if (used != text.size())
    throw std::invalid_argument(flag + ": '" + text + "' is not an unsigned "
                                "integer");
  return v;
}

template <>
double parse_scalar<double>(const std::string& flag, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(flag + ": '" + text + "' is not a number");
  }
  if (used != text.size())
    throw std::invalid_argument(flag + ": '" + text + "' is not a number");
  return v;
}

template <>
std::string parse_scalar<std::string>(const std::string&,
                                      const std::string& text) {
  return text;
}

// Precedence: command-line flag, then config file, then default.
template <typename T>
T resolve(const std::optional<T>& flag_value, const KeyValueConfig& cfg,
          const std::string& key, T fallback) {
  if (flag_value) return *flag_value;
  if (const auto raw = cfg.raw(key)) return parse_scalar<T>("--" + key, *raw);
  return fallback;
}

template <typename T>
T resolve_required(const std::optional<T>& flag_value,
                   const KeyValueConfig& cfg, const std::string& key) {
  if (flag_value) return *flag_value;
  if (const auto raw = cfg.raw(key)) return parse_scalar<T>("--" + key, *raw);
  throw std::invalid_argument("--" + key + " is required");
}

std::vector<long long> resolve_list(
    const std::optional<std::string>& flag_value, const KeyValueConfig& cfg,
    const std::string& key, const std::vector<long long>& fallback) {
  if (flag_value) return parse_int_list("--" + key, *flag_value);
  if (const auto raw = cfg.raw(key)) return parse_int_list("--" + key, *raw);
  if (fallback.empty())
    throw std::invalid_argument("--" + key + " is required");
  return fallback;
}

// Shared per-subcommand plumbing: output target, field separator, config file.
struct CommonOptions {
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> config_path;

  void attach(CLI::App& cmd) {
    cmd.add_option("--out", out, "Output file (stdout when omitted)");
    cmd.add_option("--format", format, "Output format: csv or tsv");
    cmd.add_option("--config", config_path,
                   "key=value config file; flags take precedence");
  }

  KeyValueConfig load_config() const {
    return config_path ? KeyValueConfig::load(*config_path) : KeyValueConfig();
  }
};

class TableWriter {
 public:
  TableWriter(const std::optional<std::string>& out_path, char sep)
      : sep_(sep) {
    if (out_path) {
      file_.open(*out_path);
      if (!file_)
        throw std::invalid_argument("--out: cannot open '" + *out_path + "'");
      stream_ = &file_;
    } else {
      stream_ = &std::cout;
    }
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) *stream_ << sep_;
      *stream_ << fields[i];
    }
    *stream_ << '\n';
  }

 private:
  char sep_;
  std::ofstream file_;
  std::ostream* stream_;
};

char resolve_separator(const std::optional<std::string>& flag,
                       const KeyValueConfig& cfg) {
  const std::string format = resolve(flag, cfg, "format", std::string("csv"));
  if (format == "csv") return ',';
  if (format == "tsv") return '\t';
  throw std::invalid_argument("--format must be 'csv' or 'tsv'");
}

long long resolve_nu(const std::optional<long long>& flag,
                     const KeyValueConfig& cfg) {
  const long long nu = resolve_required(flag, cfg, "nu");
  if (nu < 1) throw std::invalid_argument("--nu must be >= 1");
  return nu;
}

long long resolve_particles(const std::optional<long long>& flag,
                            const KeyValueConfig& cfg) {
  const long long total = resolve_required(flag, cfg, "N");
  if (total < 0 || total % 2 != 0)
    throw std::invalid_argument("--N must be an even integer >= 0");
  return total;
}

long long resolve_half_width(const std::optional<long long>& flag,
                             const KeyValueConfig& cfg, long long total) {
  const long long k = resolve_required(flag, cfg, "k");
  if (k < 0 || k > total / 2)
    throw std::invalid_argument("--k must lie in [0, N/2] (N/2 = " +
                                std::to_string(total / 2) + ")");
  return k;
}

// ---------------------------------------------------------------------------
// Subcommand state + handlers
// ---------------------------------------------------------------------------

struct MomentsArgs {
  std::optional<long long> i, j, p_max;
  CommonOptions common;
};

int run_moments(const MomentsArgs& args) {
  const KeyValueConfig cfg = args.common.load_config();
  const long long i = resolve_required(args.i, cfg, "i");
  const long long j = resolve_required(args.j, cfg, "j");
  if ((i != 0 && i != 1) || (j != 0 && j != 1))
    throw std::invalid_argument("--i and --j must be 0 or 1");
  const long long p_max = resolve(args.p_max, cfg, "p-max", 12LL);
  if (p_max < 0) throw std::invalid_argument("--p-max must be >= 0");
  if (p_max > static_cast<long long>(qtyp::kDefaultPowerLimit))
    throw qtyp::capacity_error(
        "--p-max exceeds the exact-arithmetic limit " +
        std::to_string(qtyp::kDefaultPowerLimit));

  TableWriter table(args.common.out, resolve_separator(args.common.format, cfg));
  table.row({"i", "j", "p", "moment"});
  for (long long p = 0; p <= p_max; ++p) {
    const qtyp::Moment m = qtyp::oscillator_moment(
        static_cast<int>(i), static_cast<int>(j), static_cast<unsigned>(p));
    table.row({std::to_string(i), std::to_string(j), std::to_string(p),
               moment_string(m)});
  }
  return 0;
}

struct VarianceArgs {
  std::optional<long long> nu, total, half_width;
  CommonOptions common;
};

int run_variance(const VarianceArgs& args) {
  const KeyValueConfig cfg = args.common.load_config();
  const long long nu = resolve_nu(args.nu, cfg);
  const long long total = resolve_particles(args.total, cfg);
  const long long k = resolve_half_width(args.half_width, cfg, total);

  const qtyp::CaseVariance cv =
      qtyp::exact_case_variance(static_cast<unsigned>(nu), total, k);

  TableWriter table(args.common.out, resolve_separator(args.common.format, cfg));
  table.row({"nu", "N", "n", "mean", "delta_sq", "ratio", "mean_exact",
             "delta_sq_exact"});
  table.row({std::to_string(nu), std::to_string(total),
             std::to_string(2 * k + 1), format_decimal(cv.mean.to_double()),
             format_decimal(cv.delta_sq.to_double()), format_ratio(cv.ratio()),
             cv.mean.str(), cv.delta_sq.str()});
  return 0;
}

struct McArgs {
  std::optional<long long> nu, total, half_width, samples;
  std::optional<std::uint64_t> seed;
  CommonOptions common;
};

int run_mc(const McArgs& args) {
  const KeyValueConfig cfg = args.common.load_config();
  const long long nu = resolve_nu(args.nu, cfg);
  const long long total = resolve_particles(args.total, cfg);
  const long long k = resolve_half_width(args.half_width, cfg, total);
  const long long samples = resolve_required(args.samples, cfg, "samples");
  if (samples < 100)
    throw std::invalid_argument("--samples must be >= 100");
  const std::uint64_t seed = resolve(args.seed, cfg, "seed", qtyp::kDefaultSeed);

  const qtyp::TwoModeSpace space(total);
  const qtyp::CollectiveObservable observable(
      space, qtyp::MomentMatrix::oscillator(static_cast<unsigned>(2 * nu)));
  const qtyp::Window window(space, k);
  const qtyp::SamplerConfig sampler_config{seed, 0};
  const qtyp::FluctuationReport mc =
      qtyp::mc_decomposition(window, observable, sampler_config, samples, 2);
  const qtyp::Rational exact_delta =
      qtyp::exact_case_variance(static_cast<unsigned>(nu), total, k).delta_sq;

  const double diff = mc.delta_sq - exact_delta.to_double();
  const double z = mc.delta_stderr > 0.0
                       ? diff / mc.delta_stderr
                       : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());

  TableWriter table(args.common.out, resolve_separator(args.common.format, cfg));
  table.row({"nu", "N", "n", "samples", "seed", "mean", "mean_stderr",
             "delta_s_sq", "delta_s_stderr", "delta_q_sq", "delta_q_stderr",
             "delta_sq", "delta_sq_stderr", "exact_delta_sq", "z_score"});
  table.row({std::to_string(nu), std::to_string(total),
             std::to_string(2 * k + 1), std::to_string(samples),
             std::to_string(seed), format_decimal(mc.mean),
             format_decimal(mc.mean_stderr), format_decimal(mc.delta_s_sq),
             format_decimal(mc.delta_s_stderr), format_decimal(mc.delta_q_sq),
             format_decimal(mc.delta_q_stderr), format_decimal(mc.delta_sq),
             format_decimal(mc.delta_stderr),
             format_decimal(exact_delta.to_double()), format_decimal(z)});
  return 0;
}

struct SweepArgs {
  std::optional<long long> nu, mc_samples;
  std::optional<double> alpha, prefactor;
  std::optional<std::string> particle_list;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> plot_path;
  CommonOptions common;
};

int run_sweep(const SweepArgs& args) {
  const KeyValueConfig cfg = args.common.load_config();
  const long long nu = resolve_nu(args.nu, cfg);
  const double alpha = resolve_required(args.alpha, cfg, "alpha");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("--alpha must lie in [0, 1]");
  const double prefactor = resolve(args.prefactor, cfg, "c", 1.0);
  if (!(prefactor >= 0.0))
    throw std::invalid_argument("--c must be >= 0");
  const std::vector<long long> particles =
      resolve_list(args.particle_list, cfg, "N-list", {});
  for (long long total : particles)
    if (total < 0 || total % 2 != 0)
      throw std::invalid_argument("--N-list entries must be even integers >= 0");
  const std::uint64_t seed = resolve(args.seed, cfg, "seed", qtyp::kDefaultSeed);
  const std::optional<long long> mc_samples =
      args.mc_samples ? args.mc_samples
                      : (cfg.raw("mc") ? std::optional<long long>(
                                             parse_scalar<long long>("--mc", *cfg.raw("mc")))
                                       : std::nullopt);

  std::optional<qtyp::McOptions> mc;
  if (mc_samples) {
    if (*mc_samples < 100)
      throw std::invalid_argument("--mc must be >= 100 samples");
    mc = qtyp::McOptions{*mc_samples, qtyp::SamplerConfig{seed, 0}, 2};
  }

  const qtyp::SweepResult sweep = qtyp::scaling_sweep(
      static_cast<unsigned>(nu), alpha, prefactor, particles, mc);

  TableWriter table(args.common.out, resolve_separator(args.common.format, cfg));
  table.row({"nu", "alpha", "c", "seed", "N", "k", "n", "method", "mean",
             "mean_stderr", "delta_sq", "delta_sq_stderr", "ratio",
             "mean_exact", "delta_sq_exact"});
  for (const qtyp::SweepRow& row : sweep.rows) {
    table.row({std::to_string(row.nu), format_decimal(alpha),
               format_decimal(prefactor),
               row.monte_carlo ? std::to_string(seed) : "",
               std::to_string(row.total_particles),
               std::to_string(row.half_width),
               std::to_string(row.window_dimension),
               row.monte_carlo ? "monte-carlo" : "exact",
               format_decimal(row.mean),
               row.monte_carlo ? format_decimal(row.mean_stderr) : "",
               format_decimal(row.delta_sq),
               row.monte_carlo ? format_decimal(row.delta_sq_stderr) : "",
               format_ratio(row.ratio),
               row.monte_carlo ? "" : row.mean_exact.str(),
               row.monte_carlo ? "" : row.delta_sq_exact.str()});
  }

  const std::optional<std::string> plot =
      args.plot_path ? args.plot_path : cfg.raw("plot");
  if (plot) {
    std::ofstream plot_file(*plot);
    if (!plot_file)
      throw std::invalid_argument("--plot: cannot open '" + *plot + "'");
    for (const qtyp::SweepRow& row : sweep.rows) {
      if (!row.ratio || *row.ratio <= 0.0) continue;
      plot_file << format_decimal(
                       std::log10(static_cast<double>(row.total_particles)))
                << ' ' << format_decimal(std::log10(*row.ratio)) << '\n';
    }
  }
  return 0;
}

struct FitArgs {
  std::optional<long long> nu;
  std::optional<std::string> particle_list, half_width_list;
  CommonOptions common;
};

int run_fit(const FitArgs& args) {
  const KeyValueConfig cfg = args.common.load_config();
  const long long nu = resolve_nu(args.nu, cfg);
  const std::vector<long long> particles =
      resolve_list(args.particle_list, cfg, "N-list", {200, 400, 800});
  const std::vector<long long> half_widths =
      resolve_list(args.half_width_list, cfg, "k-list", {2, 5, 10});
  for (long long total : particles)
    if (total < 0 || total % 2 != 0)
      throw std::invalid_argument("--N-list entries must be even integers >= 0");
  for (long long k : half_widths)
    if (k < 0) throw std::invalid_argument("--k-list entries must be >= 0");
  {
    std::set<long long> dn(particles.begin(), particles.end());
    std::set<long long> dk(half_widths.begin(), half_widths.end());
    if (dn.size() < 3)
      throw std::invalid_argument("--N-list must contain >= 3 distinct values");
    if (dk.size() < 3)
      throw std::invalid_argument("--k-list must contain >= 3 distinct values");
  }

  const unsigned power = static_cast<unsigned>(2 * nu);
  const std::vector<qtyp::FitPoint> grid =
      qtyp::cross_grid(particles, half_widths);
  const qtyp::FitResult fit = qtyp::fit_expansion(power, grid);
  const qtyp::ExpansionCoefficients exact =
      qtyp::analytic_coefficients(static_cast<unsigned>(nu));

  TableWriter table(args.common.out, resolve_separator(args.common.format, cfg));
  table.row({"nu", "d20_fit", "d02_fit", "d20_exact", "d02_exact",
             "max_residual"});
  table.row({std::to_string(nu), format_decimal(fit.d20),
             format_decimal(fit.d02), exact.d20.str(), exact.d02.str(),
             format_decimal(fit.max_residual)});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qtyp: typicality of collective observables for N bosons in two "
      "oscillator modes. Exact window variances, Haar-sampling Monte Carlo, "
      "variance-expansion fits, and scaling sweeps."};
  app.require_subcommand(1);

  MomentsArgs moments_args;
  CLI::App* moments = app.add_subcommand(
      "moments", "Exact single-particle moments <phi_i|x^p|phi_j>");
  moments->add_option("--i", moments_args.i, "Left mode index (0 or 1)");
  moments->add_option("--j", moments_args.j, "Right mode index (0 or 1)");
  moments->add_option("--p-max", moments_args.p_max,
                      "Print moments for p = 0..p-max (default 12)");
  moments_args.common.attach(*moments);

  VarianceArgs variance_args;
  CLI::App* variance = app.add_subcommand(
      "variance", "Exact mean/variance of X_{2nu} on a window");
  variance->add_option("--nu", variance_args.nu, "Observable power is 2*nu");
  variance->add_option("--N", variance_args.total, "Total particle number (even)");
  variance->add_option("--k", variance_args.half_width,
                       "Window half width (n = 2k+1)");
  variance_args.common.attach(*variance);

  McArgs mc_args;
  CLI::App* mc = app.add_subcommand(
      "mc", "Monte Carlo decomposition delta^2 = delta_s^2 + delta_q^2");
  mc->add_option("--nu", mc_args.nu, "Observable power is 2*nu");
  mc->add_option("--N", mc_args.total, "Total particle number (even)");
  mc->add_option("--k", mc_args.half_width, "Window half width (n = 2k+1)");
  mc->add_option("--samples", mc_args.samples, "Number of Haar samples (>= 100)");
  mc->add_option("--seed", mc_args.seed, "Master seed (default 123456789)");
  mc_args.common.attach(*mc);

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Scaling sweep with window rule n ~ c N^alpha");
  sweep->add_option("--nu", sweep_args.nu, "Observable power is 2*nu");
  sweep->add_option("--alpha", sweep_args.alpha, "Window scaling exponent in [0,1]");
  sweep->add_option("--c", sweep_args.prefactor, "Window scaling prefactor (default 1)");
  sweep->add_option("--N-list", sweep_args.particle_list,
                    "Comma-separated even particle numbers");
  sweep->add_option("--mc", sweep_args.mc_samples,
                    "Estimate rows by Monte Carlo with this many samples");
  sweep->add_option("--seed", sweep_args.seed, "Master seed (default 123456789)");
  sweep->add_option("--plot", sweep_args.plot_path,
                    "Write two-column plot data (log10 N, log10 ratio)");
  sweep_args.common.attach(*sweep);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand(
      "fit", "Least-squares recovery of the variance-expansion coefficients");
  fit->add_option("--nu", fit_args.nu, "Observable power is 2*nu");
  fit->add_option("--N-list", fit_args.particle_list,
                  "Comma-separated even particle numbers (default 200,400,800)");
  fit->add_option("--k-list", fit_args.half_width_list,
                  "Comma-separated window half widths (default 2,5,10)");
  fit_args.common.attach(*fit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (moments->parsed()) return run_moments(moments_args);
    if (variance->parsed()) return run_variance(variance_args);
    if (mc->parsed()) return run_mc(mc_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
    if (fit->parsed()) return run_fit(fit_args);
  } catch (const qtyp::capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
