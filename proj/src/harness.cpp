#include "specdiff/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "specdiff/rng.hpp"
#include "specdiff/spectral.hpp"

namespace specdiff::harness {

namespace {

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!failed.load()) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

double replication_statistic(const McConfig& cfg, std::uint64_t stream, std::size_t r) {
  const std::size_t pad = std::max(procgen::lookback(cfg.model_a), procgen::lookback(cfg.model_b));
  const procgen::CouplingSpec coupling(cfg.n1, cfg.n2, cfg.rho);
  const auto z = procgen::coupled_innovations(coupling, pad, stream_seed(cfg.master_seed, stream, r));
  const TimeSeries a(procgen::simulate(cfg.model_a, cfg.n1, z.first, pad), "a");
  const TimeSeries b(procgen::simulate(cfg.model_b, cfg.n2, z.second, pad), "b");
  const auto input = prepare_comparison(a, b, cfg.center);
  const auto spectra = spectral::GridSpectra::compute(input);
  return inference::equality_test(spectra, 0.05, cfg.calibration).statistic;
}

}  // namespace

void McConfig::validate() const {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (n1 > n2) throw std::invalid_argument("McConfig needs n1 <= n2");
  if (n1 < kMinSeriesLength) throw std::invalid_argument("McConfig needs n1 >= 8");
  if (alpha_levels.empty()) throw std::invalid_argument("McConfig needs at least one level");
  for (double a : alpha_levels) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("levels must lie in (0, 1)");
  }
  procgen::validate(model_a);
  procgen::validate(model_b);
}

std::string McConfig::cell_id() const {
  return pair_name + ":" + std::to_string(n1) + ":" + std::to_string(n2);
}

double RejectionRow::standard_error() const noexcept {
  const double p = frequency();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

std::string RejectionTable::to_csv() const {
  std::ostringstream out;
  out << "model_pair,n1,n2,alpha,frequency,stderr,reps,seed\n";
  for (const auto& r : rows) {
    out << r.model_pair << ',' << r.n1 << ',' << r.n2 << ',' << format_double(r.alpha) << ','
        << format_double(r.frequency()) << ',' << format_double(r.standard_error()) << ',' << r.reps << ','
        << r.seed << '\n';
  }
  return out.str();
}

nlohmann::json RejectionTable::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"model_pair", r.model_pair},
                         {"n1", r.n1},
                         {"n2", r.n2},
                         {"alpha", r.alpha},
                         {"frequency", r.frequency()},
                         {"stderr", r.standard_error()},
                         {"reps", r.reps},
                         {"seed", r.seed}});
  }
  return rows_json;
}

const RejectionRow* RejectionTable::find(const std::string& pair, std::size_t n1, std::size_t n2,
                                         double alpha) const {
  for (const auto& r : rows) {
    if (r.model_pair == pair && r.n1 == n1 && r.n2 == n2 && std::abs(r.alpha - alpha) < 1e-12) return &r;
  }
  return nullptr;
}

std::vector<double> cell_statistics(const McConfig& cfg) {
  cfg.validate();
  const std::uint64_t stream = hash_label(cfg.cell_id());
  std::vector<double> stats(cfg.reps);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t r) {
    try {
      stats[r] = replication_statistic(cfg, stream, r);
    } catch (const std::exception& e) {
      throw std::runtime_error("cell " + cfg.cell_id() + ", replication " + std::to_string(r) + ": " + e.what());
    }
  });
  return stats;
}

std::vector<RejectionRow> run_cell(const McConfig& cfg) {
  const auto stats = cell_statistics(cfg);
  std::vector<RejectionRow> rows;
  for (double alpha : cfg.alpha_levels) {
    const double critical = inference::normal_quantile(1.0 - alpha);
    RejectionRow row{cfg.pair_name, cfg.n1, cfg.n2, alpha, 0, cfg.reps, cfg.master_seed};
    row.rejections = static_cast<std::size_t>(
        std::count_if(stats.begin(), stats.end(), [critical](double s) { return s > critical; }));
    rows.push_back(row);
  }
  return rows;
}

std::vector<Table1Column> table1_columns(bool flip) {
  using procgen::model_from_name;
  const auto mixed = [&](const char* name, const char* a, const char* b) {
    return flip ? Table1Column{name, model_from_name(b), model_from_name(a)}
                : Table1Column{name, model_from_name(a), model_from_name(b)};
  };
  return {
      {"X1", model_from_name("X1"), model_from_name("X1")},
      {"X2", model_from_name("X2"), model_from_name("X2")},
      {"X3", model_from_name("X3"), model_from_name("X3")},
      mixed("X1X3", "X1", "X3"),
      mixed("X2X3", "X2", "X3"),
      {"X4", model_from_name("X4"), model_from_name("X4")},
      {"X5", model_from_name("X5"), model_from_name("X5")},
      mixed("X1X5", "X1", "X5"),
  };
}

std::vector<std::pair<std::size_t, std::size_t>> table1_sizes() {
  const std::size_t sizes[] = {256, 384, 512, 640};
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i; j < 4; ++j) out.emplace_back(sizes[i], sizes[j]);
  }
  return out;
}

RejectionTable run_table1(const Table1Options& options) {
  RejectionTable table;
  const auto columns = table1_columns(options.flip);
  for (const auto& name : options.columns) {
    if (std::none_of(columns.begin(), columns.end(), [&](const auto& c) { return c.name == name; })) {
      throw std::invalid_argument("unknown Table 1 column '" + name + "'");
    }
  }
  for (const auto& [n1, n2] : table1_sizes()) {
    for (const auto& column : columns) {
      if (!options.columns.empty() &&
          std::find(options.columns.begin(), options.columns.end(), column.name) == options.columns.end()) {
        continue;
      }
      McConfig cfg;
      cfg.pair_name = column.name;
      cfg.model_a = column.model_a;
      cfg.model_b = column.model_b;
      cfg.n1 = n1;
      cfg.n2 = n2;
      cfg.reps = options.reps;
      cfg.master_seed = options.master_seed;
      cfg.center = options.center;
      cfg.threads = options.threads;
      for (auto& row : run_cell(cfg)) table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::optional<double> calibration_from_ratio(double ratio) {
  if (ratio >= 0.75 && ratio < 1.5) return 1.0;
  if (ratio >= 1.5 && ratio <= 3.0) return 0.5;
  return std::nullopt;
}

CalibrationReport calibrate_sigma_h0(std::size_t reps, std::size_t n, std::uint64_t seed,
                                     std::size_t level_reps, unsigned threads) {
  if (reps < 200) throw std::invalid_argument("calibration needs reps >= 200");
  if (n < 2048) throw std::invalid_argument("calibration needs n >= 2048");

  CalibrationReport report;
  report.reps = reps;
  report.n = n;
  report.seed = seed;
  report.analytic_target = 3.0 / (16.0 * std::pow(std::numbers::pi, 4));

  const std::uint64_t stream = hash_label("calibrate:" + std::to_string(n));
  std::vector<double> raw(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    const auto z = procgen::coupled_innovations(procgen::CouplingSpec(n, n, 0.0), 0, stream_seed(seed, stream, r));
    const auto spectra = spectral::GridSpectra::compute(z.first, z.second);
    raw[r] = inference::sigma2_h0(spectra, 1.0);
  });
  const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(reps);
  double ss = 0.0;
  for (double v : raw) ss += (v - mean) * (v - mean);
  report.raw_mean = mean;
  report.raw_standard_error = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
  report.ratio = mean / report.analytic_target;
  report.implied_calibration = calibration_from_ratio(report.ratio);
  const double c = report.implied_calibration.value_or(1.0);
  report.calibrated_mean = c * mean;

  McConfig cfg;
  cfg.pair_name = "X1";
  cfg.model_a = procgen::WhiteNoise{};
  cfg.model_b = procgen::WhiteNoise{};
  cfg.n1 = cfg.n2 = 256;
  cfg.alpha_levels = {0.05};
  cfg.reps = level_reps;
  cfg.master_seed = seed;
  cfg.calibration = c;
  cfg.threads = threads;
  report.level_reps = level_reps;
  report.level_256 = run_cell(cfg).front().frequency();
  return report;
}

std::string CalibrationReport::to_text() const {
  std::ostringstream out;
  out << "null-variance calibration (white noise vs white noise, independent)\n"
      << "n = " << n << ", reps = " << reps << ", seed = " << seed << "\n"
      << "analytic null variance 3/(16 pi^4) = " << format_double(analytic_target) << "\n"
      << "uncalibrated estimator mean        = " << format_double(raw_mean) << " (s.e. "
      << format_double(raw_standard_error) << ")\n"
      << "ratio mean / analytic              = " << format_double(ratio) << "\n";
  if (implied_calibration) {
    out << "implied calibration constant       = " << format_double(*implied_calibration) << "\n"
        << "calibrated mean                    = " << format_double(calibrated_mean) << " (relative error "
        << format_double(calibrated_mean / analytic_target - 1.0) << ")\n";
  } else {
    out << "implied calibration constant       = none (ratio fits neither 1 nor 1/2)\n";
  }
  out << "empirical 5% level at (256,256), X1 vs X1, " << level_reps << " reps = " << format_double(level_256)
      << "\n";
  return out.str();
}

KsResult ks_test_normal(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("KS test needs a non-empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = inference::normal_cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  // Asymptotic Kolmogorov distribution with Stephens' small-sample correction.
  const double root_n = std::sqrt(n);
  const double lambda = (root_n + 0.12 + 0.11 / root_n) * d;
  double p = 0.0;
  if (lambda < 1e-3) {
    p = 1.0;
  } else if (lambda < 1.18) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double odd = 2.0 * k - 1.0;
      sum += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    p = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  } else {
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
      p += sign * std::exp(-2.0 * k * k * lambda * lambda);
      sign = -sign;
    }
    p *= 2.0;
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

NormalityReport normality_diagnostic(const procgen::ModelSpec& model, std::size_t n, std::size_t reps,
                                     std::uint64_t seed, unsigned threads) {
  if (reps < 500) throw std::invalid_argument("normality diagnostic needs reps >= 500");
  McConfig cfg;
  cfg.pair_name = "normality-" + procgen::model_name(model);
  cfg.model_a = model;
  cfg.model_b = model;
  cfg.n1 = cfg.n2 = n;
  cfg.reps = reps;
  cfg.master_seed = seed;
  cfg.threads = threads;
  NormalityReport report;
  report.statistics = cell_statistics(cfg);
  report.ks = ks_test_normal(report.statistics);
  return report;
}

}  // namespace specdiff::harness
