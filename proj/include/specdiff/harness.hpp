#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specdiff/inference.hpp"
#include "specdiff/procgen.hpp"

namespace specdiff::harness {

/// One Monte Carlo cell: model_a simulated at length n1, model_b at n2.
struct McConfig {
  std::string pair_name;  ///< row key in the output table, e.g. "X1X3"
  procgen::ModelSpec model_a;
  procgen::ModelSpec model_b;
  std::size_t n1 = 256;
  std::size_t n2 = 256;
  double rho = 0.0;
  std::vector<double> alpha_levels{0.05, 0.1};
  std::size_t reps = 1000;
  std::uint64_t master_seed = 1;
  /// Subtract sample means before testing. Off by default: the simulated
  /// processes have known zero mean.
  bool center = false;
  double calibration = inference::kSigmaH0Calibration;
  unsigned threads = 1;  ///< caps workers; results do not depend on it

  /// Throws std::invalid_argument on reps == 0, n1 > n2, levels outside (0,1).
  void validate() const;
  /// Identifier hashed into the replication seeds: "<pair>:<n1>:<n2>".
  [[nodiscard]] std::string cell_id() const;
};

struct RejectionRow {
  std::string model_pair;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double alpha = 0.0;
  std::size_t rejections = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;

  [[nodiscard]] double frequency() const noexcept {
    return static_cast<double>(rejections) / static_cast<double>(reps);
  }
  /// Binomial standard error sqrt(p (1 - p) / reps).
  [[nodiscard]] double standard_error() const noexcept;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;

  /// Header: model_pair,n1,n2,alpha,frequency,stderr,reps,seed
  [[nodiscard]] std::string to_csv() const;
  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] const RejectionRow* find(const std::string& pair, std::size_t n1, std::size_t n2,
                                         double alpha) const;
};

/// Replication r draws coupled innovations from stream_seed(master, hash(cell_id), r),
/// simulates both series and runs the equality test at every level.
[[nodiscard]] std::vector<RejectionRow> run_cell(const McConfig& cfg);

/// Statistic of each replication of the cell, in replication order.
[[nodiscard]] std::vector<double> cell_statistics(const McConfig& cfg);

struct Table1Column {
  std::string name;
  procgen::ModelSpec model_a;
  procgen::ModelSpec model_b;
};

/// X1, X2, X3, X1X3, X2X3, X4, X5, X1X5. With `flip`, mixed columns put
/// the second model at n1.
[[nodiscard]] std::vector<Table1Column> table1_columns(bool flip = false);
/// The ten (n1, n2) pairs with n1 <= n2 from {256, 384, 512, 640}.
[[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> table1_sizes();

struct Table1Options {
  std::uint64_t master_seed = 1;
  std::size_t reps = 1000;
  unsigned threads = 1;
  bool flip = false;
  bool center = false;
  /// Restrict to these column names; empty means all.
  std::vector<std::string> columns;
};

[[nodiscard]] RejectionTable run_table1(const Table1Options& options);

struct CalibrationReport {
  std::size_t reps = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double analytic_target = 0.0;       ///< 3 / (16 pi^4)
  double raw_mean = 0.0;              ///< Monte Carlo mean of the uncalibrated estimator
  double raw_standard_error = 0.0;
  double ratio = 0.0;                 ///< raw_mean / analytic_target
  std::optional<double> implied_calibration;  ///< 1 or 1/2, absent if neither fits
  double calibrated_mean = 0.0;       ///< raw_mean * implied calibration
  double level_256 = 0.0;             ///< empirical 5% level at (256, 256), X1 vs X1
  std::size_t level_reps = 0;

  [[nodiscard]] std::string to_text() const;
};

/// Ratio in [0.75, 1.5) selects 1; [1.5, 3] selects 1/2; otherwise none.
[[nodiscard]] std::optional<double> calibration_from_ratio(double ratio);

/// Requires reps >= 200 and n >= 2048.
[[nodiscard]] CalibrationReport calibrate_sigma_h0(std::size_t reps, std::size_t n, std::uint64_t seed,
                                                   std::size_t level_reps = 1000, unsigned threads = 1);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against N(0, 1). Throws on empty input.
[[nodiscard]] KsResult ks_test_normal(std::vector<double> sample);

struct NormalityReport {
  KsResult ks;
  std::vector<double> statistics;
};

/// Standardized null statistics of `model` vs itself at n1 = n2 = n.
/// Requires reps >= 500.
[[nodiscard]] NormalityReport normality_diagnostic(const procgen::ModelSpec& model, std::size_t n,
                                                   std::size_t reps, std::uint64_t seed, unsigned threads = 1);

}  // namespace specdiff::harness
