// specdiff: compare, cluster and simulate time series by their spectra.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "specdiff/cluster.hpp"
#include "specdiff/core.hpp"
#include "specdiff/harness.hpp"
#include "specdiff/inference.hpp"
#include "specdiff/procgen.hpp"
#include "specdiff/report.hpp"
#include "specdiff/spectral.hpp"

namespace {

using namespace specdiff;

constexpr int kInputErrorExit = 2;
constexpr std::uint64_t kDefaultSeed = 1;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SPECDIFF_SEED")) {
    try {
      std::size_t used = 0;
      const auto value = std::stoull(env, &used);
      if (used == std::string(env).size()) return value;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string("SPECDIFF_SEED is not an unsigned integer: '") + env + "'");
  }
  return kDefaultSeed;
}

void emit(const std::string& text, const std::optional<std::string>& path) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw InputError(*path + ": cannot open for writing");
  out << text;
}

std::optional<ColumnSelector> column_selector(const std::optional<std::string>& column) {
  if (!column) return std::nullopt;
  const bool numeric = !column->empty() && column->find_first_not_of("0123456789") == std::string::npos;
  if (numeric) return ColumnSelector{static_cast<std::size_t>(std::stoull(*column))};
  return ColumnSelector{*column};
}

/// "name", "name_2", "name_3", ... in input order.
std::vector<TimeSeries> dedupe_labels(std::vector<TimeSeries> series) {
  std::map<std::string, int> seen;
  for (auto& s : series) {
    const int count = ++seen[s.label()];
    if (count > 1) s = s.relabeled(s.label() + "_" + std::to_string(count));
  }
  return series;
}

struct CompareArgs {
  std::string file_a, file_b;
  double alpha = 0.05;
  std::optional<double> epsilon;
  bool no_center = false;
  bool json = false;
  std::optional<std::string> column;
};

int run_compare(const CompareArgs& args) {
  const auto selector = column_selector(args.column);
  const TimeSeries a = load_csv(args.file_a, selector);
  const TimeSeries b = load_csv(args.file_b, selector);
  const auto input = prepare_comparison(a, b, !args.no_center);
  const auto comparison = inference::compare(input, args.alpha, args.epsilon);
  if (args.json) {
    std::cout << report::comparison_json(comparison).dump(2) << '\n';
  } else {
    std::cout << report::comparison_text(comparison, a.label(), b.label());
  }
  return 0;
}

struct ClusterArgs {
  std::vector<std::string> files;
  std::string linkage = "average";
  std::string format = "newick";
  std::optional<std::string> matrix_out;
  std::optional<std::string> out;
  bool no_center = false;
  std::optional<std::string> column;
};

int run_cluster(const ClusterArgs& args) {
  const auto linkage = cluster::linkage_from_name(args.linkage);
  const auto format = cluster::tree_format_from_name(args.format);
  const auto selector = column_selector(args.column);
  std::vector<TimeSeries> series;
  for (const auto& f : args.files) series.push_back(load_csv(f, selector));
  series = dedupe_labels(std::move(series));
  const auto matrix = cluster::distance_matrix(series, !args.no_center);
  if (args.matrix_out) emit(matrix.to_csv(), args.matrix_out);
  const auto tree = cluster::agglomerate(matrix, linkage);
  emit(cluster::export_dendrogram(tree, format) + "\n", args.out);
  return 0;
}

struct SimulateArgs {
  std::string model = "X1";
  std::size_t n = 256;
  std::optional<std::string> model2;
  std::optional<std::size_t> n2;
  double rho = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> out2;
  std::optional<double> phi, theta, d;
  std::optional<std::size_t> truncation, burn_in;
};

procgen::ModelSpec build_model(const std::string& name, const SimulateArgs& args) {
  auto model = procgen::model_from_name(name);
  std::visit(
      [&](auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, procgen::Ar1>) {
          if (args.phi) m.phi = *args.phi;
          if (args.burn_in) m.burn_in = *args.burn_in;
        } else if constexpr (std::is_same_v<M, procgen::Ma1>) {
          if (args.theta) m.theta = *args.theta;
        } else if constexpr (std::is_same_v<M, procgen::Farima>) {
          if (args.theta) m.theta = *args.theta;
          if (args.d) m.d = *args.d;
          if (args.truncation) m.truncation = *args.truncation;
        } else if constexpr (std::is_same_v<M, procgen::StructuralBreak>) {
          if (args.phi) m.phi = *args.phi;
        }
      },
      model);
  procgen::validate(model);
  return model;
}

int run_simulate(const SimulateArgs& args) {
  const auto model_a = build_model(args.model, args);
  const auto model_b = build_model(args.model2.value_or(args.model), args);
  const std::size_t n2 = args.n2.value_or(args.n);
  if (n2 < args.n) throw std::invalid_argument("--n2 must be >= --n (the first series is the shorter one)");
  if (args.n2 && !args.out2) throw std::invalid_argument("--n2 needs --out2 for the second series");
  const std::size_t pad = std::max(procgen::lookback(model_a), procgen::lookback(model_b));
  const auto z = procgen::coupled_innovations(procgen::CouplingSpec(args.n, n2, args.rho), pad,
                                              resolve_seed(args.seed));
  const auto first = procgen::simulate(model_a, args.n, z.first, pad);
  std::ostringstream a;
  write_csv(a, first);
  emit(a.str(), args.out);
  if (args.out2) {
    std::ostringstream b;
    write_csv(b, procgen::simulate(model_b, n2, z.second, pad));
    emit(b.str(), args.out2);
  }
  return 0;
}

struct Table1Args {
  std::optional<std::uint64_t> seed;
  std::size_t reps = 1000;
  std::optional<std::string> out;
  std::optional<std::string> json_out;
  unsigned threads = 1;
  bool flip = false;
  bool center = false;
  std::vector<std::string> columns;
};

int run_table1(const Table1Args& args) {
  harness::Table1Options options;
  options.master_seed = resolve_seed(args.seed);
  options.reps = args.reps;
  options.threads = args.threads;
  options.flip = args.flip;
  options.center = args.center;
  options.columns = args.columns;
  const auto table = harness::run_table1(options);
  emit(table.to_csv(), args.out);
  if (args.json_out) emit(table.to_json().dump(2) + "\n", args.json_out);
  return 0;
}

struct SpectrumArgs {
  std::string file;
  std::optional<std::size_t> grid_n;
  bool no_center = false;
  std::optional<std::string> out;
  std::optional<std::string> column;
};

int run_spectrum(const SpectrumArgs& args) {
  TimeSeries x = load_csv(args.file, column_selector(args.column));
  if (!args.no_center) x = x.centered();
  const FourierGrid grid(args.grid_n.value_or(x.size()));
  std::ostringstream out;
  out << "lambda,I\n";
  for (const auto& p : spectral::periodogram_on_grid(x, grid)) {
    out << format_double(p.lambda) << ',' << format_double(p.value) << '\n';
  }
  emit(out.str(), args.out);
  return 0;
}

struct CalibrateArgs {
  std::size_t reps = 500;
  std::size_t n = 4096;
  std::optional<std::uint64_t> seed;
  std::size_t level_reps = 1000;
  unsigned threads = 1;
  std::optional<std::string> out;
};

int run_calibrate(const CalibrateArgs& args) {
  const auto report =
      harness::calibrate_sigma_h0(args.reps, args.n, resolve_seed(args.seed), args.level_reps, args.threads);
  std::string text = report.to_text();
  text += "pinned calibration constant        = " + format_double(inference::kSigmaH0Calibration) + "\n";
  emit(text, args.out);
  if (!report.implied_calibration) {
    std::cerr << "error: calibration ratio " << report.ratio << " fits neither constant\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"specdiff: spectral comparison of time series with unequal lengths"};
  app.require_subcommand(1);

  CompareArgs compare;
  auto* cmd_compare = app.add_subcommand("compare", "Test two series for equal spectral densities");
  cmd_compare->add_option("a", compare.file_a, "First series (CSV)")->required();
  cmd_compare->add_option("b", compare.file_b, "Second series (CSV)")->required();
  cmd_compare->add_option("--alpha", compare.alpha, "Test level")->check(CLI::Range(0.0, 1.0));
  cmd_compare->add_option("--epsilon", compare.epsilon, "Also run the precise test of R^2 > epsilon");
  cmd_compare->add_flag("--no-center", compare.no_center, "Do not subtract sample means");
  cmd_compare->add_flag("--json", compare.json, "Emit JSON");
  cmd_compare->add_option("--column", compare.column, "Column name or zero-based index");

  ClusterArgs clus;
  auto* cmd_cluster = app.add_subcommand("cluster", "Hierarchical clustering by spectral distance");
  cmd_cluster->add_option("files", clus.files, "Series files (CSV)")->required()->expected(2, -1);
  cmd_cluster->add_option("--linkage", clus.linkage, "average | complete | single")
      ->check(CLI::IsMember({"average", "complete", "single"}));
  cmd_cluster->add_option("--format", clus.format, "newick | json")->check(CLI::IsMember({"newick", "json"}));
  cmd_cluster->add_option("--matrix-out", clus.matrix_out, "Write the distance matrix as CSV");
  cmd_cluster->add_option("--out", clus.out, "Write the tree here instead of stdout");
  cmd_cluster->add_flag("--no-center", clus.no_center, "Do not subtract sample means");
  cmd_cluster->add_option("--column", clus.column, "Column name or zero-based index");

  SimulateArgs sim;
  auto* cmd_simulate = app.add_subcommand("simulate", "Simulate a model from the zoo");
  cmd_simulate->add_option("--model", sim.model, "X1..X5")->required();
  cmd_simulate->add_option("--n", sim.n, "Length")->required()->check(CLI::PositiveNumber);
  cmd_simulate->add_option("--model2", sim.model2, "Second model (coupled)");
  cmd_simulate->add_option("--n2", sim.n2, "Second length (>= n)");
  cmd_simulate->add_option("--rho", sim.rho, "Innovation correlation")->check(CLI::Range(0.0, 1.0));
  cmd_simulate->add_option("--seed", sim.seed, "Seed (falls back to SPECDIFF_SEED)");
  cmd_simulate->add_option("--out", sim.out, "Output CSV (stdout if absent)");
  cmd_simulate->add_option("--out2", sim.out2, "Output CSV for the second series");
  cmd_simulate->add_option("--phi", sim.phi, "AR coefficient (X2, X5)");
  cmd_simulate->add_option("--theta", sim.theta, "MA coefficient (X3, X4)");
  cmd_simulate->add_option("--d", sim.d, "Memory parameter (X4)");
  cmd_simulate->add_option("--truncation", sim.truncation, "MA(inf) truncation (X4)");
  cmd_simulate->add_option("--burn-in", sim.burn_in, "AR burn-in (X2)");

  Table1Args t1;
  auto* cmd_table1 = app.add_subcommand("table1", "Monte Carlo size/power table");
  cmd_table1->add_option("--seed", t1.seed, "Master seed (falls back to SPECDIFF_SEED)");
  cmd_table1->add_option("--reps", t1.reps, "Replications per cell")->check(CLI::PositiveNumber);
  cmd_table1->add_option("--out", t1.out, "CSV output (stdout if absent)");
  cmd_table1->add_option("--json-out", t1.json_out, "JSON mirror of the CSV rows");
  cmd_table1->add_option("--threads", t1.threads, "Worker cap")->check(CLI::PositiveNumber);
  cmd_table1->add_flag("--flip", t1.flip, "Put the second model of mixed columns at n1");
  cmd_table1->add_flag("--center", t1.center, "Subtract sample means before testing");
  cmd_table1->add_option("--columns", t1.columns, "Restrict to these columns")->delimiter(',');

  SpectrumArgs spec;
  auto* cmd_spectrum = app.add_subcommand("spectrum", "Dump the periodogram on a Fourier grid");
  cmd_spectrum->add_option("file", spec.file, "Series (CSV)")->required();
  cmd_spectrum->add_option("--grid-n", spec.grid_n, "Grid size n1 (default: series length)")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  cmd_spectrum->add_flag("--no-center", spec.no_center, "Do not subtract the sample mean");
  cmd_spectrum->add_option("--out", spec.out, "Output CSV (stdout if absent)");
  cmd_spectrum->add_option("--column", spec.column, "Column name or zero-based index");

  CalibrateArgs cal;
  auto* cmd_calibrate = app.add_subcommand("calibrate", "Calibrate the null-variance estimator");
  cmd_calibrate->add_option("--reps", cal.reps, "Replications (>= 200)");
  cmd_calibrate->add_option("--n", cal.n, "Series length (>= 2048)");
  cmd_calibrate->add_option("--seed", cal.seed, "Seed (falls back to SPECDIFF_SEED)");
  cmd_calibrate->add_option("--level-reps", cal.level_reps, "Replications for the level check");
  cmd_calibrate->add_option("--threads", cal.threads, "Worker cap")->check(CLI::PositiveNumber);
  cmd_calibrate->add_option("--out", cal.out, "Write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputErrorExit;
  }

  try {
    if (*cmd_compare) return run_compare(compare);
    if (*cmd_cluster) return run_cluster(clus);
    if (*cmd_simulate) return run_simulate(sim);
    if (*cmd_table1) return run_table1(t1);
    if (*cmd_spectrum) return run_spectrum(spec);
    if (*cmd_calibrate) return run_calibrate(cal);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputErrorExit;
  } catch (const DegenerateInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputErrorExit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputErrorExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
