// Command-line front end: simulate, run, stability, hill, transform, bound.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "xreg/diagnostics.hpp"
#include "xreg/errors.hpp"
#include "xreg/geometry.hpp"
#include "xreg/io.hpp"
#include "xreg/kernels.hpp"
#include "xreg/pipeline.hpp"
#include "xreg/rng.hpp"
#include "xreg/sim.hpp"
#include "xreg/standardize.hpp"

namespace fs = std::filesystem;
using namespace xreg;

namespace {

std::vector<double> parse_beta(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw ParameterError("--beta: cannot parse '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + io::format_double(v[i]);
  return out;
}

// Beta for a simulated design when none is given: U[0,1]^d from a stream
// derived from the seed, independent of the data stream.
std::vector<double> default_beta(std::size_t d, std::uint64_t seed) {
  Rng rng = make_rng(split_seed(seed, 0xbe7a));
  return sim::draw_uniform_beta(d, rng);
}

struct SimulateArgs {
  std::string model = "additive";
  std::size_t n = 10000;
  std::size_t d = 2;
  double xi = 1.0;
  double alpha = 3.0;
  double sigma = 0.1;
  std::string beta;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  sim::SimModelConfig cfg;
  cfg.kind = sim::parse_model_kind(a.model);
  cfg.d = a.d;
  cfg.xi = a.xi;
  cfg.alpha = a.alpha;
  cfg.sigma = a.sigma;
  cfg.seed = a.seed;
  if (cfg.kind != sim::ModelKind::Multiplicative) {
    cfg.beta = a.beta.empty() ? default_beta(a.d, a.seed) : parse_beta(a.beta);
    std::cout << "beta = " << join(*cfg.beta) << '\n';
  }
  const Dataset data = sim::simulate(a.n, cfg);
  io::write_dataset_csv(data, a.out);
  std::cout << "wrote " << data.n() << " rows to " << a.out << '\n';
  return io::kExitOk;
}

struct RunArgs {
  std::string config;
  std::string out_dir;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_run(const RunArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = io::parse_config(a.config);
  const double t_config = seconds_since(t0);

  const fs::path out_dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create '" + out_dir.string() + "': " + ec.message());

  const auto t1 = std::chrono::steady_clock::now();
  const MseReport report = run_comparison(cfg);
  const double t_run = seconds_since(t1);

  const auto t2 = std::chrono::steady_clock::now();
  const std::string resolved = io::format_config(cfg);
  {
    std::ofstream out(out_dir / "config.ini", std::ios::binary | std::ios::trunc);
    out << resolved;
    if (!out) throw DataError("cannot write config.ini");
  }
  io::write_report(report, out_dir / "report.csv");
  {
    std::ofstream out(out_dir / "replications.csv", std::ios::binary | std::ios::trunc);
    out << "regressor,regime,replication,seed,mse\n";
    for (const auto& row : report.rows) {
      for (std::size_t r = 0; r < row.per_replication.size(); ++r) {
        out << row.regressor << ',' << to_string(row.regime) << ',' << r << ','
            << report.replications.at(r).seed << ',' << io::format_double(row.per_replication[r]) << '\n';
      }
    }
    if (!out) throw DataError("cannot write replications.csv");
  }
  bool has_truth = false;
  for (const auto& row : report.rows) has_truth = has_truth || row.mean_mse_vs_truth.has_value();
  if (has_truth) {
    std::ofstream out(out_dir / "truth_mse.csv", std::ios::binary | std::ios::trunc);
    out << "regressor,regime,mean_mse_vs_truth\n";
    for (const auto& row : report.rows) {
      out << row.regressor << ',' << to_string(row.regime) << ','
          << io::format_double(row.mean_mse_vs_truth.value_or(std::nan(""))) << '\n';
    }
    if (!out) throw DataError("cannot write truth_mse.csv");
  }

  io::RunManifest manifest;
  manifest.config_text = resolved;
  manifest.master_seed = cfg.seed;
  manifest.replications = report.replications;
  manifest.hyperparameters = report.hyperparameters;
  manifest.kernel_isa = std::string(kernels::to_string(kernels::active_isa()));
  manifest.timings = {{"parse_config", t_config}, {"run_comparison", t_run}, {"write_outputs", seconds_since(t2)}};
  io::write_manifest(manifest, out_dir / "manifest.json");

  std::cout << io::format_summary(report);
  std::cout << "outputs in " << out_dir.string() << '\n';
  return io::kExitOk;
}

struct StabilityArgs {
  std::string config;
  std::string data;
  std::string target;
  std::size_t p = 5;
  std::size_t k_max = 400;
  std::size_t omega_m = 10;
  std::string norm = "l2";
  std::string out;
};

int cmd_stability(const StabilityArgs& a) {
  Dataset data;
  if (!a.config.empty()) {
    const ExperimentConfig cfg = io::parse_config(a.config);
    const auto* src = std::get_if<SimulatedSource>(&cfg.source);
    if (!src) throw ConfigError("data.source: stability --config needs a simulated source; use --data for CSV files");
    sim::SimModelConfig model = src->model;
    model.seed = cfg.seed;
    if (model.kind != sim::ModelKind::Multiplicative && (src->random_beta || !model.beta)) {
      model.beta = default_beta(model.d, cfg.seed);
    }
    data = sim::simulate(src->n_train, model);
  } else {
    const auto table = io::load_table_csv(a.data);
    const std::string target = a.target.empty() ? table.header.back() : a.target;
    data = io::load_dataset_csv(a.data, target);
  }
  const NormKind norm = parse_norm_kind(a.norm);
  const SpherePartition part(a.p, data.d());
  auto curves = stability_curves(data, part, std::min(a.k_max, data.n()), norm);
  curves = omega_filter(std::move(curves), data, part, a.omega_m, norm);
  io::write_report(curves, a.out);
  std::cout << curves.size() << " cells in omega_" << a.omega_m << ", wrote " << a.out << '\n';
  return io::kExitOk;
}

struct HillArgs {
  std::string data;
  std::string column;
  std::string norm;
  std::string exclude;
  std::optional<std::size_t> k;
};

int cmd_hill(const HillArgs& a) {
  const auto table = io::load_table_csv(a.data);
  std::vector<double> values;
  if (!a.column.empty()) {
    values = table.values.column(io::resolve_column(table.header, a.column));
  } else {
    std::vector<std::size_t> keep;
    const std::optional<std::size_t> drop =
        a.exclude.empty() ? std::nullopt : std::optional(io::resolve_column(table.header, a.exclude));
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (j != drop) keep.push_back(j);
    }
    Matrix x(table.values.rows(), keep.size());
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < keep.size(); ++j) x(i, j) = table.values(i, keep[j]);
    }
    values = row_norms(x, parse_norm_kind(a.norm.empty() ? "l2" : a.norm));
  }
  const std::size_t k = a.k.value_or(static_cast<std::size_t>(std::floor(std::sqrt(double(values.size())))));
  std::cout << io::format_double(hill_estimator(values, k)) << '\n';
  return io::kExitOk;
}

struct TransformArgs {
  std::string data;
  std::string mode = "empirical";
  double alpha = 0.0;
  std::string target;
  std::string out;
};

int cmd_transform(const TransformArgs& a) {
  const auto table = io::load_table_csv(a.data);
  const std::optional<std::size_t> target =
      a.target.empty() ? std::nullopt : std::optional(io::resolve_column(table.header, a.target));
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j != target) cols.push_back(j);
  }
  Matrix x(table.values.rows(), cols.size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) x(i, j) = table.values(i, cols[j]);
  }
  Matrix v;
  if (a.mode == "empirical") {
    v = apply_empirical_transform(fit_empirical_transform(x), x);
  } else if (a.mode == "exact") {
    if (!(a.alpha > 0.0)) throw ParameterError("--alpha must be positive for --mode exact");
    if (!std::all_of(x.values().begin(), x.values().end(), [](double e) { return e >= 0.0; })) {
      std::cerr << "warning: negative feature values under the exact Pareto transform\n";
    }
    v = exact_pareto_transform(x, a.alpha);
  } else {
    throw ParameterError("--mode must be empirical or exact");
  }
  io::Table out{table.header, table.values};
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out.values(i, cols[j]) = v(i, j);
  }
  io::write_table_csv(out, a.out);
  std::cout << "wrote " << v.rows() << " rows to " << a.out << '\n';
  return io::kExitOk;
}

struct BoundArgs {
  double m = 1.0;
  double vc = 1.0;
  double delta = 0.05;
  double k = 100.0;
  double c = 1.0;
};

int cmd_bound(const BoundArgs& a) {
  std::cout << io::format_double(compute_generalization_bound(a.m, a.vc, a.delta, a.k, a.c)) << '\n';
  std::cerr << "note: C = " << io::format_double(a.c)
            << " stands in for an unspecified universal constant; read the value for shape, not calibration\n";
  return io::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regression in the extremes: simulation, angular ERM comparisons and diagnostics"};
  app.set_version_flag("--version", io::kVersion);
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Write a simulated dataset CSV");
  simulate->add_option("--model", sim_args.model, "additive, multiplicative or combined")->capture_default_str();
  simulate->add_option("--n", sim_args.n, "Rows")->capture_default_str();
  simulate->add_option("--d", sim_args.d, "Dimension")->capture_default_str();
  simulate->add_option("--xi", sim_args.xi, "Logistic dependence in (0, 1]")->capture_default_str();
  simulate->add_option("--alpha", sim_args.alpha, "Pareto tail index of the margins")->capture_default_str();
  simulate->add_option("--sigma", sim_args.sigma, "Noise scale")->capture_default_str();
  simulate->add_option("--beta", sim_args.beta, "Comma-separated coefficients (default U[0,1]^d from the seed)");
  simulate->add_option("--seed", sim_args.seed)->capture_default_str();
  simulate->add_option("--out", sim_args.out)->required();

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run the regime comparison described by a config file");
  run->add_option("--config", run_args.config)->required()->check(CLI::ExistingFile);
  run->add_option("--out-dir", run_args.out_dir)->required();

  StabilityArgs st_args;
  auto* stability = app.add_subcommand("stability", "Stability curves of cell-wise conditional means");
  auto* st_config = stability->add_option("--config", st_args.config, "Simulated-source config");
  auto* st_data = stability->add_option("--data", st_args.data, "Dataset CSV");
  st_config->excludes(st_data);
  stability->add_option("--target", st_args.target, "Response column for --data (default: last)");
  stability->add_option("--p", st_args.p, "Bins per axis")->capture_default_str();
  stability->add_option("--k-max", st_args.k_max)->capture_default_str();
  stability->add_option("--omega-m", st_args.omega_m, "Keep cells holding one of the m largest points")
      ->capture_default_str();
  stability->add_option("--norm", st_args.norm)->capture_default_str();
  stability->add_option("--out", st_args.out)->required();

  HillArgs hill_args;
  auto* hill = app.add_subcommand("hill", "Print the Hill tail-index estimate");
  hill->add_option("--data", hill_args.data)->required();
  auto* hill_col = hill->add_option("--column", hill_args.column, "Column name or index");
  auto* hill_norm = hill->add_option("--norm", hill_args.norm, "Use row norms (l1, l2, linf)");
  hill_col->excludes(hill_norm);
  hill->add_option("--exclude", hill_args.exclude, "Column left out of the norm (e.g. the response)");
  hill->add_option("--k", hill_args.k, "Number of upper order statistics (default floor(sqrt(n)))");

  TransformArgs tr_args;
  auto* transform = app.add_subcommand("transform", "Standardize the margins of a CSV");
  transform->add_option("--data", tr_args.data)->required();
  transform->add_option("--mode", tr_args.mode, "empirical or exact")->capture_default_str();
  transform->add_option("--alpha", tr_args.alpha, "Tail index for --mode exact");
  transform->add_option("--target", tr_args.target, "Column copied through unchanged");
  transform->add_option("--out", tr_args.out)->required();

  BoundArgs b_args;
  auto* bound = app.add_subcommand("bound", "Print the uniform deviation bound");
  bound->add_option("--M", b_args.m, "Bound on |Y|")->capture_default_str();
  bound->add_option("--vc", b_args.vc, "VC dimension")->capture_default_str();
  bound->add_option("--delta", b_args.delta)->capture_default_str();
  bound->add_option("--k", b_args.k)->capture_default_str();
  bound->add_option("--C", b_args.c, "Universal constant")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? io::kExitOk : io::kExitConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(sim_args);
    if (*run) return cmd_run(run_args);
    if (*stability) {
      if (st_args.config.empty() && st_args.data.empty()) throw ConfigError("stability needs --config or --data");
      return cmd_stability(st_args);
    }
    if (*hill) return cmd_hill(hill_args);
    if (*transform) return cmd_transform(tr_args);
    if (*bound) return cmd_bound(b_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return io::kExitConfigError;
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return io::kExitConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return io::kExitDataError;
  } catch (const DomainError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return io::kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitRuntimeFailure;
  }
  return io::kExitRuntimeFailure;
}
