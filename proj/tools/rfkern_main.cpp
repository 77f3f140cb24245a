// Command-line front end: simulate, bench, bayes-error, eval-csv,
// kernel-fig, export-kernel. Exit codes: 0 success, 1 usage error,
// 2 data error, 3 numeric failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rfkern/csv.hpp"
#include "rfkern/harness.hpp"
#include "rfkern/krr.hpp"
#include "rfkern/ssvm.hpp"

namespace {

using namespace rfkern;

TargetKind parse_target(const std::string& s) {
  if (s == "continuous") return TargetKind::Continuous;
  if (s == "binary") return TargetKind::Binary;
  if (s == "survival") return TargetKind::Survival;
  throw CLI::ValidationError("--target", "must be continuous, binary, or survival");
}

// Bad option values are usage errors, not data errors.
Setup parse_setup(const std::string& s) {
  try {
    return setup_from_name(s);
  } catch (const DataError& e) {
    throw CLI::ValidationError("--setup", e.what());
  }
}

std::vector<Method> parse_methods(const std::string& csv) {
  std::vector<Method> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(method_from_name(item));
    } catch (const DataError& e) {
      throw CLI::ValidationError("--methods", e.what());
    }
  }
  if (out.empty()) throw CLI::ValidationError("--methods", "no methods given");
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << text;
}

struct BenchArgs {
  std::string setup = "friedman";
  int n = 800;
  int p = 20;
  std::string target = "continuous";
  int replicates = 20;
  std::string methods = "rf,rf_kernel,laplace";
  bool node_size_x2 = false;
  bool full_grid = false;
  std::uint64_t seed = 1;
  int trees = 500;
  int threads = 1;
  double train_fraction = 0.75;
  double censoring = 0.3;
  double ssvm_cost = 1.0;
  double ssvm_tol = 0.0;
  int ssvm_max_iter = 0;
  std::string noise_reading = "sd";
  std::string out_dir;
};

ScenarioConfig to_config(const BenchArgs& a) {
  ScenarioConfig c;
  c.setup = parse_setup(a.setup);
  c.n = a.n;
  c.p = a.p;
  c.target = parse_target(a.target);
  c.replicates = a.replicates;
  c.methods = parse_methods(a.methods);
  c.node_size_multiplier = a.node_size_x2 ? 2 : 1;
  c.base_seed = a.seed;
  c.trees = a.trees;
  c.threads = a.threads;
  c.train_fraction = a.train_fraction;
  c.censoring_target = a.censoring;
  c.ssvm_cost = a.ssvm_cost;
  c.ssvm_tol = a.ssvm_tol;
  c.ssvm_max_iter = a.ssvm_max_iter;
  if (a.noise_reading == "variance")
    c.noise_reading = NoiseReading::Variance;
  else if (a.noise_reading == "sd")
    c.noise_reading = NoiseReading::StdDev;
  else
    throw CLI::ValidationError("--noise-reading", "must be variance or sd");
  return c;
}

int run_bench(const BenchArgs& args) {
  const ScenarioConfig base = to_config(args);
  std::vector<ScenarioConfig> configs;
  if (args.full_grid)
    configs = full_grid_configs(base);
  else
    configs.push_back(base);

  std::vector<SummaryRow> rows;
  std::ostringstream records;
  bool first = true;
  for (const auto& cfg : configs) {
    const ScenarioResult res = run_scenario(cfg);
    rows.push_back(res.summary);
    std::string rec = replicate_records_csv(cfg, res.records);
    if (!first) rec.erase(0, rec.find('\n') + 1);  // keep one header
    records << rec;
    first = false;
  }

  const std::string text = summary_table_text(rows);
  std::cout << text;
  if (!args.out_dir.empty()) {
    std::filesystem::create_directories(args.out_dir);
    write_file(args.out_dir + "/summary.csv", summary_table_csv(rows));
    write_file(args.out_dir + "/summary.txt", text);
    write_file(args.out_dir + "/replicates.csv", records.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-forest kernel benchmark toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset as CSV");
  std::string sim_setup = "friedman", sim_target = "continuous", sim_out = "data.csv";
  std::string sim_noise = "sd";
  int sim_n = 800, sim_p = 20;
  std::uint64_t sim_seed = 1;
  double sim_cens = 0.3, sim_rate = 1.0;
  sim->add_option("--setup", sim_setup, "friedman|checkerboard|vanderlaan|meier1|meier2");
  sim->add_option("--n", sim_n, "rows");
  sim->add_option("--p", sim_p, "features");
  sim->add_option("--target", sim_target, "continuous|binary|survival");
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_option("--censoring", sim_cens, "survival target censoring fraction");
  sim->add_option("--baseline-rate", sim_rate, "survival baseline hazard rate");
  sim->add_option("--noise-reading", sim_noise, "variance|sd reading of N(0,0.5)");
  sim->add_option("--out", sim_out, "output CSV path");

  // bench
  auto* bench = app.add_subcommand("bench", "run a simulation scenario or the full grid");
  BenchArgs ba;
  bench->add_option("--setup", ba.setup, "generative setup");
  bench->add_option("--n", ba.n, "sample count");
  bench->add_option("--p", ba.p, "feature count");
  bench->add_option("--target", ba.target, "continuous|binary|survival");
  bench->add_option("--replicates", ba.replicates, "replicates per cell");
  bench->add_option("--methods", ba.methods, "comma list: rf,rf_kernel,laplace");
  bench->add_flag("--node-size-x2", ba.node_size_x2, "double the minimum terminal node size");
  bench->add_flag("--grid", ba.full_grid, "run all five setups x four (n,p) cells");
  bench->add_option("--seed", ba.seed, "base seed");
  bench->add_option("--trees", ba.trees, "trees per forest");
  bench->add_option("--threads", ba.threads, "worker threads over replicates");
  bench->add_option("--train-fraction", ba.train_fraction, "training split fraction");
  bench->add_option("--censoring", ba.censoring, "survival censoring target");
  bench->add_option("--ssvm-cost", ba.ssvm_cost, "SSVM box constraint C");
  bench->add_option("--ssvm-tol", ba.ssvm_tol, "SSVM projected-gradient tolerance");
  bench->add_option("--ssvm-max-iter", ba.ssvm_max_iter, "SSVM iteration cap");
  bench->add_option("--noise-reading", ba.noise_reading, "variance|sd");
  bench->add_option("--out", ba.out_dir, "output directory");

  // bayes-error
  auto* bayes = app.add_subcommand("bayes-error", "Monte Carlo Bayes error of the dichotomized setups");
  std::string bayes_setup = "all";
  long bayes_samples = 1000000;
  bayes->add_option("--setup", bayes_setup, "setup name or 'all'");
  bayes->add_option("--samples", bayes_samples, "Monte Carlo draws");

  // eval-csv
  auto* ev = app.add_subcommand("eval-csv", "evaluate the methods on a user CSV");
  CsvEvalConfig ec;
  std::string ev_target = "continuous", ev_methods = "rf,rf_kernel,laplace", ev_out;
  ev->add_option("--train", ec.train_path, "training CSV")->required();
  ev->add_option("--test", ec.test_path, "test CSV (omit to use random splits)");
  ev->add_option("--target", ev_target, "continuous|binary|survival");
  ev->add_option("--methods", ev_methods, "comma list");
  ev->add_option("--repeats", ec.repeats, "random-split repetitions");
  ev->add_option("--train-fraction", ec.train_fraction, "split fraction");
  ev->add_option("--seed", ec.base_seed, "base seed");
  ev->add_option("--trees", ec.trees, "trees per forest");
  ev->add_option("--threads", ec.threads, "worker threads");
  ev->add_flag_callback("--node-size-x2", [&ec] { ec.node_size_multiplier = 2; },
                        "double the minimum terminal node size");
  ev->add_option("--ssvm-cost", ec.ssvm_cost, "SSVM box constraint C");
  ev->add_option("--ssvm-tol", ec.ssvm_tol, "SSVM tolerance");
  ev->add_option("--ssvm-max-iter", ec.ssvm_max_iter, "SSVM iteration cap");
  ev->add_option("--out", ev_out, "output directory");

  // kernel-fig
  auto* fig = app.add_subcommand("kernel-fig", "export kernel comparison data for a labeled CSV");
  KernelFigureConfig fc;
  std::string fig_sigmas = "0.5,1,2,4";
  fig->add_option("--data", fc.data_path, "labeled CSV")->required();
  fig->add_option("--label-col", fc.label_column, "label column name");
  fig->add_option("--sigmas", fig_sigmas, "comma list of Laplace sigmas");
  fig->add_option("--trees", fc.trees, "trees per forest");
  fig->add_option("--seed", fc.seed, "forest seed");
  fig->add_option("--bins", fc.bins, "histogram bins");
  fig->add_option("--threads", fc.threads, "worker threads");
  fig->add_option("--out", fc.out_dir, "output directory")->required();

  // export-kernel
  auto* ex = app.add_subcommand("export-kernel", "compute and save a kernel matrix");
  std::string ex_data, ex_target = "continuous", ex_kernel = "rf", ex_format = "bin", ex_out;
  std::string ex_forest_out;
  double ex_sigma = 1.0;
  int ex_trees = 500, ex_threads = 1;
  std::uint64_t ex_seed = 1;
  ex->add_option("--data", ex_data, "dataset CSV (features + target columns)")->required();
  ex->add_option("--target", ex_target, "continuous|binary|survival");
  ex->add_option("--kernel", ex_kernel, "rf|laplace");
  ex->add_option("--sigma", ex_sigma, "Laplace sigma");
  ex->add_option("--trees", ex_trees, "trees per forest");
  ex->add_option("--seed", ex_seed, "forest seed");
  ex->add_option("--threads", ex_threads, "worker threads");
  ex->add_option("--format", ex_format, "csv|bin");
  ex->add_option("--out", ex_out, "output path")->required();
  ex->add_option("--save-forest", ex_forest_out, "also save the fitted forest as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      Rng rng(sim_seed);
      const Setup setup = parse_setup(sim_setup);
      FeatureMatrix X = gen_features(setup, sim_n, sim_p, rng);
      GeneratedData data;
      const TargetKind kind = parse_target(sim_target);
      const NoiseReading reading =
          sim_noise == "sd" ? NoiseReading::StdDev : NoiseReading::Variance;
      switch (kind) {
        case TargetKind::Continuous:
          data = make_continuous(setup, std::move(X), rng, reading);
          break;
        case TargetKind::Binary: data = make_binary(setup, std::move(X), rng); break;
        case TargetKind::Survival:
          data = make_survival(setup, std::move(X), rng, sim_rate, sim_cens);
          break;
      }
      write_dataset_csv(data, sim_out);
      std::cout << "wrote " << sim_out << " and " << sim_out << ".meta.json\n";
      return 0;
    }

    if (bench->parsed()) return run_bench(ba);

    if (bayes->parsed()) {
      std::vector<Setup> setups;
      if (bayes_setup == "all")
        setups.assign(std::begin(kAllSetups), std::end(kAllSetups));
      else
        setups.push_back(parse_setup(bayes_setup));
      std::cout << "setup,bayes_error\n";
      for (Setup s : setups)
        std::cout << setup_name(s) << ',' << format_double(bayes_error(s, bayes_samples)) << "\n";
      return 0;
    }

    if (ev->parsed()) {
      ec.target = parse_target(ev_target);
      ec.methods = parse_methods(ev_methods);
      const CsvEvalResult res = evaluate_csv(ec);
      std::cout << summary_table_text({res.summary});
      if (!ev_out.empty()) {
        std::filesystem::create_directories(ev_out);
        write_file(ev_out + "/summary.csv", summary_table_csv({res.summary}));
        write_file(ev_out + "/replicates.csv",
                   replicate_records_csv(res.summary.setup, res.summary.n, res.summary.p,
                                         ec.target, res.records));
      }
      return 0;
    }

    if (fig->parsed()) {
      fc.sigmas.clear();
      std::stringstream ss(fig_sigmas);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) fc.sigmas.push_back(std::stod(item));
      export_kernel_figure_data(fc);
      std::cout << "wrote kernel data to " << fc.out_dir << "\n";
      return 0;
    }

    if (ex->parsed()) {
      const LabeledDataset data = load_dataset_csv(ex_data, parse_target(ex_target));
      KernelMatrix K;
      if (ex_kernel == "laplace") {
        K = laplace_kernel(data.X, ex_sigma);
      } else if (ex_kernel == "rf") {
        const Forest forest =
            fit_forest(data.X, data.target, TreeParams{}, ex_trees, ex_seed, ex_threads);
        K = rf_kernel(forest, data.X);
        if (!ex_forest_out.empty()) save_forest(forest, ex_forest_out);
      } else {
        throw CLI::ValidationError("--kernel", "must be rf or laplace");
      }
      if (ex_format == "csv")
        save_kernel_csv(K, ex_out);
      else
        save_kernel_binary(K, ex_out);
      std::cout << "wrote " << ex_out << "\n";
      return 0;
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
