#include "rfkern/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rfkern/csv.hpp"
#include "rfkern/krr.hpp"
#include "rfkern/ssvm.hpp"

namespace rfkern {

const char* method_name(Method m) {
  switch (m) {
    case Method::RF: return "rf";
    case Method::RFKernel: return "rf_kernel";
    case Method::LaplaceKernel: return "laplace";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  std::string n;
  for (char c : name)
    if (c != '_' && c != '-' && c != ' ') n.push_back(static_cast<char>(std::tolower(c)));
  if (n == "rf") return Method::RF;
  if (n == "rfkernel") return Method::RFKernel;
  if (n == "laplace" || n == "laplacekernel" || n == "lkernel") return Method::LaplaceKernel;
  throw DataError("unknown method: " + name);
}

void ScenarioConfig::validate() const {
  if (replicates < 1) throw DataError("replicates must be >= 1");
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
    throw DataError("train_fraction must lie in (0, 1)");
  if (n < 4) throw DataError("n too small to split");
  if (trees < 1) throw DataError("trees must be >= 1");
  if (node_size_multiplier < 1) throw DataError("node_size_multiplier must be >= 1");
  if (methods.empty()) throw DataError("no methods requested");
}

bool ScenarioConfig::has_method(Method m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

namespace {

constexpr std::uint64_t kForestSeedSalt = 0x464f524553544bULL;

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

MetricValue score(TargetKind kind, const Target& truth, const Vector& prediction) {
  switch (kind) {
    case TargetKind::Continuous: return mse(truth.y, prediction);
    case TargetKind::Binary: return accuracy(truth.y, prediction);
    case TargetKind::Survival: return c_index(truth.surv, prediction);
  }
  throw DataError("unknown target kind");
}

// The concordance definition counts a pair when the larger index goes with
// the shorter time; every method's index is aligned on the training split so
// that convention holds uniformly.
Vector orient_by_training(const SurvivalData& train, const Vector& h_train, Vector h_test) {
  try {
    if (c_index(train, h_train).value < 0.5) h_test = -h_test;
  } catch (const NoComparablePairsError&) {
  }
  return h_test;
}

Vector binary_vote_labels(const Vector& vote_fraction) {
  Vector labels(vote_fraction.size());
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    labels[i] = vote_fraction[i] >= 0.5 ? 1.0 : -1.0;
  return labels;
}

struct MethodSettings {
  std::vector<Method> methods;
  TargetKind target = TargetKind::Continuous;
  int trees = 500;
  int node_size_multiplier = 1;
  double laplace_sigma = 1.0;
  double ssvm_cost = 1.0;
  double ssvm_tol = 0.0;
  int ssvm_max_iter = 0;
  std::uint64_t forest_seed = 0;
  int threads = 1;
};

struct MethodOutcome {
  std::optional<double> rf;
  std::optional<double> rf_kernel;
  std::optional<double> laplace;
};

bool wants(const std::vector<Method>& ms, Method m) {
  return std::find(ms.begin(), ms.end(), m) != ms.end();
}

// Fit every requested method on one train split and score it on the test
// rows. Failures surface as empty cells, never as an aborted run.
MethodOutcome evaluate_methods(const FeatureMatrix& X_train, const Target& t_train,
                               const FeatureMatrix& X_test, const Target& t_test,
                               const MethodSettings& s) {
  MethodOutcome out;
  TreeParams params;
  params.min_node_size = default_min_node_size(s.target) * s.node_size_multiplier;

  Forest forest;
  try {
    forest = fit_forest(X_train, t_train, params, s.trees, s.forest_seed, s.threads);
  } catch (const Error& e) {
    std::clog << "forest fit failed: " << e.what() << "\n";
    return out;
  }

  if (wants(s.methods, Method::RF)) {
    try {
      Vector pred = predict_forest(forest, X_test);
      if (s.target == TargetKind::Binary) {
        pred = binary_vote_labels(pred);
      } else if (s.target == TargetKind::Survival) {
        pred = orient_by_training(t_train.surv, predict_forest(forest, X_train), std::move(pred));
      }
      out.rf = score(s.target, t_test, pred).value;
    } catch (const Error& e) {
      std::clog << "rf method failed: " << e.what() << "\n";
    }
  }

  const bool need_rf_kernel = wants(s.methods, Method::RFKernel);
  const bool need_laplace = wants(s.methods, Method::LaplaceKernel);
  if (!need_rf_kernel && !need_laplace) return out;

  auto kernel_model = [&](const KernelMatrix& K_train, const KernelMatrix& K_cross)
      -> std::optional<double> {
    if (s.target == TargetKind::Survival) {
      SsvmModel model = solve_ssvm(K_train, t_train.surv, s.ssvm_cost, s.ssvm_tol, s.ssvm_max_iter);
      Vector h_test = prognostic_index(model, K_cross, t_train.surv);
      Vector h_train = prognostic_index(model, K_train, t_train.surv);
      h_test = orient_by_training(t_train.surv, h_train, std::move(h_test));
      return score(s.target, t_test, h_test).value;
    }
    const double lambda = select_lambda(K_train);
    KrrModel model = fit_krr(K_train, t_train.y, lambda);
    Vector pred = s.target == TargetKind::Binary ? classify_krr(model, K_cross)
                                                 : predict_krr(model, K_cross);
    return score(s.target, t_test, pred).value;
  };

  if (need_rf_kernel) {
    try {
      const KernelMatrix K_train = rf_kernel(forest, X_train);
      const KernelMatrix K_cross = rf_kernel(forest, X_test, X_train);
      out.rf_kernel = kernel_model(K_train, K_cross);
    } catch (const Error& e) {
      std::clog << "rf_kernel method failed: " << e.what() << "\n";
    }
  }
  if (need_laplace) {
    try {
      const KernelMatrix K_train = laplace_kernel(X_train, s.laplace_sigma);
      const KernelMatrix K_cross = laplace_kernel(X_test, X_train, s.laplace_sigma);
      out.laplace = kernel_model(K_train, K_cross);
    } catch (const Error& e) {
      std::clog << "laplace method failed: " << e.what() << "\n";
    }
  }
  return out;
}

GeneratedData generate(const ScenarioConfig& config, Rng& rng) {
  FeatureMatrix X = gen_features(config.setup, config.n, config.p, rng);
  switch (config.target) {
    case TargetKind::Continuous:
      return make_continuous(config.setup, std::move(X), rng, config.noise_reading);
    case TargetKind::Binary:
      return make_binary(config.setup, std::move(X), rng);
    case TargetKind::Survival:
      return make_survival(config.setup, std::move(X), rng, config.baseline_rate,
                           config.censoring_target);
  }
  throw DataError("unknown target kind");
}

struct Split {
  std::vector<int> train;
  std::vector<int> test;
  std::uint64_t hash = 0;
};

Split make_split(Eigen::Index n, double train_fraction, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
  rng.shuffle(idx);
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(n)));
  Split split;
  split.train.assign(idx.begin(), idx.begin() + static_cast<long>(n_train));
  split.test.assign(idx.begin() + static_cast<long>(n_train), idx.end());
  split.hash = fnv1a(split.train.data(), split.train.size() * sizeof(int));
  split.hash = fnv1a(split.test.data(), split.test.size() * sizeof(int), split.hash);
  return split;
}

MethodSettings settings_for(const ScenarioConfig& config, std::uint64_t forest_seed) {
  MethodSettings s;
  s.methods = config.methods;
  s.target = config.target;
  s.trees = config.trees;
  s.node_size_multiplier = config.node_size_multiplier;
  s.laplace_sigma = config.laplace_sigma;
  s.ssvm_cost = config.ssvm_cost;
  s.ssvm_tol = config.ssvm_tol;
  s.ssvm_max_iter = config.ssvm_max_iter;
  s.forest_seed = forest_seed;
  s.threads = 1;  // replicate-level parallelism owns the workers
  return s;
}

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample sd (n-1); a single replicate reports 0 by convention.
std::optional<double> sd_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  if (v.size() == 1) return 0.0;
  const double m = *mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string format_cell(const std::optional<double>& mean, const std::optional<double>& sd) {
  if (!mean || !sd) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f (%.3f)", *mean, *sd);
  return buf;
}

}  // namespace

ReplicateRecord run_replicate(const ScenarioConfig& config, int replicate_index) {
  config.validate();
  ReplicateRecord rec;
  rec.replicate = replicate_index;
  rec.seed = config.base_seed ^ split_mix64(static_cast<std::uint64_t>(replicate_index));

  Rng rng(rec.seed);
  const GeneratedData data = generate(config, rng);
  const Split split = make_split(config.n, config.train_fraction, rng);
  rec.split_hash = split.hash;

  const FeatureMatrix X_train = data.X.select_rows(split.train);
  const FeatureMatrix X_test = data.X.select_rows(split.test);
  const Target t_train = data.target.select(split.train);
  const Target t_test = data.target.select(split.test);

  const std::uint64_t forest_seed = split_mix64(rec.seed ^ kForestSeedSalt);
  const MethodOutcome out =
      evaluate_methods(X_train, t_train, X_test, t_test, settings_for(config, forest_seed));
  rec.rf = out.rf;
  rec.rf_kernel = out.rf_kernel;
  rec.laplace = out.laplace;
  if (rec.rf && rec.rf_kernel) rec.delta_rf = *rec.rf_kernel - *rec.rf;
  return rec;
}

SummaryRow summarize_records(const ScenarioConfig& config,
                             const std::vector<ReplicateRecord>& records) {
  SummaryRow row;
  row.setup = setup_name(config.setup);
  row.n = config.n;
  row.p = config.p;
  row.target = target_kind_name(config.target);
  row.replicates = static_cast<int>(records.size());

  std::vector<double> rf, rfk, lap, delta;
  for (const auto& r : records) {
    if (r.rf) rf.push_back(*r.rf);
    if (r.rf_kernel) rfk.push_back(*r.rf_kernel);
    if (r.laplace) lap.push_back(*r.laplace);
    if (r.delta_rf) delta.push_back(*r.delta_rf);
  }
  row.rf_mean = mean_of(rf);
  row.rf_sd = sd_of(rf);
  row.rfk_mean = mean_of(rfk);
  row.rfk_sd = sd_of(rfk);
  row.lap_mean = mean_of(lap);
  row.lap_sd = sd_of(lap);
  row.delta_mean = mean_of(delta);
  row.delta_sd = sd_of(delta);
  return row;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  ScenarioResult result;
  result.records.resize(static_cast<std::size_t>(config.replicates));
  parallel_for(config.replicates, config.threads,
               [&](int i) { result.records[static_cast<std::size_t>(i)] = run_replicate(config, i); });
  result.summary = summarize_records(config, result.records);
  return result;
}

std::vector<ScenarioResult> run_grid(const std::vector<ScenarioConfig>& configs) {
  std::vector<ScenarioResult> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(run_scenario(c));
  return out;
}

std::vector<ScenarioConfig> full_grid_configs(const ScenarioConfig& base) {
  const Setup setups[] = {Setup::Friedman, Setup::Checkerboard, Setup::Meier1, Setup::Meier2,
                          Setup::VanDerLaan};
  std::vector<ScenarioConfig> out;
  for (Setup s : setups)
    for (int n : {800, 1600})
      for (int p : {20, 40}) {
        ScenarioConfig c = base;
        c.setup = s;
        c.n = n;
        c.p = p;
        out.push_back(c);
      }
  return out;
}

std::string summary_table_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "Setup,n,p,RF,RF kernel,L kernel,Δ_RF\n";
  for (const auto& r : rows) {
    out << r.setup << ',' << r.n << ',' << r.p << ',' << format_cell(r.rf_mean, r.rf_sd) << ','
        << format_cell(r.rfk_mean, r.rfk_sd) << ',' << format_cell(r.lap_mean, r.lap_sd) << ','
        << format_cell(r.delta_mean, r.delta_sd) << "\n";
  }
  return out.str();
}

std::string summary_table_text(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-14s %6s %4s  %-16s %-16s %-16s %-16s\n", "Setup", "n", "p",
                "RF", "RF kernel", "L kernel", "Delta_RF");
  out << line;
  bool single = false;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-14s %6d %4d  %-16s %-16s %-16s %-16s\n", r.setup.c_str(),
                  r.n, r.p, format_cell(r.rf_mean, r.rf_sd).c_str(),
                  format_cell(r.rfk_mean, r.rfk_sd).c_str(),
                  format_cell(r.lap_mean, r.lap_sd).c_str(),
                  format_cell(r.delta_mean, r.delta_sd).c_str());
    out << line;
    if (r.replicates == 1) single = true;
  }
  if (single) out << "note: rows with a single replicate report sd = 0 by convention\n";
  return out.str();
}

std::string replicate_records_csv(const std::string& setup_label, int n, int p, TargetKind target,
                                  const std::vector<ReplicateRecord>& records) {
  std::ostringstream out;
  out << "setup,n,p,target,replicate,seed,split_hash,rf,rf_kernel,laplace,delta_rf\n";
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : "NA"; };
  for (const auto& r : records) {
    out << setup_label << ',' << n << ',' << p << ',' << target_kind_name(target) << ','
        << r.replicate << ',' << r.seed << ',' << r.split_hash << ',' << cell(r.rf) << ','
        << cell(r.rf_kernel) << ',' << cell(r.laplace) << ',' << cell(r.delta_rf) << "\n";
  }
  return out.str();
}

std::string replicate_records_csv(const ScenarioConfig& config,
                                  const std::vector<ReplicateRecord>& records) {
  return replicate_records_csv(setup_name(config.setup), config.n, config.p, config.target,
                               records);
}

namespace {

LabeledDataset dataset_from_table(const CsvTable& table, TargetKind kind) {
  std::vector<long> target_cols;
  switch (kind) {
    case TargetKind::Continuous: {
      const long y = table.column("y");
      if (y < 0) throw SchemaError("continuous data needs a 'y' column");
      target_cols = {y};
      break;
    }
    case TargetKind::Binary: {
      const long l = table.column("label");
      if (l < 0) throw SchemaError("binary data needs a 'label' column");
      target_cols = {l};
      break;
    }
    case TargetKind::Survival: {
      const long t = table.column("time");
      const long e = table.column("event");
      if (t < 0 || e < 0) throw SchemaError("survival data needs 'time' and 'event' columns");
      target_cols = {t, e};
      break;
    }
  }
  if (table.rows() == 0) throw EmptyDataError("dataset has no rows");

  std::vector<long> feature_cols;
  std::vector<std::string> names;
  for (long j = 0; j < static_cast<long>(table.header.size()); ++j) {
    if (std::find(target_cols.begin(), target_cols.end(), j) == target_cols.end()) {
      feature_cols.push_back(j);
      names.push_back(table.header[static_cast<std::size_t>(j)]);
    }
  }
  if (feature_cols.empty()) throw SchemaError("dataset has no feature columns");

  LabeledDataset out;
  Matrix X(table.rows(), static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t j = 0; j < feature_cols.size(); ++j)
    X.col(static_cast<Eigen::Index>(j)) = table.values.col(feature_cols[j]);
  out.X = FeatureMatrix(std::move(X), std::move(names));

  switch (kind) {
    case TargetKind::Continuous:
      out.target = Target::continuous(table.values.col(target_cols[0]));
      break;
    case TargetKind::Binary:
      out.target = Target::binary(table.values.col(target_cols[0]));
      break;
    case TargetKind::Survival: {
      SurvivalData sd;
      sd.time = table.values.col(target_cols[0]);
      sd.event.resize(static_cast<std::size_t>(table.rows()));
      for (Eigen::Index i = 0; i < table.rows(); ++i) {
        const double e = table.values(i, target_cols[1]);
        if (e != 0.0 && e != 1.0) throw DataError("column 'event' must contain only 0 or 1");
        sd.event[static_cast<std::size_t>(i)] = static_cast<int>(e);
      }
      sd.validate();
      if (std::count(sd.event.begin(), sd.event.end(), 1) == 0)
        throw AllCensoredError("column 'event' marks every row censored");
      out.target = Target::survival(std::move(sd));
      break;
    }
  }
  return out;
}

}  // namespace

LabeledDataset load_dataset_csv(const std::string& path, TargetKind kind) {
  return dataset_from_table(read_numeric_csv(path), kind);
}

CsvEvalResult evaluate_csv(const CsvEvalConfig& config) {
  if (config.repeats < 1) throw DataError("repeats must be >= 1");
  const CsvTable train_table = read_numeric_csv(config.train_path);
  const LabeledDataset train_all = dataset_from_table(train_table, config.target);

  MethodSettings s;
  s.methods = config.methods;
  s.target = config.target;
  s.trees = config.trees;
  s.node_size_multiplier = config.node_size_multiplier;
  s.laplace_sigma = config.laplace_sigma;
  s.ssvm_cost = config.ssvm_cost;
  s.ssvm_tol = config.ssvm_tol;
  s.ssvm_max_iter = config.ssvm_max_iter;
  s.threads = 1;

  CsvEvalResult result;

  if (!config.test_path.empty()) {
    const CsvTable test_table = read_numeric_csv(config.test_path);
    if (test_table.header != train_table.header)
      throw SchemaError("train and test files have different columns");
    const LabeledDataset test = dataset_from_table(test_table, config.target);
    ReplicateRecord rec;
    rec.replicate = 0;
    rec.seed = config.base_seed;
    s.forest_seed = split_mix64(config.base_seed ^ kForestSeedSalt);
    const MethodOutcome out =
        evaluate_methods(train_all.X, train_all.target, test.X, test.target, s);
    rec.rf = out.rf;
    rec.rf_kernel = out.rf_kernel;
    rec.laplace = out.laplace;
    if (rec.rf && rec.rf_kernel) rec.delta_rf = *rec.rf_kernel - *rec.rf;
    result.records.push_back(rec);
  } else {
    if (!(config.train_fraction > 0.0) || !(config.train_fraction < 1.0))
      throw DataError("train_fraction must lie in (0, 1)");
    result.records.resize(static_cast<std::size_t>(config.repeats));
    parallel_for(config.repeats, config.threads, [&](int r) {
      ReplicateRecord rec;
      rec.replicate = r;
      rec.seed = config.base_seed ^ split_mix64(static_cast<std::uint64_t>(r));
      Rng rng(rec.seed);
      const Split split = make_split(train_all.X.rows(), config.train_fraction, rng);
      rec.split_hash = split.hash;
      MethodSettings local = s;
      local.forest_seed = split_mix64(rec.seed ^ kForestSeedSalt);
      const MethodOutcome out = evaluate_methods(
          train_all.X.select_rows(split.train), train_all.target.select(split.train),
          train_all.X.select_rows(split.test), train_all.target.select(split.test), local);
      rec.rf = out.rf;
      rec.rf_kernel = out.rf_kernel;
      rec.laplace = out.laplace;
      if (rec.rf && rec.rf_kernel) rec.delta_rf = *rec.rf_kernel - *rec.rf;
      result.records[static_cast<std::size_t>(r)] = rec;
    });
  }

  ScenarioConfig pseudo;
  pseudo.n = static_cast<int>(train_all.X.rows());
  pseudo.p = static_cast<int>(train_all.X.cols());
  pseudo.target = config.target;
  result.summary = summarize_records(pseudo, result.records);
  result.summary.setup = std::filesystem::path(config.train_path).stem().string();
  return result;
}

void export_kernel_figure_data(const KernelFigureConfig& config) {
  const CsvTable table = read_numeric_csv(config.data_path);
  const long label_col = table.column(config.label_column);
  if (label_col < 0) throw SchemaError("missing label column '" + config.label_column + "'");

  std::vector<std::string> names;
  std::vector<long> feature_cols;
  for (long j = 0; j < static_cast<long>(table.header.size()); ++j)
    if (j != label_col) {
      feature_cols.push_back(j);
      names.push_back(table.header[static_cast<std::size_t>(j)]);
    }
  if (feature_cols.empty()) throw SchemaError("dataset has no feature columns");
  if (table.rows() < 3) throw EmptyDataError("need at least 3 rows");

  Matrix Xv(table.rows(), static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t j = 0; j < feature_cols.size(); ++j)
    Xv.col(static_cast<Eigen::Index>(j)) = table.values.col(feature_cols[j]);
  const FeatureMatrix X(std::move(Xv), std::move(names));

  // Class ids from the distinct label values.
  std::vector<double> levels;
  for (Eigen::Index i = 0; i < table.rows(); ++i) levels.push_back(table.values(i, label_col));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<int> class_ids(static_cast<std::size_t>(table.rows()));
  for (Eigen::Index i = 0; i < table.rows(); ++i)
    class_ids[static_cast<std::size_t>(i)] = static_cast<int>(
        std::lower_bound(levels.begin(), levels.end(), table.values(i, label_col)) - levels.begin());

  const Target target = Target::classification(table.values.col(label_col));
  TreeParams params;
  const Forest forest = fit_forest(X, target, params, config.trees, config.seed, config.threads);

  std::filesystem::create_directories(config.out_dir);
  const auto out_path = [&](const std::string& f) {
    return (std::filesystem::path(config.out_dir) / f).string();
  };

  std::vector<std::string> kernel_names;
  std::vector<KernelMatrix> kernels;
  kernels.push_back(rf_kernel(forest, X));
  kernel_names.push_back("rf");
  for (double sigma : config.sigmas) {
    kernels.push_back(laplace_kernel(X, sigma));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "laplace_%g", sigma);
    kernel_names.push_back(buf);
  }

  for (std::size_t k = 0; k < kernels.size(); ++k)
    save_kernel_csv(kernels[k], out_path("kernel_" + kernel_names[k] + ".csv"));

  // Pairwise Mantel statistics over all emitted kernels.
  {
    std::ofstream out(out_path("mantel_grid.csv"), std::ios::binary);
    if (!out) throw DataError("cannot write mantel_grid.csv");
    out << "kernel";
    for (const auto& n : kernel_names) out << ',' << n;
    out << "\n";
    for (std::size_t a = 0; a < kernels.size(); ++a) {
      out << kernel_names[a];
      for (std::size_t b = 0; b < kernels.size(); ++b)
        out << ',' << format_double(mantel_statistic(kernels[a], kernels[b]));
      out << "\n";
    }
  }

  {
    std::ofstream out(out_path("histograms.csv"), std::ios::binary);
    if (!out) throw DataError("cannot write histograms.csv");
    out << "kernel,bin_lo,bin_hi,same_class,cross_class\n";
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      const PairHistogram h = kernel_value_histogram(kernels[k], class_ids, config.bins);
      for (std::size_t b = 0; b + 1 < h.bin_edges.size(); ++b)
        out << kernel_names[k] << ',' << format_double(h.bin_edges[b]) << ','
            << format_double(h.bin_edges[b + 1]) << ',' << h.same_class[b] << ','
            << h.cross_class[b] << "\n";
    }
  }
}

void write_dataset_csv(const GeneratedData& data, const std::string& path) {
  std::vector<std::string> header = data.X.names;
  Matrix values;
  switch (data.kind) {
    case TargetKind::Continuous:
      header.push_back("y");
      values.resize(data.X.rows(), data.X.cols() + 1);
      values << data.X.values, data.target.y;
      break;
    case TargetKind::Binary:
      header.push_back("label");
      values.resize(data.X.rows(), data.X.cols() + 1);
      values << data.X.values, data.target.y;
      break;
    case TargetKind::Survival: {
      header.push_back("time");
      header.push_back("event");
      Vector ev(data.X.rows());
      for (Eigen::Index i = 0; i < ev.size(); ++i)
        ev[i] = data.target.surv.event[static_cast<std::size_t>(i)];
      values.resize(data.X.rows(), data.X.cols() + 2);
      values << data.X.values, data.target.surv.time, ev;
      break;
    }
  }
  write_numeric_csv(path, header, values);

  nlohmann::json meta;
  meta["setup"] = setup_name(data.setup);
  meta["target"] = target_kind_name(data.kind);
  meta["rows"] = data.X.rows();
  meta["features"] = data.X.cols();
  meta["noise_sd"] = data.noise_sd;
  meta["median_m"] = data.median_m;
  if (data.kind == TargetKind::Survival) {
    meta["baseline_rate"] = data.baseline_rate;
    meta["censoring_target"] = data.censoring_target;
    meta["censoring_achieved"] = data.censoring_achieved;
    meta["censoring_rate_param"] = data.censoring_rate_param;
  }
  std::ofstream out(path + ".meta.json", std::ios::binary);
  if (!out) throw DataError("cannot write metadata sidecar for " + path);
  out << meta.dump(2) << "\n";
}

}  // namespace rfkern
