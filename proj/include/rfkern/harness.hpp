#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rfkern/forest.hpp"
#include "rfkern/kernels.hpp"
#include "rfkern/metrics.hpp"
#include "rfkern/simgen.hpp"
#include "rfkern/types.hpp"

namespace rfkern {

enum class Method { RF, RFKernel, LaplaceKernel };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

inline std::vector<Method> all_methods() {
  return {Method::RF, Method::RFKernel, Method::LaplaceKernel};
}

struct ScenarioConfig {
  Setup setup = Setup::Friedman;
  int n = 800;
  int p = 20;
  TargetKind target = TargetKind::Continuous;
  int replicates = 20;
  double train_fraction = 0.75;
  std::vector<Method> methods = all_methods();
  int node_size_multiplier = 1;
  std::uint64_t base_seed = 1;
  int trees = 500;
  double laplace_sigma = 1.0;
  double censoring_target = 0.3;
  double baseline_rate = 1.0;
  double ssvm_cost = 1.0;
  double ssvm_tol = 0.0;    // 0 = solver default
  int ssvm_max_iter = 0;    // 0 = solver default
  NoiseReading noise_reading = NoiseReading::StdDev;
  int threads = 1;

  void validate() const;
  bool has_method(Method m) const;
};

// One replicate's metric per method; a failed method leaves an empty cell
// instead of aborting the run.
struct ReplicateRecord {
  int replicate = 0;
  std::uint64_t seed = 0;
  std::uint64_t split_hash = 0;
  std::optional<double> rf;
  std::optional<double> rf_kernel;
  std::optional<double> laplace;
  std::optional<double> delta_rf;  // rf_kernel - rf, paired
};

struct SummaryRow {
  std::string setup;
  int n = 0;
  int p = 0;
  std::string target;
  int replicates = 0;
  std::optional<double> rf_mean, rf_sd;
  std::optional<double> rfk_mean, rfk_sd;
  std::optional<double> lap_mean, lap_sd;
  std::optional<double> delta_mean, delta_sd;  // from paired per-replicate differences
};

struct ScenarioResult {
  SummaryRow summary;
  std::vector<ReplicateRecord> records;
};

// Seeds derive from base_seed XOR a mixed replicate index, so any subset of
// replicates reproduces independently of execution order.
ReplicateRecord run_replicate(const ScenarioConfig& config, int replicate_index);

ScenarioResult run_scenario(const ScenarioConfig& config);

std::vector<ScenarioResult> run_grid(const std::vector<ScenarioConfig>& configs);

// The benchmark's 20-row grid: five setups x {800,1600} x {20,40}.
std::vector<ScenarioConfig> full_grid_configs(const ScenarioConfig& base);

// Summary table in the published schema, cells formatted "mean (sd)" to
// three decimals; and an aligned plain-text rendering of the same rows.
std::string summary_table_csv(const std::vector<SummaryRow>& rows);
std::string summary_table_text(const std::vector<SummaryRow>& rows);
std::string replicate_records_csv(const std::string& setup_label, int n, int p, TargetKind target,
                                  const std::vector<ReplicateRecord>& records);
std::string replicate_records_csv(const ScenarioConfig& config,
                                  const std::vector<ReplicateRecord>& records);

SummaryRow summarize_records(const ScenarioConfig& config,
                             const std::vector<ReplicateRecord>& records);

// Generic CSV evaluation: the run_replicate pipeline applied to user data,
// either against a fixed test file or over repeated random splits.
struct CsvEvalConfig {
  std::string train_path;
  std::string test_path;  // empty = random splits of the training file
  TargetKind target = TargetKind::Continuous;
  std::vector<Method> methods = all_methods();
  int repeats = 5;
  double train_fraction = 0.75;
  std::uint64_t base_seed = 1;
  int trees = 500;
  int node_size_multiplier = 1;
  double laplace_sigma = 1.0;
  double ssvm_cost = 1.0;
  double ssvm_tol = 0.0;
  int ssvm_max_iter = 0;
  int threads = 1;
};

struct CsvEvalResult {
  std::vector<ReplicateRecord> records;
  SummaryRow summary;
};

CsvEvalResult evaluate_csv(const CsvEvalConfig& config);

// Features plus target parsed from a CSV in the documented schema: target
// columns y (continuous), label (binary), or time,event (survival); every
// other column is a feature.
struct LabeledDataset {
  FeatureMatrix X;
  Target target;
};

LabeledDataset load_dataset_csv(const std::string& path, TargetKind kind);

// Kernel comparison data for a labeled dataset: the RF kernel, Laplace
// kernels over a sigma list, their pairwise Mantel statistics, and
// same-class / cross-class value histograms. Everything lands in out_dir as
// CSV files for external plotting.
struct KernelFigureConfig {
  std::string data_path;
  std::string label_column = "label";
  std::vector<double> sigmas = {0.5, 1.0, 2.0, 4.0};
  int trees = 500;
  std::uint64_t seed = 1;
  int bins = 20;
  int threads = 1;
  std::string out_dir = ".";
};

void export_kernel_figure_data(const KernelFigureConfig& config);

// Dataset emission for the simulate subcommand: features x1..xp plus the
// target columns (y / label / time,event) and a JSON metadata sidecar.
void write_dataset_csv(const GeneratedData& data, const std::string& path);

}  // namespace rfkern
