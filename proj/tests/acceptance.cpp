// Acceptance suite: runs every published reproduction target end to end and
// prints one PASS/FAIL line per criterion. Exits non-zero if any fail.
//
// Usage: acceptance [--cli <path-to-rfkern-binary>] [--only N[,N...]]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rfkern/harness.hpp"
#include "rfkern/krr.hpp"
#include "rfkern/metrics.hpp"
#include "rfkern/ssvm.hpp"

using namespace rfkern;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Scenario summaries reused across criteria, keyed by a readable tag.
std::map<std::string, SummaryRow> g_rows;

const SummaryRow& scenario(const std::string& tag, const ScenarioConfig& config) {
  auto it = g_rows.find(tag);
  if (it != g_rows.end()) return it->second;
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioResult res = run_scenario(config);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "  [cell] " << tag << " done in " << fmt(secs) << "s: RF "
            << (res.summary.rf_mean ? fmt(*res.summary.rf_mean) : "NA") << ", RF kernel "
            << (res.summary.rfk_mean ? fmt(*res.summary.rfk_mean) : "NA") << ", Laplace "
            << (res.summary.lap_mean ? fmt(*res.summary.lap_mean) : "NA") << ", delta "
            << (res.summary.delta_mean ? fmt(*res.summary.delta_mean) : "NA") << std::endl;
  return g_rows.emplace(tag, res.summary).first->second;
}

ScenarioConfig cell(Setup s, int n, int p, TargetKind kind) {
  ScenarioConfig c;
  c.setup = s;
  c.n = n;
  c.p = p;
  c.target = kind;
  c.replicates = 20;
  c.trees = 500;
  c.base_seed = 1;
  return c;
}

std::string cell_tag(const ScenarioConfig& c) {
  std::ostringstream out;
  out << setup_name(c.setup) << '/' << c.n << '/' << c.p << '/' << target_kind_name(c.target)
      << (c.node_size_multiplier == 2 ? "/x2" : "");
  return out.str();
}

// ---- criterion 1 -----------------------------------------------------------

Outcome criterion_bayes_error() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const struct {
    Setup setup;
    double expected;
  } targets[] = {{Setup::Friedman, 0.02},
                 {Setup::Checkerboard, 0.18},
                 {Setup::VanDerLaan, 0.34},
                 {Setup::Meier1, 0.28},
                 {Setup::Meier2, 0.19}};
  for (const auto& t : targets) {
    const double got = bayes_error(t.setup, 1000000);
    out.require(std::fabs(got - t.expected) <= 0.01,
                std::string(setup_name(t.setup)) + " bayes error " + fmt(got) + " vs " +
                    fmt(t.expected) + " +-0.01");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < 120.0, "runtime " + fmt(secs) + "s exceeds the 2 minute budget");
  return out;
}

// ---- criteria 2 and 3 ------------------------------------------------------

Outcome criterion_delta_signs() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  for (Setup s : {Setup::Friedman, Setup::Meier2}) {
    std::map<std::pair<int, int>, double> delta;
    for (int n : {800, 1600})
      for (int p : {20, 40}) {
        const ScenarioConfig c = cell(s, n, p, TargetKind::Continuous);
        const SummaryRow& row = scenario(cell_tag(c), c);
        out.require(row.delta_mean.has_value(), cell_tag(c) + " missing delta");
        if (!row.delta_mean) continue;
        delta[{n, p}] = *row.delta_mean;
        out.require(*row.delta_mean < 0.0,
                    cell_tag(c) + " delta " + fmt(*row.delta_mean) + " not negative");
      }
    for (int n : {800, 1600}) {
      if (!delta.count({n, 20}) || !delta.count({n, 40})) continue;
      out.require(std::fabs(delta[{n, 40}]) > std::fabs(delta[{n, 20}]),
                  std::string(setup_name(s)) + " n=" + std::to_string(n) +
                      ": |delta(p=40)|=" + fmt(std::fabs(delta[{n, 40}])) +
                      " not > |delta(p=20)|=" + fmt(std::fabs(delta[{n, 20}])));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < 1800.0, "runtime " + fmt(secs) + "s exceeds the 30 minute budget");
  return out;
}

Outcome criterion_absolute_bands() {
  Outcome out;
  const ScenarioConfig c = cell(Setup::Friedman, 800, 20, TargetKind::Continuous);
  const SummaryRow& row = scenario(cell_tag(c), c);
  out.require(row.rf_mean && *row.rf_mean >= 5.5 && *row.rf_mean <= 8.5,
              "RF MSE " + (row.rf_mean ? fmt(*row.rf_mean) : "NA") + " outside [5.5, 8.5]");
  out.require(row.rfk_mean && *row.rfk_mean >= 4.0 && *row.rfk_mean <= 6.5,
              "RF-kernel MSE " + (row.rfk_mean ? fmt(*row.rfk_mean) : "NA") +
                  " outside [4.0, 6.5]");
  return out;
}

// ---- criterion 4 -----------------------------------------------------------

Outcome criterion_binary() {
  Outcome out;
  const ScenarioConfig c = cell(Setup::Friedman, 1600, 20, TargetKind::Binary);
  const SummaryRow& row = scenario(cell_tag(c), c);
  out.require(row.rf_mean && *row.rf_mean >= 0.85 && *row.rf_mean <= 0.91,
              "RF accuracy " + (row.rf_mean ? fmt(*row.rf_mean) : "NA") + " outside [0.85, 0.91]");
  out.require(row.rfk_mean && *row.rfk_mean >= 0.85 && *row.rfk_mean <= 0.91,
              "RF-kernel accuracy " + (row.rfk_mean ? fmt(*row.rfk_mean) : "NA") +
                  " outside [0.85, 0.91]");
  out.require(row.delta_mean && std::fabs(*row.delta_mean) < 0.02,
              "|delta| " + (row.delta_mean ? fmt(std::fabs(*row.delta_mean)) : "NA") +
                  " not < 0.02");
  return out;
}

// ---- criterion 5 -----------------------------------------------------------

Outcome criterion_survival() {
  Outcome out;
  const ScenarioConfig c = cell(Setup::Meier2, 800, 20, TargetKind::Survival);
  const SummaryRow& row = scenario(cell_tag(c), c);
  out.require(row.delta_mean && *row.delta_mean > 0.0,
              "delta C-index " + (row.delta_mean ? fmt(*row.delta_mean) : "NA") +
                  " not positive");
  out.require(row.rf_mean && row.rfk_mean && row.lap_mean, "missing method cells");
  if (row.rf_mean && row.rfk_mean && row.lap_mean) {
    out.require(*row.lap_mean > *row.rf_mean && *row.lap_mean > *row.rfk_mean,
                "Laplace C " + fmt(*row.lap_mean) + " does not exceed RF " + fmt(*row.rf_mean) +
                    " and RF-kernel " + fmt(*row.rfk_mean));
    out.require(std::fabs(*row.rf_mean - 0.766) <= 0.08,
                "RF C " + fmt(*row.rf_mean) + " outside 0.766 +-0.08");
    out.require(std::fabs(*row.rfk_mean - 0.790) <= 0.08,
                "RF-kernel C " + fmt(*row.rfk_mean) + " outside 0.790 +-0.08");
    out.require(std::fabs(*row.lap_mean - 0.814) <= 0.08,
                "Laplace C " + fmt(*row.lap_mean) + " outside 0.814 +-0.08");
  }
  return out;
}

// ---- criterion 6 -----------------------------------------------------------

Outcome criterion_cindex_oracle() {
  Outcome out;
  Rng rng(606);
  int checked = 0;
  while (checked < 500) {
    const int n = 2 + static_cast<int>(rng.uniform_index(11));
    SurvivalData d;
    d.time.resize(n);
    d.event.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      d.time[i] = 0.1 + std::floor(rng.uniform() * 8.0) / 2.0;  // frequent ties
      d.event[static_cast<std::size_t>(i)] = rng.uniform() < 0.6 ? 1 : 0;
    }
    Vector h(n);
    for (int i = 0; i < n; ++i) h[i] = std::round(rng.normal() * 3.0) / 3.0;
    const auto oracle = testing::c_index_oracle(d, h);
    if (oracle.comparable == 0) {
      bool threw = false;
      try {
        c_index(d, h);
      } catch (const NoComparablePairsError&) {
        threw = true;
      }
      out.require(threw, "missing NoComparablePairs error");
      continue;
    }
    const MetricValue got = c_index(d, h);
    const double expected = oracle.concordant / static_cast<double>(oracle.comparable);
    out.require(got.value == expected && got.n_pairs_comparable == oracle.comparable,
                "instance " + std::to_string(checked) + ": got " + fmt(got.value) + " expected " +
                    fmt(expected));
    ++checked;
    if (!out.pass) break;
  }
  return out;
}

// ---- criterion 7 -----------------------------------------------------------

Outcome criterion_ssvm_solver() {
  Outcome out;
  Rng rng(707);

  auto random_psd = [&](int n) {
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    return Matrix(A * A.transpose() / n);
  };
  auto random_data = [&](int n) {
    SurvivalData d;
    d.time.resize(n);
    d.event.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      d.time[i] = 0.2 + 2.0 * rng.uniform();
      d.event[static_cast<std::size_t>(i)] = rng.uniform() < 0.7 ? 1 : 0;
    }
    return d;
  };
  auto wrap = [](const Matrix& m) {
    KernelMatrix k;
    k.values = m;
    k.kind = KernelKind::Custom;
    return k;
  };

  for (int trial = 0; trial < 100 && out.pass; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(2));
    const Matrix K = random_psd(n);
    const SurvivalData d = random_data(n);
    const double C = 1.0;
    const SsvmModel m = solve_ssvm(wrap(K), d, C, 1e-10, 400000);
    const double solver_obj = dual_objective(wrap(K), d, m.alpha, m.alpha_star);
    const auto grid = testing::grid_oracle(K, d, C);
    out.require(solver_obj <= grid.value + 1e-6,
                "trial " + std::to_string(trial) + ": solver " + fmt(solver_obj) + " > grid " +
                    fmt(grid.value) + " + 1e-6");
  }

  for (int trial = 0; trial < 5 && out.pass; ++trial) {
    const int n = 50;
    const Matrix K = random_psd(n);
    const SurvivalData d = random_data(n);
    const double C = 1.0;
    const SsvmModel m = solve_ssvm(wrap(K), d, C, 1e-6 * C, 500000);
    const double kkt = kkt_violation(wrap(K), d, m);
    out.require(kkt <= 1e-6 * C, "n=50 trial " + std::to_string(trial) + ": kkt " + fmt(kkt));
    for (std::size_t i = 1; i < m.objective_trace.size(); ++i)
      if (m.objective_trace[i] > m.objective_trace[i - 1] + 1e-12) {
        out.require(false, "objective increased at iterate " + std::to_string(i));
        break;
      }
  }
  return out;
}

// ---- criterion 8 -----------------------------------------------------------

Outcome criterion_krr_solver() {
  Outcome out;
  Rng rng(808);
  for (int trial = 0; trial < 200 && out.pass; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(49));
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    Matrix K = A * A.transpose() / n;
    K.diagonal().array() += 0.05 + rng.uniform();
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = 5.0 * rng.normal();
    KernelMatrix Kw;
    Kw.values = K;

    const double lambda = std::pow(2.0, static_cast<double>(rng.uniform_index(24)) - 16.0);
    const KrrModel m = fit_krr(Kw, y, lambda);
    Matrix S = K;
    S.diagonal().array() += lambda;
    const double resid = (S * m.alpha - y).lpNorm<Eigen::Infinity>();
    out.require(resid <= 1e-8 * (1.0 + y.lpNorm<Eigen::Infinity>()),
                "trial " + std::to_string(trial) + ": residual " + fmt(resid));

    if (trial % 10 == 0) {
      // Interpolation at the ladder minimum on a strictly PD kernel.
      const double lmin = select_lambda(Kw);
      const KrrModel mi = fit_krr(Kw, y, lmin);
      const double train_mse = (K * mi.alpha - y).squaredNorm() / n;
      out.require(train_mse < 1e-6,
                  "trial " + std::to_string(trial) + ": training MSE " + fmt(train_mse));
    }
  }
  return out;
}

// ---- criterion 9 -----------------------------------------------------------

Outcome criterion_rf_kernel_invariants() {
  Outcome out;
  Rng rng(909);
  for (int trial = 0; trial < 50 && out.pass; ++trial) {
    const Setup setup = kAllSetups[trial % 5];
    const int p = min_features(setup);
    const int n = 25 + static_cast<int>(rng.uniform_index(30));
    FeatureMatrix X = gen_features(setup, n, p, rng);
    GeneratedData d = make_continuous(setup, std::move(X), rng);
    const int M = 5 + static_cast<int>(rng.uniform_index(20));
    const Forest f =
        fit_forest(d.X, d.target, TreeParams{}, M, static_cast<std::uint64_t>(trial) * 13 + 1);
    const KernelMatrix K = rf_kernel(f, d.X);

    out.require(K.values == K.values.transpose().eval(), "kernel not exactly symmetric");
    out.require(K.values.diagonal().minCoeff() == 1.0 && K.values.diagonal().maxCoeff() == 1.0,
                "diagonal not exactly 1");
    bool multiples = true;
    for (Eigen::Index i = 0; i < K.rows() && multiples; ++i)
      for (Eigen::Index j = 0; j < K.cols(); ++j) {
        const double scaled = K.values(i, j) * M;
        if (K.values(i, j) < 0.0 || K.values(i, j) > 1.0 ||
            std::fabs(scaled - std::round(scaled)) > 1e-9) {
          multiples = false;
          break;
        }
      }
    out.require(multiples, "entries are not integer multiples of 1/M");
    try {
      const double self = mantel_statistic(K, K);
      out.require(std::fabs(self - 1.0) <= 1e-12, "Mantel(K,K) = " + fmt(self));
    } catch (const ZeroVarianceError&) {
      // Constant off-diagonal kernel; the self-correlation criterion is vacuous.
    }
  }
  return out;
}

// ---- criterion 10 ----------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing " + path + ">";
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Outcome criterion_cli_determinism(const std::string& cli) {
  Outcome out;
  if (cli.empty()) {
    out.require(false, "no --cli path given");
    return out;
  }
  const auto dir = std::filesystem::temp_directory_path() / "rfkern_acceptance_cli";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  const std::string base = "\"" + cli +
                           "\" bench --setup friedman --n 800 --p 20 --replicates 5 --seed 7";
  const struct {
    const char* name;
    int threads;
  } runs[] = {{"a", 1}, {"b", 6}, {"c", 6}};
  for (const auto& r : runs) {
    const std::string cmd = base + " --threads " + std::to_string(r.threads) + " --out " +
                            (dir / r.name).string() + " > /dev/null";
    const int rc = std::system(cmd.c_str());
    out.require(rc == 0, std::string("run ") + r.name + " exited with " + std::to_string(rc));
  }
  for (const char* f : {"summary.csv", "replicates.csv"}) {
    const std::string a = read_file((dir / "a" / f).string());
    const std::string b = read_file((dir / "b" / f).string());
    const std::string c = read_file((dir / "c" / f).string());
    out.require(!a.empty() && a == b, std::string(f) + " differs between 1 and 6 workers");
    out.require(b == c, std::string(f) + " differs between repeated runs");
  }
  std::filesystem::remove_all(dir);
  return out;
}

// ---- criterion 11 ----------------------------------------------------------

Outcome criterion_node_size_sensitivity() {
  Outcome out;
  const ScenarioConfig base = cell(Setup::Friedman, 800, 20, TargetKind::Continuous);
  const SummaryRow& default_row = scenario(cell_tag(base), base);

  ScenarioConfig doubled = base;
  doubled.node_size_multiplier = 2;
  const SummaryRow& doubled_row = scenario(cell_tag(doubled), doubled);

  out.require(default_row.delta_mean && doubled_row.delta_mean, "missing delta cells");
  if (default_row.delta_mean && doubled_row.delta_mean) {
    out.require(*doubled_row.delta_mean < 0.0,
                "doubled-node delta " + fmt(*doubled_row.delta_mean) + " not negative");
    out.require(std::fabs(*doubled_row.delta_mean) > std::fabs(*default_row.delta_mean),
                "|delta| did not grow: doubled " + fmt(std::fabs(*doubled_row.delta_mean)) +
                    " vs default " + fmt(std::fabs(*default_row.delta_mean)));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) cli = argv[++i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string item;
      while (std::getline(ss, item, ',')) only.insert(std::stoi(item));
    }
  }

  struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const Criterion basic[] = {
      {1, "Bayes error reproduction (1e6 samples, +-0.01)", criterion_bayes_error},
      {2, "Continuous delta sign and p-ordering (Friedman, Meier 2)", criterion_delta_signs},
      {3, "Continuous absolute bands (Friedman 800/20)", criterion_absolute_bands},
      {4, "Binary comparability (Friedman 1600/20)", criterion_binary},
      {5, "Survival direction and bands (Meier 2 800/20)", criterion_survival},
      {6, "C-index oracle equivalence (500 instances)", criterion_cindex_oracle},
      {7, "SSVM solver optimality and KKT", criterion_ssvm_solver},
      {8, "KRR solve correctness and interpolation", criterion_krr_solver},
      {9, "RF kernel invariants (50 forests)", criterion_rf_kernel_invariants},
      {11, "Node-size sensitivity (Friedman 800/20 doubled)", criterion_node_size_sensitivity},
  };

  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& out, double secs) {
    std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << name << " ("
              << fmt(secs) << "s)";
    if (!out.pass) {
      std::cout << " -- " << out.detail;
      ++failures;
    }
    std::cout << std::endl;
  };

  for (const auto& c : basic) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome out = c.fn();
    report(c.id, c.name, out,
           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  if (only.empty() || only.count(10)) {
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome out = criterion_cli_determinism(cli);
    report(10, "Determinism across runs and worker counts (CLI)", out,
           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }

  std::cout << (failures == 0 ? "acceptance: all criteria passed"
                              : "acceptance: " + std::to_string(failures) + " criteria FAILED")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
