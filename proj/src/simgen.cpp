#include "rfkern/simgen.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace rfkern {

namespace {

constexpr std::uint64_t kMedianSeed = 0x4d45444941ULL;   // median estimation stream
constexpr std::uint64_t kBayesSeed = 0x4241594553ULL;    // bayes error stream
constexpr long kMedianSamples = 1000000;

int setup_id(Setup s) { return static_cast<int>(s); }

// Cholesky factor of the Checkerboard covariance 0.9^|j-k|, cached per size.
const Matrix& checkerboard_chol(int p) {
  static std::map<int, Matrix> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  Matrix sigma(p, p);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) sigma(j, k) = std::pow(0.9, std::abs(j - k));
  Eigen::LLT<Matrix> llt(sigma);
  return cache.emplace(p, Matrix(llt.matrixL())).first->second;
}

// One fresh feature row restricted to the columns the signal reads.
Eigen::RowVectorXd draw_signal_row(Setup s, Rng& rng) {
  const int p = min_features(s);
  Eigen::RowVectorXd row(p);
  if (s == Setup::Checkerboard) {
    const Matrix& L = checkerboard_chol(p);
    Vector z(p);
    for (int j = 0; j < p; ++j) z[j] = rng.normal();
    row = (L * z).transpose();
  } else {
    for (int j = 0; j < p; ++j) row[j] = rng.uniform();
  }
  return row;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

const char* setup_name(Setup s) {
  switch (s) {
    case Setup::Friedman: return "friedman";
    case Setup::Checkerboard: return "checkerboard";
    case Setup::VanDerLaan: return "vanderlaan";
    case Setup::Meier1: return "meier1";
    case Setup::Meier2: return "meier2";
  }
  return "?";
}

Setup setup_from_name(const std::string& name) {
  std::string n;
  for (char c : name)
    if (c != '_' && c != '-' && c != ' ') n.push_back(static_cast<char>(std::tolower(c)));
  if (n == "friedman") return Setup::Friedman;
  if (n == "checkerboard") return Setup::Checkerboard;
  if (n == "vanderlaan") return Setup::VanDerLaan;
  if (n == "meier1") return Setup::Meier1;
  if (n == "meier2") return Setup::Meier2;
  throw DataError("unknown setup name: " + name);
}

int min_features(Setup s) {
  switch (s) {
    case Setup::Friedman: return 5;
    case Setup::Checkerboard: return 20;
    case Setup::VanDerLaan: return 10;
    case Setup::Meier1: return 4;
    case Setup::Meier2: return 4;
  }
  return 0;
}

double noise_sd(Setup s, NoiseReading reading) {
  switch (s) {
    case Setup::Friedman:
    case Setup::Checkerboard:
      return 1.0;
    default:
      return reading == NoiseReading::Variance ? std::sqrt(0.5) : 0.5;
  }
}

double signal(Setup s, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  if (row.size() < min_features(s))
    throw InsufficientFeaturesError(std::string("setup ") + setup_name(s) + " needs at least " +
                                    std::to_string(min_features(s)) + " features");
  const double pi = 3.14159265358979323846;
  auto t = [&](int j) { return 2.0 * (row[j] - 0.5); };
  switch (s) {
    case Setup::Friedman:
      return 10.0 * std::sin(pi * row[0] * row[1]) + 20.0 * (row[2] - 0.5) * (row[2] - 0.5) +
             10.0 * row[3] + 5.0 * row[4];
    case Setup::Checkerboard:
      return 2.0 * row[4] * row[9] + 2.0 * row[14] * row[19];
    case Setup::VanDerLaan:
      return t(0) * t(1) + t(2) * t(2) + t(7) * t(9) - t(5) * t(5);
    case Setup::Meier1:
      return -std::sin(2.0 * t(0)) + t(1) * t(1) + t(2) - std::exp(t(3));
    case Setup::Meier2: {
      const double s3 = std::sin(2.0 * pi * t(2));
      const double s4 = std::sin(2.0 * pi * t(3));
      const double c4 = std::cos(2.0 * pi * t(3));
      return -t(0) + (2.0 * t(1) - 1.0) * (2.0 * t(1) - 1.0) + s3 / (2.0 - s4) + 2.0 * c4 +
             4.0 * c4 * c4;
    }
  }
  return 0.0;
}

FeatureMatrix gen_features(Setup s, int n, int p, Rng& rng) {
  if (p < min_features(s))
    throw InsufficientFeaturesError(std::string("setup ") + setup_name(s) + " needs p >= " +
                                    std::to_string(min_features(s)));
  Matrix X(n, p);
  if (s == Setup::Checkerboard) {
    const Matrix& L = checkerboard_chol(p);
    Vector z(p);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) z[j] = rng.normal();
      X.row(i) = (L * z).transpose();
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) X(i, j) = rng.uniform();
  }
  return FeatureMatrix(std::move(X));
}

double setup_median(Setup s) {
  static std::map<int, double> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(setup_id(s));
  if (it != cache.end()) return it->second;

  Rng rng(kMedianSeed + static_cast<std::uint64_t>(setup_id(s)));
  std::vector<double> f(kMedianSamples);
  for (long i = 0; i < kMedianSamples; ++i) f[static_cast<std::size_t>(i)] = signal(s, draw_signal_row(s, rng));
  const auto mid = f.begin() + kMedianSamples / 2;
  std::nth_element(f.begin(), mid, f.end());
  const double hi = *mid;
  const double lo = *std::max_element(f.begin(), mid);
  const double m = 0.5 * (lo + hi);
  cache[setup_id(s)] = m;
  return m;
}

double binary_probability(Setup s, double f_value) { return logistic(f_value - setup_median(s)); }

GeneratedData make_continuous(Setup s, FeatureMatrix X, Rng& rng, NoiseReading reading,
                              double noise_override) {
  GeneratedData out;
  out.setup = s;
  out.kind = TargetKind::Continuous;
  out.noise_sd = noise_override >= 0.0 ? noise_override : noise_sd(s, reading);
  const Eigen::Index n = X.rows();
  out.f.resize(n);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.f[i] = signal(s, X.values.row(i));
    y[i] = out.f[i] + (out.noise_sd > 0.0 ? out.noise_sd * rng.normal() : 0.0);
  }
  out.X = std::move(X);
  out.target = Target::continuous(std::move(y));
  return out;
}

GeneratedData make_binary(Setup s, FeatureMatrix X, Rng& rng) {
  GeneratedData out;
  out.setup = s;
  out.kind = TargetKind::Binary;
  out.median_m = setup_median(s);
  const Eigen::Index n = X.rows();
  out.f.resize(n);
  Vector labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.f[i] = signal(s, X.values.row(i));
    const double p = logistic(out.f[i] - out.median_m);
    labels[i] = rng.uniform() < p ? 1.0 : -1.0;
  }
  out.X = std::move(X);
  out.target = Target::binary(std::move(labels));
  return out;
}

double bayes_error(Setup s, long samples) {
  const double m = setup_median(s);
  Rng rng(kBayesSeed + static_cast<std::uint64_t>(setup_id(s)));
  double acc = 0.0;
  for (long i = 0; i < samples; ++i) {
    const double p = logistic(signal(s, draw_signal_row(s, rng)) - m);
    acc += std::max(p, 1.0 - p);
  }
  return 1.0 - acc / static_cast<double>(samples);
}

GeneratedData make_survival(Setup s, FeatureMatrix X, Rng& rng, double baseline_rate,
                            double target_censoring) {
  if (!(baseline_rate > 0.0)) throw DataError("baseline hazard rate must be positive");
  if (target_censoring < 0.0 || target_censoring >= 1.0)
    throw CensoringUnattainableError("target censoring rate must lie in [0, 1)");

  GeneratedData out;
  out.setup = s;
  out.kind = TargetKind::Survival;
  out.median_m = setup_median(s);
  out.baseline_rate = baseline_rate;
  out.censoring_target = target_censoring;

  // Tune the exponential censoring rate on a fresh pilot of event times. The
  // expected censored fraction mean(1 - exp(-rho T)) is continuous and
  // strictly increasing in rho, so bisection always lands.
  double rho = 0.0;
  if (target_censoring > 0.0) {
    constexpr long kPilot = 100000;
    std::vector<double> pilot(kPilot);
    for (long i = 0; i < kPilot; ++i) {
      const double f = signal(s, draw_signal_row(s, rng));
      pilot[static_cast<std::size_t>(i)] =
          rng.exponential(1.0) / (baseline_rate * std::exp(f - out.median_m));
    }
    auto censored_fraction = [&](double r) {
      double acc = 0.0;
      for (double t : pilot) acc += 1.0 - std::exp(-r * t);
      return acc / static_cast<double>(kPilot);
    };
    double hi = 1.0;
    int expansions = 0;
    while (censored_fraction(hi) < target_censoring) {
      hi *= 2.0;
      if (++expansions > 400)
        throw CensoringUnattainableError("could not bracket the censoring rate");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (censored_fraction(mid) < target_censoring)
        lo = mid;
      else
        hi = mid;
      if (hi - lo <= 1e-12 * hi) break;
    }
    rho = 0.5 * (lo + hi);
  }
  out.censoring_rate_param = rho;

  const Eigen::Index n = X.rows();
  out.f.resize(n);
  SurvivalData sd;
  sd.time.resize(n);
  sd.event.resize(static_cast<std::size_t>(n));
  long censored = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.f[i] = signal(s, X.values.row(i));
    const double t = rng.exponential(baseline_rate * std::exp(out.f[i] - out.median_m));
    double y = t;
    int event = 1;
    if (rho > 0.0) {
      const double c = rng.exponential(rho);
      if (c < t) {
        y = c;
        event = 0;
        ++censored;
      }
    }
    sd.time[i] = y;
    sd.event[static_cast<std::size_t>(i)] = event;
  }
  out.censoring_achieved = n > 0 ? static_cast<double>(censored) / static_cast<double>(n) : 0.0;
  out.X = std::move(X);
  out.target = Target::survival(std::move(sd));
  return out;
}

}  // namespace rfkern
