#pragma once

#include <cstdint>
#include <string>

#include "rfkern/rng.hpp"
#include "rfkern/types.hpp"

namespace rfkern {

enum class Setup { Friedman, Checkerboard, VanDerLaan, Meier1, Meier2 };

constexpr Setup kAllSetups[] = {Setup::Friedman, Setup::Checkerboard, Setup::VanDerLaan,
                                Setup::Meier1, Setup::Meier2};

const char* setup_name(Setup s);
Setup setup_from_name(const std::string& name);

// Number of features the setup's signal actually reads.
int min_features(Setup s);

// Reading of the N(0, 0.5) noise notation for the van der Laan and Meier
// setups. The published MSE tables sit below the 0.5 noise floor the
// variance reading would imply, so the second parameter is taken as the
// standard deviation by default; the variance reading stays available.
enum class NoiseReading { Variance, StdDev };

double noise_sd(Setup s, NoiseReading reading = NoiseReading::StdDev);

struct SetupSpec {
  Setup name = Setup::Friedman;
  int n = 800;
  int p = 20;
  std::uint64_t seed = 1;
};

struct GeneratedData {
  FeatureMatrix X;
  Vector f;  // noiseless signal per row
  Target target;
  Setup setup = Setup::Friedman;
  TargetKind kind = TargetKind::Continuous;
  double noise_sd = 0.0;
  double median_m = 0.0;            // cached setup median of f (binary/survival)
  double baseline_rate = 0.0;       // survival only
  double censoring_target = 0.0;    // survival only
  double censoring_achieved = 0.0;  // survival only
  double censoring_rate_param = 0.0;  // tuned exponential rate (survival only)
};

// Noiseless f(X) for one row; the row must provide at least min_features(s).
double signal(Setup s, const Eigen::Ref<const Eigen::RowVectorXd>& row);

// Uniform(0,1) features, except Checkerboard which draws multivariate normal
// rows with covariance 0.9^|j-k| via its Cholesky factor.
FeatureMatrix gen_features(Setup s, int n, int p, Rng& rng);

// Median of the marginal f distribution, estimated once per setup from 1e6
// fresh draws under a fixed internal seed and cached for the process.
double setup_median(Setup s);

// P(label = +1 | f) used by the dichotomized targets: logistic(f - median).
double binary_probability(Setup s, double f_value);

// Y = f + noise. noise_override >= 0 forces the noise sd (0 gives Y = f).
GeneratedData make_continuous(Setup s, FeatureMatrix X, Rng& rng,
                              NoiseReading reading = NoiseReading::StdDev,
                              double noise_override = -1.0);

GeneratedData make_binary(Setup s, FeatureMatrix X, Rng& rng);

// Monte Carlo Bayes error for the dichotomized problem: 1 - E[max(p, 1-p)].
double bayes_error(Setup s, long samples = 1000000);

// Cox-model event times under a constant baseline hazard with the median-
// centered signal in the exponent; censoring times are exponential with the
// rate tuned on a fresh pilot so the expected censored fraction matches
// target_censoring to within 0.01.
GeneratedData make_survival(Setup s, FeatureMatrix X, Rng& rng, double baseline_rate = 1.0,
                            double target_censoring = 0.3);

}  // namespace rfkern
