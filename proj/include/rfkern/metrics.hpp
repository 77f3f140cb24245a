#pragma once

#include "rfkern/types.hpp"

namespace rfkern {

enum class MetricName { MSE, Accuracy, CIndex };

struct MetricValue {
  MetricName name;
  double value = 0.0;
  // C-index only: number of comparable ordered pairs (i, j), i != j; each
  // unordered comparable pair is counted twice, matching the pair sums.
  long n_pairs_comparable = -1;
};

MetricValue mse(const Vector& y_true, const Vector& y_pred);

// Labels restricted to {-1, +1}.
MetricValue accuracy(const Vector& labels_true, const Vector& labels_pred);

// Harrell's concordance index over ordered pairs. A pair is comparable when
// the earlier of the two times is an observed event; it is concordant when
// the larger prognostic index h goes with the smaller time. Ties in h score
// 0 by default (strict inequality); `half_credit_ties` awards 1/2 instead.
MetricValue c_index(const SurvivalData& data, const Vector& h, bool half_credit_ties = false);

}  // namespace rfkern
