// Test-only reference implementations, kept independent of the library's
// computation paths: a pair-enumeration concordance oracle, a term-by-term
// dual objective, and an exhaustive refined grid search for the SSVM dual.
#pragma once

#include <limits>
#include <vector>

#include "rfkern/types.hpp"

namespace rfkern::testing {

struct ConcordanceOracle {
  long comparable = 0;
  double concordant = 0.0;
};

// Walk unordered pairs, classify each side, count both ordered directions.
inline ConcordanceOracle c_index_oracle(const SurvivalData& d, const Vector& h) {
  ConcordanceOracle out;
  const Eigen::Index n = d.size();
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const bool earlier_a_event = d.time[a] < d.time[b] && d.event[static_cast<std::size_t>(a)] == 1;
      const bool earlier_b_event = d.time[b] < d.time[a] && d.event[static_cast<std::size_t>(b)] == 1;
      if (!earlier_a_event && !earlier_b_event) continue;
      out.comparable += 2;  // comp is symmetric, both ordered directions count
      const double prod = (h[b] - h[a]) * (d.time[a] - d.time[b]);
      if (prod > 0.0) out.concordant += 2.0;  // the ordered sign products agree
    }
  }
  return out;
}

// Bare quadruple-sum dual objective.
inline double naive_dual(const Matrix& K, const SurvivalData& data, const Vector& a,
                         const Vector& s) {
  const int n = static_cast<int>(K.rows());
  double v = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double di = data.event[static_cast<std::size_t>(i)];
      const double dk = data.event[static_cast<std::size_t>(k)];
      v += 0.5 * (a[i] * a[k] + di * dk * s[i] * s[k]) * K(i, k);
      v -= a[i] * K(i, k) * dk * s[k];
    }
  for (int i = 0; i < n; ++i) {
    v -= a[i] * data.time[i];
    v += data.event[static_cast<std::size_t>(i)] * s[i] * data.time[i];
  }
  return v;
}

struct GridSolution {
  double value = std::numeric_limits<double>::infinity();
  Vector alpha, alpha_star;
};

// Exhaustive grid search over [0, C]^(2n), re-centered and refined until the
// cell size reaches resolution * C. Every probed point is a true grid point,
// so the returned value upper-bounds the continuous minimum.
inline GridSolution grid_oracle(const Matrix& K, const SurvivalData& data, double C,
                                double resolution = 1e-3) {
  const int n = static_cast<int>(K.rows());
  const int dims = 2 * n;
  const int points = 9;
  std::vector<double> lo(static_cast<std::size_t>(dims), 0.0);
  std::vector<double> hi(static_cast<std::size_t>(dims), C);

  GridSolution best;
  best.alpha = Vector::Zero(n);
  best.alpha_star = Vector::Zero(n);

  double cell = C / (points - 1);
  for (int level = 0; level < 64; ++level) {
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    Vector a(n), s(n);
    bool done = false;
    while (!done) {
      for (int d = 0; d < dims; ++d) {
        const double step =
            (hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)]) / (points - 1);
        const double v = lo[static_cast<std::size_t>(d)] + step * idx[static_cast<std::size_t>(d)];
        if (d < n)
          a[d] = v;
        else
          s[d - n] = v;
      }
      const double val = naive_dual(K, data, a, s);
      if (val < best.value) {
        best.value = val;
        best.alpha = a;
        best.alpha_star = s;
      }
      int d = 0;
      for (; d < dims; ++d) {
        if (++idx[static_cast<std::size_t>(d)] < points) break;
        idx[static_cast<std::size_t>(d)] = 0;
      }
      done = d == dims;
    }
    if (cell <= resolution * C) break;
    for (int d = 0; d < dims; ++d) {
      const double c = d < n ? best.alpha[d] : best.alpha_star[d - n];
      lo[static_cast<std::size_t>(d)] = std::max(0.0, c - 2.0 * cell);
      hi[static_cast<std::size_t>(d)] = std::min(C, c + 2.0 * cell);
    }
    cell = 0.0;
    for (int d = 0; d < dims; ++d)
      cell = std::max(cell, (hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)]) /
                                (points - 1));
  }
  return best;
}

}  // namespace rfkern::testing
