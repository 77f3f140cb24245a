#pragma once

#include <string>
#include <vector>

#include "rfkern/forest.hpp"
#include "rfkern/types.hpp"

namespace rfkern {

enum class KernelKind { RF, Laplace, Custom };

// Dense similarity matrix, square (train x train) or rectangular
// (test x train). RF and Laplace entries lie in [0, 1]; square matrices of
// those kinds are symmetric with an exact unit diagonal.
struct KernelMatrix {
  Matrix values;
  std::vector<int> row_ids;
  std::vector<int> col_ids;
  KernelKind kind = KernelKind::Custom;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  bool square() const { return values.rows() == values.cols(); }
};

// Entry (i, j) = fraction of trees in which A_i and B_j share a terminal
// node. Counted by grouping rows per leaf per tree, never by all-pairs
// comparison. When A and B are the same object the result is exactly
// symmetric with unit diagonal, and every entry is an integer multiple of
// 1/M.
KernelMatrix rf_kernel(const Forest& forest, const FeatureMatrix& A, const FeatureMatrix& B);
KernelMatrix rf_kernel(const Forest& forest, const FeatureMatrix& A);

// Entry (i, j) = exp(-||A_i - B_j||_1 / sigma).
KernelMatrix laplace_kernel(const FeatureMatrix& A, const FeatureMatrix& B, double sigma = 1.0);
KernelMatrix laplace_kernel(const FeatureMatrix& A, double sigma = 1.0);

// Pearson correlation over the strictly-lower-triangular entries of two
// square matrices of identical shape.
double mantel_statistic(const KernelMatrix& k1, const KernelMatrix& k2);

// Off-diagonal kernel values binned on [0, 1], split into same-class and
// cross-class pairs (each unordered pair counted once).
struct PairHistogram {
  std::vector<double> bin_edges;       // bins + 1 entries
  std::vector<long> same_class;        // per-bin counts
  std::vector<long> cross_class;
};

PairHistogram kernel_value_histogram(const KernelMatrix& k, const std::vector<int>& labels,
                                     int bins = 20);

// Full-precision CSV (header row of column ids, one row id column).
void save_kernel_csv(const KernelMatrix& k, const std::string& path);
KernelMatrix load_kernel_csv(const std::string& path);

// Binary layout: magic "RFKM", u32 version, u8 kind, 3 zero bytes,
// u64 rows, u64 cols, row-major doubles (native little-endian).
void save_kernel_binary(const KernelMatrix& k, const std::string& path);
KernelMatrix load_kernel_binary(const std::string& path);

}  // namespace rfkern
