#include "rfkern/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rfkern {

namespace {

std::vector<int> sequential_ids(Eigen::Index n) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = static_cast<int>(i);
  return ids;
}

// Row indices grouped by leaf id for one tree column of the leaf-id matrix.
std::vector<std::vector<int>> bucket_by_leaf(const Eigen::MatrixXi& leaves, Eigen::Index tree,
                                             int leaf_count) {
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(leaf_count));
  for (Eigen::Index i = 0; i < leaves.rows(); ++i)
    buckets[static_cast<std::size_t>(leaves(i, tree))].push_back(static_cast<int>(i));
  return buckets;
}

}  // namespace

KernelMatrix rf_kernel(const Forest& forest, const FeatureMatrix& A) {
  const Eigen::MatrixXi leaves = terminal_leaf_ids(forest, A);
  const auto n = A.rows();
  const auto M = static_cast<Eigen::Index>(forest.trees.size());
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(n, n);
  for (Eigen::Index m = 0; m < M; ++m) {
    const auto buckets = bucket_by_leaf(leaves, m, forest.trees[static_cast<std::size_t>(m)].leaf_count);
    for (const auto& group : buckets)
      for (std::size_t a = 0; a < group.size(); ++a)
        for (std::size_t b = a + 1; b < group.size(); ++b) ++counts(group[a], group[b]);
  }
  KernelMatrix k;
  k.kind = KernelKind::RF;
  k.row_ids = sequential_ids(n);
  k.col_ids = k.row_ids;
  k.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = static_cast<double>(counts(i, j)) / static_cast<double>(M);
      k.values(i, j) = v;
      k.values(j, i) = v;
    }
  }
  return k;
}

KernelMatrix rf_kernel(const Forest& forest, const FeatureMatrix& A, const FeatureMatrix& B) {
  if (&A == &B) return rf_kernel(forest, A);
  const Eigen::MatrixXi la = terminal_leaf_ids(forest, A);
  const Eigen::MatrixXi lb = terminal_leaf_ids(forest, B);
  const auto r = A.rows();
  const auto c = B.rows();
  const auto M = static_cast<Eigen::Index>(forest.trees.size());
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(r, c);
  for (Eigen::Index m = 0; m < M; ++m) {
    const auto buckets = bucket_by_leaf(lb, m, forest.trees[static_cast<std::size_t>(m)].leaf_count);
    for (Eigen::Index i = 0; i < r; ++i)
      for (int j : buckets[static_cast<std::size_t>(la(i, m))]) ++counts(i, j);
  }
  KernelMatrix k;
  k.kind = KernelKind::RF;
  k.row_ids = sequential_ids(r);
  k.col_ids = sequential_ids(c);
  k.values = counts.cast<double>() / static_cast<double>(M);
  return k;
}

KernelMatrix laplace_kernel(const FeatureMatrix& A, double sigma) {
  if (!(sigma > 0.0)) throw NonPositiveSigmaError("laplace kernel needs sigma > 0");
  const auto n = A.rows();
  KernelMatrix k;
  k.kind = KernelKind::Laplace;
  k.row_ids = sequential_ids(n);
  k.col_ids = k.row_ids;
  k.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::exp(-(A.values.row(i) - A.values.row(j)).lpNorm<1>() / sigma);
      k.values(i, j) = v;
      k.values(j, i) = v;
    }
  }
  return k;
}

KernelMatrix laplace_kernel(const FeatureMatrix& A, const FeatureMatrix& B, double sigma) {
  if (&A == &B) return laplace_kernel(A, sigma);
  if (!(sigma > 0.0)) throw NonPositiveSigmaError("laplace kernel needs sigma > 0");
  if (A.cols() != B.cols()) throw DimensionMismatchError("laplace kernel: feature counts differ");
  KernelMatrix k;
  k.kind = KernelKind::Laplace;
  k.row_ids = sequential_ids(A.rows());
  k.col_ids = sequential_ids(B.rows());
  k.values.resize(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.rows(); ++j)
      k.values(i, j) = std::exp(-(A.values.row(i) - B.values.row(j)).lpNorm<1>() / sigma);
  return k;
}

double mantel_statistic(const KernelMatrix& k1, const KernelMatrix& k2) {
  if (!k1.square() || !k2.square() || k1.rows() != k2.rows())
    throw ShapeMismatchError("mantel: matrices must be square with equal shape");
  if (k1.row_ids != k2.row_ids) throw ShapeMismatchError("mantel: row ids differ");
  const auto n = k1.rows();
  const long pairs = static_cast<long>(n) * (n - 1) / 2;
  if (pairs < 2) throw ShapeMismatchError("mantel: need at least a 3x3 matrix");

  double ma = 0.0, mb = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) {
      ma += k1.values(i, j);
      mb += k2.values(i, j);
    }
  ma /= static_cast<double>(pairs);
  mb /= static_cast<double>(pairs);

  double cov = 0.0, va = 0.0, vb = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double da = k1.values(i, j) - ma;
      const double db = k2.values(i, j) - mb;
      cov += da * db;
      va += da * da;
      vb += db * db;
    }
  if (va == 0.0 || vb == 0.0)
    throw ZeroVarianceError("mantel: a matrix is constant off-diagonal");
  const double r = cov / (std::sqrt(va) * std::sqrt(vb));
  return std::min(1.0, std::max(-1.0, r));
}

PairHistogram kernel_value_histogram(const KernelMatrix& k, const std::vector<int>& labels,
                                     int bins) {
  if (!k.square()) throw ShapeMismatchError("kernel_value_histogram: matrix must be square");
  if (static_cast<Eigen::Index>(labels.size()) != k.rows())
    throw ShapeMismatchError("kernel_value_histogram: label count mismatch");
  if (bins < 1) throw DataError("kernel_value_histogram: bins must be >= 1");

  PairHistogram h;
  h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b)
    h.bin_edges[static_cast<std::size_t>(b)] = static_cast<double>(b) / bins;
  h.same_class.assign(static_cast<std::size_t>(bins), 0);
  h.cross_class.assign(static_cast<std::size_t>(bins), 0);

  const auto n = k.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::min(1.0, std::max(0.0, k.values(i, j)));
      const int b = std::min(bins - 1, static_cast<int>(v * bins));
      auto& side = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]
                       ? h.same_class
                       : h.cross_class;
      ++side[static_cast<std::size_t>(b)];
    }
  return h;
}

namespace {

KernelKind kernel_kind_from_byte(std::uint8_t b) {
  switch (b) {
    case 0: return KernelKind::RF;
    case 1: return KernelKind::Laplace;
    default: return KernelKind::Custom;
  }
}

std::uint8_t kernel_kind_byte(KernelKind k) {
  switch (k) {
    case KernelKind::RF: return 0;
    case KernelKind::Laplace: return 1;
    case KernelKind::Custom: return 2;
  }
  return 2;
}

}  // namespace

void save_kernel_csv(const KernelMatrix& k, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "id";
  for (int c : k.col_ids) out << ",c" << c;
  out << "\n";
  char buf[40];
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    out << "r" << k.row_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", k.values(i, j));
      out << ',' << buf;
    }
    out << "\n";
  }
}

KernelMatrix load_kernel_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("kernel csv: empty file");
  long cols = static_cast<long>(std::count(line.begin(), line.end(), ',')) ;
  if (cols < 1) throw SchemaError("kernel csv: no value columns");

  std::vector<double> data;
  long rows = 0;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // row id
    long got = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        data.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("kernel csv: bad number '" + cell + "'", line_no);
      }
      ++got;
    }
    if (got != cols) throw ParseError("kernel csv: expected " + std::to_string(cols) + " values", line_no);
    ++rows;
  }
  KernelMatrix k;
  k.kind = KernelKind::Custom;
  k.values.resize(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) k.values(i, j) = data[static_cast<std::size_t>(i * cols + j)];
  k.row_ids = sequential_ids(rows);
  k.col_ids = sequential_ids(cols);
  return k;
}

void save_kernel_binary(const KernelMatrix& k, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  const char magic[4] = {'R', 'F', 'K', 'M'};
  const std::uint32_t version = 1;
  const std::uint8_t kind = kernel_kind_byte(k.kind);
  const std::uint8_t pad[3] = {0, 0, 0};
  const std::uint64_t rows = static_cast<std::uint64_t>(k.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(k.cols());
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&kind), 1);
  out.write(reinterpret_cast<const char*>(pad), 3);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      const double v = k.values(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  if (!out) throw DataError("write failed: " + path);
}

KernelMatrix load_kernel_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  char magic[4];
  std::uint32_t version = 0;
  std::uint8_t kind = 2;
  std::uint8_t pad[3];
  std::uint64_t rows = 0, cols = 0;
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "RFKM", 4) != 0) throw SchemaError("kernel binary: bad magic");
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (version != 1) throw SchemaError("kernel binary: unsupported version");
  in.read(reinterpret_cast<char*>(&kind), 1);
  in.read(reinterpret_cast<char*>(pad), 3);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in) throw SchemaError("kernel binary: truncated header");
  KernelMatrix k;
  k.kind = kernel_kind_from_byte(kind);
  k.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i)
    for (std::uint64_t j = 0; j < cols; ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof v);
      if (!in) throw SchemaError("kernel binary: truncated payload");
      k.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  k.row_ids = sequential_ids(static_cast<Eigen::Index>(rows));
  k.col_ids = sequential_ids(static_cast<Eigen::Index>(cols));
  return k;
}

}  // namespace rfkern
