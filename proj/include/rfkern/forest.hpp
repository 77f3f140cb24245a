#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfkern/rng.hpp"
#include "rfkern/types.hpp"

namespace rfkern {

struct TreeParams {
  // 0 requests the per-target default: floor(p/3) for regression,
  // floor(sqrt(p)) for classification and survival (at least 1).
  int mtry = 0;
  // 0 requests the per-target default: 5 (regression), 1 (classification),
  // 7 (survival, interpreted as the minimum total node weight).
  double min_node_size = 0.0;
  // 0 = unbounded.
  int max_depth = 0;
  double bootstrap_fraction = 1.0;

  // Fills defaults and validates against the feature count.
  TreeParams resolved(TargetKind kind, int feature_count) const;
};

double default_min_node_size(TargetKind kind);
int default_mtry(TargetKind kind, int feature_count);

// Flat node storage; nodes[0] is the root. Split nodes test
// x[feature] <= threshold (true goes left). Leaves carry a dense id
// (0..leaf_count-1 in depth-first order) and the leaf summary: mean target
// for regression, +1 vote fraction for classification, and the within-leaf
// Nelson-Aalen cumulative hazard for survival.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf_id = -1;
  double prediction = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<int> bootstrap_indices;  // training-row multiset, draw order
  int leaf_count = 0;

  // Index into `nodes` of the leaf the row reaches.
  int leaf_node(const Matrix& X, Eigen::Index row) const;
  double predict_row(const Matrix& X, Eigen::Index row) const;
  int depth() const;
};

struct Forest {
  std::vector<Tree> trees;
  TreeParams params;  // resolved values
  TargetKind target_kind = TargetKind::Continuous;
  int feature_count = 0;
  std::uint64_t rng_seed = 0;
};

Tree fit_tree(const FeatureMatrix& data, const Target& targets, const TreeParams& params, Rng& rng);

// Tree m draws its random state from seed + m, so any execution order
// (serial or `threads` workers) produces the identical forest.
Forest fit_forest(const FeatureMatrix& data, const Target& targets, const TreeParams& params,
                  int num_trees, std::uint64_t seed, int threads = 1);

// Per row, the mean over trees of the leaf summaries: regression value,
// +1 vote fraction in [0,1] for classification, ensemble risk for survival.
Vector predict_forest(const Forest& forest, const FeatureMatrix& X);

// Entry (i, m) is the dense leaf id row i reaches in tree m.
Eigen::MatrixXi terminal_leaf_ids(const Forest& forest, const FeatureMatrix& X);

// Versioned JSON document (see README for the schema).
std::string forest_to_json(const Forest& forest);
Forest forest_from_json(const std::string& text);
void save_forest(const Forest& forest, const std::string& path);
Forest load_forest(const std::string& path);

}  // namespace rfkern
