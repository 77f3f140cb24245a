#include "rfkern/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace rfkern {

double default_min_node_size(TargetKind kind) {
  switch (kind) {
    case TargetKind::Continuous: return 5.0;
    case TargetKind::Binary: return 1.0;
    case TargetKind::Survival: return 7.0;
  }
  return 1.0;
}

int default_mtry(TargetKind kind, int feature_count) {
  (void)kind;  // floor(sqrt(p)) across target kinds, as in the reference forests
  const int m = static_cast<int>(std::floor(std::sqrt(static_cast<double>(feature_count))));
  return std::max(1, m);
}

TreeParams TreeParams::resolved(TargetKind kind, int feature_count) const {
  TreeParams out = *this;
  if (out.mtry == 0) out.mtry = default_mtry(kind, feature_count);
  if (out.min_node_size == 0.0) out.min_node_size = default_min_node_size(kind);
  if (out.mtry < 1 || out.mtry > feature_count)
    throw DataError("mtry must lie in [1, feature_count]");
  if (out.min_node_size < 1.0) throw DataError("min_node_size must be >= 1");
  if (out.max_depth < 0) throw DataError("max_depth must be >= 0");
  if (!(out.bootstrap_fraction > 0.0) || out.bootstrap_fraction > 1.0)
    throw DataError("bootstrap_fraction must lie in (0, 1]");
  return out;
}

int Tree::leaf_node(const Matrix& X, Eigen::Index row) const {
  int ni = 0;
  while (!nodes[static_cast<std::size_t>(ni)].is_leaf()) {
    const TreeNode& nd = nodes[static_cast<std::size_t>(ni)];
    ni = X(row, nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return ni;
}

double Tree::predict_row(const Matrix& X, Eigen::Index row) const {
  return nodes[static_cast<std::size_t>(leaf_node(X, row))].prediction;
}

int Tree::depth() const {
  // Iterative depth over the flat node array.
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int best = 0;
  while (!stack.empty()) {
    auto [ni, d] = stack.back();
    stack.pop_back();
    const TreeNode& nd = nodes[static_cast<std::size_t>(ni)];
    if (nd.is_leaf()) {
      best = std::max(best, d);
    } else {
      stack.emplace_back(nd.left, d + 1);
      stack.emplace_back(nd.right, d + 1);
    }
  }
  return best;
}

namespace {

struct SplitChoice {
  bool found = false;
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

// Midpoint of two consecutive distinct values; falls back to the lower value
// if rounding lands on the upper one, so that x <= threshold routing matches
// the partition counted during the sweep.
double midpoint(double lo, double hi) {
  double t = 0.5 * (lo + hi);
  if (t == hi) t = lo;
  return t;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const Target& target, const TreeParams& params, Rng& rng, Tree& tree)
      : X_(X), target_(target), params_(params), rng_(rng), tree_(tree) {
    if (target_.kind == TargetKind::Binary) {
      std::vector<double> vals(target_.y.data(), target_.y.data() + target_.y.size());
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      class_values_ = std::move(vals);
      class_of_row_.resize(static_cast<std::size_t>(target_.y.size()));
      for (Eigen::Index i = 0; i < target_.y.size(); ++i) {
        const auto it = std::lower_bound(class_values_.begin(), class_values_.end(), target_.y[i]);
        class_of_row_[static_cast<std::size_t>(i)] =
            static_cast<int>(it - class_values_.begin());
      }
    }
  }

  int grow(std::vector<int>& rows, int begin, int end, int depth) {
    const int m = end - begin;
    const bool depth_capped = params_.max_depth > 0 && depth >= params_.max_depth;
    if (static_cast<double>(m) < 2.0 * params_.min_node_size || depth_capped || pure(rows, begin, end))
      return make_leaf(rows, begin, end);

    const std::vector<int> candidates =
        rng_.sample_without_replacement(static_cast<int>(X_.cols()), params_.mtry);
    SplitChoice best;
    for (int f : candidates) {
      switch (target_.kind) {
        case TargetKind::Continuous: eval_numeric_split(rows, begin, end, f, best); break;
        case TargetKind::Binary: eval_class_split(rows, begin, end, f, best); break;
        case TargetKind::Survival: eval_logrank_split(rows, begin, end, f, best); break;
      }
    }
    if (!best.found) return make_leaf(rows, begin, end);

    // Stable partition: x <= threshold goes left.
    std::vector<int> left, right;
    left.reserve(static_cast<std::size_t>(m));
    right.reserve(static_cast<std::size_t>(m));
    for (int i = begin; i < end; ++i) {
      const int r = rows[static_cast<std::size_t>(i)];
      (X_(r, best.feature) <= best.threshold ? left : right).push_back(r);
    }
    std::copy(left.begin(), left.end(), rows.begin() + begin);
    std::copy(right.begin(), right.end(), rows.begin() + begin + static_cast<int>(left.size()));
    const int mid = begin + static_cast<int>(left.size());

    const int node_index = static_cast<int>(tree_.nodes.size());
    TreeNode nd;
    nd.feature = best.feature;
    nd.threshold = best.threshold;
    tree_.nodes.push_back(nd);
    const int l = grow(rows, begin, mid, depth + 1);
    const int r = grow(rows, mid, end, depth + 1);
    tree_.nodes[static_cast<std::size_t>(node_index)].left = l;
    tree_.nodes[static_cast<std::size_t>(node_index)].right = r;
    return node_index;
  }

 private:
  bool pure(const std::vector<int>& rows, int begin, int end) const {
    switch (target_.kind) {
      case TargetKind::Continuous: {
        const double first = target_.y[rows[static_cast<std::size_t>(begin)]];
        for (int i = begin + 1; i < end; ++i)
          if (target_.y[rows[static_cast<std::size_t>(i)]] != first) return false;
        return true;
      }
      case TargetKind::Binary: {
        const int first = class_of_row_[static_cast<std::size_t>(rows[static_cast<std::size_t>(begin)])];
        for (int i = begin + 1; i < end; ++i)
          if (class_of_row_[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] != first)
            return false;
        return true;
      }
      case TargetKind::Survival: {
        for (int i = begin; i < end; ++i)
          if (target_.surv.event[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] == 1)
            return false;
        return true;  // no events left to separate
      }
    }
    return false;
  }

  int make_leaf(const std::vector<int>& rows, int begin, int end) {
    TreeNode nd;
    nd.leaf_id = tree_.leaf_count++;
    nd.prediction = leaf_summary(rows, begin, end);
    const int node_index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(nd);
    return node_index;
  }

  double leaf_summary(const std::vector<int>& rows, int begin, int end) const {
    const int m = end - begin;
    switch (target_.kind) {
      case TargetKind::Continuous: {
        double s = 0.0;
        for (int i = begin; i < end; ++i) s += target_.y[rows[static_cast<std::size_t>(i)]];
        return s / m;
      }
      case TargetKind::Binary: {
        int plus = 0;
        for (int i = begin; i < end; ++i)
          if (target_.y[rows[static_cast<std::size_t>(i)]] == 1.0) ++plus;
        return static_cast<double>(plus) / m;
      }
      case TargetKind::Survival:
        return nelson_aalen_total(rows, begin, end);
    }
    return 0.0;
  }

  // Within-node Nelson-Aalen cumulative hazard evaluated past the last
  // observed event: sum over event times of deaths / at-risk.
  double nelson_aalen_total(const std::vector<int>& rows, int begin, int end) const {
    std::vector<std::pair<double, int>> te;
    te.reserve(static_cast<std::size_t>(end - begin));
    for (int i = begin; i < end; ++i) {
      const int r = rows[static_cast<std::size_t>(i)];
      te.emplace_back(target_.surv.time[r], target_.surv.event[static_cast<std::size_t>(r)]);
    }
    std::sort(te.begin(), te.end());
    double risk = 0.0;
    std::size_t i = 0;
    while (i < te.size()) {
      std::size_t j = i;
      int deaths = 0;
      while (j < te.size() && te[j].first == te[i].first) {
        deaths += te[j].second;
        ++j;
      }
      if (deaths > 0) risk += static_cast<double>(deaths) / static_cast<double>(te.size() - i);
      i = j;
    }
    return risk;
  }

  // Sorted (value, row) pairs for one feature over the node rows.
  std::vector<std::pair<double, int>> sorted_feature(const std::vector<int>& rows, int begin,
                                                     int end, int f) const {
    std::vector<std::pair<double, int>> v;
    v.reserve(static_cast<std::size_t>(end - begin));
    for (int i = begin; i < end; ++i) {
      const int r = rows[static_cast<std::size_t>(i)];
      v.emplace_back(X_(r, f), r);
    }
    std::sort(v.begin(), v.end());
    return v;
  }

  bool child_sizes_ok(int left, int total) const {
    return static_cast<double>(left) >= params_.min_node_size &&
           static_cast<double>(total - left) >= params_.min_node_size;
  }

  void consider(SplitChoice& best, double gain, int f, double threshold) const {
    if (gain <= 0.0) return;
    if (!best.found || gain > best.gain) {
      best.found = true;
      best.gain = gain;
      best.feature = f;
      best.threshold = threshold;
    }
  }

  // Variance-reduction split: maximize sum of child squared-sum ratios.
  void eval_numeric_split(const std::vector<int>& rows, int begin, int end, int f,
                          SplitChoice& best) const {
    const auto v = sorted_feature(rows, begin, end, f);
    const int m = static_cast<int>(v.size());
    double total = 0.0;
    for (const auto& [x, r] : v) total += target_.y[r];
    double left_sum = 0.0;
    for (int i = 0; i < m - 1; ++i) {
      left_sum += target_.y[v[static_cast<std::size_t>(i)].second];
      if (v[static_cast<std::size_t>(i)].first == v[static_cast<std::size_t>(i + 1)].first) continue;
      const int nl = i + 1;
      if (!child_sizes_ok(nl, m)) continue;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / nl + right_sum * right_sum / (m - nl) -
                          total * total / m;
      consider(best, gain, f,
               midpoint(v[static_cast<std::size_t>(i)].first, v[static_cast<std::size_t>(i + 1)].first));
    }
  }

  // Gini-impurity decrease over the node's class counts.
  void eval_class_split(const std::vector<int>& rows, int begin, int end, int f,
                        SplitChoice& best) const {
    const auto v = sorted_feature(rows, begin, end, f);
    const int m = static_cast<int>(v.size());
    const int nc = static_cast<int>(class_values_.size());
    std::vector<int> total(static_cast<std::size_t>(nc), 0);
    for (const auto& [x, r] : v) ++total[static_cast<std::size_t>(class_of_row_[static_cast<std::size_t>(r)])];
    double parent = 0.0;
    for (int c = 0; c < nc; ++c)
      parent += static_cast<double>(total[static_cast<std::size_t>(c)]) * total[static_cast<std::size_t>(c)];
    parent /= m;

    std::vector<int> left(static_cast<std::size_t>(nc), 0);
    for (int i = 0; i < m - 1; ++i) {
      ++left[static_cast<std::size_t>(class_of_row_[static_cast<std::size_t>(v[static_cast<std::size_t>(i)].second)])];
      if (v[static_cast<std::size_t>(i)].first == v[static_cast<std::size_t>(i + 1)].first) continue;
      const int nl = i + 1;
      if (!child_sizes_ok(nl, m)) continue;
      double lsq = 0.0, rsq = 0.0;
      for (int c = 0; c < nc; ++c) {
        const double lc = left[static_cast<std::size_t>(c)];
        const double rc = total[static_cast<std::size_t>(c)] - left[static_cast<std::size_t>(c)];
        lsq += lc * lc;
        rsq += rc * rc;
      }
      const double gain = lsq / nl + rsq / (m - nl) - parent;
      consider(best, gain, f,
               midpoint(v[static_cast<std::size_t>(i)].first, v[static_cast<std::size_t>(i + 1)].first));
    }
  }

  // Log-rank statistic |z| over the node's event-time grid; the standard
  // survival-tree criterion (numerator/variance form as in Ishwaran et al.).
  void eval_logrank_split(const std::vector<int>& rows, int begin, int end, int f,
                          SplitChoice& best) const {
    const int m = end - begin;
    // Node-level event-time grid.
    std::vector<double> event_times;
    for (int i = begin; i < end; ++i) {
      const int r = rows[static_cast<std::size_t>(i)];
      if (target_.surv.event[static_cast<std::size_t>(r)] == 1)
        event_times.push_back(target_.surv.time[r]);
    }
    std::sort(event_times.begin(), event_times.end());
    event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
    const int T = static_cast<int>(event_times.size());
    if (T == 0) return;

    std::vector<double> deaths(static_cast<std::size_t>(T), 0.0);
    std::vector<double> at_risk(static_cast<std::size_t>(T), 0.0);
    // A row with slot q (last grid index whose event time <= row time) is at
    // risk exactly for grid indices 0..q.
    for (int i = begin; i < end; ++i) {
      const int r = rows[static_cast<std::size_t>(i)];
      const double t = target_.surv.time[r];
      const int q = static_cast<int>(std::upper_bound(event_times.begin(), event_times.end(), t) -
                                     event_times.begin()) - 1;
      if (q >= 0) {
        at_risk[static_cast<std::size_t>(q)] += 1.0;  // suffix-summed below
        if (target_.surv.event[static_cast<std::size_t>(r)] == 1 && event_times[static_cast<std::size_t>(q)] == t)
          deaths[static_cast<std::size_t>(q)] += 1.0;
      }
    }
    for (int t = T - 2; t >= 0; --t) at_risk[static_cast<std::size_t>(t)] += at_risk[static_cast<std::size_t>(t + 1)];

    // Sweep sorted feature values, keeping per-grid-slot left-child tallies.
    const auto v = sorted_feature(rows, begin, end, f);
    std::vector<double> left_pos_count(static_cast<std::size_t>(T), 0.0);
    std::vector<double> left_deaths(static_cast<std::size_t>(T), 0.0);
    std::vector<double> left_at_risk(static_cast<std::size_t>(T), 0.0);

    auto slot_of = [&](int row) {
      const double t = target_.surv.time[row];
      return static_cast<int>(std::upper_bound(event_times.begin(), event_times.end(), t) -
                              event_times.begin()) - 1;
    };

    for (int i = 0; i < m - 1; ++i) {
      const int r = v[static_cast<std::size_t>(i)].second;
      const int q = slot_of(r);
      if (q >= 0) {
        left_pos_count[static_cast<std::size_t>(q)] += 1.0;
        if (target_.surv.event[static_cast<std::size_t>(r)] == 1 &&
            event_times[static_cast<std::size_t>(q)] == target_.surv.time[r])
          left_deaths[static_cast<std::size_t>(q)] += 1.0;
      }
      if (v[static_cast<std::size_t>(i)].first == v[static_cast<std::size_t>(i + 1)].first) continue;
      const int nl = i + 1;
      if (!child_sizes_ok(nl, m)) continue;

      double suffix = 0.0;
      double num = 0.0, den = 0.0;
      for (int t = T - 1; t >= 0; --t) {
        suffix += left_pos_count[static_cast<std::size_t>(t)];
        left_at_risk[static_cast<std::size_t>(t)] = suffix;
      }
      for (int t = 0; t < T; ++t) {
        const double Y = at_risk[static_cast<std::size_t>(t)];
        const double d = deaths[static_cast<std::size_t>(t)];
        if (Y < 2.0 || d <= 0.0) continue;
        const double Yl = left_at_risk[static_cast<std::size_t>(t)];
        num += left_deaths[static_cast<std::size_t>(t)] - Yl * d / Y;
        den += (Yl / Y) * (1.0 - Yl / Y) * ((Y - d) / (Y - 1.0)) * d;
      }
      if (den <= 0.0) continue;
      const double z = std::fabs(num) / std::sqrt(den);
      consider(best, z, f,
               midpoint(v[static_cast<std::size_t>(i)].first, v[static_cast<std::size_t>(i + 1)].first));
    }
  }

  const Matrix& X_;
  const Target& target_;
  const TreeParams& params_;
  Rng& rng_;
  Tree& tree_;
  std::vector<double> class_values_;
  std::vector<int> class_of_row_;
};

void validate_training_input(const FeatureMatrix& data, const Target& targets) {
  if (data.rows() == 0) throw EmptyDataError("training data is empty");
  if (targets.size() != data.rows())
    throw DimensionMismatchError("target length does not match row count");
  if (targets.kind == TargetKind::Survival) {
    targets.surv.validate();
    if (targets.surv.event_count() == 0)
      throw AllCensoredError("survival target has no observed events");
  }
}

}  // namespace

Tree fit_tree(const FeatureMatrix& data, const Target& targets, const TreeParams& params, Rng& rng) {
  validate_training_input(data, targets);
  const TreeParams rp = params.resolved(targets.kind, static_cast<int>(data.cols()));

  const auto n = data.rows();
  const auto draws = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::llround(rp.bootstrap_fraction * static_cast<double>(n))));
  Tree tree;
  tree.bootstrap_indices.resize(static_cast<std::size_t>(draws));
  for (auto& r : tree.bootstrap_indices)
    r = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));

  std::vector<int> rows = tree.bootstrap_indices;
  TreeBuilder builder(data.values, targets, rp, rng, tree);
  builder.grow(rows, 0, static_cast<int>(rows.size()), 0);
  return tree;
}

Forest fit_forest(const FeatureMatrix& data, const Target& targets, const TreeParams& params,
                  int num_trees, std::uint64_t seed, int threads) {
  validate_training_input(data, targets);
  if (num_trees < 1) throw DataError("number of trees must be >= 1");

  Forest forest;
  forest.params = params.resolved(targets.kind, static_cast<int>(data.cols()));
  forest.target_kind = targets.kind;
  forest.feature_count = static_cast<int>(data.cols());
  forest.rng_seed = seed;
  forest.trees.resize(static_cast<std::size_t>(num_trees));

  auto fit_one = [&](int m) {
    Rng rng(seed + static_cast<std::uint64_t>(m));
    forest.trees[static_cast<std::size_t>(m)] = fit_tree(data, targets, forest.params, rng);
  };

  threads = std::max(1, std::min(threads, num_trees));
  if (threads == 1) {
    for (int m = 0; m < num_trees; ++m) fit_one(m);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const int m = next.fetch_add(1);
          if (m >= num_trees) return;
          try {
            fit_one(m);
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
  return forest;
}

Vector predict_forest(const Forest& forest, const FeatureMatrix& X) {
  if (X.cols() != forest.feature_count)
    throw DimensionMismatchError("prediction data has wrong feature count");
  const auto n = X.rows();
  Vector out = Vector::Zero(n);
  for (const Tree& tree : forest.trees)
    for (Eigen::Index i = 0; i < n; ++i) out[i] += tree.predict_row(X.values, i);
  out /= static_cast<double>(forest.trees.size());
  return out;
}

Eigen::MatrixXi terminal_leaf_ids(const Forest& forest, const FeatureMatrix& X) {
  if (X.cols() != forest.feature_count)
    throw DimensionMismatchError("leaf-id data has wrong feature count");
  const auto n = X.rows();
  Eigen::MatrixXi ids(n, static_cast<Eigen::Index>(forest.trees.size()));
  for (std::size_t m = 0; m < forest.trees.size(); ++m) {
    const Tree& tree = forest.trees[m];
    for (Eigen::Index i = 0; i < n; ++i)
      ids(i, static_cast<Eigen::Index>(m)) =
          tree.nodes[static_cast<std::size_t>(tree.leaf_node(X.values, i))].leaf_id;
  }
  return ids;
}

namespace {

using nlohmann::json;

json node_to_json(const TreeNode& nd) {
  if (nd.is_leaf()) return json{{"id", nd.leaf_id}, {"p", nd.prediction}};
  return json{{"f", nd.feature}, {"t", nd.threshold}, {"l", nd.left}, {"r", nd.right}};
}

TreeNode node_from_json(const json& j) {
  TreeNode nd;
  if (j.contains("id")) {
    nd.leaf_id = j.at("id").get<int>();
    nd.prediction = j.at("p").get<double>();
  } else {
    nd.feature = j.at("f").get<int>();
    nd.threshold = j.at("t").get<double>();
    nd.left = j.at("l").get<int>();
    nd.right = j.at("r").get<int>();
  }
  return nd;
}

TargetKind target_kind_from_name(const std::string& s) {
  if (s == "continuous") return TargetKind::Continuous;
  if (s == "binary") return TargetKind::Binary;
  if (s == "survival") return TargetKind::Survival;
  throw DataError("unknown target kind: " + s);
}

}  // namespace

std::string forest_to_json(const Forest& forest) {
  json j;
  j["format"] = "rfkern-forest";
  j["version"] = 1;
  j["target_kind"] = target_kind_name(forest.target_kind);
  j["feature_count"] = forest.feature_count;
  j["seed"] = forest.rng_seed;
  j["params"] = {{"mtry", forest.params.mtry},
                 {"min_node_size", forest.params.min_node_size},
                 {"max_depth", forest.params.max_depth},
                 {"bootstrap_fraction", forest.params.bootstrap_fraction}};
  json trees = json::array();
  for (const Tree& tree : forest.trees) {
    json nodes = json::array();
    for (const TreeNode& nd : tree.nodes) nodes.push_back(node_to_json(nd));
    trees.push_back(json{{"nodes", std::move(nodes)}, {"bootstrap", tree.bootstrap_indices}});
  }
  j["trees"] = std::move(trees);
  return j.dump();
}

Forest forest_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "rfkern-forest") throw SchemaError("not a forest document");
  if (j.value("version", 0) != 1) throw SchemaError("unsupported forest format version");
  Forest forest;
  forest.target_kind = target_kind_from_name(j.at("target_kind").get<std::string>());
  forest.feature_count = j.at("feature_count").get<int>();
  forest.rng_seed = j.at("seed").get<std::uint64_t>();
  const json& p = j.at("params");
  forest.params.mtry = p.at("mtry").get<int>();
  forest.params.min_node_size = p.at("min_node_size").get<double>();
  forest.params.max_depth = p.at("max_depth").get<int>();
  forest.params.bootstrap_fraction = p.at("bootstrap_fraction").get<double>();
  for (const json& tj : j.at("trees")) {
    Tree tree;
    for (const json& nj : tj.at("nodes")) {
      tree.nodes.push_back(node_from_json(nj));
      if (tree.nodes.back().is_leaf()) ++tree.leaf_count;
    }
    tree.bootstrap_indices = tj.at("bootstrap").get<std::vector<int>>();
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

void save_forest(const Forest& forest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << forest_to_json(forest);
}

Forest load_forest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return forest_from_json(text);
}

}  // namespace rfkern
