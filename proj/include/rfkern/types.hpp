#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "rfkern/errors.hpp"

namespace rfkern {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense n x p table of real-valued features with column names.
struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> names;

  FeatureMatrix() = default;
  explicit FeatureMatrix(Matrix v) : values(std::move(v)) { default_names(); }
  FeatureMatrix(Matrix v, std::vector<std::string> n) : values(std::move(v)), names(std::move(n)) {
    if (static_cast<Eigen::Index>(names.size()) != values.cols())
      throw ShapeMismatchError("feature names do not match column count");
  }

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  FeatureMatrix select_rows(const std::vector<int>& idx) const {
    Matrix out(static_cast<Eigen::Index>(idx.size()), values.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = values.row(idx[i]);
    return FeatureMatrix(std::move(out), names);
  }

 private:
  void default_names() {
    names.resize(static_cast<std::size_t>(values.cols()));
    for (std::size_t j = 0; j < names.size(); ++j) names[j] = "x" + std::to_string(j + 1);
  }
};

enum class TargetKind { Continuous, Binary, Survival };

inline const char* target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::Continuous: return "continuous";
    case TargetKind::Binary: return "binary";
    case TargetKind::Survival: return "survival";
  }
  return "?";
}

// Right-censored outcome: observed time plus event indicator
// (1 = event observed, 0 = censored at that time).
struct SurvivalData {
  Vector time;
  std::vector<int> event;

  Eigen::Index size() const { return time.size(); }
  long event_count() const {
    long c = 0;
    for (int e : event) c += e;
    return c;
  }

  void validate() const {
    if (static_cast<Eigen::Index>(event.size()) != time.size())
      throw ShapeMismatchError("survival time/event lengths differ");
    for (Eigen::Index i = 0; i < time.size(); ++i) {
      if (!(time[i] > 0.0)) throw DataError("survival times must be strictly positive");
      if (event[static_cast<std::size_t>(i)] != 0 && event[static_cast<std::size_t>(i)] != 1)
        throw DataError("event indicators must be 0 or 1");
    }
  }

  SurvivalData select(const std::vector<int>& idx) const {
    SurvivalData out;
    out.time.resize(static_cast<Eigen::Index>(idx.size()));
    out.event.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.time[static_cast<Eigen::Index>(i)] = time[idx[i]];
      out.event[i] = event[static_cast<std::size_t>(idx[i])];
    }
    return out;
  }
};

// Tagged union over the three target kinds. `y` holds continuous values or
// class labels; `surv` is populated only for survival targets.
struct Target {
  TargetKind kind = TargetKind::Continuous;
  Vector y;
  SurvivalData surv;

  Eigen::Index size() const { return kind == TargetKind::Survival ? surv.size() : y.size(); }

  static Target continuous(Vector values) {
    Target t;
    t.kind = TargetKind::Continuous;
    t.y = std::move(values);
    return t;
  }

  // Strict two-class encoding: labels must be -1 or +1.
  static Target binary(Vector labels) {
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
      if (labels[i] != -1.0 && labels[i] != 1.0)
        throw InvalidLabelError("binary labels must be -1 or +1");
    }
    return classification(std::move(labels));
  }

  // Relaxed classification encoding used where a multi-class label set drives
  // tree splitting only (kernel figure export); shares the Binary kind.
  static Target classification(Vector labels) {
    Target t;
    t.kind = TargetKind::Binary;
    t.y = std::move(labels);
    return t;
  }

  static Target survival(SurvivalData data) {
    data.validate();
    Target t;
    t.kind = TargetKind::Survival;
    t.surv = std::move(data);
    return t;
  }

  Target select(const std::vector<int>& idx) const {
    Target out;
    out.kind = kind;
    if (kind == TargetKind::Survival) {
      out.surv = surv.select(idx);
    } else {
      out.y.resize(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t i = 0; i < idx.size(); ++i) out.y[static_cast<Eigen::Index>(i)] = y[idx[i]];
    }
    return out;
  }
};

}  // namespace rfkern
