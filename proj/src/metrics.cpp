#include "rfkern/metrics.hpp"

namespace rfkern {

MetricValue mse(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size()) throw ShapeMismatchError("mse: length mismatch");
  if (y_true.size() == 0) throw EmptyDataError("mse: empty input");
  const double v = (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size());
  return MetricValue{MetricName::MSE, v, -1};
}

MetricValue accuracy(const Vector& labels_true, const Vector& labels_pred) {
  if (labels_true.size() != labels_pred.size()) throw ShapeMismatchError("accuracy: length mismatch");
  if (labels_true.size() == 0) throw EmptyDataError("accuracy: empty input");
  long hits = 0;
  for (Eigen::Index i = 0; i < labels_true.size(); ++i) {
    const double a = labels_true[i];
    const double b = labels_pred[i];
    if ((a != -1.0 && a != 1.0) || (b != -1.0 && b != 1.0))
      throw InvalidLabelError("accuracy: labels must be -1 or +1");
    if (a == b) ++hits;
  }
  return MetricValue{MetricName::Accuracy, static_cast<double>(hits) / static_cast<double>(labels_true.size()), -1};
}

MetricValue c_index(const SurvivalData& data, const Vector& h, bool half_credit_ties) {
  data.validate();
  const Eigen::Index n = data.size();
  if (h.size() != n) throw ShapeMismatchError("c_index: prognostic index length mismatch");

  long comparable = 0;
  double concordant = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double yi = data.time[i];
      const double yj = data.time[j];
      const bool comp = (yi < yj && data.event[static_cast<std::size_t>(i)] == 1) ||
                        (yj < yi && data.event[static_cast<std::size_t>(j)] == 1);
      if (!comp) continue;
      ++comparable;
      const double d = (h[j] - h[i]) * (yi - yj);
      if (d > 0.0) {
        concordant += 1.0;
      } else if (half_credit_ties && h[i] == h[j]) {
        concordant += 0.5;
      }
    }
  }
  if (comparable == 0) throw NoComparablePairsError("c_index: no comparable pairs");
  return MetricValue{MetricName::CIndex, concordant / static_cast<double>(comparable), comparable};
}

}  // namespace rfkern
