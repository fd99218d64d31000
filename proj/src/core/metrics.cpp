#include "core/metrics.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace dro {

EvaluationReport binary_report(const LossModel& model,
                               const std::vector<double>& theta,
                               const Dataset& data) {
  if (data.examples.empty()) throw InputError("dataset is empty");
  EvaluationReport report;
  report.n_eval = data.n();

  KahanSum risk;
  std::int64_t miss = 0, miss_pos = 0, miss_neg = 0, n_pos = 0, n_neg = 0;
  for (const Example& ex : data.examples) {
    if (!ex.has_label() || (ex.label != 1.0 && ex.label != -1.0)) {
      throw InputError("binary report needs labels in {-1, +1}");
    }
    risk.add(loss_value(model, theta, ex));
    double margin = ex.dot(theta);
    bool wrong = margin * ex.label <= 0.0;  // sign(0) counts as a miss
    if (ex.label > 0.0) {
      ++n_pos;
      if (wrong) ++miss_pos;
    } else {
      ++n_neg;
      if (wrong) ++miss_neg;
    }
    if (wrong) ++miss;
  }
  auto nd = static_cast<double>(report.n_eval);
  report.risk = risk.value() / nd;
  report.error = static_cast<double>(miss) / nd;
  report.error_pos = n_pos > 0 ? static_cast<double>(miss_pos) / static_cast<double>(n_pos) : 0.0;
  report.error_neg = n_neg > 0 ? static_cast<double>(miss_neg) / static_cast<double>(n_neg) : 0.0;
  return report;
}

MultiLabelResult multilabel_pr(const std::vector<std::vector<double>>& thetas,
                               const Dataset& data,
                               const std::vector<std::vector<std::int8_t>>& labels) {
  if (thetas.empty()) throw InputError("need at least one classifier");
  if (labels.size() != thetas.size()) throw InputError("one label set per classifier");
  for (const auto& ls : labels) {
    if (static_cast<std::int64_t>(ls.size()) != data.n()) {
      throw InputError("label set size must match dataset size");
    }
  }

  MultiLabelResult out;
  KahanSum precision_acc, recall_acc;
  std::int64_t recall_docs = 0;
  for (std::int64_t i = 0; i < data.n(); ++i) {
    const Example& ex = data.examples[static_cast<std::size_t>(i)];
    std::int64_t correct = 0, predicted = 0, actual = 0;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      double margin = ex.dot(thetas[k]);
      bool is_true = labels[k][static_cast<std::size_t>(i)] > 0;
      if (margin >= 0.0 && is_true) ++correct;
      if (margin > 0.0) ++predicted;
      if (is_true) ++actual;
    }
    if (predicted > 0) {
      precision_acc.add(static_cast<double>(correct) / static_cast<double>(predicted));
    } else {
      ++out.docs_zero_predicted;  // contributes 0
    }
    if (actual > 0) {
      recall_acc.add(static_cast<double>(correct) / static_cast<double>(actual));
      ++recall_docs;
    } else {
      ++out.docs_excluded_recall;
    }
  }
  out.precision = precision_acc.value() / static_cast<double>(data.n());
  out.recall = recall_docs > 0 ? recall_acc.value() / static_cast<double>(recall_docs) : 0.0;
  return out;
}

}  // namespace dro
