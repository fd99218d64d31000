#pragma once

#include <cstdint>
#include <vector>

#include "core/data.hpp"
#include "core/losses.hpp"

namespace dro {

struct EvaluationReport {
  double risk = 0.0;       // mean surrogate loss on the split
  double error = 0.0;      // zero-one error; sign(0) counts as a miss
  double error_pos = 0.0;  // restricted to y = +1 (0 when class absent)
  double error_neg = 0.0;  // restricted to y = -1
  std::int64_t n_eval = 0;
};

// Zero-one and per-class error for labels in {-1, +1}.
EvaluationReport binary_report(const LossModel& model,
                               const std::vector<double>& theta,
                               const Dataset& data);

struct MultiLabelResult {
  double precision = 0.0;
  double recall = 0.0;
  std::int64_t docs_zero_predicted = 0;  // contributed 0 to the precision mean
  std::int64_t docs_excluded_recall = 0; // empty true label set
};

// Per-document precision/recall averaged over documents. labels[k][i] is +1
// when document i carries class k. Zero-denominator conventions: a document
// with no predicted positives contributes 0 to precision; documents with an
// empty true label set are dropped from the recall mean and counted.
MultiLabelResult multilabel_pr(const std::vector<std::vector<double>>& thetas,
                               const Dataset& data,
                               const std::vector<std::vector<std::int8_t>>& labels);

}  // namespace dro
