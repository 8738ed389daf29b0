#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mtsent/errors.hpp"

namespace mtsent {

/// Row = true class, column = predicted class.
struct ConfusionMatrix {
  int k = 0;
  std::vector<long> counts;  // k*k, row-major

  explicit ConfusionMatrix(int k = 0) : k(k), counts(static_cast<std::size_t>(k) * k, 0) {}
  long& at(int truth, int pred) { return counts[static_cast<std::size_t>(truth) * k + pred]; }
  long at(int truth, int pred) const { return counts[static_cast<std::size_t>(truth) * k + pred]; }
  long total() const;
};

struct PerClassStats {
  long support = 0;
  double mae = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  ConfusionMatrix confusion;
  double mae_macro = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::vector<PerClassStats> per_class;
  long n_examples = 0;
};

/// Macro-averaged mean absolute error over ordinal labels: the per-true-class
/// mean of |pred - truth|, averaged across classes. Classes absent from the
/// truth set are excluded from the average (their per-class mean is undefined).
double mae_macro(const std::vector<int>& truth, const std::vector<int>& pred, int k);

/// Micro-averaged F1 = 2*TP / (2*TP + FP + FN) with counts summed over
/// classes. For single-label classification this equals accuracy.
double micro_f1(const std::vector<int>& truth, const std::vector<int>& pred, int k);

/// Mean of per-class F1 over all k classes; a class with no true and no
/// predicted examples contributes 0.
double macro_f1(const std::vector<int>& truth, const std::vector<int>& pred, int k);

/// All metrics plus the confusion matrix in one pass.
EvalReport evaluate(const std::vector<int>& truth, const std::vector<int>& pred, int k);

/// Key-value serialization plus an optional per-class table.
void write_report(const EvalReport& report, const std::vector<std::string>& class_names,
                  std::ostream& out);

}  // namespace mtsent
