#pragma once

// Independent metric evaluators written straight from the formulas, sharing
// no code with the library. Used to cross-check the real implementations.

#include <cmath>
#include <cstdlib>
#include <vector>

namespace oracle {

// Per-class mean absolute ordinal distance, averaged over the classes that
// appear in the truth vector.
inline double mae_macro(const std::vector<int>& truth, const std::vector<int>& pred, int k) {
  double total = 0.0;
  int nonempty = 0;
  for (int j = 0; j < k; ++j) {
    double sum = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] == j) {
        sum += std::abs(pred[i] - truth[i]);
        ++count;
      }
    }
    if (count > 0) {
      total += sum / static_cast<double>(count);
      ++nonempty;
    }
  }
  return nonempty > 0 ? total / nonempty : 0.0;
}

// Micro-averaged F1 the long way: per-class TP/FP/FN, pooled before the
// harmonic mean.
inline double micro_f1(const std::vector<int>& truth, const std::vector<int>& pred, int k) {
  long tp = 0, fp = 0, fn = 0;
  for (int j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool is_true = truth[i] == j;
      const bool is_pred = pred[i] == j;
      if (is_true && is_pred) ++tp;
      if (!is_true && is_pred) ++fp;
      if (is_true && !is_pred) ++fn;
    }
  }
  const long denom = 2 * tp + fp + fn;
  return denom > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
}

inline double accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
  long correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == pred[i]) ++correct;
  }
  return truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size());
}

}  // namespace oracle
