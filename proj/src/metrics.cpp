#include "mtsent/metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <ostream>

namespace mtsent {

namespace {

void check_inputs(const std::vector<int>& truth, const std::vector<int>& pred, int k) {
  if (truth.size() != pred.size()) throw LengthMismatch(truth.size(), pred.size());
  if (truth.empty()) throw EmptyInput();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= k || pred[i] < 0 || pred[i] >= k) {
      throw Error("label out of range at example " + std::to_string(i));
    }
  }
}

ConfusionMatrix confusion_of(const std::vector<int>& truth, const std::vector<int>& pred, int k) {
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.at(truth[i], pred[i]) += 1;
  return cm;
}

}  // namespace

long ConfusionMatrix::total() const {
  long t = 0;
  for (long c : counts) t += c;
  return t;
}

double mae_macro(const std::vector<int>& truth, const std::vector<int>& pred, int k) {
  check_inputs(truth, pred, k);
  std::vector<double> abs_sum(k, 0.0);
  std::vector<long> support(k, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    abs_sum[truth[i]] += std::abs(pred[i] - truth[i]);
    support[truth[i]] += 1;
  }
  double sum_of_means = 0.0;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    if (support[c] == 0) continue;
    sum_of_means += abs_sum[c] / static_cast<double>(support[c]);
    ++present;
  }
  return sum_of_means / static_cast<double>(present);
}

double micro_f1(const std::vector<int>& truth, const std::vector<int>& pred, int k) {
  check_inputs(truth, pred, k);
  const ConfusionMatrix cm = confusion_of(truth, pred, k);
  long tp = 0, fp = 0, fn = 0;
  for (int c = 0; c < k; ++c) {
    tp += cm.at(c, c);
    for (int o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += cm.at(o, c);
      fn += cm.at(c, o);
    }
  }
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double macro_f1(const std::vector<int>& truth, const std::vector<int>& pred, int k) {
  check_inputs(truth, pred, k);
  const ConfusionMatrix cm = confusion_of(truth, pred, k);
  double sum = 0.0;
  for (int c = 0; c < k; ++c) {
    long tp = cm.at(c, c), fp = 0, fn = 0;
    for (int o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += cm.at(o, c);
      fn += cm.at(c, o);
    }
    const long denom = 2 * tp + fp + fn;
    sum += denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
  return sum / static_cast<double>(k);
}

EvalReport evaluate(const std::vector<int>& truth, const std::vector<int>& pred, int k) {
  check_inputs(truth, pred, k);
  EvalReport report;
  report.confusion = confusion_of(truth, pred, k);
  report.n_examples = static_cast<long>(truth.size());
  report.mae_macro = mae_macro(truth, pred, k);
  report.micro_f1 = micro_f1(truth, pred, k);
  report.macro_f1 = macro_f1(truth, pred, k);
  report.per_class.resize(k);
  std::vector<double> abs_sum(k, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    abs_sum[truth[i]] += std::abs(pred[i] - truth[i]);
    report.per_class[truth[i]].support += 1;
  }
  for (int c = 0; c < k; ++c) {
    PerClassStats& st = report.per_class[c];
    st.mae = st.support == 0 ? 0.0 : abs_sum[c] / static_cast<double>(st.support);
    long tp = report.confusion.at(c, c), fp = 0, fn = 0;
    for (int o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += report.confusion.at(o, c);
      fn += report.confusion.at(c, o);
    }
    const long denom = 2 * tp + fp + fn;
    st.f1 = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
  return report;
}

void write_report(const EvalReport& report, const std::vector<std::string>& class_names,
                  std::ostream& out) {
  out << "n_examples\t" << report.n_examples << '\n';
  out << "mae_macro\t" << report.mae_macro << '\n';
  out << "micro_f1\t" << report.micro_f1 << '\n';
  out << "macro_f1\t" << report.macro_f1 << '\n';
  out << "class\tsupport\tmae\tf1\n";
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const PerClassStats& st = report.per_class[c];
    const std::string name = c < class_names.size() ? class_names[c] : "class" + std::to_string(c);
    out << name << '\t' << st.support << '\t' << st.mae << '\t' << st.f1 << '\n';
  }
  out << "confusion (rows = true, cols = predicted)\n";
  for (int r = 0; r < report.confusion.k; ++r) {
    for (int c = 0; c < report.confusion.k; ++c) {
      out << report.confusion.at(r, c) << (c + 1 == report.confusion.k ? '\n' : '\t');
    }
  }
}

}  // namespace mtsent
