#include "mtsent/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "mtsent/errors.hpp"
#include "mtsent/metrics.hpp"
#include "mtsent/rng.hpp"

namespace mtsent {

namespace {

constexpr std::uint64_t kFitStream = 101;
constexpr std::uint64_t kFoldStreamBase = 200;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log1p_exp(double x) {  // log(1 + exp(x)) without overflow
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// Per-example loss and d(loss)/d(scores) for one strategy.
double loss_and_dscores(LinearStrategy strategy, const std::vector<double>& s, int y,
                        std::vector<double>& ds) {
  const int k = static_cast<int>(s.size());
  ds.assign(s.size(), 0.0);
  switch (strategy) {
    case LinearStrategy::LogisticOvr: {
      double loss = 0.0;
      for (int j = 0; j < k; ++j) {
        const double z = j == y ? 1.0 : -1.0;
        loss += log1p_exp(-z * s[static_cast<std::size_t>(j)]);
        ds[static_cast<std::size_t>(j)] = -z * sigmoid(-z * s[static_cast<std::size_t>(j)]);
      }
      return loss;
    }
    case LinearStrategy::Multinomial: {
      double mx = s[0];
      for (double v : s) mx = std::max(mx, v);
      double zsum = 0.0;
      for (int j = 0; j < k; ++j) {
        ds[static_cast<std::size_t>(j)] = std::exp(s[static_cast<std::size_t>(j)] - mx);
        zsum += ds[static_cast<std::size_t>(j)];
      }
      for (double& v : ds) v /= zsum;
      const double p = std::max(ds[static_cast<std::size_t>(y)], 1e-12);
      ds[static_cast<std::size_t>(y)] -= 1.0;
      return -std::log(p);
    }
    case LinearStrategy::HingeOvr: {
      double loss = 0.0;
      for (int j = 0; j < k; ++j) {
        const double z = j == y ? 1.0 : -1.0;
        const double margin = 1.0 - z * s[static_cast<std::size_t>(j)];
        if (margin > 0.0) {
          loss += margin;
          ds[static_cast<std::size_t>(j)] = -z;
        }
      }
      return loss;
    }
    case LinearStrategy::CrammerSinger: {
      int rival = y == 0 ? 1 : 0;
      for (int j = 0; j < k; ++j) {
        if (j != y && s[static_cast<std::size_t>(j)] > s[static_cast<std::size_t>(rival)]) {
          rival = j;
        }
      }
      const double margin =
          1.0 + s[static_cast<std::size_t>(rival)] - s[static_cast<std::size_t>(y)];
      if (margin > 0.0) {
        ds[static_cast<std::size_t>(rival)] = 1.0;
        ds[static_cast<std::size_t>(y)] = -1.0;
        return margin;
      }
      return 0.0;
    }
  }
  throw Error("unreachable strategy");
}

void check_rows(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
  if (x.empty()) throw EmptyInput();
  if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
  for (const std::vector<double>& row : x) {
    if (row.size() != x[0].size()) {
      throw DimensionMismatch("feature rows differ in length");
    }
  }
}

}  // namespace

std::string strategy_name(LinearStrategy s) {
  switch (s) {
    case LinearStrategy::LogisticOvr: return "lr_ovr";
    case LinearStrategy::Multinomial: return "maxent";
    case LinearStrategy::HingeOvr: return "svm_ovr";
    case LinearStrategy::CrammerSinger: return "svm_cs";
  }
  throw Error("unreachable strategy");
}

LinearStrategy parse_strategy(const std::string& name) {
  if (name == "lr_ovr") return LinearStrategy::LogisticOvr;
  if (name == "maxent") return LinearStrategy::Multinomial;
  if (name == "svm_ovr") return LinearStrategy::HingeOvr;
  if (name == "svm_cs") return LinearStrategy::CrammerSinger;
  throw Error("unknown baseline strategy '" + name +
              "' (expected lr_ovr, maxent, svm_ovr or svm_cs)");
}

std::vector<double> LinearModel::scores(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != W.cols) {
    throw DimensionMismatch("input has " + std::to_string(x.size()) + " features, model expects " +
                            std::to_string(W.cols));
  }
  std::vector<double> s(b);
  for (int j = 0; j < W.rows; ++j) {
    const double* row = W.values.data() + static_cast<std::size_t>(j) * W.cols;
    double acc = 0.0;
    for (int d = 0; d < W.cols; ++d) acc += row[d] * x[static_cast<std::size_t>(d)];
    s[static_cast<std::size_t>(j)] += acc;
  }
  return s;
}

int LinearModel::predict(const std::vector<double>& x) const {
  const std::vector<double> s = scores(x);
  int best = 0;
  for (int j = 1; j < static_cast<int>(s.size()); ++j) {
    if (s[static_cast<std::size_t>(j)] > s[static_cast<std::size_t>(best)]) best = j;
  }
  return best;
}

double linear_objective(const LinearModel& model, const std::vector<std::vector<double>>& x,
                        const std::vector<int>& y, const std::vector<double>& class_wts) {
  double value = 0.0;
  linear_objective_gradient(model, x, y, class_wts, nullptr, nullptr, &value);
  return value;
}

void linear_objective_gradient(const LinearModel& model, const std::vector<std::vector<double>>& x,
                               const std::vector<int>& y, const std::vector<double>& class_wts,
                               Tensor2* grad_w, std::vector<double>* grad_b, double* value) {
  check_rows(x, y);
  const int k = model.W.rows;
  const double n = static_cast<double>(x.size());
  if (grad_w) {
    grad_w->resize_like(model.W);
  }
  if (grad_b) grad_b->assign(model.b.size(), 0.0);
  double total = 0.0;
  std::vector<double> ds;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = class_wts[static_cast<std::size_t>(y[i])];
    const std::vector<double> s = model.scores(x[i]);
    total += w * loss_and_dscores(model.strategy, s, y[i], ds);
    if (grad_w || grad_b) {
      for (int j = 0; j < k; ++j) {
        const double coef = w * ds[static_cast<std::size_t>(j)] / n;
        if (coef == 0.0) continue;
        if (grad_w) {
          double* row = grad_w->values.data() + static_cast<std::size_t>(j) * grad_w->cols;
          for (int d = 0; d < grad_w->cols; ++d) row[d] += coef * x[i][static_cast<std::size_t>(d)];
        }
        if (grad_b) (*grad_b)[static_cast<std::size_t>(j)] += coef;
      }
    }
  }
  total /= n;
  double reg = 0.0;
  for (double v : model.W.values) reg += v * v;
  total += reg / (2.0 * model.C);
  if (grad_w) {
    for (std::size_t i = 0; i < model.W.values.size(); ++i) {
      grad_w->values[i] += model.W.values[i] / model.C;
    }
  }
  if (value) *value = total;
}

LinearModel fit_linear(LinearStrategy strategy, const std::vector<std::vector<double>>& x,
                       const std::vector<int>& y, int classes,
                       const std::vector<double>& class_wts, double c_value,
                       const FitConfig& fit) {
  check_rows(x, y);
  if (classes < 2) throw Error("need at least 2 classes");
  if (c_value <= 0.0) throw Error("C must be positive");
  const int dim = static_cast<int>(x[0].size());
  for (int label : y) {
    if (label < 0 || label >= classes) throw Error("label outside [0, classes)");
  }

  LinearModel model;
  model.strategy = strategy;
  model.C = c_value;
  model.W = Tensor2(classes, dim);
  model.b.assign(static_cast<std::size_t>(classes), 0.0);

  Tensor2 avg_w(classes, dim);
  std::vector<double> avg_b(static_cast<std::size_t>(classes), 0.0);
  long avg_steps = 0;
  const int burn_in = fit.epochs / 2;

  Rng rng(Rng::substream(fit.seed, kFitStream));
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const double lambda = 1.0 / c_value;
  long t = 0;
  std::vector<double> ds;
  for (int epoch = 0; epoch < fit.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      ++t;
      const double eta = fit.eta0 / (1.0 + fit.eta0 * lambda * static_cast<double>(t));
      const std::vector<double> s = model.scores(x[idx]);
      const double w = class_wts[static_cast<std::size_t>(y[idx])];
      const double loss = loss_and_dscores(strategy, s, y[idx], ds);
      if (!std::isfinite(loss)) throw NonFiniteLoss();
      // theta <- theta - eta * (w * dloss + W / C); the bias is unregularized.
      const double shrink = 1.0 - eta * lambda;
      for (double& v : model.W.values) v *= shrink;
      for (int j = 0; j < classes; ++j) {
        const double coef = eta * w * ds[static_cast<std::size_t>(j)];
        if (coef == 0.0) continue;
        double* row = model.W.values.data() + static_cast<std::size_t>(j) * dim;
        const std::vector<double>& xi = x[idx];
        for (int d = 0; d < dim; ++d) row[d] -= coef * xi[static_cast<std::size_t>(d)];
        model.b[static_cast<std::size_t>(j)] -= coef;
      }
      if (epoch >= burn_in) {
        ++avg_steps;
        const double inv = 1.0 / static_cast<double>(avg_steps);
        for (std::size_t i = 0; i < avg_w.values.size(); ++i) {
          avg_w.values[i] += (model.W.values[i] - avg_w.values[i]) * inv;
        }
        for (std::size_t j = 0; j < avg_b.size(); ++j) {
          avg_b[j] += (model.b[j] - avg_b[j]) * inv;
        }
      }
    }
    if (!model.W.all_finite()) throw NonFiniteLoss();
  }

  if (avg_steps > 0) {
    model.W = std::move(avg_w);
    model.b = std::move(avg_b);
  }
  return model;
}

std::vector<double> default_c_grid() {
  return {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
}

std::vector<int> stratified_fold_assignment(const std::vector<int>& labels, int folds,
                                            std::uint64_t seed) {
  if (folds < 2) throw Error("need at least 2 folds");
  if (static_cast<int>(labels.size()) < folds) throw TooFewExamples(folds);
  int classes = 0;
  for (int label : labels) classes = std::max(classes, label + 1);
  std::vector<int> fold_of(labels.size(), -1);
  int next_fold = 0;  // carried across classes so overall fold sizes stay even
  for (int c = 0; c < classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    Rng rng(Rng::substream(seed, kFoldStreamBase + static_cast<std::uint64_t>(c)));
    rng.shuffle(members);
    for (std::size_t i : members) {
      fold_of[i] = next_fold;
      next_fold = (next_fold + 1) % folds;
    }
  }
  return fold_of;
}

GridSearchResult grid_search_cv(LinearStrategy strategy,
                                const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y, int classes, WeightScheme scheme,
                                const CVPlan& plan, const FitConfig& fit,
                                const FoldScorer& scorer) {
  check_rows(x, y);
  const std::vector<int> fold_of = stratified_fold_assignment(y, plan.folds, plan.seed);

  GridSearchResult result;
  result.best_c = 0.0;
  double best_mean = 0.0;
  for (double c_value : plan.c_grid) {
    double mae_sum = 0.0;
    for (int fold = 0; fold < plan.folds; ++fold) {
      std::vector<std::size_t> train_idx, val_idx;
      for (std::size_t i = 0; i < y.size(); ++i) {
        (fold_of[i] == fold ? val_idx : train_idx).push_back(i);
      }
      double mae, micro;
      if (scorer) {
        std::tie(mae, micro) = scorer(c_value, fold, train_idx, val_idx);
      } else {
        std::vector<std::vector<double>> tx;
        std::vector<int> ty;
        tx.reserve(train_idx.size());
        ty.reserve(train_idx.size());
        for (std::size_t i : train_idx) {
          tx.push_back(x[i]);
          ty.push_back(y[i]);
        }
        std::vector<double> wts(static_cast<std::size_t>(classes), 1.0);
        if (scheme == WeightScheme::InverseFrequency) {
          std::vector<long> counts(static_cast<std::size_t>(classes), 0);
          for (int label : ty) ++counts[static_cast<std::size_t>(label)];
          long present = 0, total = 0;
          for (long n : counts) {
            if (n > 0) ++present;
            total += n;
          }
          for (std::size_t cidx = 0; cidx < counts.size(); ++cidx) {
            // Classes absent from this fold's training part keep weight 1.
            if (counts[cidx] > 0) {
              wts[cidx] = static_cast<double>(total) /
                          (static_cast<double>(present) * static_cast<double>(counts[cidx]));
            }
          }
        }
        const LinearModel model = fit_linear(strategy, tx, ty, classes, wts, c_value, fit);
        std::vector<int> truth, pred;
        truth.reserve(val_idx.size());
        pred.reserve(val_idx.size());
        for (std::size_t i : val_idx) {
          truth.push_back(y[i]);
          pred.push_back(model.predict(x[i]));
        }
        mae = mae_macro(truth, pred, classes);
        micro = micro_f1(truth, pred, classes);
      }
      ++result.fits;
      result.cells.push_back({c_value, fold, mae, micro});
      mae_sum += mae;
    }
    const double mean = mae_sum / plan.folds;
    result.mean_mae_by_c.emplace_back(c_value, mean);
    if (result.best_c == 0.0 || mean < best_mean) {  // strict <: ties keep the smaller C
      result.best_c = c_value;
      best_mean = mean;
    }
  }

  std::vector<double> wts(static_cast<std::size_t>(classes), 1.0);
  if (scheme == WeightScheme::InverseFrequency) {
    std::vector<long> counts(static_cast<std::size_t>(classes), 0);
    for (int label : y) ++counts[static_cast<std::size_t>(label)];
    wts = class_weights(counts, WeightScheme::InverseFrequency).weights;
  }
  result.final_model = fit_linear(strategy, x, y, classes, wts, result.best_c, fit);
  return result;
}

void write_tuning_report(std::ostream& out, const std::string& strategy,
                         const GridSearchResult& result) {
  out << "strategy\tC\tfold\tMAE_M\tmicro_F1\n";
  for (const CVCell& cell : result.cells) {
    out << strategy << '\t' << cell.c_value << '\t' << cell.fold << '\t' << cell.mae << '\t'
        << cell.micro << "\n";
  }
  for (const auto& [c_value, mean_mae] : result.mean_mae_by_c) {
    double micro_sum = 0.0;
    int n = 0;
    for (const CVCell& cell : result.cells) {
      if (cell.c_value == c_value) {
        micro_sum += cell.micro;
        ++n;
      }
    }
    out << strategy << '\t' << c_value << "\tmean\t" << mean_mae << '\t' << micro_sum / n << "\n";
  }
}

}  // namespace mtsent
