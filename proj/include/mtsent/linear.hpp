#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mtsent/corpus.hpp"
#include "mtsent/tensor.hpp"

namespace mtsent {

/// The four baseline learners. All share one L2-regularized objective,
///   (1/N) * sum_i w_{y_i} * loss_i  +  (1/(2C)) * ||W||^2,
/// and differ only in the per-example loss.
enum class LinearStrategy {
  LogisticOvr,    // one-vs-rest log loss
  Multinomial,    // softmax cross-entropy
  HingeOvr,       // one-vs-rest hinge
  CrammerSinger,  // max(0, 1 + max_{j != y} s_j - s_y)
};

std::string strategy_name(LinearStrategy s);
LinearStrategy parse_strategy(const std::string& name);  // throws Error

struct LinearModel {
  LinearStrategy strategy = LinearStrategy::LogisticOvr;
  double C = 1.0;
  Tensor2 W;              // (classes x dim)
  std::vector<double> b;  // classes

  std::vector<double> scores(const std::vector<double>& x) const;
  /// argmax of scores; ties break toward the lower class index.
  int predict(const std::vector<double>& x) const;
};

struct FitConfig {
  int epochs = 100;
  double eta0 = 0.1;  // step size eta_t = eta0 / (1 + eta0 * t / C)
  std::uint64_t seed = 1;
};

/// Full-batch objective value and gradient at (model.W, model.b); used by
/// the finite-difference checks and the convergence monitor.
double linear_objective(const LinearModel& model, const std::vector<std::vector<double>>& x,
                        const std::vector<int>& y, const std::vector<double>& class_wts);
void linear_objective_gradient(const LinearModel& model, const std::vector<std::vector<double>>& x,
                               const std::vector<int>& y, const std::vector<double>& class_wts,
                               Tensor2* grad_w, std::vector<double>* grad_b,
                               double* value = nullptr);

/// Deterministic averaged stochastic subgradient descent. Iterates are
/// averaged after a burn-in of epochs/2; the averaged iterate is returned.
LinearModel fit_linear(LinearStrategy strategy, const std::vector<std::vector<double>>& x,
                       const std::vector<int>& y, int classes,
                       const std::vector<double>& class_wts, double c_value,
                       const FitConfig& fit = {});

/// Grid of nine decade steps 1e-4 .. 1e4.
std::vector<double> default_c_grid();

struct CVPlan {
  int folds = 10;
  std::vector<double> c_grid = default_c_grid();
  std::uint64_t seed = 1;
};

/// Stratified fold ids (one per example): per class in ascending order,
/// examples are shuffled (seeded) and dealt round-robin with a fold counter
/// carried across classes, so folds partition the data, per-class fold
/// counts differ by at most one, and every fold is nonempty when n >= folds.
/// Throws TooFewExamples(folds) when n < folds.
std::vector<int> stratified_fold_assignment(const std::vector<int>& labels, int folds,
                                            std::uint64_t seed);

struct CVCell {
  double c_value = 0.0;
  int fold = 0;
  double mae = 0.0;
  double micro = 0.0;
};

struct GridSearchResult {
  double best_c = 0.0;
  std::vector<CVCell> cells;  // one row per (C, fold)
  std::vector<std::pair<double, double>> mean_mae_by_c;
  int fits = 0;
  LinearModel final_model;  // retrained on all data at best_c
};

/// Test seam: replaces the per-(C, fold) fit+score with a stub returning
/// (MAE, micro-F1). Still recorded as one fit.
using FoldScorer = std::function<std::pair<double, double>(
    double c_value, int fold, const std::vector<std::size_t>& train_idx,
    const std::vector<std::size_t>& val_idx)>;

/// Cross-validated grid search minimizing mean validation MAE; ties pick the
/// smaller C. Per-fold class weights are recomputed on each fold's training
/// part (classes absent there fall back to weight 1). The final model is
/// retrained on all data with the winning C.
GridSearchResult grid_search_cv(LinearStrategy strategy,
                                const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y, int classes, WeightScheme scheme,
                                const CVPlan& plan, const FitConfig& fit = {},
                                const FoldScorer& scorer = nullptr);

/// Tab-separated rows `strategy, C, fold, MAE_M, micro_F1`, then one summary
/// row per C with `mean` in the fold column.
void write_tuning_report(std::ostream& out, const std::string& strategy,
                         const GridSearchResult& result);

}  // namespace mtsent
