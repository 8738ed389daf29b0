#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "mtsent/errors.hpp"
#include "mtsent/linear.hpp"
#include "mtsent/metrics.hpp"
#include "mtsent/rng.hpp"

using namespace mtsent;

namespace {

// Random instance for finite-difference checks of the full-batch objective.
struct Instance {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  std::vector<double> weights;
  int classes = 0;
  int dim = 0;
};

Instance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  Instance inst;
  inst.classes = 2 + static_cast<int>(rng.below(3));
  inst.dim = 1 + static_cast<int>(rng.below(6));
  const int n = 3 + static_cast<int>(rng.below(8));
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(inst.dim);
    for (auto& v : row) v = rng.uniform(-1.0, 1.0);
    inst.x.push_back(std::move(row));
    inst.y.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(inst.classes))));
  }
  for (int c = 0; c < inst.classes; ++c) inst.weights.push_back(rng.uniform(0.5, 2.0));
  return inst;
}

// Central finite differences of linear_objective against its gradient.
bool objective_gradcheck(LinearStrategy strategy, std::uint64_t seed, std::string* diag) {
  const Instance inst = random_instance(seed);
  LinearModel model;
  model.strategy = strategy;
  model.C = 0.5;
  model.W = Tensor2(inst.classes, inst.dim);
  model.b.assign(inst.classes, 0.0);
  Rng rng(seed * 13);
  for (auto& v : model.W.values) v = rng.uniform(-1.0, 1.0);
  for (auto& v : model.b) v = rng.uniform(-1.0, 1.0);

  Tensor2 gw;
  std::vector<double> gb;
  linear_objective_gradient(model, inst.x, inst.y, inst.weights, &gw, &gb);

  const double eps = 1e-5, tol = 1e-4;
  const auto check_one = [&](double& slot, double analytic, const std::string& where) {
    const double saved = slot;
    slot = saved + eps;
    const double up = linear_objective(model, inst.x, inst.y, inst.weights);
    slot = saved - eps;
    const double down = linear_objective(model, inst.x, inst.y, inst.weights);
    slot = saved;
    const double fd = (up - down) / (2.0 * eps);
    const double scale = std::max({1.0, std::abs(analytic), std::abs(fd)});
    if (std::abs(analytic - fd) > tol * scale) {
      if (diag) {
        *diag = where + ": analytic " + std::to_string(analytic) + " vs fd " + std::to_string(fd);
      }
      return false;
    }
    return true;
  };

  for (std::size_t i = 0; i < model.W.values.size(); ++i) {
    if (!check_one(model.W.values[i], gw.values[i], "W[" + std::to_string(i) + "]")) return false;
  }
  for (std::size_t i = 0; i < model.b.size(); ++i) {
    if (!check_one(model.b[i], gb[i], "b[" + std::to_string(i) + "]")) return false;
  }
  return true;
}

// Four linearly separable points in two classes.
void separable_toy(std::vector<std::vector<double>>* x, std::vector<int>* y) {
  *x = {{1.0, 1.0}, {2.0, 1.5}, {-1.0, -1.0}, {-2.0, -0.5}};
  *y = {0, 0, 1, 1};
}

}  // namespace

TEST_SUITE("linear") {

TEST_CASE("strategy names round-trip") {
  for (LinearStrategy s : {LinearStrategy::LogisticOvr, LinearStrategy::Multinomial,
                           LinearStrategy::HingeOvr, LinearStrategy::CrammerSinger}) {
    CHECK(parse_strategy(strategy_name(s)) == s);
  }
  CHECK(strategy_name(LinearStrategy::CrammerSinger) == "svm_cs");
  CHECK(strategy_name(LinearStrategy::Multinomial) == "maxent");
  CHECK_THROWS_AS(parse_strategy("nearest-centroid"), Error);
}

TEST_CASE("prediction is an argmax with low-index ties") {
  LinearModel model;
  model.strategy = LinearStrategy::Multinomial;
  model.W = Tensor2(3, 2);
  model.b.assign(3, 0.0);
  CHECK(model.predict({1.0, 1.0}) == 0);  // all scores tie at zero

  model.b = {0.0, 1.0, 0.0};
  CHECK(model.predict({1.0, 1.0}) == 1);

  // Positive scaling never changes the argmax.
  model.W.at(0, 0) = 0.3;
  model.W.at(2, 1) = 2.0;
  const int before = model.predict({0.7, 0.9});
  for (auto& v : model.W.values) v *= 3.5;
  for (auto& v : model.b) v *= 3.5;
  CHECK(model.predict({0.7, 0.9}) == before);

  CHECK_THROWS_AS(model.predict({1.0}), DimensionMismatch);
}

TEST_CASE("crammer-singer loss values match the formula") {
  // One example with x=[1] and W chosen to give scores [2,1,0].
  LinearModel model;
  model.strategy = LinearStrategy::CrammerSinger;
  model.C = 1e12;  // regularizer negligible
  model.W = Tensor2(3, 1);
  model.W.at(0, 0) = 2.0;
  model.W.at(1, 0) = 1.0;
  model.W.at(2, 0) = 0.0;
  model.b.assign(3, 0.0);
  const std::vector<std::vector<double>> x{{1.0}};
  const std::vector<double> w{1.0, 1.0, 1.0};

  // The regularizer contributes 5 / (2 * 1e12), inside the tolerance.
  CHECK(linear_objective(model, x, {0}, w) ==
        doctest::Approx(0.0).epsilon(1e-9));  // max(0, 1+1-2)
  CHECK(linear_objective(model, x, {1}, w) ==
        doctest::Approx(2.0).epsilon(1e-9));  // max(0, 1+2-1)
}

TEST_CASE("logistic objectives pass finite-difference checks") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::string diag;
    CAPTURE(seed);
    CHECK_MESSAGE(objective_gradcheck(LinearStrategy::LogisticOvr, seed, &diag), diag);
    CHECK_MESSAGE(objective_gradcheck(LinearStrategy::Multinomial, seed, &diag), diag);
  }
}

TEST_CASE("every strategy separates the toy problem at weak regularization") {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  separable_toy(&x, &y);
  const std::vector<double> weights{1.0, 1.0};
  for (LinearStrategy s : {LinearStrategy::LogisticOvr, LinearStrategy::Multinomial,
                           LinearStrategy::HingeOvr, LinearStrategy::CrammerSinger}) {
    const LinearModel model = fit_linear(s, x, y, 2, weights, 1e4);
    CAPTURE(strategy_name(s));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(model.predict(x[i]) == y[i]);
  }
}

TEST_CASE("averaged objective is non-increasing across checkpoint budgets") {
  Rng rng(606);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    const int label = static_cast<int>(rng.below(3));
    std::vector<double> row(4);
    for (std::size_t d = 0; d < row.size(); ++d) {
      row[d] = rng.uniform(-0.5, 0.5) + (static_cast<int>(d) == label ? 1.0 : 0.0);
    }
    x.push_back(std::move(row));
    y.push_back(label);
  }
  const std::vector<double> weights{1.0, 1.0, 1.0};

  FitConfig fit;
  fit.seed = 11;
  double previous = std::numeric_limits<double>::infinity();
  for (int budget = 10; budget <= 100; budget += 10) {
    fit.epochs = budget;
    const LinearModel model = fit_linear(LinearStrategy::Multinomial, x, y, 3, weights, 1.0, fit);
    const double value = linear_objective(model, x, y, weights);
    CHECK(value <= previous + 1e-6);
    previous = value;
  }
}

TEST_CASE("upweighting a class never hurts its training recall") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed * 101);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    // Imbalanced: class 0 rare (10), class 1 common (90), overlapping clouds.
    for (int i = 0; i < 100; ++i) {
      const int label = i < 10 ? 0 : 1;
      const double center = label == 0 ? -0.4 : 0.4;
      x.push_back({center + rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
      y.push_back(label);
    }
    const auto recall0 = [&](const std::vector<double>& weights) {
      FitConfig fit;
      fit.seed = seed;
      const LinearModel model =
          fit_linear(LinearStrategy::LogisticOvr, x, y, 2, weights, 1.0, fit);
      int hit = 0, total = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] == 0) {
          ++total;
          hit += model.predict(x[i]) == 0 ? 1 : 0;
        }
      }
      return static_cast<double>(hit) / total;
    };
    CAPTURE(seed);
    CHECK(recall0({10.0, 1.0}) >= recall0({1.0, 1.0}));
  }
}

TEST_CASE("fit_linear validates its inputs") {
  const std::vector<double> w{1.0, 1.0};
  CHECK_THROWS_AS(fit_linear(LinearStrategy::Multinomial, {}, {}, 2, w, 1.0), EmptyInput);
  CHECK_THROWS_AS(fit_linear(LinearStrategy::Multinomial, {{1.0}}, {0, 1}, 2, w, 1.0),
                  LengthMismatch);
  CHECK_THROWS_AS(
      fit_linear(LinearStrategy::Multinomial, {{1.0}, {1.0, 2.0}}, {0, 1}, 2, w, 1.0),
      DimensionMismatch);
}

TEST_CASE("stratified folds partition with balanced class spread") {
  Rng rng(2025);
  std::vector<int> labels;
  for (int i = 0; i < 97; ++i) labels.push_back(static_cast<int>(rng.below(3)));

  const std::vector<int> folds = stratified_fold_assignment(labels, 10, 77);
  REQUIRE(folds.size() == labels.size());

  std::vector<int> fold_sizes(10, 0);
  std::vector<std::vector<int>> per_class(3, std::vector<int>(10, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    REQUIRE(folds[i] >= 0);
    REQUIRE(folds[i] < 10);
    fold_sizes[folds[i]] += 1;
    per_class[labels[i]][folds[i]] += 1;
  }
  for (int f = 0; f < 10; ++f) CHECK(fold_sizes[f] > 0);
  for (int c = 0; c < 3; ++c) {
    const auto [lo, hi] = std::minmax_element(per_class[c].begin(), per_class[c].end());
    CHECK(*hi - *lo <= 1);  // per-class spread at most one example
  }

  CHECK_THROWS_AS(stratified_fold_assignment({0, 1, 1}, 10, 1), TooFewExamples);
}

TEST_CASE("grid search runs 90 fits and picks the smallest tied C") {
  // 120 examples, 3 classes, separable-ish nbow-like features.
  Rng rng(404);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = 0; i < 120; ++i) {
    const int label = i % 3;
    std::vector<double> row(4);
    for (std::size_t d = 0; d < row.size(); ++d) {
      row[d] = rng.uniform(-0.3, 0.3) + (static_cast<int>(d) == label ? 1.0 : 0.0);
    }
    x.push_back(std::move(row));
    y.push_back(label);
  }

  SUBCASE("real fits obey the fit-count contract") {
    CVPlan plan;
    FitConfig fit;
    fit.epochs = 12;
    const GridSearchResult result = grid_search_cv(
        LinearStrategy::Multinomial, x, y, 3, WeightScheme::InverseFrequency, plan, fit);
    CHECK(result.fits == 90);
    CHECK(result.cells.size() == 90);
    CHECK(result.mean_mae_by_c.size() == 9);
    const std::vector<double> grid = default_c_grid();
    CHECK(std::find(grid.begin(), grid.end(), result.best_c) != grid.end());
    CHECK(result.final_model.C == result.best_c);
  }

  SUBCASE("an injected stub steers and ties the selection") {
    CVPlan plan;
    int calls = 0;
    const auto stub = [&](double c, int /*fold*/, const std::vector<std::size_t>&,
                          const std::vector<std::size_t>&) {
      ++calls;
      // Best at C=1e-2, with 1e-1 and 1e1 tied just above it.
      const double mae = c == 1e-2 ? 0.10 : (c == 1e-1 || c == 1e1 ? 0.20 : 0.50);
      return std::pair<double, double>(mae, 1.0 - mae);
    };
    const GridSearchResult result =
        grid_search_cv(LinearStrategy::Multinomial, x, y, 3, WeightScheme::InverseFrequency,
                       plan, FitConfig{}, stub);
    CHECK(calls == 90);
    CHECK(result.fits == 90);
    CHECK(result.best_c == 1e-2);

    // Remove the unique winner: the tie between 1e-1 and 1e1 resolves low.
    const auto tied = [&](double c, int, const std::vector<std::size_t>&,
                          const std::vector<std::size_t>&) {
      const double mae = (c == 1e-1 || c == 1e1) ? 0.20 : 0.50;
      return std::pair<double, double>(mae, 1.0 - mae);
    };
    const GridSearchResult tie_result =
        grid_search_cv(LinearStrategy::Multinomial, x, y, 3, WeightScheme::InverseFrequency,
                       plan, FitConfig{}, tied);
    CHECK(tie_result.best_c == 1e-1);
  }

  SUBCASE("a singleton class exercises the absent-class weight fallback") {
    std::vector<std::vector<double>> x1 = x;
    std::vector<int> y1 = y;
    x1.push_back({0.0, 0.0, 0.0, 9.0});
    y1.push_back(3);  // class 3 has exactly one member
    CVPlan plan;
    FitConfig fit;
    fit.epochs = 5;
    const GridSearchResult result = grid_search_cv(
        LinearStrategy::LogisticOvr, x1, y1, 4, WeightScheme::InverseFrequency, plan, fit);
    CHECK(result.fits == 90);
  }
}

TEST_CASE("the tuning report lists every cell and a mean row per C") {
  GridSearchResult result;
  result.best_c = 1.0;
  for (double c : {0.1, 1.0}) {
    for (int fold = 0; fold < 2; ++fold) {
      result.cells.push_back({c, fold, 0.5, 0.5});
    }
    result.mean_mae_by_c.emplace_back(c, 0.5);
  }
  std::ostringstream out;
  write_tuning_report(out, "maxent", result);
  const std::string text = out.str();
  CHECK(text.find("strategy\tC\tfold\tMAE_M\tmicro_F1") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 + 2);
  CHECK(text.find("mean") != std::string::npos);
}

}  // TEST_SUITE
