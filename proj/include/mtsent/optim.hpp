#pragma once

#include <cmath>
#include <vector>

#include "mtsent/rng.hpp"
#include "mtsent/tensor.hpp"

namespace mtsent {

inline double glorot_limit(int fan_in, int fan_out) {
  return std::sqrt(6.0 / (static_cast<double>(fan_in) + static_cast<double>(fan_out)));
}

/// Matrix with entries i.i.d. uniform in [-limit, limit],
/// limit = sqrt(6 / (fan_in + fan_out)). Layout is (fan_out x fan_in).
Tensor2 glorot_uniform(int fan_in, int fan_out, Rng& rng);

/// Glorot for weight matrices (fan_in = cols, fan_out = rows), zeros for
/// vectors (cols == 1). Applied in list order, one draw per matrix entry.
void init_parameters(const std::vector<Parameter*>& params, Rng& rng);

/// RMSProp with one mean-square accumulator per parameter:
///   s <- rho * s + (1 - rho) * g^2
///   theta <- theta - lr * g / (sqrt(s) + epsilon)
class RmsProp {
 public:
  RmsProp(std::vector<Parameter*> params, double learning_rate = 1e-3, double rho = 0.9,
          double epsilon = 1e-8);

  /// One update over all tracked parameters; grads are zeroed afterwards.
  /// Throws NonFiniteGradient naming the offending parameter.
  void step();

  double learning_rate() const { return lr_; }
  const std::vector<Parameter*>& parameters() const { return params_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor2> mean_square_;
  double lr_;
  double rho_;
  double eps_;
};

/// Minimizes a monitored metric with a patience window and keeps a snapshot
/// of the best parameters seen. Improvement must be strict.
class EarlyStopping {
 public:
  EarlyStopping(std::vector<Parameter*> params, int patience = 5);

  /// Record an end-of-epoch metric. Returns true when training should stop
  /// (no improvement for `patience` consecutive epochs).
  bool observe(double metric);

  /// Copy the best snapshot back into the parameters. No-op before the
  /// first observe().
  void restore_best();

  double best_metric() const { return best_metric_; }
  int best_epoch() const { return best_epoch_; }  // 1-based; 0 before any epoch
  int epochs_seen() const { return epochs_seen_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor2> best_values_;
  double best_metric_;
  int best_epoch_ = 0;
  int epochs_seen_ = 0;
  int since_best_ = 0;
  int patience_;
};

}  // namespace mtsent
