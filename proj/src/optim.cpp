#include "mtsent/optim.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "mtsent/errors.hpp"

namespace mtsent {

Tensor2 glorot_uniform(int fan_in, int fan_out, Rng& rng) {
  const double limit = glorot_limit(fan_in, fan_out);
  Tensor2 t(fan_out, fan_in);
  for (double& v : t.values) v = rng.uniform(-limit, limit);
  return t;
}

void init_parameters(const std::vector<Parameter*>& params, Rng& rng) {
  for (Parameter* p : params) {
    if (p->value.cols == 1) {
      p->value.fill(0.0);
    } else {
      p->value = glorot_uniform(p->value.cols, p->value.rows, rng);
    }
    p->zero_grad();
  }
}

RmsProp::RmsProp(std::vector<Parameter*> params, double learning_rate, double rho, double epsilon)
    : params_(std::move(params)), lr_(learning_rate), rho_(rho), eps_(epsilon) {
  mean_square_.reserve(params_.size());
  for (Parameter* p : params_) {
    Tensor2 s;
    s.resize_like(p->value);
    mean_square_.push_back(std::move(s));
  }
}

void RmsProp::step() {
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    if (!p.grad.all_finite()) throw NonFiniteGradient(p.name);
    Tensor2& s = mean_square_[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad.values[i];
      s.values[i] = rho_ * s.values[i] + (1.0 - rho_) * g * g;
      p.value.values[i] -= lr_ * g / (std::sqrt(s.values[i]) + eps_);
    }
    p.zero_grad();
  }
}

EarlyStopping::EarlyStopping(std::vector<Parameter*> params, int patience)
    : params_(std::move(params)),
      best_metric_(std::numeric_limits<double>::infinity()),
      patience_(patience) {
  best_values_.resize(params_.size());
}

bool EarlyStopping::observe(double metric) {
  ++epochs_seen_;
  if (metric < best_metric_) {
    best_metric_ = metric;
    best_epoch_ = epochs_seen_;
    since_best_ = 0;
    for (std::size_t k = 0; k < params_.size(); ++k) best_values_[k] = params_[k]->value;
    return false;
  }
  ++since_best_;
  return since_best_ >= patience_;
}

void EarlyStopping::restore_best() {
  if (best_epoch_ == 0) return;
  for (std::size_t k = 0; k < params_.size(); ++k) params_[k]->value = best_values_[k];
}

}  // namespace mtsent
