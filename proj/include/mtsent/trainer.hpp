#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mtsent/corpus.hpp"
#include "mtsent/multitask.hpp"

namespace mtsent {

struct TrainConfig {
  int batch_size = 128;
  int max_epochs = 30;
  std::uint64_t seed = 1;
  double primary_prob = 0.5;  // Bernoulli chance of drawing a primary-task batch
  int patience = 5;
  double learning_rate = 1e-3;
  double rho = 0.9;
  double epsilon = 1e-8;
};

/// One task's training examples, with optional extra-feature rows aligned
/// to the dataset's example order.
struct TaskExamples {
  const Dataset* data = nullptr;
  const std::vector<std::vector<double>>* features = nullptr;
};

struct EpochRecord {
  int epoch = 0;                  // 1-based
  std::vector<double> task_loss;  // mean loss per task; NaN when never sampled
  double dev_mae = 0.0;
  double dev_micro_f1 = 0.0;
  bool stopped = false;  // this epoch exhausted the patience window
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_dev_mae = 0.0;
};

/// Test seams. `after_batch_backward` runs once per batch after gradients
/// are averaged and before the optimizer step. `dev_metric_override`
/// replaces the dev MAE computation (the dev set is not touched then).
struct TrainHooks {
  std::function<void(int epoch, int batch, int task, MultitaskNetwork&)> after_batch_backward;
  std::function<double(int epoch)> dev_metric_override;
};

/// Joint training: per batch slot a Bernoulli draw picks the task, the batch
/// comes from that task's own shuffled stream (reshuffled independently on
/// wraparound), and one RMSProp step follows. An epoch is
/// ceil(|primary train| / batch_size) batches; after each epoch the dev MAE
/// of the primary task drives early stopping (best snapshot restored).
TrainHistory train_multitask(MultitaskNetwork& network, const std::vector<TaskExamples>& tasks,
                             const TaskExamples& dev_primary, const TrainConfig& config,
                             const TrainHooks& hooks = {});

/// Same loop with the task sampler removed: every batch is task 0.
TrainHistory train_singletask(MultitaskNetwork& network, const TaskExamples& train,
                              const TaskExamples& dev, const TrainConfig& config,
                              const TrainHooks& hooks = {});

/// Tab-separated history: epoch, per-task mean loss, dev MAE, dev micro-F1,
/// stopped flag.
void write_history(const std::string& path, const std::vector<std::string>& task_names,
                   const TrainHistory& history);

/// Dev-set MAE of the macro-averaged kind plus micro-F1 for one task head.
std::pair<double, double> evaluate_on(MultitaskNetwork& network, const TaskExamples& data,
                                      int task);

}  // namespace mtsent
