#include "mtsent/trainer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "mtsent/errors.hpp"
#include "mtsent/metrics.hpp"
#include "mtsent/optim.hpp"
#include "mtsent/tape.hpp"

namespace mtsent {

namespace {

/// Endless shuffled walk over one task's example indices; reshuffles its own
/// stream on wraparound so tasks of different sizes stay independent.
class ExampleStream {
 public:
  ExampleStream(std::size_t n, std::uint64_t seed) : rng_(seed), order_(n) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    rng_.shuffle(order_);
  }

  std::size_t next() {
    if (cursor_ == order_.size()) {
      rng_.shuffle(order_);
      cursor_ = 0;
    }
    return order_[cursor_++];
  }

 private:
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

const std::vector<double>* feature_row(const TaskExamples& task, std::size_t i) {
  if (task.features == nullptr) return nullptr;
  return &(*task.features)[i];
}

TrainHistory run_training(MultitaskNetwork& network, const std::vector<TaskExamples>& tasks,
                          const TaskExamples& dev, const TrainConfig& config,
                          const TrainHooks& hooks, bool sample_tasks) {
  if (tasks.empty() || tasks[0].data == nullptr) throw Error("no training data");
  for (const TaskExamples& t : tasks) {
    if (t.data->size() == 0) throw Error("a task's training set is empty");
    if (t.features && t.features->size() != t.data->size()) {
      throw LengthMismatch(t.features->size(), t.data->size());
    }
  }
  const bool stub_dev = static_cast<bool>(hooks.dev_metric_override);
  if (!stub_dev) {
    if (dev.data == nullptr || dev.data->size() == 0) throw EmptyDevSet();
    if (dev.features && dev.features->size() != dev.data->size()) {
      throw LengthMismatch(dev.features->size(), dev.data->size());
    }
  }
  if (config.batch_size < 1) throw Error("batch_size must be >= 1");

  // Per-task class weights for the loss, when configured.
  std::vector<std::vector<double>> loss_weights(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const int k = network.config().tasks[t].class_count;
    if (tasks[t].data->scale.cardinality() != k) throw ScaleMismatch(tasks[t].data->scale.cardinality());
    const WeightScheme scheme = network.config().class_weighted_loss
                                    ? WeightScheme::InverseFrequency
                                    : WeightScheme::Uniform;
    loss_weights[t] = class_weights(class_distribution(*tasks[t].data), scheme).weights;
  }

  TaskSampler sampler(config.primary_prob, Rng::substream(config.seed, stream::kTaskSampler));
  Rng dropout_rng(Rng::substream(config.seed, stream::kDropout));
  std::vector<ExampleStream> streams;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    streams.emplace_back(tasks[t].data->size(),
                         Rng::substream(config.seed, stream::kShuffleBase + t));
  }

  std::vector<Parameter*> params = network.parameters();
  RmsProp optimizer(params, config.learning_rate, config.rho, config.epsilon);
  EarlyStopping stopper(params, config.patience);

  const std::size_t primary_n = tasks[0].data->size();
  const int batches_per_epoch =
      static_cast<int>((primary_n + config.batch_size - 1) / config.batch_size);

  TrainHistory history;
  Tape tape;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::vector<double> loss_sum(tasks.size(), 0.0);
    std::vector<long> loss_count(tasks.size(), 0);
    for (int batch = 0; batch < batches_per_epoch; ++batch) {
      const int task = sample_tasks && tasks.size() > 1 ? sampler.sample() : 0;
      const TaskExamples& source = tasks[static_cast<std::size_t>(task)];
      for (int slot = 0; slot < config.batch_size; ++slot) {
        const std::size_t i = streams[static_cast<std::size_t>(task)].next();
        const LabeledExample& ex = source.data->examples[i];
        tape.reset();
        const MultitaskNetwork::Forward f = network.build(
            tape, ex.tweet.tokens, feature_row(source, i), task, ex.label,
            loss_weights[static_cast<std::size_t>(task)][static_cast<std::size_t>(ex.label)],
            TrainMode::Train, dropout_rng);
        const double loss = tape.value(f.loss).values[0];
        if (!std::isfinite(loss)) throw NonFiniteLoss();
        loss_sum[static_cast<std::size_t>(task)] += loss;
        ++loss_count[static_cast<std::size_t>(task)];
        tape.backward(f.loss);
      }
      const double inv_b = 1.0 / config.batch_size;
      for (Parameter* p : params) {
        for (double& g : p->grad.values) g *= inv_b;
      }
      if (hooks.after_batch_backward) hooks.after_batch_backward(epoch, batch, task, network);
      optimizer.step();
    }

    EpochRecord record;
    record.epoch = epoch;
    record.task_loss.resize(tasks.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      record.task_loss[t] = loss_count[t] > 0 ? loss_sum[t] / loss_count[t]
                                              : std::numeric_limits<double>::quiet_NaN();
    }
    if (stub_dev) {
      record.dev_mae = hooks.dev_metric_override(epoch);
      record.dev_micro_f1 = 0.0;
    } else {
      const auto [mae, micro] = evaluate_on(network, dev, 0);
      record.dev_mae = mae;
      record.dev_micro_f1 = micro;
    }
    record.stopped = stopper.observe(record.dev_mae);
    history.epochs.push_back(record);
    if (record.stopped) break;
  }

  stopper.restore_best();
  history.best_epoch = stopper.best_epoch();
  history.best_dev_mae = stopper.best_metric();
  return history;
}

}  // namespace

TrainHistory train_multitask(MultitaskNetwork& network, const std::vector<TaskExamples>& tasks,
                             const TaskExamples& dev_primary, const TrainConfig& config,
                             const TrainHooks& hooks) {
  if (static_cast<int>(tasks.size()) != network.task_count()) {
    throw Error("expected one training set per task");
  }
  return run_training(network, tasks, dev_primary, config, hooks, /*sample_tasks=*/true);
}

TrainHistory train_singletask(MultitaskNetwork& network, const TaskExamples& train,
                              const TaskExamples& dev, const TrainConfig& config,
                              const TrainHooks& hooks) {
  return run_training(network, {train}, dev, config, hooks, /*sample_tasks=*/false);
}

void write_history(const std::string& path, const std::vector<std::string>& task_names,
                   const TrainHistory& history) {
  std::ofstream out(path);
  if (!out) throw IoError(path);
  out << "epoch";
  for (const std::string& name : task_names) out << "\tloss_" << name;
  out << "\tdev_mae\tdev_micro_f1\tstopped\n";
  for (const EpochRecord& r : history.epochs) {
    out << r.epoch;
    for (double loss : r.task_loss) out << '\t' << loss;
    out << '\t' << r.dev_mae << '\t' << r.dev_micro_f1 << '\t' << (r.stopped ? 1 : 0) << "\n";
  }
  if (!out) throw IoError(path);
}

std::pair<double, double> evaluate_on(MultitaskNetwork& network, const TaskExamples& data,
                                      int task) {
  const int k = network.config().tasks[static_cast<std::size_t>(task)].class_count;
  std::vector<int> truth, pred;
  truth.reserve(data.data->size());
  pred.reserve(data.data->size());
  for (std::size_t i = 0; i < data.data->size(); ++i) {
    const LabeledExample& ex = data.data->examples[i];
    truth.push_back(ex.label);
    pred.push_back(network.predict(ex.tweet.tokens, feature_row(data, i), task));
  }
  return {mae_macro(truth, pred, k), micro_f1(truth, pred, k)};
}

}  // namespace mtsent
