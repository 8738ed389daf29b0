#include "mtsent/multitask.hpp"

#include <utility>

#include "mtsent/errors.hpp"
#include "mtsent/optim.hpp"

namespace mtsent {

void NetworkConfig::validate() const {
  if (embed_dim < 1 || encoder_dim < 1 || text_hidden < 1 || merge_hidden < 1) {
    throw Error("network dimensions must be positive");
  }
  if (encoder_dim % 2 != 0) throw Error("encoder output dimension must be even");
  if (tasks.empty()) throw Error("at least one task is required");
  for (const TaskSpec& t : tasks) {
    if (t.class_count < 2) throw Error("task '" + t.name + "' needs at least 2 classes");
  }
  for (double rate : {dropout_encoder, dropout_text, dropout_feature, dropout_merge}) {
    if (rate < 0.0 || rate >= 1.0) throw Error("dropout rates must be in [0, 1)");
  }
  if (use_extra_features && feature_dim < 1) {
    throw Error("extra features enabled but feature_dim is unset");
  }
  if (use_extra_features && feature_hidden < 1) {
    throw Error("feature_hidden must be positive when extra features are used");
  }
}

MultitaskNetwork::MultitaskNetwork(NetworkConfig config, const EmbeddingTable& table)
    : cfg_(std::move(config)) {
  cfg_.validate();
  if (table.dim != cfg_.embed_dim) {
    throw ShapeMismatch("embedding table dim " + std::to_string(table.dim) +
                        " does not match configured " + std::to_string(cfg_.embed_dim));
  }
  words_ = table.words;
  vocab_ = table.vocab;
  embedding_ = Parameter("embedding", table.matrix);
  encoder_ = BiLstm("encoder", cfg_.embed_dim, cfg_.encoder_dim);
  text_dense_ = DenseTanh("text", cfg_.encoder_dim, cfg_.text_hidden);
  if (cfg_.use_extra_features) {
    feature_dense_ = DenseTanh("feature", cfg_.feature_dim, cfg_.feature_hidden);
  }
  const int merge_in = cfg_.text_hidden + (cfg_.use_extra_features ? cfg_.feature_hidden : 0);
  merge_dense_ = DenseTanh("merge", merge_in, cfg_.merge_hidden);
  heads_.reserve(cfg_.tasks.size());
  for (const TaskSpec& t : cfg_.tasks) {
    TaskHead head;
    head.weight = Parameter("head." + t.name + ".W", Tensor2(t.class_count, cfg_.merge_hidden));
    head.bias = Parameter("head." + t.name + ".b", Tensor2(t.class_count, 1));
    heads_.push_back(std::move(head));
  }
}

void MultitaskNetwork::init(Rng& rng) {
  // The embedding matrix keeps the rows its table was built with.
  std::vector<Parameter*> rest;
  for (Parameter* p : parameters()) {
    if (p != &embedding_) rest.push_back(p);
  }
  init_parameters(rest, rng);
}

int MultitaskNetwork::task_index(const std::string& name) const {
  for (std::size_t i = 0; i < cfg_.tasks.size(); ++i) {
    if (cfg_.tasks[i].name == name) return static_cast<int>(i);
  }
  throw UnknownTask(name);
}

MultitaskNetwork::Forward MultitaskNetwork::build(Tape& tape,
                                                  const std::vector<std::string>& tokens,
                                                  const std::vector<double>* extra, int task,
                                                  int label, double class_weight, TrainMode mode,
                                                  Rng& rng) {
  if (task < 0 || task >= task_count()) throw UnknownTask(task);
  if (cfg_.use_extra_features && extra == nullptr) throw MissingExtraFeatures();
  if (extra && static_cast<int>(extra->size()) != cfg_.feature_dim) {
    throw ShapeMismatch("extra feature vector has size " + std::to_string(extra->size()) +
                        ", expected " + std::to_string(cfg_.feature_dim));
  }

  std::vector<int> steps;
  steps.reserve(tokens.size());
  for (const std::string& tok : tokens) {
    auto it = vocab_.find(tok);
    if (it != vocab_.end()) steps.push_back(tape.param_row(embedding_, it->second));
  }
  if (steps.empty()) {
    // Unknown-only (or empty) tweet: encode a single zero embedding step.
    steps.push_back(tape.input(Tensor2::zeros(cfg_.embed_dim, 1)));
  }

  const int encoded = encoder_.encode(tape, steps);
  const int enc_drop = tape.dropout(encoded, cfg_.dropout_encoder, mode, rng);
  const int text = text_dense_.apply(tape, enc_drop);
  const int text_drop = tape.dropout(text, cfg_.dropout_text, mode, rng);

  int merged_in = text_drop;
  if (cfg_.use_extra_features) {
    const int feat_in = tape.input(Tensor2::column(*extra));
    const int feat = feature_dense_.apply(tape, feat_in);
    const int feat_drop = tape.dropout(feat, cfg_.dropout_feature, mode, rng);
    merged_in = tape.concat(text_drop, feat_drop);
  }

  Forward out;
  out.merge = tape.dropout(merge_dense_.apply(tape, merged_in), cfg_.dropout_merge, mode, rng);
  TaskHead& head = heads_[static_cast<std::size_t>(task)];
  out.logits = tape.add(tape.matvec(tape.param(head.weight), out.merge), tape.param(head.bias));
  if (label >= 0) out.loss = tape.softmax_xent(out.logits, label, class_weight);
  return out;
}

Tensor2 MultitaskNetwork::forward(const std::vector<std::string>& tokens,
                                  const std::vector<double>* extra, int task) {
  Tape tape;
  Rng unused(0);  // Eval mode draws nothing
  const Forward f = build(tape, tokens, extra, task, -1, 1.0, TrainMode::Eval, unused);
  return tape.value(tape.softmax(f.logits));
}

int MultitaskNetwork::predict(const std::vector<std::string>& tokens,
                              const std::vector<double>* extra, int task) {
  const Tensor2 probs = forward(tokens, extra, task);
  int best = 0;
  for (int k = 1; k < probs.rows; ++k) {
    if (probs.values[static_cast<std::size_t>(k)] > probs.values[static_cast<std::size_t>(best)]) {
      best = k;  // strict >: ties stay at the lower index
    }
  }
  return best;
}

std::vector<Parameter*> MultitaskNetwork::parameters() {
  std::vector<Parameter*> out = shared_parameters();
  for (std::size_t t = 0; t < heads_.size(); ++t) {
    out.push_back(&heads_[t].weight);
    out.push_back(&heads_[t].bias);
  }
  return out;
}

std::vector<Parameter*> MultitaskNetwork::shared_parameters() {
  std::vector<Parameter*> out;
  out.push_back(&embedding_);
  for (Parameter* p : encoder_.parameters()) out.push_back(p);
  for (Parameter* p : text_dense_.parameters()) out.push_back(p);
  if (cfg_.use_extra_features) {
    for (Parameter* p : feature_dense_.parameters()) out.push_back(p);
  }
  for (Parameter* p : merge_dense_.parameters()) out.push_back(p);
  return out;
}

std::vector<Parameter*> MultitaskNetwork::head_parameters(int task) {
  if (task < 0 || task >= task_count()) throw UnknownTask(task);
  return {&heads_[static_cast<std::size_t>(task)].weight,
          &heads_[static_cast<std::size_t>(task)].bias};
}

std::size_t MultitaskNetwork::parameter_count() {
  std::size_t n = 0;
  for (Parameter* p : parameters()) n += p->value.size();
  return n;
}

}  // namespace mtsent
