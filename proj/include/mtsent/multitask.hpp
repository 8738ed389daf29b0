#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtsent/embed.hpp"
#include "mtsent/layers.hpp"
#include "mtsent/rng.hpp"
#include "mtsent/tape.hpp"
#include "mtsent/tensor.hpp"

namespace mtsent {

struct TaskSpec {
  std::string name;
  int class_count = 0;
};

/// Sizes and dropout rates of the shared-encoder network. Task 0 is the
/// primary task (the one early stopping monitors).
struct NetworkConfig {
  int embed_dim = 50;
  int encoder_dim = 50;      // biLSTM output width; D/2 per direction
  int text_hidden = 50;      // dense layer over the encoder output
  int feature_hidden = 50;   // dense layer over the extra features
  int merge_hidden = 20;     // joint layer feeding the task heads
  double dropout_encoder = 0.2;
  double dropout_text = 0.2;
  double dropout_feature = 0.2;
  double dropout_merge = 0.2;
  std::vector<TaskSpec> tasks = {{"fine", 5}, {"ternary", 3}};
  bool use_extra_features = false;
  int feature_dim = 0;  // extra-feature width; required when use_extra_features
  bool class_weighted_loss = false;

  void validate() const;  // throws Error on inconsistent settings
};

/// Per-task output layer: plain linear scores over the merge activation.
struct TaskHead {
  Parameter weight;  // (classes x merge_hidden)
  Parameter bias;    // (classes x 1)
};

/// Shared trunk (embeddings -> biLSTM -> text dense -> merge dense, with an
/// optional extra-feature dense branch concatenated before the merge) plus
/// one linear softmax head per task.
class MultitaskNetwork {
 public:
  MultitaskNetwork() = default;

  /// `table.dim` must equal `config.embed_dim`; the table's matrix becomes
  /// the trainable embedding parameter.
  MultitaskNetwork(NetworkConfig config, const EmbeddingTable& table);

  /// Glorot for every weight matrix, zeros for biases, in parameter order;
  /// embedding rows are kept as the table built them.
  void init(Rng& rng);

  const NetworkConfig& config() const { return cfg_; }
  int task_count() const { return static_cast<int>(cfg_.tasks.size()); }
  int task_index(const std::string& name) const;  // throws UnknownTask

  struct Forward {
    int merge = -1;   // merge activation node (shared trunk output)
    int logits = -1;  // task head scores
    int loss = -1;    // weighted cross-entropy node; -1 when label < 0
  };

  /// Build the network graph for one tweet on `tape`. `extra` must be
  /// present iff the config uses extra features (MissingExtraFeatures).
  /// `label` < 0 skips the loss node. Dropout draws from `rng` in Train
  /// mode only. Tokens missing from the vocabulary are skipped; a tweet
  /// with no known token is encoded from a single zero embedding step.
  Forward build(Tape& tape, const std::vector<std::string>& tokens,
                const std::vector<double>* extra, int task, int label, double class_weight,
                TrainMode mode, Rng& rng);

  /// Eval-mode class probabilities for one task.
  Tensor2 forward(const std::vector<std::string>& tokens, const std::vector<double>* extra,
                  int task);

  /// argmax of forward(); ties break toward the lower class index.
  int predict(const std::vector<std::string>& tokens, const std::vector<double>* extra, int task);

  /// All parameters: embedding, encoder (fwd then bwd), text dense,
  /// feature dense (when used), merge dense, then each head in task order.
  std::vector<Parameter*> parameters();
  std::vector<Parameter*> shared_parameters();
  std::vector<Parameter*> head_parameters(int task);

  std::size_t parameter_count();  // total scalar count

  const std::vector<std::string>& vocab_words() const { return words_; }
  Parameter& embedding() { return embedding_; }

 private:
  friend void save_model(MultitaskNetwork& network, const std::string& path);
  friend MultitaskNetwork load_model(const std::string& path);

  NetworkConfig cfg_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> vocab_;
  Parameter embedding_;
  BiLstm encoder_;
  DenseTanh text_dense_;
  DenseTanh feature_dense_;
  DenseTanh merge_dense_;
  std::vector<TaskHead> heads_;
};

/// Bernoulli task picker: one draw per call; success (probability
/// `primary_prob`) selects task 0, failure task 1.
class TaskSampler {
 public:
  TaskSampler(double primary_prob, std::uint64_t seed) : p_(primary_prob), rng_(seed) {}

  int sample() { return rng_.bernoulli(p_) ? 0 : 1; }
  double primary_prob() const { return p_; }

 private:
  double p_;
  Rng rng_;
};

/// Binary container with a structured-text config blob (network sizes,
/// tasks, vocabulary) followed by every named parameter tensor.
void save_model(MultitaskNetwork& network, const std::string& path);
MultitaskNetwork load_model(const std::string& path);

}  // namespace mtsent
