#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mtsent {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;   // configuration or input error
inline constexpr int kExitNumeric = 2;  // runtime numerical abort

struct TrainOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;  // overrides [run] seed
  std::string out;                    // explicit run directory
  bool single_task = false;
};

struct EvaluateOptions {
  std::string model_path;
  std::string data_path;
  std::string scale;        // "fine" or "ternary"
  std::string config_path;  // needed when the model uses extra features
  std::string out;          // optional report file
  bool fig2 = false;        // also emit per-class MAE rows
};

struct PredictOptions {
  std::string model_path;
  std::string input_path;   // id<TAB>label(ignored)<TAB>text
  std::string task = "fine";
  std::string config_path;  // needed when the model uses extra features
  std::string out;          // optional output file (default stdout)
};

struct BaselineOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;  // run directory
  std::string strategy;        // overrides config when nonempty
  std::string representation;  // overrides config when nonempty
  std::string scale = "fine";
  bool tune = false;
  std::string tune_on;  // overrides config when nonempty
  double c_value = 1.0;  // used when not tuning
};

struct FeaturesOptions {
  std::string config_path;
  std::string data_path;  // default: the config's fine_train
  std::string scale = "fine";
  std::string out = ".";  // directory for features.tsv + manifest.tsv
};

struct SummarizeOptions {
  std::vector<std::string> run_dirs;
};

int cmd_train(const TrainOptions& opt);
int cmd_evaluate(const EvaluateOptions& opt);
int cmd_predict(const PredictOptions& opt);
int cmd_baseline(const BaselineOptions& opt);
int cmd_features(const FeaturesOptions& opt);
int cmd_summarize(const SummarizeOptions& opt);

}  // namespace mtsent
