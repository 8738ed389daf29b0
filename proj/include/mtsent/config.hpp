#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtsent/lexfeat.hpp"
#include "mtsent/linear.hpp"
#include "mtsent/multitask.hpp"
#include "mtsent/trainer.hpp"

namespace mtsent {

/// One parsed `key = value` with its 1-based source line.
struct ConfigEntry {
  std::string value;
  int line = 0;
};

/// Raw INI-style file: `[section]` headers, `key = value` lines, `#` or `;`
/// comments. Duplicate keys within a section are an error.
struct ConfigFile {
  std::map<std::string, std::map<std::string, ConfigEntry>> sections;
  bool has(const std::string& section, const std::string& key) const;
};

ConfigFile parse_config(std::istream& in);
ConfigFile parse_config_file(const std::string& path);

/// Everything a run needs, validated: unknown sections or keys are rejected
/// with their line number; types are checked at parse time.
struct RunConfig {
  // [run]
  std::uint64_t seed = 1;
  std::string out_dir = "runs";

  // [data] — paths; empty when absent
  std::string fine_train, fine_dev, fine_test;
  std::string ternary_train, ternary_dev, ternary_test;

  // [embeddings]
  std::string embeddings_path;
  std::optional<int> embeddings_dim;

  // [features]
  bool use_extra_features = false;
  bool surface_features = true;
  std::vector<LexiconSpec> lexicons;

  // [network] / [train]
  NetworkConfig network;
  TrainConfig train;

  // [baseline]
  std::string baseline_strategy = "maxent";
  std::string baseline_representation = "nbow";  // nbow | nbow_plus
  FitConfig baseline_fit;
  int baseline_folds = 10;
  std::string baseline_tune_on = "train+dev";  // train | train+dev
};

/// Builds a RunConfig from a parsed file. Throws ConfigError with the
/// offending line for unknown keys, bad values, or out-of-range settings.
RunConfig make_run_config(const ConfigFile& file);
RunConfig load_run_config(const std::string& path);

}  // namespace mtsent
