#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mtsent/errors.hpp"

namespace mtsent {

enum class ScaleKind { Ternary, FineGrained };
enum class Split { Train, Dev, Test };

/// Ordered label scale. The position of a class name is its ordinal index.
struct LabelScale {
  ScaleKind kind;
  std::vector<std::string> classes;

  int cardinality() const { return static_cast<int>(classes.size()); }

  static const LabelScale& ternary();       // Negative, Neutral, Positive
  static const LabelScale& fine_grained();  // VeryNegative .. VeryPositive

  /// Map a label field to an ordinal index. Accepts class names
  /// (case-insensitive) and, on the five-point scale, the numeric codes
  /// "-2".."2" mapped to 0..4. Returns -1 when the token is not a label.
  int parse_label(const std::string& token) const;

  bool operator==(const LabelScale& o) const { return kind == o.kind && classes == o.classes; }
};

struct Tweet {
  std::string id;
  std::string raw_text;
  std::vector<std::string> tokens;  // tokenize(raw_text)
};

struct LabeledExample {
  Tweet tweet;
  int label = 0;  // ordinal index on `scale`
};

struct Dataset {
  LabelScale scale;
  Split split = Split::Train;
  std::vector<LabeledExample> examples;

  std::size_t size() const { return examples.size(); }
};

enum class WeightScheme { Uniform, InverseFrequency };

struct ClassWeights {
  std::vector<double> weights;  // one per class, > 0
  WeightScheme scheme = WeightScheme::Uniform;
};

/// Twitter-aware tokenizer. Lowercases words, keeps @mentions, #hashtags,
/// emoticons, and URLs as single tokens, strips surrounding punctuation from
/// everything else, and preserves character elongations. Deterministic and
/// idempotent on its own space-joined output.
std::vector<std::string> tokenize(const std::string& raw_text);

/// True when `token` matches the built-in western-style emoticon list.
bool is_emoticon(const std::string& token);

/// Parse a tab-separated dataset: `id<TAB>label<TAB>text`, one example per
/// line, `#`-prefixed lines ignored, text may itself contain tabs.
/// Throws MalformedLine / UnknownLabel with 1-based line numbers.
Dataset parse_dataset(std::istream& in, const LabelScale& scale, Split split);
Dataset load_dataset(const std::string& path, const LabelScale& scale, Split split);

/// Inverse of parse_dataset: `id<TAB>class-name<TAB>raw_text` per example.
void serialize_dataset(const Dataset& ds, std::ostream& out);

/// counts[c] = number of examples labeled c.
std::vector<long> class_distribution(const Dataset& ds);

/// InverseFrequency: w_c = N / (K * n_c) with N = sum of counts, K = number of
/// classes, so that the mean weight is about 1. Uniform: all ones.
ClassWeights class_weights(const std::vector<long>& counts, WeightScheme scheme);

/// Collapse a five-point label onto the ternary scale:
/// {0,1} -> 0, {2} -> 1, {3,4} -> 2.
int coarsen_label(int fine);

}  // namespace mtsent
