#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtsent/corpus.hpp"
#include "mtsent/rng.hpp"
#include "mtsent/tensor.hpp"

namespace mtsent {

/// What a lookup does with a word missing from the table.
enum class OovPolicy {
  Skip,        // drop the token (excluded from nbow numerator and denominator)
  ZeroVector,  // contribute a zero vector (counts in the nbow denominator)
  RandomInit,  // rows were drawn uniform in [-oov_limit, oov_limit] at build time
};

struct EmbeddingTable {
  int dim = 0;
  std::vector<std::string> words;              // row order
  std::unordered_map<std::string, int> vocab;  // word -> row
  Tensor2 matrix;                              // |V| x dim
  bool trainable = false;
  OovPolicy oov_policy = OovPolicy::Skip;
  double oov_limit = 0.0;  // bound used for RandomInit rows

  int size() const { return matrix.rows; }

  /// Row index of `word`, or -1 when absent.
  int row_of(const std::string& word) const {
    auto it = vocab.find(word);
    return it == vocab.end() ? -1 : it->second;
  }
};

struct LoadReport {
  int duplicate_words = 0;
  std::vector<std::string> warnings;
};

/// Parse `word v1 v2 ... vd` lines. The dimension is taken from the first
/// line unless `expected_dim` pins it. A repeated word keeps its first row
/// and is recorded as a warning. Throws DimensionMismatch(line) when a
/// line's float count disagrees.
EmbeddingTable load_vectors_text(std::istream& in, std::optional<int> expected_dim = {},
                                 LoadReport* report = nullptr);

/// load_vectors_text over a file. Throws IoError when unreadable.
EmbeddingTable load_vectors_file(const std::string& path, std::optional<int> expected_dim = {},
                                 LoadReport* report = nullptr);

/// Arithmetic mean of the vectors of the tokens, under the table's OOV
/// policy. Empty or all-OOV token lists give the zero vector; `degenerate`
/// (when given) is set to true in that case.
std::vector<double> nbow_compose(const std::vector<std::string>& tokens,
                                 const EmbeddingTable& table, bool* degenerate = nullptr);

/// Distinct tokens of the datasets in first-appearance order (datasets in
/// the given order, examples in file order).
std::vector<std::string> collect_vocab(const std::vector<const Dataset*>& datasets);

/// Trainable table over `corpus_vocab`: rows copied from `pretrained` where
/// the word exists, remaining rows uniform in [-limit, limit] with
/// limit = glorot_limit(|V|, dim).
EmbeddingTable build_trainable_table(const std::vector<std::string>& corpus_vocab,
                                     const EmbeddingTable& pretrained, Rng& rng);

}  // namespace mtsent
