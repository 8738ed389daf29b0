#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtsent/corpus.hpp"

namespace mtsent {

enum class LexiconKind { Membership, Scored };

/// A sentiment lexicon: either word -> set of categories, or word -> score.
struct Lexicon {
  std::string name;
  LexiconKind kind = LexiconKind::Scored;
  std::unordered_map<std::string, std::vector<std::string>> categories;  // Membership
  std::unordered_map<std::string, double> scores;                        // Scored
  std::vector<std::string> category_names;  // lexicographic; fixes feature layout
};

/// Scored files: `word<TAB>score` per line. Membership files:
/// `word<TAB>category` per line, multiple lines per word allowed.
/// Throws LexiconLoadError(name) on unreadable input or malformed lines.
Lexicon load_lexicon(const std::string& name, LexiconKind kind, std::istream& in);
Lexicon load_lexicon_file(const std::string& name, LexiconKind kind, const std::string& path);

/// Hand-crafted surface statistics of one tweet. Counts over characters use
/// the raw text; counts over tokens use the tokenizer output (which
/// lowercases, so the all-caps count is taken from raw whitespace words).
struct SurfaceCounts {
  int exclamations = 0;        // '!' characters
  int questions = 0;           // '?' characters
  int hashtags = 0;            // '#' characters
  int mentions = 0;            // '@' characters
  int punct_runs = 0;          // maximal runs of >= 2 chars from {'!','?'}
  int elongated_words = 0;     // token with one alphabetic char >= 3x in a row
  int all_caps_words = 0;      // raw word, length >= 2, all alphabetic uppercase
  int emoticons = 0;           // tokens on the built-in emoticon list

  static const std::vector<std::string>& names();  // layout order
  std::vector<double> values() const;
};

SurfaceCounts surface_counts(const std::string& raw_text, const std::vector<std::string>& tokens);

/// Aggregates of one lexicon over one token list, in manifest order:
/// Membership -> hit count per category (sorted category names);
/// Scored -> hit count, score sum, score max, last-hit score (0s when no hits).
std::vector<double> lexicon_features(const std::vector<std::string>& tokens, const Lexicon& lex);
std::vector<std::string> lexicon_feature_names(const Lexicon& lex);

struct LexiconSpec {
  std::string name;
  LexiconKind kind = LexiconKind::Scored;
  std::string path;
};

/// Fixed-layout extra-feature extractor: optional surface-count group
/// followed by each lexicon's aggregates, in configuration order.
class FeaturePipeline {
 public:
  FeaturePipeline() = default;
  FeaturePipeline(bool with_surface, std::vector<Lexicon> lexicons);

  /// Loads every lexicon up front; a missing file is a hard error
  /// (LexiconLoadError), never silent zeros.
  static FeaturePipeline from_specs(bool with_surface, const std::vector<LexiconSpec>& specs);

  int dim() const { return static_cast<int>(manifest_.size()); }
  const std::vector<std::string>& manifest() const { return manifest_; }

  std::vector<double> assemble(const std::string& raw_text,
                               const std::vector<std::string>& tokens) const;
  std::vector<double> assemble(const Tweet& tweet) const;

 private:
  bool with_surface_ = true;
  std::vector<Lexicon> lexicons_;
  std::vector<std::string> manifest_;
};

}  // namespace mtsent
