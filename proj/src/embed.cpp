#include "mtsent/embed.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "mtsent/errors.hpp"
#include "mtsent/optim.hpp"

namespace mtsent {

namespace {

// Split on runs of spaces/tabs; the word-vector format never quotes.
std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

EmbeddingTable load_vectors_text(std::istream& in, std::optional<int> expected_dim,
                                 LoadReport* report) {
  EmbeddingTable table;
  table.trainable = false;
  table.oov_policy = OovPolicy::Skip;
  std::vector<double> data;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_ws(line);
    if (fields.size() < 2) throw DimensionMismatch(line_no);
    const int d = static_cast<int>(fields.size()) - 1;
    if (table.dim == 0) {
      table.dim = expected_dim.value_or(d);
    }
    if (d != table.dim) throw DimensionMismatch(line_no);
    const std::string& word = fields[0];
    if (table.vocab.count(word)) {
      if (report) {
        ++report->duplicate_words;
        report->warnings.push_back("duplicate word '" + word + "' at line " +
                                   std::to_string(line_no) + "; first occurrence kept");
      }
      continue;
    }
    for (int k = 0; k < d; ++k) {
      char* end = nullptr;
      const double v = std::strtod(fields[static_cast<std::size_t>(k) + 1].c_str(), &end);
      if (end == nullptr || *end != '\0') throw DimensionMismatch(line_no);
      data.push_back(v);
    }
    table.vocab.emplace(word, static_cast<int>(table.words.size()));
    table.words.push_back(word);
  }
  table.matrix.rows = static_cast<int>(table.words.size());
  table.matrix.cols = table.dim;
  table.matrix.values = std::move(data);
  return table;
}

EmbeddingTable load_vectors_file(const std::string& path, std::optional<int> expected_dim,
                                 LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw IoError(path);
  return load_vectors_text(in, expected_dim, report);
}

std::vector<double> nbow_compose(const std::vector<std::string>& tokens,
                                 const EmbeddingTable& table, bool* degenerate) {
  std::vector<double> acc(static_cast<std::size_t>(table.dim), 0.0);
  int denom = 0;
  for (const std::string& tok : tokens) {
    const int row = table.row_of(tok);
    if (row < 0) {
      if (table.oov_policy == OovPolicy::ZeroVector) ++denom;
      continue;  // Skip and RandomInit: no row to add for an unseen word
    }
    const double* src = table.matrix.values.data() + static_cast<std::size_t>(row) * table.dim;
    for (int k = 0; k < table.dim; ++k) acc[static_cast<std::size_t>(k)] += src[k];
    ++denom;
  }
  if (degenerate) *degenerate = denom == 0;
  if (denom == 0) return acc;
  for (double& v : acc) v /= denom;
  return acc;
}

std::vector<std::string> collect_vocab(const std::vector<const Dataset*>& datasets) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const Dataset* ds : datasets) {
    for (const LabeledExample& ex : ds->examples) {
      for (const std::string& tok : ex.tweet.tokens) {
        if (seen.insert(tok).second) out.push_back(tok);
      }
    }
  }
  return out;
}

EmbeddingTable build_trainable_table(const std::vector<std::string>& corpus_vocab,
                                     const EmbeddingTable& pretrained, Rng& rng) {
  EmbeddingTable table;
  table.dim = pretrained.dim;
  table.trainable = true;
  table.oov_policy = OovPolicy::RandomInit;
  table.oov_limit = glorot_limit(static_cast<int>(corpus_vocab.size()), pretrained.dim);
  table.matrix = Tensor2(static_cast<int>(corpus_vocab.size()), pretrained.dim);
  table.words.reserve(corpus_vocab.size());
  for (const std::string& word : corpus_vocab) {
    if (table.vocab.count(word)) continue;  // dedupe defensively
    const int row = static_cast<int>(table.words.size());
    table.vocab.emplace(word, row);
    table.words.push_back(word);
    double* dst = table.matrix.values.data() + static_cast<std::size_t>(row) * table.dim;
    const int src_row = pretrained.row_of(word);
    if (src_row >= 0) {
      const double* src =
          pretrained.matrix.values.data() + static_cast<std::size_t>(src_row) * pretrained.dim;
      for (int k = 0; k < table.dim; ++k) dst[k] = src[k];
    } else {
      for (int k = 0; k < table.dim; ++k) dst[k] = rng.uniform(-table.oov_limit, table.oov_limit);
    }
  }
  if (static_cast<int>(table.words.size()) != table.matrix.rows) {
    table.matrix.rows = static_cast<int>(table.words.size());
    table.matrix.values.resize(static_cast<std::size_t>(table.matrix.rows) * table.dim);
  }
  return table;
}

}  // namespace mtsent
