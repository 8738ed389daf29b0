#include "mtsent/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace mtsent {

namespace {

std::string ascii_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool is_url(const std::string& s) {
  return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0 || s.rfind("www.", 0) == 0;
}

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

const std::unordered_set<std::string>& emoticon_set() {
  // Western-style emoticons, nose and no-nose variants.
  static const std::unordered_set<std::string> set = {
      ":)",  ":-)", ":(",  ":-(", ":d",  ":-d", ":D",  ":-D", ":p",  ":-p", ":P",  ":-P",
      ";)",  ";-)", ":/",  ":-/", ":\\", ":-\\", ":o",  ":-o", ":O",  ":-O", ":|",  ":-|",
      ":*",  ":-*", ":s",  ":-s", "=)",  "=(",  "=d",  "=D",  "=p",  "=P",  "^^",  "^_^",
      "<3",  "</3", "xd",  "xD",  "XD",  "D:",  "d:",  ":'(", ":')", ";p",  ";P",  ";d",  ";D",
  };
  return set;
}

// One whitespace-delimited chunk -> zero or more tokens.
void emit_tokens(const std::string& piece, std::vector<std::string>& out) {
  if (piece.empty()) return;
  if (is_emoticon(piece)) {
    out.push_back(piece);  // emoticons are kept verbatim
    return;
  }
  if (is_url(piece)) {
    out.push_back(piece);
    return;
  }

  // Strip leading punctuation, keeping @ and # sigils.
  std::size_t begin = 0;
  while (begin < piece.size()) {
    unsigned char c = static_cast<unsigned char>(piece[begin]);
    if (is_word_char(c) || c == '@' || c == '#') break;
    ++begin;
  }
  if (begin > 0) {
    emit_tokens(piece.substr(begin), out);
    return;
  }

  // Split off a trailing punctuation run; keep it if it is an emoticon.
  std::size_t end = piece.size();
  while (end > 0 && !is_word_char(static_cast<unsigned char>(piece[end - 1]))) --end;
  if (end < piece.size()) {
    std::string core = piece.substr(0, end);
    std::string tail = piece.substr(end);
    emit_tokens(core, out);
    if (is_emoticon(tail)) out.push_back(tail);
    return;
  }

  out.push_back(ascii_lower(piece));
}

}  // namespace

bool is_emoticon(const std::string& token) { return emoticon_set().count(token) > 0; }

std::vector<std::string> tokenize(const std::string& raw_text) {
  std::vector<std::string> tokens;
  std::string piece;
  std::istringstream in(raw_text);
  while (in >> piece) {
    emit_tokens(piece, tokens);
  }
  return tokens;
}

const LabelScale& LabelScale::ternary() {
  static const LabelScale scale{ScaleKind::Ternary, {"Negative", "Neutral", "Positive"}};
  return scale;
}

const LabelScale& LabelScale::fine_grained() {
  static const LabelScale scale{
      ScaleKind::FineGrained,
      {"VeryNegative", "Negative", "Neutral", "Positive", "VeryPositive"}};
  return scale;
}

int LabelScale::parse_label(const std::string& token) const {
  const std::string lowered = ascii_lower(token);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (lowered == ascii_lower(classes[i])) return static_cast<int>(i);
  }
  if (kind == ScaleKind::FineGrained) {
    // Numeric label codes -2..2, very negative .. very positive.
    static const std::array<const char*, 5> codes = {"-2", "-1", "0", "1", "2"};
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (token == codes[i]) return static_cast<int>(i);
    }
  }
  return -1;
}

Dataset parse_dataset(std::istream& in, const LabelScale& scale, Split split) {
  Dataset ds;
  ds.scale = scale;
  ds.split = split;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos) throw MalformedLine(line_no);

    LabeledExample ex;
    ex.tweet.id = line.substr(0, tab1);
    const std::string label_field = line.substr(tab1 + 1, tab2 - tab1 - 1);
    ex.tweet.raw_text = line.substr(tab2 + 1);  // remaining tabs belong to the text
    ex.label = scale.parse_label(label_field);
    if (ex.label < 0) throw UnknownLabel(line_no, label_field);
    ex.tweet.tokens = tokenize(ex.tweet.raw_text);
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

Dataset load_dataset(const std::string& path, const LabelScale& scale, Split split) {
  std::ifstream in(path);
  if (!in) throw IoError(path);
  return parse_dataset(in, scale, split);
}

void serialize_dataset(const Dataset& ds, std::ostream& out) {
  for (const LabeledExample& ex : ds.examples) {
    out << ex.tweet.id << '\t' << ds.scale.classes[ex.label] << '\t' << ex.tweet.raw_text << '\n';
  }
}

std::vector<long> class_distribution(const Dataset& ds) {
  std::vector<long> counts(ds.scale.cardinality(), 0);
  for (const LabeledExample& ex : ds.examples) counts[ex.label] += 1;
  return counts;
}

ClassWeights class_weights(const std::vector<long>& counts, WeightScheme scheme) {
  ClassWeights cw;
  cw.scheme = scheme;
  cw.weights.assign(counts.size(), 1.0);
  if (scheme == WeightScheme::InverseFrequency) {
    long total = 0;
    for (long n : counts) total += n;
    const double k = static_cast<double>(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] <= 0) throw ZeroClassCount(static_cast<int>(c));
      cw.weights[c] = static_cast<double>(total) / (k * static_cast<double>(counts[c]));
    }
  }
  return cw;
}

int coarsen_label(int fine) {
  if (fine < 0 || fine > 4) {
    throw Error("fine-grained label " + std::to_string(fine) + " out of range 0..4");
  }
  if (fine <= 1) return 0;
  if (fine == 2) return 1;
  return 2;
}

}  // namespace mtsent
