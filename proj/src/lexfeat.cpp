#include "mtsent/lexfeat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <utility>

#include "mtsent/errors.hpp"

namespace mtsent {

Lexicon load_lexicon(const std::string& name, LexiconKind kind, std::istream& in) {
  Lexicon lex;
  lex.name = name;
  lex.kind = kind;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw LexiconLoadError(name, "malformed line " + std::to_string(line_no));
    }
    const std::string word = line.substr(0, tab);
    const std::string payload = line.substr(tab + 1);
    if (kind == LexiconKind::Scored) {
      char* end = nullptr;
      const double score = std::strtod(payload.c_str(), &end);
      if (end == nullptr || *end != '\0' || !std::isfinite(score)) {
        throw LexiconLoadError(name, "bad score at line " + std::to_string(line_no));
      }
      lex.scores[word] = score;  // later lines override earlier ones
    } else {
      std::vector<std::string>& cats = lex.categories[word];
      if (std::find(cats.begin(), cats.end(), payload) == cats.end()) cats.push_back(payload);
      if (std::find(lex.category_names.begin(), lex.category_names.end(), payload) ==
          lex.category_names.end()) {
        lex.category_names.push_back(payload);
      }
    }
  }
  std::sort(lex.category_names.begin(), lex.category_names.end());
  return lex;
}

Lexicon load_lexicon_file(const std::string& name, LexiconKind kind, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LexiconLoadError(name, "cannot read " + path);
  return load_lexicon(name, kind, in);
}

const std::vector<std::string>& SurfaceCounts::names() {
  static const std::vector<std::string> kNames = {
      "surface:exclamations",   "surface:questions",      "surface:hashtags",
      "surface:mentions",       "surface:punct_runs",     "surface:elongated_words",
      "surface:all_caps_words", "surface:emoticons",
  };
  return kNames;
}

std::vector<double> SurfaceCounts::values() const {
  return {static_cast<double>(exclamations),    static_cast<double>(questions),
          static_cast<double>(hashtags),        static_cast<double>(mentions),
          static_cast<double>(punct_runs),      static_cast<double>(elongated_words),
          static_cast<double>(all_caps_words),  static_cast<double>(emoticons)};
}

SurfaceCounts surface_counts(const std::string& raw_text, const std::vector<std::string>& tokens) {
  SurfaceCounts out;
  int run = 0;
  for (char ch : raw_text) {
    switch (ch) {
      case '!': ++out.exclamations; break;
      case '?': ++out.questions; break;
      case '#': ++out.hashtags; break;
      case '@': ++out.mentions; break;
      default: break;
    }
    if (ch == '!' || ch == '?') {
      ++run;
    } else {
      if (run >= 2) ++out.punct_runs;
      run = 0;
    }
  }
  if (run >= 2) ++out.punct_runs;

  for (const std::string& tok : tokens) {
    int repeat = 0;
    char prev = '\0';
    for (char ch : tok) {
      if (std::isalpha(static_cast<unsigned char>(ch)) && ch == prev) {
        if (++repeat >= 3) {
          ++out.elongated_words;
          break;
        }
      } else {
        repeat = std::isalpha(static_cast<unsigned char>(ch)) ? 1 : 0;
      }
      prev = ch;
    }
    if (is_emoticon(tok)) ++out.emoticons;
  }

  // All-caps words come from the raw text: the tokenizer lowercases.
  std::istringstream words(raw_text);
  std::string word;
  while (words >> word) {
    if (word.size() < 2) continue;
    bool caps = true;
    for (char ch : word) {
      if (!std::isupper(static_cast<unsigned char>(ch))) {
        caps = false;
        break;
      }
    }
    if (caps) ++out.all_caps_words;
  }
  return out;
}

std::vector<double> lexicon_features(const std::vector<std::string>& tokens, const Lexicon& lex) {
  if (lex.kind == LexiconKind::Membership) {
    std::vector<double> out(lex.category_names.size(), 0.0);
    for (const std::string& tok : tokens) {
      auto it = lex.categories.find(tok);
      if (it == lex.categories.end()) continue;
      for (const std::string& cat : it->second) {
        const auto pos =
            std::lower_bound(lex.category_names.begin(), lex.category_names.end(), cat);
        out[static_cast<std::size_t>(pos - lex.category_names.begin())] += 1.0;
      }
    }
    return out;
  }
  double count = 0.0, sum = 0.0, mx = 0.0, last = 0.0;
  bool any = false;
  for (const std::string& tok : tokens) {
    auto it = lex.scores.find(tok);
    if (it == lex.scores.end()) continue;
    count += 1.0;
    sum += it->second;
    mx = any ? std::max(mx, it->second) : it->second;
    last = it->second;
    any = true;
  }
  return {count, sum, mx, last};
}

std::vector<std::string> lexicon_feature_names(const Lexicon& lex) {
  std::vector<std::string> out;
  if (lex.kind == LexiconKind::Membership) {
    out.reserve(lex.category_names.size());
    for (const std::string& cat : lex.category_names) out.push_back("lex:" + lex.name + ":" + cat);
  } else {
    out = {"lex:" + lex.name + ":count", "lex:" + lex.name + ":sum", "lex:" + lex.name + ":max",
           "lex:" + lex.name + ":last"};
  }
  return out;
}

FeaturePipeline::FeaturePipeline(bool with_surface, std::vector<Lexicon> lexicons)
    : with_surface_(with_surface), lexicons_(std::move(lexicons)) {
  if (with_surface_) manifest_ = SurfaceCounts::names();
  for (const Lexicon& lex : lexicons_) {
    for (std::string& name : lexicon_feature_names(lex)) manifest_.push_back(std::move(name));
  }
}

FeaturePipeline FeaturePipeline::from_specs(bool with_surface,
                                            const std::vector<LexiconSpec>& specs) {
  std::vector<Lexicon> lexicons;
  lexicons.reserve(specs.size());
  for (const LexiconSpec& spec : specs) {
    lexicons.push_back(load_lexicon_file(spec.name, spec.kind, spec.path));
  }
  return FeaturePipeline(with_surface, std::move(lexicons));
}

std::vector<double> FeaturePipeline::assemble(const std::string& raw_text,
                                              const std::vector<std::string>& tokens) const {
  std::vector<double> out;
  out.reserve(manifest_.size());
  if (with_surface_) {
    for (double v : surface_counts(raw_text, tokens).values()) out.push_back(v);
  }
  for (const Lexicon& lex : lexicons_) {
    for (double v : lexicon_features(tokens, lex)) out.push_back(v);
  }
  return out;
}

std::vector<double> FeaturePipeline::assemble(const Tweet& tweet) const {
  return assemble(tweet.raw_text, tweet.tokens);
}

}  // namespace mtsent
