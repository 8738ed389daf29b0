#include "mtsent/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "mtsent/errors.hpp"

namespace mtsent {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

long to_long(const ConfigEntry& e, const std::string& key) {
  long v = 0;
  const std::string& s = e.value;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + s + "'", e.line);
  }
  return v;
}

double to_double(const ConfigEntry& e, const std::string& key) {
  double v = 0.0;
  const std::string& s = e.value;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("'" + key + "' expects a number, got '" + s + "'", e.line);
  }
  return v;
}

bool to_bool(const ConfigEntry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no" || e.value == "off") return false;
  throw ConfigError("'" + key + "' expects true/false, got '" + e.value + "'", e.line);
}

/// Walks one section and complains about any key the caller did not consume.
class SectionReader {
 public:
  SectionReader(const ConfigFile& file, const std::string& section) : section_(section) {
    auto it = file.sections.find(section);
    if (it != file.sections.end()) entries_ = &it->second;
  }

  const ConfigEntry* take(const std::string& key) {
    seen_.insert(key);
    if (!entries_) return nullptr;
    auto it = entries_->find(key);
    return it == entries_->end() ? nullptr : &it->second;
  }

  /// Keys with a given prefix (for repeated lexicon entries), in file order.
  std::vector<std::pair<std::string, ConfigEntry>> take_prefixed(const std::string& prefix) {
    std::vector<std::pair<std::string, ConfigEntry>> out;
    if (!entries_) return out;
    for (const auto& [key, entry] : *entries_) {
      if (key.rfind(prefix, 0) == 0) {
        seen_.insert(key);
        out.emplace_back(key, entry);
      }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.second.line < b.second.line; });
    return out;
  }

  void finish() const {
    if (!entries_) return;
    for (const auto& [key, entry] : *entries_) {
      if (!seen_.count(key)) {
        throw ConfigError("unknown key '" + key + "' in section [" + section_ + "]", entry.line);
      }
    }
  }

 private:
  std::string section_;
  const std::map<std::string, ConfigEntry>* entries_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

ConfigFile parse_config(std::istream& in) {
  ConfigFile file;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']' || stripped.size() < 3) {
        throw ConfigError("malformed section header '" + stripped + "'", line_no);
      }
      section = trim(stripped.substr(1, stripped.size() - 2));
      file.sections[section];  // record even if empty
      continue;
    }
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value', got '" + stripped + "'", line_no);
    }
    if (section.empty()) {
      throw ConfigError("key before any [section] header", line_no);
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    auto [it, inserted] = file.sections[section].emplace(key, ConfigEntry{value, line_no});
    if (!inserted) {
      throw ConfigError("duplicate key '" + key + "' in section [" + section + "] (first at line " +
                            std::to_string(it->second.line) + ")",
                        line_no);
    }
  }
  return file;
}

ConfigFile parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path);
  return parse_config(in);
}

RunConfig make_run_config(const ConfigFile& file) {
  static const std::set<std::string> kSections = {"run",      "data",  "embeddings", "features",
                                                  "network",  "train", "baseline"};
  for (const auto& [name, entries] : file.sections) {
    if (!kSections.count(name)) {
      const int line = entries.empty() ? 0 : entries.begin()->second.line;
      throw ConfigError("unknown section [" + name + "]", line);
    }
  }

  RunConfig cfg;

  {
    SectionReader run(file, "run");
    if (const ConfigEntry* e = run.take("seed")) {
      const long v = to_long(*e, "seed");
      if (v < 0) throw ConfigError("seed must be nonnegative", e->line);
      cfg.seed = static_cast<std::uint64_t>(v);
    }
    if (const ConfigEntry* e = run.take("out_dir")) cfg.out_dir = e->value;
    run.finish();
  }

  {
    SectionReader data(file, "data");
    if (const ConfigEntry* e = data.take("fine_train")) cfg.fine_train = e->value;
    if (const ConfigEntry* e = data.take("fine_dev")) cfg.fine_dev = e->value;
    if (const ConfigEntry* e = data.take("fine_test")) cfg.fine_test = e->value;
    if (const ConfigEntry* e = data.take("ternary_train")) cfg.ternary_train = e->value;
    if (const ConfigEntry* e = data.take("ternary_dev")) cfg.ternary_dev = e->value;
    if (const ConfigEntry* e = data.take("ternary_test")) cfg.ternary_test = e->value;
    data.finish();
  }

  {
    SectionReader emb(file, "embeddings");
    if (const ConfigEntry* e = emb.take("path")) cfg.embeddings_path = e->value;
    if (const ConfigEntry* e = emb.take("dim")) {
      const long v = to_long(*e, "dim");
      if (v < 1) throw ConfigError("embedding dim must be positive", e->line);
      cfg.embeddings_dim = static_cast<int>(v);
    }
    emb.finish();
  }

  {
    SectionReader feats(file, "features");
    if (const ConfigEntry* e = feats.take("use_extra")) cfg.use_extra_features = to_bool(*e, "use_extra");
    if (const ConfigEntry* e = feats.take("surface")) cfg.surface_features = to_bool(*e, "surface");
    for (const auto& [key, entry] : feats.take_prefixed("lexicon")) {
      // value: `<name> <kind> <path>`; the path may contain spaces.
      std::istringstream fields(entry.value);
      LexiconSpec spec;
      std::string kind;
      if (!(fields >> spec.name >> kind)) {
        throw ConfigError("'" + key + "' expects '<name> <kind> <path>'", entry.line);
      }
      if (kind == "scored") {
        spec.kind = LexiconKind::Scored;
      } else if (kind == "membership") {
        spec.kind = LexiconKind::Membership;
      } else {
        throw ConfigError("lexicon kind must be 'scored' or 'membership', got '" + kind + "'",
                          entry.line);
      }
      std::getline(fields, spec.path);
      spec.path = trim(spec.path);
      if (spec.path.empty()) {
        throw ConfigError("'" + key + "' expects '<name> <kind> <path>'", entry.line);
      }
      cfg.lexicons.push_back(std::move(spec));
    }
    feats.finish();
  }

  {
    SectionReader net(file, "network");
    auto take_int = [&](const char* key, int& slot) {
      if (const ConfigEntry* e = net.take(key)) {
        const long v = to_long(*e, key);
        if (v < 1) throw ConfigError(std::string("'") + key + "' must be positive", e->line);
        slot = static_cast<int>(v);
      }
    };
    auto take_rate = [&](const char* key, double& slot) {
      if (const ConfigEntry* e = net.take(key)) {
        const double v = to_double(*e, key);
        if (v < 0.0 || v >= 1.0) {
          throw ConfigError(std::string("'") + key + "' must be in [0, 1)", e->line);
        }
        slot = v;
      }
    };
    take_int("embed_dim", cfg.network.embed_dim);
    take_int("encoder_dim", cfg.network.encoder_dim);
    take_int("text_hidden", cfg.network.text_hidden);
    take_int("feature_hidden", cfg.network.feature_hidden);
    take_int("merge_hidden", cfg.network.merge_hidden);
    take_rate("dropout_encoder", cfg.network.dropout_encoder);
    take_rate("dropout_text", cfg.network.dropout_text);
    take_rate("dropout_feature", cfg.network.dropout_feature);
    take_rate("dropout_merge", cfg.network.dropout_merge);
    if (const ConfigEntry* e = net.take("dropout")) {  // one rate for all four sites
      const double v = to_double(*e, "dropout");
      if (v < 0.0 || v >= 1.0) throw ConfigError("'dropout' must be in [0, 1)", e->line);
      cfg.network.dropout_encoder = cfg.network.dropout_text = v;
      cfg.network.dropout_feature = cfg.network.dropout_merge = v;
    }
    if (const ConfigEntry* e = net.take("class_weighted_loss")) {
      cfg.network.class_weighted_loss = to_bool(*e, "class_weighted_loss");
    }
    net.finish();
  }

  {
    SectionReader train(file, "train");
    if (const ConfigEntry* e = train.take("batch_size")) {
      const long v = to_long(*e, "batch_size");
      if (v < 1) throw ConfigError("batch_size must be >= 1", e->line);
      cfg.train.batch_size = static_cast<int>(v);
    }
    if (const ConfigEntry* e = train.take("max_epochs")) {
      const long v = to_long(*e, "max_epochs");
      if (v < 1) throw ConfigError("max_epochs must be >= 1", e->line);
      cfg.train.max_epochs = static_cast<int>(v);
    }
    if (const ConfigEntry* e = train.take("primary_prob")) {
      const double v = to_double(*e, "primary_prob");
      if (v <= 0.0 || v > 1.0) throw ConfigError("primary_prob must be in (0, 1]", e->line);
      cfg.train.primary_prob = v;
    }
    if (const ConfigEntry* e = train.take("patience")) {
      const long v = to_long(*e, "patience");
      if (v < 1) throw ConfigError("patience must be >= 1", e->line);
      cfg.train.patience = static_cast<int>(v);
    }
    if (const ConfigEntry* e = train.take("learning_rate")) {
      const double v = to_double(*e, "learning_rate");
      if (v <= 0.0) throw ConfigError("learning_rate must be positive", e->line);
      cfg.train.learning_rate = v;
    }
    if (const ConfigEntry* e = train.take("rho")) {
      const double v = to_double(*e, "rho");
      if (v <= 0.0 || v >= 1.0) throw ConfigError("rho must be in (0, 1)", e->line);
      cfg.train.rho = v;
    }
    if (const ConfigEntry* e = train.take("epsilon")) {
      const double v = to_double(*e, "epsilon");
      if (v <= 0.0) throw ConfigError("epsilon must be positive", e->line);
      cfg.train.epsilon = v;
    }
    train.finish();
  }

  {
    SectionReader base(file, "baseline");
    if (const ConfigEntry* e = base.take("strategy")) {
      try {
        parse_strategy(e->value);
      } catch (const Error& err) {
        throw ConfigError(err.what(), e->line);
      }
      cfg.baseline_strategy = e->value;
    }
    if (const ConfigEntry* e = base.take("representation")) {
      if (e->value != "nbow" && e->value != "nbow_plus") {
        throw ConfigError("representation must be 'nbow' or 'nbow_plus'", e->line);
      }
      cfg.baseline_representation = e->value;
    }
    if (const ConfigEntry* e = base.take("epochs")) {
      const long v = to_long(*e, "epochs");
      if (v < 1) throw ConfigError("epochs must be >= 1", e->line);
      cfg.baseline_fit.epochs = static_cast<int>(v);
    }
    if (const ConfigEntry* e = base.take("eta0")) {
      const double v = to_double(*e, "eta0");
      if (v <= 0.0) throw ConfigError("eta0 must be positive", e->line);
      cfg.baseline_fit.eta0 = v;
    }
    if (const ConfigEntry* e = base.take("folds")) {
      const long v = to_long(*e, "folds");
      if (v < 2) throw ConfigError("folds must be >= 2", e->line);
      cfg.baseline_folds = static_cast<int>(v);
    }
    if (const ConfigEntry* e = base.take("tune_on")) {
      if (e->value != "train" && e->value != "train+dev") {
        throw ConfigError("tune_on must be 'train' or 'train+dev'", e->line);
      }
      cfg.baseline_tune_on = e->value;
    }
    base.finish();
  }

  cfg.train.seed = cfg.seed;
  cfg.baseline_fit.seed = cfg.seed;
  cfg.network.use_extra_features = cfg.use_extra_features;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return make_run_config(parse_config_file(path));
}

}  // namespace mtsent
