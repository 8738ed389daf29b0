#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtsent/errors.hpp"
#include "mtsent/multitask.hpp"

namespace mtsent {

namespace {

constexpr char kMagic[4] = {'M', 'T', 'L', 'S'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error("model file truncated at " + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in, const std::string& what) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error("model file truncated at " + what);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

// Shortest decimal text that round-trips the double exactly.
std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double_exact(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error("bad float in model config: '" + s + "'");
  }
  return v;
}

long parse_long_exact(const std::string& s) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error("bad integer in model config: '" + s + "'");
  }
  return v;
}

std::string build_config_blob(const NetworkConfig& cfg, const std::vector<std::string>& words) {
  std::ostringstream out;
  out << "[network]\n";
  out << "embed_dim = " << cfg.embed_dim << "\n";
  out << "encoder_dim = " << cfg.encoder_dim << "\n";
  out << "text_hidden = " << cfg.text_hidden << "\n";
  out << "feature_hidden = " << cfg.feature_hidden << "\n";
  out << "merge_hidden = " << cfg.merge_hidden << "\n";
  out << "dropout_encoder = " << fmt_double(cfg.dropout_encoder) << "\n";
  out << "dropout_text = " << fmt_double(cfg.dropout_text) << "\n";
  out << "dropout_feature = " << fmt_double(cfg.dropout_feature) << "\n";
  out << "dropout_merge = " << fmt_double(cfg.dropout_merge) << "\n";
  out << "use_extra_features = " << (cfg.use_extra_features ? 1 : 0) << "\n";
  out << "feature_dim = " << cfg.feature_dim << "\n";
  out << "class_weighted_loss = " << (cfg.class_weighted_loss ? 1 : 0) << "\n";
  out << "[tasks]\n";
  for (const TaskSpec& t : cfg.tasks) out << t.name << " = " << t.class_count << "\n";
  out << "[vocab]\n";
  for (const std::string& w : words) out << w << "\n";
  return out.str();
}

struct ParsedBlob {
  NetworkConfig cfg;
  std::vector<std::string> words;
};

ParsedBlob parse_config_blob(const std::string& blob) {
  ParsedBlob out;
  out.cfg.tasks.clear();
  std::istringstream in(blob);
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    if (section == "vocab") {
      out.words.push_back(line);
      continue;
    }
    const std::size_t eq = line.find(" = ");
    if (eq == std::string::npos) throw Error("malformed model config line: '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    if (section == "network") {
      if (key == "embed_dim") out.cfg.embed_dim = static_cast<int>(parse_long_exact(value));
      else if (key == "encoder_dim") out.cfg.encoder_dim = static_cast<int>(parse_long_exact(value));
      else if (key == "text_hidden") out.cfg.text_hidden = static_cast<int>(parse_long_exact(value));
      else if (key == "feature_hidden") out.cfg.feature_hidden = static_cast<int>(parse_long_exact(value));
      else if (key == "merge_hidden") out.cfg.merge_hidden = static_cast<int>(parse_long_exact(value));
      else if (key == "dropout_encoder") out.cfg.dropout_encoder = parse_double_exact(value);
      else if (key == "dropout_text") out.cfg.dropout_text = parse_double_exact(value);
      else if (key == "dropout_feature") out.cfg.dropout_feature = parse_double_exact(value);
      else if (key == "dropout_merge") out.cfg.dropout_merge = parse_double_exact(value);
      else if (key == "use_extra_features") out.cfg.use_extra_features = parse_long_exact(value) != 0;
      else if (key == "feature_dim") out.cfg.feature_dim = static_cast<int>(parse_long_exact(value));
      else if (key == "class_weighted_loss") out.cfg.class_weighted_loss = parse_long_exact(value) != 0;
      else throw Error("unknown model config key '" + key + "'");
    } else if (section == "tasks") {
      out.cfg.tasks.push_back({key, static_cast<int>(parse_long_exact(value))});
    } else {
      throw Error("unknown model config section '" + section + "'");
    }
  }
  return out;
}

}  // namespace

void save_model(MultitaskNetwork& network, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path);
  out.write(kMagic, 4);
  put_u32(out, kFormatVersion);
  const std::string blob = build_config_blob(network.cfg_, network.words_);
  put_u32(out, static_cast<std::uint32_t>(blob.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  const std::vector<Parameter*> params = network.parameters();
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (Parameter* p : params) {
    put_u32(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put_u32(out, static_cast<std::uint32_t>(p->value.rows));
    put_u32(out, static_cast<std::uint32_t>(p->value.cols));
    for (double v : p->value.values) put_f64(out, v);
  }
  if (!out) throw IoError(path);
}

MultitaskNetwork load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error("not a model file (bad magic): " + path);
  }
  const std::uint32_t version = get_u32(in, "version");
  if (version != kFormatVersion) {
    throw Error("unsupported model format version " + std::to_string(version));
  }
  const std::uint32_t blob_len = get_u32(in, "config length");
  std::string blob(blob_len, '\0');
  if (!in.read(blob.data(), blob_len)) throw Error("model file truncated at config");
  ParsedBlob parsed = parse_config_blob(blob);

  EmbeddingTable table;
  table.dim = parsed.cfg.embed_dim;
  table.trainable = true;
  table.oov_policy = OovPolicy::RandomInit;
  table.words = parsed.words;
  for (std::size_t i = 0; i < parsed.words.size(); ++i) {
    table.vocab.emplace(parsed.words[i], static_cast<int>(i));
  }
  table.matrix = Tensor2(static_cast<int>(parsed.words.size()), parsed.cfg.embed_dim);

  MultitaskNetwork network(parsed.cfg, table);
  std::unordered_map<std::string, Parameter*> by_name;
  for (Parameter* p : network.parameters()) by_name.emplace(p->name, p);

  const std::uint32_t count = get_u32(in, "parameter count");
  if (count != by_name.size()) {
    throw Error("model parameter count " + std::to_string(count) + " does not match config");
  }
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::uint32_t name_len = get_u32(in, "name length");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw Error("model file truncated at name");
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw Error("unexpected parameter '" + name + "' in model file");
    Parameter& p = *it->second;
    const int rows = static_cast<int>(get_u32(in, name + " rows"));
    const int cols = static_cast<int>(get_u32(in, name + " cols"));
    if (rows != p.value.rows || cols != p.value.cols) {
      throw ShapeMismatch("parameter '" + name + "' is " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " in the file but " +
                          std::to_string(p.value.rows) + "x" + std::to_string(p.value.cols) +
                          " per config");
    }
    for (double& v : p.value.values) v = get_f64(in, name);
    by_name.erase(it);
  }
  if (!by_name.empty()) throw Error("model file is missing parameters");
  return network;
}

}  // namespace mtsent
