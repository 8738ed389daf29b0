#include "mtsent/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "mtsent/config.hpp"
#include "mtsent/corpus.hpp"
#include "mtsent/embed.hpp"
#include "mtsent/errors.hpp"
#include "mtsent/lexfeat.hpp"
#include "mtsent/linear.hpp"
#include "mtsent/metrics.hpp"
#include "mtsent/multitask.hpp"
#include "mtsent/trainer.hpp"
#include "mtsent/version.hpp"

namespace fs = std::filesystem;

namespace mtsent {

namespace {

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const NonFiniteGradient& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const NonFiniteLoss& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const LabelScale& scale_by_name(const std::string& name) {
  if (name == "fine") return LabelScale::fine_grained();
  if (name == "ternary") return LabelScale::ternary();
  throw Error("unknown scale '" + name + "' (expected 'fine' or 'ternary')");
}

void require_path(const std::string& value, const std::string& key) {
  if (value.empty()) throw ConfigError("missing required config value '" + key + "'");
  if (!fs::exists(value)) throw IoError(value);
}

std::string timestamp_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

/// runs/<timestamp>-<seed>, suffixed when the directory already exists.
std::string pick_run_dir(const std::string& base, std::uint64_t seed) {
  const std::string stem = base + "/" + timestamp_now() + "-" + std::to_string(seed);
  std::string dir = stem;
  for (int k = 2; fs::exists(dir); ++k) dir = stem + "." + std::to_string(k);
  return dir;
}

void copy_file_bytes(const std::string& from, const std::string& to) {
  std::ifstream in(from, std::ios::binary);
  if (!in) throw IoError(from);
  std::ofstream out(to, std::ios::binary);
  if (!out) throw IoError(to);
  out << in.rdbuf();
}

std::vector<std::vector<double>> assemble_all(const FeaturePipeline& pipeline,
                                              const Dataset& data) {
  std::vector<std::vector<double>> rows;
  rows.reserve(data.size());
  for (const LabeledExample& ex : data.examples) rows.push_back(pipeline.assemble(ex.tweet));
  return rows;
}

FeaturePipeline pipeline_from(const RunConfig& cfg) {
  return FeaturePipeline::from_specs(cfg.surface_features, cfg.lexicons);
}

/// Key-value record of one finished run; `summarize` reads these back.
void write_run_record(const std::string& dir, const std::string& run_id, std::uint64_t seed,
                      bool single_task, double wall_seconds, const TrainHistory& history,
                      const std::string& config_snapshot) {
  std::ofstream out(dir + "/run.txt");
  if (!out) throw IoError(dir + "/run.txt");
  out << "run_id\t" << run_id << "\n";
  out << "version\t" << kVersion << "\n";
  out << "seed\t" << seed << "\n";
  out << "single_task\t" << (single_task ? 1 : 0) << "\n";
  out << "wall_seconds\t" << fmt_double(wall_seconds) << "\n";
  out << "epochs_run\t" << history.epochs.size() << "\n";
  out << "best_epoch\t" << history.best_epoch << "\n";
  out << "best_dev_mae\t" << fmt_double(history.best_dev_mae) << "\n";
  out << "model\tmodel.bin\n";
  out << "history\thistory.tsv\n";
  out << "config_snapshot\t" << config_snapshot << "\n";
}

int head_for_scale(const MultitaskNetwork& network, const LabelScale& scale) {
  for (int t = 0; t < network.task_count(); ++t) {
    if (network.config().tasks[static_cast<std::size_t>(t)].class_count == scale.cardinality()) {
      return t;
    }
  }
  throw ScaleMismatch(scale.cardinality());
}

/// Feature rows for a dataset when the model wants extra features; the
/// config supplies the lexicons. Returns empty when the model does not.
std::vector<std::vector<double>> features_for_model(const MultitaskNetwork& network,
                                                    const std::string& config_path,
                                                    const Dataset& data) {
  if (!network.config().use_extra_features) return {};
  if (config_path.empty()) throw MissingExtraFeatures();
  const RunConfig cfg = load_run_config(config_path);
  const FeaturePipeline pipeline = pipeline_from(cfg);
  if (pipeline.dim() != network.config().feature_dim) {
    throw ShapeMismatch("feature pipeline emits " + std::to_string(pipeline.dim()) +
                        " features, model expects " +
                        std::to_string(network.config().feature_dim));
  }
  return assemble_all(pipeline, data);
}

}  // namespace

int cmd_train(const TrainOptions& opt) {
  return run_guarded([&] {
    const auto t0 = std::chrono::steady_clock::now();
    const ConfigFile file = parse_config_file(opt.config_path);
    RunConfig cfg = make_run_config(file);
    if (opt.seed) {
      cfg.seed = *opt.seed;
      cfg.train.seed = *opt.seed;
    }
    if (opt.single_task && file.has("train", "primary_prob")) {
      std::cout << "note: --single-task ignores the configured primary_prob\n";
    }

    require_path(cfg.fine_train, "fine_train");
    require_path(cfg.fine_dev, "fine_dev");
    require_path(cfg.embeddings_path, "embeddings path");
    if (!opt.single_task) require_path(cfg.ternary_train, "ternary_train");

    const Dataset fine_train =
        load_dataset(cfg.fine_train, LabelScale::fine_grained(), Split::Train);
    const Dataset fine_dev = load_dataset(cfg.fine_dev, LabelScale::fine_grained(), Split::Dev);
    Dataset ternary_train;
    if (!opt.single_task) {
      ternary_train = load_dataset(cfg.ternary_train, LabelScale::ternary(), Split::Train);
    }

    FeaturePipeline pipeline;
    std::vector<std::vector<double>> fine_train_f, fine_dev_f, ternary_train_f;
    if (cfg.use_extra_features) {
      pipeline = pipeline_from(cfg);
      cfg.network.feature_dim = pipeline.dim();
      fine_train_f = assemble_all(pipeline, fine_train);
      fine_dev_f = assemble_all(pipeline, fine_dev);
      if (!opt.single_task) ternary_train_f = assemble_all(pipeline, ternary_train);
    }

    const EmbeddingTable pretrained =
        load_vectors_file(cfg.embeddings_path, cfg.embeddings_dim);
    cfg.network.embed_dim = pretrained.dim;

    std::vector<const Dataset*> vocab_sources = {&fine_train};
    if (!opt.single_task) vocab_sources.push_back(&ternary_train);
    const std::vector<std::string> vocab = collect_vocab(vocab_sources);

    Rng init_rng(Rng::substream(cfg.seed, stream::kInit));
    const EmbeddingTable table = build_trainable_table(vocab, pretrained, init_rng);

    if (opt.single_task) {
      cfg.network.tasks = {{"fine", LabelScale::fine_grained().cardinality()}};
    } else {
      cfg.network.tasks = {{"fine", LabelScale::fine_grained().cardinality()},
                           {"ternary", LabelScale::ternary().cardinality()}};
    }

    MultitaskNetwork network(cfg.network, table);
    network.init(init_rng);

    TaskExamples fine_ex{&fine_train, cfg.use_extra_features ? &fine_train_f : nullptr};
    TaskExamples dev_ex{&fine_dev, cfg.use_extra_features ? &fine_dev_f : nullptr};

    TrainHistory history;
    if (opt.single_task) {
      history = train_singletask(network, fine_ex, dev_ex, cfg.train);
    } else {
      TaskExamples ternary_ex{&ternary_train,
                              cfg.use_extra_features ? &ternary_train_f : nullptr};
      history = train_multitask(network, {fine_ex, ternary_ex}, dev_ex, cfg.train);
    }

    const std::string dir = opt.out.empty() ? pick_run_dir(cfg.out_dir, cfg.seed) : opt.out;
    fs::create_directories(dir);
    save_model(network, dir + "/model.bin");
    std::vector<std::string> task_names;
    for (const TaskSpec& t : cfg.network.tasks) task_names.push_back(t.name);
    write_history(dir + "/history.tsv", task_names, history);
    copy_file_bytes(opt.config_path, dir + "/config.snapshot.ini");
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_run_record(dir, fs::path(dir).filename().string(), cfg.seed, opt.single_task, wall,
                     history, "config.snapshot.ini");

    std::cout << "run_dir\t" << dir << "\n";
    std::cout << "epochs_run\t" << history.epochs.size() << "\n";
    std::cout << "best_epoch\t" << history.best_epoch << "\n";
    std::cout << "best_dev_mae\t" << fmt_double(history.best_dev_mae) << "\n";
  });
}

int cmd_evaluate(const EvaluateOptions& opt) {
  return run_guarded([&] {
    MultitaskNetwork network = load_model(opt.model_path);
    const LabelScale& scale = scale_by_name(opt.scale);
    const Dataset data = load_dataset(opt.data_path, scale, Split::Test);
    const int task = head_for_scale(network, scale);
    const std::vector<std::vector<double>> features =
        features_for_model(network, opt.config_path, data);

    std::vector<int> truth, pred;
    truth.reserve(data.size());
    pred.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      truth.push_back(data.examples[i].label);
      pred.push_back(network.predict(data.examples[i].tweet.tokens,
                                     features.empty() ? nullptr : &features[i], task));
    }
    const EvalReport report = evaluate(truth, pred, scale.cardinality());
    write_report(report, scale.classes, std::cout);
    if (opt.fig2) {
      std::cout << "per_class_mae\n";
      for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        std::cout << scale.classes[c] << '\t' << fmt_double(report.per_class[c].mae) << "\n";
      }
    }
    if (!opt.out.empty()) {
      std::ofstream out(opt.out);
      if (!out) throw IoError(opt.out);
      write_report(report, scale.classes, out);
    }
  });
}

int cmd_predict(const PredictOptions& opt) {
  return run_guarded([&] {
    MultitaskNetwork network = load_model(opt.model_path);
    const int task = network.task_index(opt.task);
    const int classes = network.config().tasks[static_cast<std::size_t>(task)].class_count;
    const LabelScale* scale_ptr = nullptr;
    if (classes == LabelScale::ternary().cardinality()) {
      scale_ptr = &LabelScale::ternary();
    } else if (classes == LabelScale::fine_grained().cardinality()) {
      scale_ptr = &LabelScale::fine_grained();
    } else {
      throw ScaleMismatch(classes);
    }
    const LabelScale& scale = *scale_ptr;

    // id<TAB>label<TAB>text; the label field is ignored (it may be a dummy).
    std::ifstream in(opt.input_path);
    if (!in) throw IoError(opt.input_path);
    Dataset data;
    data.scale = scale;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const std::size_t tab1 = line.find('\t');
      const std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                         : line.find('\t', tab1 + 1);
      if (tab2 == std::string::npos) throw MalformedLine(line_no);
      LabeledExample ex;
      ex.tweet.id = line.substr(0, tab1);
      ex.tweet.raw_text = line.substr(tab2 + 1);
      ex.tweet.tokens = tokenize(ex.tweet.raw_text);
      ex.label = 0;
      data.examples.push_back(std::move(ex));
    }

    const std::vector<std::vector<double>> features =
        features_for_model(network, opt.config_path, data);

    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (!opt.out.empty()) {
      file_out.open(opt.out);
      if (!file_out) throw IoError(opt.out);
      out = &file_out;
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const int label = network.predict(data.examples[i].tweet.tokens,
                                        features.empty() ? nullptr : &features[i], task);
      *out << data.examples[i].tweet.id << '\t' << scale.classes[static_cast<std::size_t>(label)]
           << "\n";
    }
  });
}

int cmd_baseline(const BaselineOptions& opt) {
  return run_guarded([&] {
    RunConfig cfg = load_run_config(opt.config_path);
    if (opt.seed) {
      cfg.seed = *opt.seed;
      cfg.baseline_fit.seed = *opt.seed;
    }
    const std::string strategy_str =
        opt.strategy.empty() ? cfg.baseline_strategy : opt.strategy;
    const LinearStrategy strategy = parse_strategy(strategy_str);
    const std::string representation =
        opt.representation.empty() ? cfg.baseline_representation : opt.representation;
    if (representation != "nbow" && representation != "nbow_plus") {
      throw Error("representation must be 'nbow' or 'nbow_plus'");
    }
    const std::string tune_on = opt.tune_on.empty() ? cfg.baseline_tune_on : opt.tune_on;
    if (tune_on != "train" && tune_on != "train+dev") {
      throw Error("tune_on must be 'train' or 'train+dev'");
    }

    const LabelScale& scale = scale_by_name(opt.scale);
    const bool fine = opt.scale == "fine";
    const std::string train_path = fine ? cfg.fine_train : cfg.ternary_train;
    const std::string dev_path = fine ? cfg.fine_dev : cfg.ternary_dev;
    const std::string test_path = fine ? cfg.fine_test : cfg.ternary_test;
    require_path(train_path, fine ? "fine_train" : "ternary_train");
    require_path(cfg.embeddings_path, "embeddings path");

    Dataset data = load_dataset(train_path, scale, Split::Train);
    if (tune_on == "train+dev" && !dev_path.empty()) {
      const Dataset dev = load_dataset(dev_path, scale, Split::Dev);
      for (const LabeledExample& ex : dev.examples) data.examples.push_back(ex);
    }

    const EmbeddingTable table = load_vectors_file(cfg.embeddings_path, cfg.embeddings_dim);
    FeaturePipeline pipeline;
    const bool plus = representation == "nbow_plus";
    if (plus) pipeline = pipeline_from(cfg);

    auto featurize = [&](const Dataset& ds) {
      std::vector<std::vector<double>> rows;
      rows.reserve(ds.size());
      for (const LabeledExample& ex : ds.examples) {
        std::vector<double> row = nbow_compose(ex.tweet.tokens, table);
        if (plus) {
          for (double v : pipeline.assemble(ex.tweet)) row.push_back(v);
        }
        rows.push_back(std::move(row));
      }
      return rows;
    };

    const std::vector<std::vector<double>> x = featurize(data);
    std::vector<int> y;
    y.reserve(data.size());
    for (const LabeledExample& ex : data.examples) y.push_back(ex.label);

    const std::string dir = opt.out.empty() ? pick_run_dir(cfg.out_dir, cfg.seed) : opt.out;
    fs::create_directories(dir);

    LinearModel model;
    if (opt.tune) {
      CVPlan plan;
      plan.folds = cfg.baseline_folds;
      plan.seed = cfg.seed;
      const GridSearchResult result =
          grid_search_cv(strategy, x, y, scale.cardinality(), WeightScheme::InverseFrequency,
                         plan, cfg.baseline_fit);
      std::ofstream report(dir + "/tuning.tsv");
      if (!report) throw IoError(dir + "/tuning.tsv");
      write_tuning_report(report, strategy_name(strategy), result);
      std::cout << "fits\t" << result.fits << "\n";
      std::cout << "best_c\t" << fmt_double(result.best_c) << "\n";
      model = result.final_model;
    } else {
      const std::vector<long> counts(class_distribution(data));
      model = fit_linear(strategy, x, y, scale.cardinality(),
                         class_weights(counts, WeightScheme::InverseFrequency).weights,
                         opt.c_value, cfg.baseline_fit);
      std::cout << "c\t" << fmt_double(model.C) << "\n";
    }

    // Text dump of the tuned model: strategy, C, bias row, then W rows.
    {
      std::ofstream out(dir + "/model_linear.tsv");
      if (!out) throw IoError(dir + "/model_linear.tsv");
      out << "strategy\t" << strategy_name(strategy) << "\n";
      out << "c\t" << fmt_double(model.C) << "\n";
      out << "classes\t" << model.W.rows << "\n";
      out << "dim\t" << model.W.cols << "\n";
      out << "b";
      for (double v : model.b) out << '\t' << fmt_double(v);
      out << "\n";
      for (int r = 0; r < model.W.rows; ++r) {
        out << "w" << r;
        for (int c = 0; c < model.W.cols; ++c) out << '\t' << fmt_double(model.W.at(r, c));
        out << "\n";
      }
    }

    if (!test_path.empty()) {
      const Dataset test = load_dataset(test_path, scale, Split::Test);
      const std::vector<std::vector<double>> tx = featurize(test);
      std::vector<int> truth, pred;
      truth.reserve(test.size());
      pred.reserve(test.size());
      for (std::size_t i = 0; i < test.size(); ++i) {
        truth.push_back(test.examples[i].label);
        pred.push_back(model.predict(tx[i]));
      }
      const EvalReport report = evaluate(truth, pred, scale.cardinality());
      std::cout << "test_mae\t" << fmt_double(report.mae_macro) << "\n";
      std::cout << "test_micro_f1\t" << fmt_double(report.micro_f1) << "\n";
      std::ofstream rep(dir + "/test_report.tsv");
      if (!rep) throw IoError(dir + "/test_report.tsv");
      write_report(report, scale.classes, rep);
    }
    std::cout << "run_dir\t" << dir << "\n";
  });
}

int cmd_features(const FeaturesOptions& opt) {
  return run_guarded([&] {
    const RunConfig cfg = load_run_config(opt.config_path);
    const std::string data_path = opt.data_path.empty() ? cfg.fine_train : opt.data_path;
    require_path(data_path, "data path");
    const LabelScale& scale = scale_by_name(opt.scale);
    const Dataset data = load_dataset(data_path, scale, Split::Train);
    const FeaturePipeline pipeline = pipeline_from(cfg);

    fs::create_directories(opt.out);
    std::ofstream matrix(opt.out + "/features.tsv");
    if (!matrix) throw IoError(opt.out + "/features.tsv");
    for (const LabeledExample& ex : data.examples) {
      matrix << ex.tweet.id;
      for (double v : pipeline.assemble(ex.tweet)) matrix << '\t' << fmt_double(v);
      matrix << "\n";
    }
    std::ofstream manifest(opt.out + "/manifest.tsv");
    if (!manifest) throw IoError(opt.out + "/manifest.tsv");
    const std::vector<std::string>& names = pipeline.manifest();
    for (std::size_t i = 0; i < names.size(); ++i) manifest << i << '\t' << names[i] << "\n";
    std::cout << "examples\t" << data.size() << "\n";
    std::cout << "features\t" << pipeline.dim() << "\n";
  });
}

int cmd_summarize(const SummarizeOptions& opt) {
  return run_guarded([&] {
    if (opt.run_dirs.empty()) throw Error("no run directories given");
    std::vector<double> maes;
    for (const std::string& dir : opt.run_dirs) {
      const std::string path = dir + "/run.txt";
      std::ifstream in(path);
      if (!in) throw IoError(path);
      std::string line;
      bool found = false;
      while (std::getline(in, line)) {
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) continue;
        if (line.substr(0, tab) == "best_dev_mae") {
          maes.push_back(std::stod(line.substr(tab + 1)));
          found = true;
          break;
        }
      }
      if (!found) throw Error("no best_dev_mae entry in " + path);
    }
    double mean = 0.0;
    for (double v : maes) mean += v;
    mean /= static_cast<double>(maes.size());
    double var = 0.0;
    for (double v : maes) var += (v - mean) * (v - mean);
    const double std_dev = maes.size() > 1 ? std::sqrt(var / (static_cast<double>(maes.size()) - 1.0)) : 0.0;
    std::cout << "runs\t" << maes.size() << "\n";
    std::cout << "mean_mae\t" << fmt_double(mean) << "\n";
    std::cout << "std_mae\t" << fmt_double(std_dev) << "\n";
  });
}

}  // namespace mtsent
