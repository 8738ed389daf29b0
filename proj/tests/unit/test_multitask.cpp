#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mtsent/embed.hpp"
#include "mtsent/errors.hpp"
#include "mtsent/multitask.hpp"
#include "mtsent/optim.hpp"
#include "support/gradcheck.hpp"

using namespace mtsent;

namespace {

EmbeddingTable tiny_table(int dim, std::uint64_t seed = 3) {
  EmbeddingTable table;
  table.dim = dim;
  table.trainable = true;
  const std::vector<std::string> words{"alpha", "beta", "gamma", "delta"};
  table.words = words;
  table.matrix = Tensor2(static_cast<int>(words.size()), dim);
  Rng rng(seed);
  for (std::size_t w = 0; w < words.size(); ++w) {
    table.vocab[words[w]] = static_cast<int>(w);
    for (int d = 0; d < dim; ++d) {
      table.matrix.at(static_cast<int>(w), d) = rng.uniform(-0.5, 0.5);
    }
  }
  return table;
}

NetworkConfig tiny_config(bool extra = false, int feature_dim = 0) {
  NetworkConfig cfg;
  cfg.embed_dim = 4;
  cfg.encoder_dim = 4;
  cfg.text_hidden = 4;
  cfg.feature_hidden = 3;
  cfg.merge_hidden = 3;
  cfg.dropout_encoder = cfg.dropout_text = cfg.dropout_feature = cfg.dropout_merge = 0.2;
  cfg.use_extra_features = extra;
  cfg.feature_dim = feature_dim;
  return cfg;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("multitask") {

TEST_CASE("zero-initialized heads give uniform probabilities") {
  EmbeddingTable table = tiny_table(4);
  table.matrix.fill(0.0);
  MultitaskNetwork net(tiny_config(), table);  // no init(): all params zero
  const Tensor2 fine = net.forward({"alpha", "beta"}, nullptr, 0);
  REQUIRE(fine.rows == 5);
  for (double p : fine.values) CHECK(p == doctest::Approx(0.2).epsilon(1e-12));
  const Tensor2 ternary = net.forward({"alpha"}, nullptr, 1);
  REQUIRE(ternary.rows == 3);
  for (double p : ternary.values) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // Uniform probabilities predict class 0 by the tie rule.
  CHECK(net.predict({"alpha"}, nullptr, 0) == 0);
}

TEST_CASE("train-mode builds are reproducible under the seed") {
  MultitaskNetwork net(tiny_config(), tiny_table(4));
  Rng init(1);
  net.init(init);
  const auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    Tape tape;
    const auto f = net.build(tape, {"alpha", "beta", "gamma"}, nullptr, 0, 3, 1.0,
                             TrainMode::Train, rng);
    return tape.value(f.loss).at(0, 0);
  };
  CHECK(run(9) == run(9));
}

TEST_CASE("tasks share every activation up to the merge layer") {
  MultitaskNetwork net(tiny_config(), tiny_table(4));
  Rng init(2);
  net.init(init);
  Rng r0(5), r1(5);
  Tape t0, t1;
  const auto f0 = net.build(t0, {"alpha", "gamma"}, nullptr, 0, -1, 1.0, TrainMode::Eval, r0);
  const auto f1 = net.build(t1, {"alpha", "gamma"}, nullptr, 1, -1, 1.0, TrainMode::Eval, r1);
  CHECK(t0.value(f0.merge).values == t1.value(f1.merge).values);
  CHECK(t0.value(f0.logits).rows == 5);
  CHECK(t1.value(f1.logits).rows == 3);
}

TEST_CASE("prediction is shift-invariant and tie-breaks low") {
  MultitaskNetwork net(tiny_config(), tiny_table(4));
  Rng init(7);
  net.init(init);
  const int before = net.predict({"beta", "delta"}, nullptr, 0);
  // Adding a constant to every head bias shifts all logits equally.
  for (auto& v : net.head_parameters(0)[1]->value.values) v += 3.75;
  CHECK(net.predict({"beta", "delta"}, nullptr, 0) == before);
}

TEST_CASE("a task loss leaves the other head's gradients at exactly zero") {
  MultitaskNetwork net(tiny_config(), tiny_table(4));
  Rng init(3);
  net.init(init);
  Rng rng(11);
  Tape tape;
  const auto f = net.build(tape, {"alpha", "beta"}, nullptr, 0, 2, 1.0, TrainMode::Train, rng);
  tape.backward(f.loss);

  for (Parameter* p : net.head_parameters(1)) {
    for (double g : p->grad.values) CHECK(g == 0.0);
  }
  // The trained head and the shared trunk do receive gradient.
  double head0 = 0.0, shared = 0.0;
  for (Parameter* p : net.head_parameters(0)) {
    for (double g : p->grad.values) head0 += std::abs(g);
  }
  for (Parameter* p : net.shared_parameters()) {
    for (double g : p->grad.values) shared += std::abs(g);
  }
  CHECK(head0 > 0.0);
  CHECK(shared > 0.0);
}

TEST_CASE("batch words receive embedding gradient") {
  MultitaskNetwork net(tiny_config(), tiny_table(4));
  Rng init(4);
  net.init(init);
  Rng rng(13);
  Tape tape;
  const auto f = net.build(tape, {"beta"}, nullptr, 0, 1, 1.0, TrainMode::Eval, rng);
  tape.backward(f.loss);

  const Parameter& emb = net.embedding();
  double beta_grad = 0.0, alpha_grad = 0.0;
  for (int d = 0; d < 4; ++d) {
    beta_grad += std::abs(emb.grad.at(1, d));   // "beta" is row 1
    alpha_grad += std::abs(emb.grad.at(0, d));  // "alpha" was not in the batch
  }
  CHECK(beta_grad > 0.0);
  CHECK(alpha_grad == 0.0);
}

TEST_CASE("unknown tokens are skipped and all-unknown inputs still encode") {
  MultitaskNetwork net(tiny_config(), tiny_table(4));
  Rng init(5);
  net.init(init);
  const Tensor2 known = net.forward({"alpha", "zzz"}, nullptr, 0);
  const Tensor2 bare = net.forward({"alpha"}, nullptr, 0);
  CHECK(known.values == bare.values);
  const Tensor2 oov = net.forward({"zzz", "qqq"}, nullptr, 0);
  double total = 0.0;
  for (double p : oov.values) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("extra features are demanded exactly when configured") {
  MultitaskNetwork with(tiny_config(true, 6), tiny_table(4));
  Rng init(6);
  with.init(init);
  const std::vector<double> feats{1.0, 0.5, 0.0, 2.0, 0.0, 1.0};
  CHECK(with.forward({"alpha"}, &feats, 0).rows == 5);
  CHECK_THROWS_AS(with.forward({"alpha"}, nullptr, 0), MissingExtraFeatures);
  const std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(with.forward({"alpha"}, &wrong, 0), ShapeMismatch);

  MultitaskNetwork without(tiny_config(), tiny_table(4));
  Rng init2(6);
  without.init(init2);
  CHECK_THROWS_AS(without.forward({"alpha"}, &feats, 0), ShapeMismatch);
}

TEST_CASE("task routing rejects unknown names and indices") {
  MultitaskNetwork net(tiny_config(), tiny_table(4));
  CHECK(net.task_index("fine") == 0);
  CHECK(net.task_index("ternary") == 1);
  CHECK_THROWS_AS(net.task_index("binary"), UnknownTask);
  CHECK_THROWS_AS(net.forward({"alpha"}, nullptr, 2), UnknownTask);
  CHECK_THROWS_AS(net.forward({"alpha"}, nullptr, -1), UnknownTask);
}

TEST_CASE("parameter count matches the closed form") {
  Rng rng(21);
  for (int trial = 0; trial < 3; ++trial) {
    NetworkConfig cfg;
    cfg.embed_dim = 4;
    cfg.encoder_dim = 2 * (1 + static_cast<int>(rng.below(3)));
    cfg.text_hidden = 1 + static_cast<int>(rng.below(5));
    cfg.feature_hidden = 1 + static_cast<int>(rng.below(5));
    cfg.merge_hidden = 1 + static_cast<int>(rng.below(5));
    cfg.use_extra_features = trial == 2;
    cfg.feature_dim = cfg.use_extra_features ? 3 : 0;
    MultitaskNetwork net(cfg, tiny_table(4));

    const long vocab = 4, e = cfg.embed_dim, h = cfg.encoder_dim / 2;
    const long lstm_dir = 4 * (h * e + h * h + h);  // 4 gates: W, U, b
    long expected = vocab * e;                      // embedding
    expected += 2 * lstm_dir;                       // both directions
    expected += cfg.text_hidden * cfg.encoder_dim + cfg.text_hidden;
    long merge_in = cfg.text_hidden;
    if (cfg.use_extra_features) {
      expected += cfg.feature_hidden * cfg.feature_dim + cfg.feature_hidden;
      merge_in += cfg.feature_hidden;
    }
    expected += cfg.merge_hidden * merge_in + cfg.merge_hidden;
    expected += 5 * cfg.merge_hidden + 5;  // fine head
    expected += 3 * cfg.merge_hidden + 3;  // ternary head
    CHECK(net.parameter_count() == static_cast<std::size_t>(expected));
  }
}

TEST_CASE("full network gradients match finite differences") {
  NetworkConfig cfg = tiny_config(true, 3);
  MultitaskNetwork net(cfg, tiny_table(4));
  Rng init(8);
  net.init(init);
  const std::vector<double> extra{0.5, -1.0, 2.0};

  for (int task = 0; task < 2; ++task) {
    const auto run = [&](bool with_grad) {
      Rng rng(4242);
      Tape tape;
      const auto f = net.build(tape, {"alpha", "beta", "gamma"}, &extra, task, 1, 1.3,
                               TrainMode::Train, rng);
      if (with_grad) tape.backward(f.loss);
      return tape.value(f.loss).at(0, 0);
    };
    std::string diag;
    const bool ok = testsupport::check_gradients(net.parameters(), run, &diag);
    CAPTURE(task);
    CAPTURE(diag);
    CHECK(ok);
  }
}

TEST_CASE("task sampler draws a seeded Bernoulli stream") {
  TaskSampler always(1.0, 99);
  for (int i = 0; i < 200; ++i) CHECK(always.sample() == 0);

  TaskSampler half(0.5, 2024);
  int zeros = 0;
  for (int i = 0; i < 10000; ++i) zeros += half.sample() == 0 ? 1 : 0;
  const double fraction = zeros / 10000.0;
  CHECK(fraction >= 0.48);
  CHECK(fraction <= 0.52);

  TaskSampler a(0.3, 7), b(0.3, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.sample() == b.sample());
}

TEST_CASE("sampler frequency concentrates across seeds at n=2000") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    TaskSampler sampler(0.5, seed);
    int zeros = 0;
    for (int i = 0; i < 2000; ++i) zeros += sampler.sample() == 0 ? 1 : 0;
    const double fraction = zeros / 2000.0;
    CAPTURE(seed);
    CHECK(fraction >= 0.42);
    CHECK(fraction <= 0.58);
  }
  // One pinned seed at the n=200 epoch scale.
  TaskSampler sampler(0.5, 2016);
  int zeros = 0;
  for (int i = 0; i < 200; ++i) zeros += sampler.sample() == 0 ? 1 : 0;
  const double fraction = zeros / 200.0;
  CHECK(fraction >= 0.42);
  CHECK(fraction <= 0.58);
}

TEST_CASE("models round-trip through the container format") {
  MultitaskNetwork net(tiny_config(true, 2), tiny_table(4));
  Rng init(12);
  net.init(init);

  const std::string p1 = temp_path("mtsent_model_a.bin");
  const std::string p2 = temp_path("mtsent_model_b.bin");
  save_model(net, p1);
  MultitaskNetwork loaded = load_model(p1);

  CHECK(loaded.config().tasks.size() == 2);
  CHECK(loaded.config().use_extra_features);
  CHECK(loaded.config().feature_dim == 2);
  CHECK(loaded.vocab_words() == net.vocab_words());

  const auto a = net.parameters();
  const auto b = loaded.parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i]->name == b[i]->name);
    CHECK(a[i]->value.values == b[i]->value.values);
  }

  // save -> load -> save is byte-identical.
  save_model(loaded, p2);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  CHECK(!s1.str().empty());
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("the loader rejects foreign bytes") {
  const std::string path = temp_path("mtsent_not_a_model.bin");
  std::ofstream out(path, std::ios::binary);
  out << "PNG\x89 definitely not a model";
  out.close();
  CHECK_THROWS_AS(load_model(path), Error);
  CHECK_THROWS_AS(load_model("/nonexistent/model.bin"), IoError);
  std::remove(path.c_str());
}

}  // TEST_SUITE
