#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mtsent/embed.hpp"
#include "mtsent/errors.hpp"
#include "mtsent/optim.hpp"

using namespace mtsent;

TEST_SUITE("embed") {

TEST_CASE("vector files parse with inferred dimension") {
  std::istringstream in("a 1 2\nb 3 4\n");
  const EmbeddingTable table = load_vectors_text(in);
  CHECK(table.dim == 2);
  CHECK(table.size() == 2);
  CHECK_FALSE(table.trainable);
  CHECK(table.row_of("a") == 0);
  CHECK(table.row_of("b") == 1);
  CHECK(table.row_of("missing") == -1);
  CHECK(table.matrix.at(0, 0) == 1.0);
  CHECK(table.matrix.at(1, 1) == 4.0);
}

TEST_CASE("dimension disagreements are rejected with the line number") {
  std::istringstream in("a 1 2\nb 3\n");
  CHECK_THROWS_AS(load_vectors_text(in), DimensionMismatch);
  std::istringstream again("a 1 2\nb 3\n");
  try {
    load_vectors_text(again);
  } catch (const DimensionMismatch& e) {
    CHECK(e.line == 2);
  }
  // An explicit expected dimension is also enforced.
  std::istringstream third("a 1 2 3\n");
  CHECK_THROWS_AS(load_vectors_text(third, 2), DimensionMismatch);
}

TEST_CASE("duplicate words keep the first row and record a warning") {
  std::istringstream in("a 1 2\na 9 9\nb 3 4\n");
  LoadReport report;
  const EmbeddingTable table = load_vectors_text(in, {}, &report);
  CHECK(table.size() == 2);
  CHECK(table.matrix.at(0, 0) == 1.0);  // first occurrence wins
  CHECK(report.duplicate_words == 1);
  CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("a 50-dimensional file loads with dim 50") {
  std::ostringstream src;
  for (int w = 0; w < 3; ++w) {
    src << "word" << w;
    for (int d = 0; d < 50; ++d) src << ' ' << (0.01 * d);
    src << '\n';
  }
  std::istringstream in(src.str());
  CHECK(load_vectors_text(in).dim == 50);
}

TEST_CASE("loaded floats survive the text round trip bit-for-bit") {
  std::istringstream in("a 0.123456789012345 -7e-3\n");
  const EmbeddingTable table = load_vectors_text(in);
  CHECK(table.matrix.at(0, 0) == std::strtod("0.123456789012345", nullptr));
  CHECK(table.matrix.at(0, 1) == std::strtod("-7e-3", nullptr));
}

TEST_CASE("nbow averages in-vocabulary tokens") {
  std::istringstream in("a 1 2\nb 3 4\n");
  const EmbeddingTable table = load_vectors_text(in);

  CHECK(nbow_compose({"a", "b"}, table) == std::vector<double>{2.0, 3.0});
  CHECK(nbow_compose({"a"}, table) == std::vector<double>{1.0, 2.0});
  // Skip policy excludes OOV tokens from numerator and denominator.
  CHECK(nbow_compose({"a", "zzz", "b"}, table) == std::vector<double>{2.0, 3.0});
  // Permutation invariance.
  CHECK(nbow_compose({"b", "a"}, table) == nbow_compose({"a", "b"}, table));
  // Repetition of one word returns that word's vector.
  CHECK(nbow_compose({"a", "a", "a"}, table) == std::vector<double>{1.0, 2.0});
}

TEST_CASE("degenerate token lists give the zero vector and a flag") {
  std::istringstream in("a 1 2\n");
  const EmbeddingTable table = load_vectors_text(in);
  bool degenerate = false;
  CHECK(nbow_compose({}, table, &degenerate) == std::vector<double>{0.0, 0.0});
  CHECK(degenerate);
  degenerate = false;
  CHECK(nbow_compose({"zzz"}, table, &degenerate) == std::vector<double>{0.0, 0.0});
  CHECK(degenerate);
  degenerate = true;
  nbow_compose({"a"}, table, &degenerate);
  CHECK_FALSE(degenerate);
}

TEST_CASE("zero-vector policy counts OOV tokens in the denominator") {
  std::istringstream in("a 1 2\n");
  EmbeddingTable table = load_vectors_text(in);
  table.oov_policy = OovPolicy::ZeroVector;
  CHECK(nbow_compose({"a", "zzz"}, table) == std::vector<double>{0.5, 1.0});
}

TEST_CASE("trainable tables copy pretrained rows and bound OOV rows") {
  std::istringstream in("a 1 2\nb 3 4\n");
  const EmbeddingTable pretrained = load_vectors_text(in);

  Rng rng(5);
  const EmbeddingTable table = build_trainable_table({"b", "a", "new"}, pretrained, rng);
  CHECK(table.trainable);
  CHECK(table.dim == 2);
  CHECK(table.size() == 3);
  CHECK(table.oov_policy == OovPolicy::RandomInit);

  // Known words keep their pretrained rows exactly, in corpus-vocab order.
  const int b_row = table.row_of("b");
  CHECK(table.matrix.at(b_row, 0) == 3.0);
  CHECK(table.matrix.at(b_row, 1) == 4.0);
  const int a_row = table.row_of("a");
  CHECK(table.matrix.at(a_row, 0) == 1.0);

  // The OOV row respects the published bound.
  const double limit = glorot_limit(3, 2);
  CHECK(table.oov_limit == limit);
  const int new_row = table.row_of("new");
  for (int d = 0; d < 2; ++d) {
    CHECK(std::abs(table.matrix.at(new_row, d)) <= limit);
  }

  // Determinism under the seed.
  Rng rng2(5);
  const EmbeddingTable table2 = build_trainable_table({"b", "a", "new"}, pretrained, rng2);
  CHECK(table2.matrix.values == table.matrix.values);
}

TEST_CASE("collect_vocab preserves first-appearance order") {
  Dataset d1, d2;
  d1.scale = d2.scale = LabelScale::ternary();
  const auto add = [](Dataset& ds, const std::string& text) {
    LabeledExample ex;
    ex.tweet.raw_text = text;
    ex.tweet.tokens = tokenize(text);
    ds.examples.push_back(ex);
  };
  add(d1, "red green");
  add(d1, "green blue");
  add(d2, "blue yellow red");
  const std::vector<std::string> vocab = collect_vocab({&d1, &d2});
  CHECK(vocab == std::vector<std::string>{"red", "green", "blue", "yellow"});
}

}  // TEST_SUITE
