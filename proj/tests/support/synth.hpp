#pragma once

// Synthetic ordinal sentiment corpus. A latent score u in [0,1] drives both
// the word choices (words are indexed by polarity) and the fine-grained
// label (five equal-width bins of u); the ternary labels coarsen the fine
// ones, optionally with label noise on the ternary side only.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "mtsent/corpus.hpp"
#include "mtsent/embed.hpp"
#include "mtsent/rng.hpp"

namespace testsupport {

struct SynthSpec {
  int vocab_size = 200;
  int embed_dim = 10;
  int fine_train_n = 5000;
  int fine_dev_n = 1000;
  int ternary_train_n = 5000;
  double ternary_noise = 0.3;
  std::uint64_t seed = 1;
};

struct SynthCorpus {
  mtsent::Dataset fine_train, fine_dev, ternary_train;
  mtsent::EmbeddingTable embeddings;  // frozen pretrained-style table
  std::vector<std::string> vocab;
};

inline std::string synth_word(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "w%03d", index);
  return buf;
}

inline mtsent::LabeledExample synth_example(const SynthSpec& spec,
                                            const std::vector<std::string>& vocab,
                                            mtsent::Rng& rng, int serial, bool ternary) {
  const double u = rng.uniform();
  const int fine = std::min(4, static_cast<int>(u * 5.0));
  const int words = spec.vocab_size;
  const int length = 4 + static_cast<int>(rng.below(9));  // 4..12 tokens

  mtsent::LabeledExample ex;
  ex.tweet.id = (ternary ? "t" : "f") + std::to_string(serial);
  std::string text;
  for (int t = 0; t < length; ++t) {
    const double jitter = rng.uniform(-0.08, 0.08);
    int idx = static_cast<int>((u + jitter) * (words - 1));
    idx = std::clamp(idx, 0, words - 1);
    if (!text.empty()) text += ' ';
    text += vocab[static_cast<std::size_t>(idx)];
  }
  ex.tweet.raw_text = text;
  ex.tweet.tokens = mtsent::tokenize(text);

  if (ternary) {
    int label = mtsent::coarsen_label(fine);
    if (spec.ternary_noise > 0.0 && rng.bernoulli(spec.ternary_noise)) {
      label = static_cast<int>(rng.below(3));
    }
    ex.label = label;
  } else {
    ex.label = fine;
  }
  return ex;
}

inline SynthCorpus make_synth_corpus(const SynthSpec& spec) {
  SynthCorpus out;
  out.vocab.reserve(spec.vocab_size);
  for (int i = 0; i < spec.vocab_size; ++i) out.vocab.push_back(synth_word(i));

  // Pretrained vectors: the first coordinate carries the word's polarity,
  // the rest is small seeded noise.
  mtsent::Rng vec_rng(mtsent::Rng::substream(spec.seed, 900));
  out.embeddings.dim = spec.embed_dim;
  out.embeddings.words = out.vocab;
  out.embeddings.matrix = mtsent::Tensor2(spec.vocab_size, spec.embed_dim);
  for (int i = 0; i < spec.vocab_size; ++i) {
    out.embeddings.vocab[out.vocab[static_cast<std::size_t>(i)]] = i;
    const double polarity = spec.vocab_size > 1
                                ? 2.0 * i / static_cast<double>(spec.vocab_size - 1) - 1.0
                                : 0.0;
    out.embeddings.matrix.at(i, 0) = polarity;
    for (int d = 1; d < spec.embed_dim; ++d) {
      out.embeddings.matrix.at(i, d) = vec_rng.uniform(-0.1, 0.1);
    }
  }

  mtsent::Rng rng(mtsent::Rng::substream(spec.seed, 901));
  out.fine_train.scale = mtsent::LabelScale::fine_grained();
  out.fine_train.split = mtsent::Split::Train;
  for (int i = 0; i < spec.fine_train_n; ++i) {
    out.fine_train.examples.push_back(synth_example(spec, out.vocab, rng, i, false));
  }
  out.fine_dev.scale = mtsent::LabelScale::fine_grained();
  out.fine_dev.split = mtsent::Split::Dev;
  for (int i = 0; i < spec.fine_dev_n; ++i) {
    out.fine_dev.examples.push_back(synth_example(spec, out.vocab, rng, i, false));
  }
  out.ternary_train.scale = mtsent::LabelScale::ternary();
  out.ternary_train.split = mtsent::Split::Train;
  for (int i = 0; i < spec.ternary_train_n; ++i) {
    out.ternary_train.examples.push_back(synth_example(spec, out.vocab, rng, i, true));
  }
  return out;
}

inline std::string shortest_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Write the corpus as the on-disk formats the CLI consumes:
// fine_train.tsv, fine_dev.tsv, ternary_train.tsv, vectors.txt.
inline void write_corpus_files(const SynthCorpus& corpus, const std::string& dir) {
  const auto dump = [&](const mtsent::Dataset& ds, const std::string& name) {
    std::ofstream out(dir + "/" + name);
    mtsent::serialize_dataset(ds, out);
  };
  dump(corpus.fine_train, "fine_train.tsv");
  dump(corpus.fine_dev, "fine_dev.tsv");
  dump(corpus.ternary_train, "ternary_train.tsv");

  std::ofstream vecs(dir + "/vectors.txt");
  for (int i = 0; i < corpus.embeddings.size(); ++i) {
    vecs << corpus.embeddings.words[static_cast<std::size_t>(i)];
    for (int d = 0; d < corpus.embeddings.dim; ++d) {
      vecs << ' ' << shortest_double(corpus.embeddings.matrix.at(i, d));
    }
    vecs << '\n';
  }
}

}  // namespace testsupport
