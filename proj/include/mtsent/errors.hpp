#pragma once

#include <stdexcept>
#include <string>

namespace mtsent {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- data ingestion -------------------------------------------------------

struct IoError : Error {
  explicit IoError(const std::string& path)
      : Error("cannot open file: " + path), path(path) {}
  std::string path;
};

struct MalformedLine : Error {
  explicit MalformedLine(int line)
      : Error("line " + std::to_string(line) +
              ": expected at least 3 tab-separated fields (id, label, text)"),
        line(line) {}
  int line;
};

struct UnknownLabel : Error {
  UnknownLabel(int line, std::string token)
      : Error("line " + std::to_string(line) + ": unknown label '" + token + "'"),
        line(line),
        token(std::move(token)) {}
  int line;
  std::string token;
};

struct ZeroClassCount : Error {
  explicit ZeroClassCount(int class_index)
      : Error("class " + std::to_string(class_index) +
              " has zero examples; inverse-frequency weights undefined"),
        class_index(class_index) {}
  int class_index;
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(int line)
      : Error("line " + std::to_string(line) + ": vector dimension differs from the declared one"),
        line(line) {}
  explicit DimensionMismatch(const std::string& msg) : Error(msg), line(0) {}
  int line;
};

struct LexiconLoadError : Error {
  LexiconLoadError(std::string name, const std::string& why)
      : Error("lexicon '" + name + "': " + why), name(std::move(name)) {}
  std::string name;
};

// ---- numeric core ---------------------------------------------------------

struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& msg) : Error("shape mismatch: " + msg) {}
};

struct EmptySequence : Error {
  EmptySequence() : Error("encoder requires a sequence of length >= 1") {}
};

struct DisconnectedTape : Error {
  explicit DisconnectedTape(const std::string& msg) : Error("disconnected tape: " + msg) {}
};

struct NonFiniteGradient : Error {
  explicit NonFiniteGradient(std::string parameter)
      : Error("non-finite gradient in parameter '" + parameter + "'"),
        parameter(std::move(parameter)) {}
  std::string parameter;
};

struct NonFiniteLoss : Error {
  NonFiniteLoss() : Error("loss became non-finite") {}
};

// ---- network / training ---------------------------------------------------

struct MissingExtraFeatures : Error {
  MissingExtraFeatures()
      : Error("network was configured with extra features but none were supplied") {}
};

struct UnknownTask : Error {
  explicit UnknownTask(int task)
      : Error("task index " + std::to_string(task) + " out of range"), task(task) {}
  explicit UnknownTask(const std::string& name)
      : Error("unknown task '" + name + "'"), task(-1) {}
  int task;
};

struct ScaleMismatch : Error {
  explicit ScaleMismatch(int cardinality)
      : Error("no task head with " + std::to_string(cardinality) + " classes"),
        cardinality(cardinality) {}
  int cardinality;
};

struct EmptyDevSet : Error {
  EmptyDevSet() : Error("development set is empty") {}
};

struct TooFewExamples : Error {
  explicit TooFewExamples(int k)
      : Error("fewer examples than the " + std::to_string(k) + " requested folds"), k(k) {}
  int k;
};

// ---- metrics --------------------------------------------------------------

struct LengthMismatch : Error {
  LengthMismatch(std::size_t truth, std::size_t pred)
      : Error("truth has " + std::to_string(truth) + " labels, predictions " +
              std::to_string(pred)) {}
};

struct EmptyInput : Error {
  EmptyInput() : Error("empty input") {}
};

// ---- configuration --------------------------------------------------------

struct ConfigError : Error {
  ConfigError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "config line " + std::to_string(line) + ": " + msg : msg),
        line(line) {}
  int line;
};

}  // namespace mtsent
