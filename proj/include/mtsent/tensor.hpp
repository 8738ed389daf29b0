#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "mtsent/errors.hpp"

namespace mtsent {

/// Dense row-major 2-D array of doubles. Column vectors are (n x 1).
struct Tensor2 {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  Tensor2() = default;
  Tensor2(int r, int c) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}

  static Tensor2 zeros(int r, int c) { return Tensor2(r, c); }

  static Tensor2 column(std::vector<double> v) {
    Tensor2 t;
    t.rows = static_cast<int>(v.size());
    t.cols = 1;
    t.values = std::move(v);
    return t;
  }

  static Tensor2 from_rows(std::initializer_list<std::initializer_list<double>> rows_init) {
    Tensor2 t(static_cast<int>(rows_init.size()),
              rows_init.size() ? static_cast<int>(rows_init.begin()->size()) : 0);
    std::size_t i = 0;
    for (const auto& row : rows_init) {
      for (double x : row) t.values[i++] = x;
    }
    return t;
  }

  double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }

  std::size_t size() const { return values.size(); }

  bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

  void fill(double x) {
    for (double& v : values) v = x;
  }

  void resize_like(const Tensor2& o) {
    rows = o.rows;
    cols = o.cols;
    values.assign(o.size(), 0.0);
  }

  bool all_finite() const {
    for (double v : values) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

/// A trainable tensor: value plus a gradient accumulator of the same shape.
struct Parameter {
  std::string name;
  Tensor2 value;
  Tensor2 grad;

  Parameter() = default;
  Parameter(std::string name, Tensor2 initial) : name(std::move(name)), value(std::move(initial)) {
    grad.resize_like(value);
  }

  void zero_grad() { grad.fill(0.0); }
};

}  // namespace mtsent
