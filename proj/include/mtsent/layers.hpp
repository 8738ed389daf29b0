#pragma once

#include <string>
#include <vector>

#include "mtsent/tape.hpp"
#include "mtsent/tensor.hpp"

namespace mtsent {

/// Fully connected layer with tanh activation: y = tanh(W x + b).
struct DenseTanh {
  Parameter weight;  // (out x in)
  Parameter bias;    // (out x 1), initialised to zero

  DenseTanh() = default;
  DenseTanh(const std::string& name, int in_dim, int out_dim);

  int in_dim() const { return weight.value.cols; }
  int out_dim() const { return weight.value.rows; }

  int apply(Tape& tape, int x);

  std::vector<Parameter*> parameters();
};

/// One direction of an LSTM. Gate order everywhere is input, forget, output,
/// candidate; each gate has an input weight W (hidden x in), a recurrent
/// weight U (hidden x hidden) and a bias b (hidden x 1).
struct LstmCell {
  Parameter Wi, Ui, bi;
  Parameter Wf, Uf, bf;
  Parameter Wo, Uo, bo;
  Parameter Wg, Ug, bg;

  LstmCell() = default;
  LstmCell(const std::string& name, int in_dim, int hidden_dim);

  int in_dim() const { return Wi.value.cols; }
  int hidden_dim() const { return Wi.value.rows; }

  struct State {
    int h = -1;
    int c = -1;
  };

  /// Zero h0/c0 as constant leaves on `tape`.
  State initial(Tape& tape) const;

  State step(Tape& tape, int x_t, const State& prev);

  std::vector<Parameter*> parameters();
};

/// Two LSTMs read the sequence in opposite directions; the encoding is the
/// concatenation [h_fwd_T ; h_bwd_T] of their final hidden states.
struct BiLstm {
  LstmCell forward;
  LstmCell backward;

  BiLstm() = default;
  /// `out_dim` must be even; each direction gets out_dim / 2 hidden units.
  BiLstm(const std::string& name, int in_dim, int out_dim);

  int in_dim() const { return forward.in_dim(); }
  int out_dim() const { return forward.hidden_dim() + backward.hidden_dim(); }

  /// Encode the sequence of tape nodes `inputs` (each (in_dim x 1)).
  /// Throws EmptySequence when `inputs` is empty.
  int encode(Tape& tape, const std::vector<int>& inputs);

  std::vector<Parameter*> parameters();
};

}  // namespace mtsent
