#include "mtsent/layers.hpp"

#include "mtsent/errors.hpp"

namespace mtsent {

DenseTanh::DenseTanh(const std::string& name, int in_dim, int out_dim)
    : weight(name + ".W", Tensor2(out_dim, in_dim)), bias(name + ".b", Tensor2(out_dim, 1)) {}

int DenseTanh::apply(Tape& tape, int x) {
  const int wx = tape.matvec(tape.param(weight), x);
  return tape.tanh_of(tape.add(wx, tape.param(bias)));
}

std::vector<Parameter*> DenseTanh::parameters() { return {&weight, &bias}; }

LstmCell::LstmCell(const std::string& name, int in_dim, int hidden_dim)
    : Wi(name + ".Wi", Tensor2(hidden_dim, in_dim)),
      Ui(name + ".Ui", Tensor2(hidden_dim, hidden_dim)),
      bi(name + ".bi", Tensor2(hidden_dim, 1)),
      Wf(name + ".Wf", Tensor2(hidden_dim, in_dim)),
      Uf(name + ".Uf", Tensor2(hidden_dim, hidden_dim)),
      bf(name + ".bf", Tensor2(hidden_dim, 1)),
      Wo(name + ".Wo", Tensor2(hidden_dim, in_dim)),
      Uo(name + ".Uo", Tensor2(hidden_dim, hidden_dim)),
      bo(name + ".bo", Tensor2(hidden_dim, 1)),
      Wg(name + ".Wg", Tensor2(hidden_dim, in_dim)),
      Ug(name + ".Ug", Tensor2(hidden_dim, hidden_dim)),
      bg(name + ".bg", Tensor2(hidden_dim, 1)) {}

LstmCell::State LstmCell::initial(Tape& tape) const {
  const Tensor2 zero = Tensor2::zeros(hidden_dim(), 1);
  State s;
  s.h = tape.input(zero);
  s.c = tape.input(zero);
  return s;
}

namespace {

int gate_preact(Tape& tape, Parameter& w, Parameter& u, Parameter& b, int x, int h) {
  const int wx = tape.matvec(tape.param(w), x);
  const int uh = tape.matvec(tape.param(u), h);
  return tape.add(tape.add(wx, uh), tape.param(b));
}

}  // namespace

LstmCell::State LstmCell::step(Tape& tape, int x_t, const State& prev) {
  const int i = tape.sigmoid_of(gate_preact(tape, Wi, Ui, bi, x_t, prev.h));
  const int f = tape.sigmoid_of(gate_preact(tape, Wf, Uf, bf, x_t, prev.h));
  const int o = tape.sigmoid_of(gate_preact(tape, Wo, Uo, bo, x_t, prev.h));
  const int g = tape.tanh_of(gate_preact(tape, Wg, Ug, bg, x_t, prev.h));
  State next;
  next.c = tape.add(tape.mul(f, prev.c), tape.mul(i, g));
  next.h = tape.mul(o, tape.tanh_of(next.c));
  return next;
}

std::vector<Parameter*> LstmCell::parameters() {
  return {&Wi, &Ui, &bi, &Wf, &Uf, &bf, &Wo, &Uo, &bo, &Wg, &Ug, &bg};
}

BiLstm::BiLstm(const std::string& name, int in_dim, int out_dim) {
  if (out_dim % 2 != 0) throw Error("bilstm output dimension must be even");
  forward = LstmCell(name + ".fwd", in_dim, out_dim / 2);
  backward = LstmCell(name + ".bwd", in_dim, out_dim / 2);
}

int BiLstm::encode(Tape& tape, const std::vector<int>& inputs) {
  if (inputs.empty()) throw EmptySequence();
  LstmCell::State fs = forward.initial(tape);
  for (int x : inputs) fs = forward.step(tape, x, fs);
  LstmCell::State bs = backward.initial(tape);
  for (auto it = inputs.rbegin(); it != inputs.rend(); ++it) bs = backward.step(tape, *it, bs);
  return tape.concat(fs.h, bs.h);
}

std::vector<Parameter*> BiLstm::parameters() {
  std::vector<Parameter*> out = forward.parameters();
  for (Parameter* p : backward.parameters()) out.push_back(p);
  return out;
}

}  // namespace mtsent
