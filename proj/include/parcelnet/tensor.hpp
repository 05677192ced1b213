#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace parcelnet {

// Trainable parameter: value plus a gradient buffer of the same shape.
// Gradients accumulate across backward calls and are zeroed by the
// optimizer step.
struct Tensor2 {
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;

  Tensor2() = default;
  Tensor2(Eigen::Index rows, Eigen::Index cols)
      : value(Eigen::MatrixXd::Zero(rows, cols)), grad(Eigen::MatrixXd::Zero(rows, cols)) {}
  explicit Tensor2(Eigen::MatrixXd v) : value(std::move(v)) {
    grad = Eigen::MatrixXd::Zero(value.rows(), value.cols());
  }

  Eigen::Index rows() const { return value.rows(); }
  Eigen::Index cols() const { return value.cols(); }
  void zero_grad() { grad.setZero(); }
};

void check_finite(const Eigen::MatrixXd& m, const std::string& what);

enum class Activation { Identity, Elu };

Eigen::MatrixXd activate(Activation act, const Eigen::MatrixXd& z);
// Elementwise derivative as a function of the pre-activation.
Eigen::MatrixXd activate_grad(Activation act, const Eigen::MatrixXd& z);

// --- Linear (affine) layer ---------------------------------------------------

struct Linear {
  Tensor2 W;  // in x out
  Tensor2 b;  // 1 x out

  Linear() = default;
  Linear(int in, int out) : W(in, out), b(1, out) {}

  // Caches the input for backward.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input);
  // Accumulates dW, db; returns gradient w.r.t. the input.
  Eigen::MatrixXd backward(const Eigen::MatrixXd& upstream);

 private:
  Eigen::MatrixXd input_;
};

// --- Softmax / NLL -----------------------------------------------------------

struct SoftmaxNll {
  double loss = 0.0;
  Eigen::MatrixXd probs;   // N x L
  Eigen::MatrixXd dlogits; // (probs - onehot) / N
};

// Row-wise softmax with max subtraction; loss = -(1/N) sum log p[label_i].
SoftmaxNll softmax_nll(const Eigen::MatrixXd& logits, const std::vector<int>& labels);

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);
// VJP of row-wise softmax: given probs and an upstream gradient w.r.t. probs,
// returns the gradient w.r.t. logits.
Eigen::MatrixXd softmax_vjp(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& upstream);

// --- Multi-class Dice --------------------------------------------------------

struct DiceResult {
  double dice = 0.0;
  Eigen::MatrixXd grad;  // w.r.t. the prediction argument
};

inline constexpr double kDiceEps = 1e-7;

// D = (1/L) sum_l 2 <g_l, p_l> / (sum(g_l) + sum(p_l) + eps). Rows of both
// arguments must be probability vectors (sum 1 within 1e-6).
DiceResult dice_score(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& pred);

Eigen::MatrixXd one_hot(const std::vector<int>& labels, int classes);

// --- MLP ---------------------------------------------------------------------

struct MlpStack {
  std::vector<Linear> layers;
  Activation hidden_act = Activation::Elu;
  bool softmax_out = true;

  MlpStack() = default;
  // widths = {in, hidden..., out}
  explicit MlpStack(const std::vector<int>& widths);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input);  // returns logits
  Eigen::MatrixXd backward(const Eigen::MatrixXd& dlogits);
  // Hidden activations right before the final linear layer (the
  // penultimate features), valid after forward().
  const Eigen::MatrixXd& penultimate() const { return penult_; }
  // Backward entered at the penultimate point instead of the logits
  // (the final layer receives no gradient).
  Eigen::MatrixXd backward_from_penultimate(const Eigen::MatrixXd& dpenult);

 private:
  std::vector<Eigen::MatrixXd> preacts_;
  Eigen::MatrixXd penult_;
};

// --- SGD ---------------------------------------------------------------------

// Plain SGD with multiplicative learning-rate decay every `decay_interval`
// steps. A step updates every parameter, then advances the schedule.
struct SgdState {
  double lr = 0.01;
  double decay_factor = 1.0;
  int decay_interval = 0;  // 0 disables decay
  int64_t step_count = 0;

  void step(std::span<Tensor2* const> params);
};

}  // namespace parcelnet
