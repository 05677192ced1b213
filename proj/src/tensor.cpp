#include "parcelnet/tensor.hpp"

#include <cmath>

#include "parcelnet/error.hpp"

namespace parcelnet {

void check_finite(const Eigen::MatrixXd& m, const std::string& what) {
  if (!m.allFinite()) throw Error(ErrorKind::Numeric, "non-finite values in " + what);
}

Eigen::MatrixXd activate(Activation act, const Eigen::MatrixXd& z) {
  switch (act) {
    case Activation::Identity:
      return z;
    case Activation::Elu:
      return z.unaryExpr([](double x) { return x > 0 ? x : std::expm1(x); });
  }
  return z;
}

Eigen::MatrixXd activate_grad(Activation act, const Eigen::MatrixXd& z) {
  switch (act) {
    case Activation::Identity:
      return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    case Activation::Elu:
      return z.unaryExpr([](double x) { return x > 0 ? 1.0 : std::exp(x); });
  }
  return Eigen::MatrixXd::Ones(z.rows(), z.cols());
}

Eigen::MatrixXd Linear::forward(const Eigen::MatrixXd& input) {
  require(input.cols() == W.rows(), ErrorKind::Contract, "linear: input width mismatch");
  input_ = input;
  return (input * W.value).rowwise() + b.value.row(0);
}

Eigen::MatrixXd Linear::backward(const Eigen::MatrixXd& upstream) {
  require(upstream.rows() == input_.rows() && upstream.cols() == W.cols(),
          ErrorKind::Contract, "linear: upstream shape mismatch");
  W.grad.noalias() += input_.transpose() * upstream;
  b.grad.row(0) += upstream.colwise().sum();
  return upstream * W.value.transpose();
}

SoftmaxNll softmax_nll(const Eigen::MatrixXd& logits, const std::vector<int>& labels) {
  const Eigen::Index n = logits.rows(), l = logits.cols();
  require(static_cast<Eigen::Index>(labels.size()) == n, ErrorKind::Contract,
          "softmax_nll: label count mismatch");
  SoftmaxNll out;
  out.probs = softmax_rows(logits);
  double loss = 0.0;
  out.dlogits = out.probs / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int y = labels[i];
    require(y >= 0 && y < l, ErrorKind::Contract, "softmax_nll: label out of range");
    loss -= std::log(out.probs(i, y));
    out.dlogits(i, y) -= 1.0 / static_cast<double>(n);
  }
  out.loss = loss / static_cast<double>(n);
  return out;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = logits;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double mx = p.row(i).maxCoeff();
    p.row(i) = (p.row(i).array() - mx).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

Eigen::MatrixXd softmax_vjp(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& upstream) {
  Eigen::MatrixXd d(probs.rows(), probs.cols());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    double dot = probs.row(i).dot(upstream.row(i));
    d.row(i) = probs.row(i).array() * (upstream.row(i).array() - dot);
  }
  return d;
}

Eigen::MatrixXd one_hot(const std::vector<int>& labels, int classes) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(labels.size(), classes);
  for (size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0 && labels[i] < classes, ErrorKind::Contract,
            "one_hot: label out of range");
    m(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return m;
}

DiceResult dice_score(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& pred) {
  require(truth.rows() == pred.rows() && truth.cols() == pred.cols(), ErrorKind::Contract,
          "dice: shape mismatch");
  const Eigen::Index l = truth.cols();
  require(l >= 1, ErrorKind::Contract, "dice: no classes");
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    require(std::abs(truth.row(i).sum() - 1.0) <= 1e-6, ErrorKind::Contract,
            "dice: truth row " + std::to_string(i) + " is not a probability vector");
    require(std::abs(pred.row(i).sum() - 1.0) <= 1e-6, ErrorKind::Contract,
            "dice: prediction row " + std::to_string(i) + " is not a probability vector");
  }

  DiceResult out;
  out.grad.resize(pred.rows(), pred.cols());
  double total = 0.0;
  for (Eigen::Index c = 0; c < l; ++c) {
    double num = 2.0 * truth.col(c).dot(pred.col(c));
    double den = truth.col(c).sum() + pred.col(c).sum() + kDiceEps;
    total += num / den;
    // d/dp_ic of num/den = (2 g_ic * den - num) / den^2
    out.grad.col(c) =
        (2.0 * truth.col(c) * den - Eigen::VectorXd::Constant(truth.rows(), num)) /
        (den * den * static_cast<double>(l));
  }
  out.dice = total / static_cast<double>(l);
  return out;
}

MlpStack::MlpStack(const std::vector<int>& widths) {
  require(widths.size() >= 2, ErrorKind::Contract, "mlp needs at least in/out widths");
  for (size_t i = 0; i + 1 < widths.size(); ++i) layers.emplace_back(widths[i], widths[i + 1]);
}

Eigen::MatrixXd MlpStack::forward(const Eigen::MatrixXd& input) {
  preacts_.clear();
  Eigen::MatrixXd x = input;
  for (size_t i = 0; i < layers.size(); ++i) {
    Eigen::MatrixXd z = layers[i].forward(x);
    if (i + 1 < layers.size()) {
      preacts_.push_back(z);
      x = activate(hidden_act, z);
      if (i + 2 == layers.size()) penult_ = x;
    } else {
      x = z;  // logits
    }
  }
  if (layers.size() == 1) penult_ = input;
  return x;
}

Eigen::MatrixXd MlpStack::backward(const Eigen::MatrixXd& dlogits) {
  Eigen::MatrixXd g = layers.back().backward(dlogits);
  for (size_t i = layers.size() - 1; i-- > 0;) {
    g = g.cwiseProduct(activate_grad(hidden_act, preacts_[i]));
    g = layers[i].backward(g);
  }
  return g;
}

Eigen::MatrixXd MlpStack::backward_from_penultimate(const Eigen::MatrixXd& dpenult) {
  require(layers.size() >= 2, ErrorKind::Contract,
          "backward_from_penultimate needs a hidden layer");
  Eigen::MatrixXd g = dpenult;
  for (size_t i = layers.size() - 1; i-- > 0;) {
    g = g.cwiseProduct(activate_grad(hidden_act, preacts_[i]));
    g = layers[i].backward(g);
  }
  return g;
}

void SgdState::step(std::span<Tensor2* const> params) {
  for (Tensor2* p : params) {
    require(p->grad.rows() == p->value.rows() && p->grad.cols() == p->value.cols(),
            ErrorKind::Contract, "sgd: gradient shape mismatch");
    p->value.noalias() -= lr * p->grad;
#ifndef NDEBUG
    check_finite(p->value, "parameter after sgd step");
#endif
  }
  ++step_count;
  if (decay_interval > 0 && step_count % decay_interval == 0) lr *= decay_factor;
}

}  // namespace parcelnet
