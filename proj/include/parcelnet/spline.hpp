#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "parcelnet/surface_graph.hpp"
#include "parcelnet/tensor.hpp"

namespace parcelnet {

// Open-uniform (clamped) B-spline bases of degree m over equidistant knots
// on [0,1], one basis per pseudo-coordinate dimension. At any point at most
// m+1 basis functions are nonzero per dimension, and they sum to 1.
struct BSplineBasis {
  int degree = 1;
  std::vector<int> dims;  // control-point count d_i per dimension, each >= m+1

  BSplineBasis() = default;
  BSplineBasis(int degree_, std::vector<int> dims_);

  int k() const { return static_cast<int>(dims.size()); }
  // D = prod d_i, the number of control weights.
  int control_count() const;
  // Nonzero entries per evaluation, (m+1)^k.
  int support_size() const;

  // The m+1 (possibly zero at the clamped ends) basis values at u in [0,1]
  // for dimension `dim`, plus the index of the first active control point.
  std::pair<int, std::vector<double>> basis_1d(int dim, double u) const;
};

// Nonzero tensor-product basis values B_p(u) as (flat control index, value)
// pairs, at most (m+1)^k entries, summing to 1. u must lie in [0,1]^k.
std::vector<std::pair<int, double>> basis_eval(const BSplineBasis& basis,
                                               const Eigen::VectorXd& u);

// Per-edge basis products, precomputed once per (graph, pseudo-coords,
// basis) and reused by every layer sharing the basis. Fixed stride with
// zero padding keeps the hot loops branch-free.
struct EdgeBasisCache {
  int stride = 0;
  int num_edges = 0;
  std::vector<int> index;    // num_edges * stride
  std::vector<double> value; // num_edges * stride
};

EdgeBasisCache precompute_edge_basis(const BSplineBasis& basis, const EdgePseudoCoords& coords);

// One continuous-kernel convolution layer: scalar kernel x(u) = sum_p w_p B_p(u)
// weighting the neighbor features, a feature transform W, and an optional
// trainable root transform for the center vertex (Eq-style aggregation sums
// only over neighbors, so without the root path the center feature is lost).
struct SplineConvLayer {
  BSplineBasis basis;
  Tensor2 kernel_w;  // D x 1 control weights
  Tensor2 W;         // M_in x M_out
  Tensor2 W_root;    // M_in x M_out
  bool use_root = true;
  Activation act = Activation::Elu;

  SplineConvLayer() = default;
  SplineConvLayer(BSplineBasis basis_, int in, int out, bool use_root_ = true,
                  Activation act_ = Activation::Elu);

  int in_width() const { return static_cast<int>(W.rows()); }
  int out_width() const { return static_cast<int>(W.cols()); }

  // AGG(v_i) = act( (1/|N(i)|) sum_j x_ij f(v_j) W + f(v_i) W_root ).
  // Caches state for backward. Isolated vertices require the root path.
  Eigen::MatrixXd forward(const SurfaceGraph& graph, const EdgeBasisCache& eb,
                          const Eigen::MatrixXd& features);
  // Exact reverse-mode gradients; accumulates into the parameter gradient
  // buffers and returns the gradient w.r.t. the input features.
  Eigen::MatrixXd backward(const Eigen::MatrixXd& upstream);

 private:
  // saved forward state
  const SurfaceGraph* graph_ = nullptr;
  const EdgeBasisCache* eb_ = nullptr;
  Eigen::MatrixXd features_, neigh_, preact_;
  Eigen::VectorXd edge_kernel_;
};

// x(u) = sum_p w_p B_p(u), via the sparse nonzero set.
double kernel_eval(const SplineConvLayer& layer, const Eigen::VectorXd& u);

}  // namespace parcelnet
