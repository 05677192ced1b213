#include "parcelnet/spline.hpp"

#include <cmath>

#include "parcelnet/error.hpp"

namespace parcelnet {

BSplineBasis::BSplineBasis(int degree_, std::vector<int> dims_)
    : degree(degree_), dims(std::move(dims_)) {
  require(degree >= 0 && degree <= 3, ErrorKind::Contract, "spline degree must be in [0, 3]");
  require(!dims.empty(), ErrorKind::Contract, "basis needs at least one dimension");
  for (int d : dims)
    require(d >= degree + 1, ErrorKind::Contract, "kernel size must be >= degree + 1");
}

int BSplineBasis::control_count() const {
  int n = 1;
  for (int d : dims) n *= d;
  return n;
}

int BSplineBasis::support_size() const {
  int n = 1;
  for (size_t i = 0; i < dims.size(); ++i) n *= degree + 1;
  return n;
}

// Clamped equidistant knot vector: t_0..t_m = 0, t_d..t_{d+m} = 1,
// interior knots uniform. Knot i for d controls, degree m.
static double knot(int i, int d, int m) {
  if (i <= m) return 0.0;
  if (i >= d) return 1.0;
  return static_cast<double>(i - m) / static_cast<double>(d - m);
}

std::pair<int, std::vector<double>> BSplineBasis::basis_1d(int dim, double u) const {
  const int m = degree;
  const int d = dims[dim];
  require(u >= 0.0 && u <= 1.0, ErrorKind::Contract, "pseudo-coordinate outside [0,1]");

  // Knot span index in [m, d-1].
  int span = m + std::min(static_cast<int>(u * (d - m)), d - m - 1);

  // Cox-de Boor recursion for the m+1 active functions N_{span-m..span}.
  std::vector<double> n(m + 1, 0.0), left(m + 1), right(m + 1);
  n[0] = 1.0;
  for (int j = 1; j <= m; ++j) {
    left[j] = u - knot(span + 1 - j, d, m);
    right[j] = knot(span + j, d, m) - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double tmp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    n[j] = saved;
  }
  return {span - m, std::move(n)};
}

std::vector<std::pair<int, double>> basis_eval(const BSplineBasis& basis,
                                               const Eigen::VectorXd& u) {
  const int k = basis.k();
  require(u.size() == k, ErrorKind::Contract, "pseudo-coordinate dimension mismatch");

  std::vector<int> first(k);
  std::vector<std::vector<double>> vals(k);
  for (int i = 0; i < k; ++i) {
    auto [f, v] = basis.basis_1d(i, u[i]);
    first[i] = f;
    vals[i] = std::move(v);
  }

  // Row-major strides over the control grid.
  std::vector<int> stride(k, 1);
  for (int i = k - 2; i >= 0; --i) stride[i] = stride[i + 1] * basis.dims[i + 1];

  std::vector<std::pair<int, double>> out;
  out.reserve(basis.support_size());
  std::vector<int> idx(k, 0);
  while (true) {
    double prod = 1.0;
    int flat = 0;
    for (int i = 0; i < k; ++i) {
      prod *= vals[i][idx[i]];
      flat += (first[i] + idx[i]) * stride[i];
    }
    if (prod != 0.0) out.emplace_back(flat, prod);
    int i = k - 1;
    while (i >= 0 && ++idx[i] > basis.degree) idx[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

EdgeBasisCache precompute_edge_basis(const BSplineBasis& basis,
                                     const EdgePseudoCoords& coords) {
  require(coords.dim == basis.k(), ErrorKind::Contract,
          "pseudo-coordinate dim does not match basis");
  EdgeBasisCache eb;
  eb.stride = basis.support_size();
  eb.num_edges = static_cast<int>(coords.values.rows());
  eb.index.assign(static_cast<size_t>(eb.num_edges) * eb.stride, 0);
  eb.value.assign(static_cast<size_t>(eb.num_edges) * eb.stride, 0.0);
  for (int e = 0; e < eb.num_edges; ++e) {
    auto entries = basis_eval(basis, coords.values.row(e).transpose());
    for (size_t s = 0; s < entries.size(); ++s) {
      eb.index[e * eb.stride + s] = entries[s].first;
      eb.value[e * eb.stride + s] = entries[s].second;
    }
  }
  return eb;
}

SplineConvLayer::SplineConvLayer(BSplineBasis basis_, int in, int out, bool use_root_,
                                 Activation act_)
    : basis(std::move(basis_)),
      kernel_w(basis.control_count(), 1),
      W(in, out),
      W_root(in, out),
      use_root(use_root_),
      act(act_) {}

double kernel_eval(const SplineConvLayer& layer, const Eigen::VectorXd& u) {
  double x = 0.0;
  for (const auto& [p, b] : basis_eval(layer.basis, u)) x += layer.kernel_w.value(p, 0) * b;
  return x;
}

Eigen::MatrixXd SplineConvLayer::forward(const SurfaceGraph& graph, const EdgeBasisCache& eb,
                                         const Eigen::MatrixXd& features) {
  require(features.rows() == graph.num_vertices, ErrorKind::Contract,
          "feature rows do not match graph");
  require(features.cols() == W.rows(), ErrorKind::Contract, "feature width mismatch");
  require(eb.num_edges == graph.num_edges(), ErrorKind::Contract,
          "edge basis cache does not match graph");

  graph_ = &graph;
  eb_ = &eb;
  features_ = features;

  const int n = graph.num_vertices;
  const double* w = kernel_w.value.data();
  edge_kernel_.resize(graph.num_edges());
  neigh_.setZero(n, features.cols());
  for (int v = 0; v < n; ++v) {
    const int begin = graph.offsets[v], end = graph.offsets[v + 1];
    if (begin == end) {
      require(use_root, ErrorKind::Contract,
              "isolated vertex " + std::to_string(v) + " with root transform disabled");
      continue;
    }
    for (int e = begin; e < end; ++e) {
      double x = 0.0;
      const size_t base = static_cast<size_t>(e) * eb.stride;
      for (int s = 0; s < eb.stride; ++s) x += w[eb.index[base + s]] * eb.value[base + s];
      edge_kernel_[e] = x;
      neigh_.row(v) += x * features.row(graph.dst[e]);
    }
    neigh_.row(v) /= static_cast<double>(end - begin);
  }

  preact_.noalias() = neigh_ * W.value;
  if (use_root) preact_.noalias() += features * W_root.value;
  return activate(act, preact_);
}

Eigen::MatrixXd SplineConvLayer::backward(const Eigen::MatrixXd& upstream) {
  require(graph_ != nullptr, ErrorKind::Contract, "backward without a saved forward");
  require(upstream.rows() == preact_.rows() && upstream.cols() == preact_.cols(),
          ErrorKind::Contract, "upstream gradient shape mismatch");

  const SurfaceGraph& graph = *graph_;
  const EdgeBasisCache& eb = *eb_;

  Eigen::MatrixXd gz = upstream.cwiseProduct(activate_grad(act, preact_));

  W.grad.noalias() += neigh_.transpose() * gz;
  Eigen::MatrixXd dneigh = gz * W.value.transpose();
  Eigen::MatrixXd dfeatures = Eigen::MatrixXd::Zero(features_.rows(), features_.cols());
  if (use_root) {
    W_root.grad.noalias() += features_.transpose() * gz;
    dfeatures.noalias() += gz * W_root.value.transpose();
  }

  double* dw = kernel_w.grad.data();
  for (int v = 0; v < graph.num_vertices; ++v) {
    const int begin = graph.offsets[v], end = graph.offsets[v + 1];
    if (begin == end) continue;
    const double inv_deg = 1.0 / static_cast<double>(end - begin);
    for (int e = begin; e < end; ++e) {
      const int j = graph.dst[e];
      // neigh_v = (1/deg) sum_e x_e f_j  =>  dx_e = (1/deg) <f_j, dneigh_v>
      double dx = inv_deg * features_.row(j).dot(dneigh.row(v));
      const size_t base = static_cast<size_t>(e) * eb.stride;
      for (int s = 0; s < eb.stride; ++s) dw[eb.index[base + s]] += eb.value[base + s] * dx;
      dfeatures.row(j) += (edge_kernel_[e] * inv_deg) * dneigh.row(v);
    }
  }
  return dfeatures;
}

}  // namespace parcelnet
