#include "parcelnet/pooling.hpp"

#include <algorithm>

#include "parcelnet/error.hpp"
#include "parcelnet/rng.hpp"

namespace parcelnet {

std::vector<double> normalized_cut_weights(const SurfaceGraph& graph) {
  std::vector<double> w(graph.num_edges());
  for (int v = 0; v < graph.num_vertices; ++v)
    for (int e = graph.offsets[v]; e < graph.offsets[v + 1]; ++e) {
      int j = graph.dst[e];
      w[e] = 1.0 / graph.degree(v) + 1.0 / graph.degree(j);
    }
  return w;
}

CoarseningLevel graclus_match(const SurfaceGraph& graph,
                              std::span<const double> edge_weights,
                              const std::vector<int>& visit_order) {
  const int n = graph.num_vertices;
  require(static_cast<int>(visit_order.size()) == n, ErrorKind::Contract,
          "visit order size mismatch");
  std::vector<double> fallback;
  if (edge_weights.empty()) {
    fallback = normalized_cut_weights(graph);
    edge_weights = fallback;
  }
  require(static_cast<int>(edge_weights.size()) == graph.num_edges(), ErrorKind::Contract,
          "edge weight count mismatch");

  CoarseningLevel level;
  level.assignment.assign(n, -1);
  for (int v : visit_order) {
    if (level.assignment[v] >= 0) continue;
    int best = -1;
    double best_w = -1.0;
    for (int e = graph.offsets[v]; e < graph.offsets[v + 1]; ++e) {
      int j = graph.dst[e];
      if (level.assignment[j] >= 0) continue;
      if (edge_weights[e] > best_w) {  // ties go to the lowest id (CSR order)
        best_w = edge_weights[e];
        best = j;
      }
    }
    int cluster = static_cast<int>(level.members.size());
    level.assignment[v] = cluster;
    if (best >= 0) {
      level.assignment[best] = cluster;
      level.members.push_back({std::min(v, best), std::max(v, best)});
    } else {
      level.members.push_back({v});
    }
  }
  return level;
}

Eigen::MatrixXd pool_features(const CoarseningLevel& level, const Eigen::MatrixXd& fine) {
  require(fine.rows() == level.fine_count(), ErrorKind::Contract, "pool: row count mismatch");
  Eigen::MatrixXd coarse = Eigen::MatrixXd::Zero(level.coarse_count(), fine.cols());
  for (int v = 0; v < level.fine_count(); ++v) coarse.row(level.assignment[v]) += fine.row(v);
  return coarse;
}

Eigen::MatrixXd unpool_features(const CoarseningLevel& level, const Eigen::MatrixXd& coarse) {
  require(coarse.rows() == level.coarse_count(), ErrorKind::Contract,
          "unpool: row count mismatch");
  Eigen::MatrixXd fine(level.fine_count(), coarse.cols());
  for (int v = 0; v < level.fine_count(); ++v) fine.row(v) = coarse.row(level.assignment[v]);
  return fine;
}

Eigen::MatrixXd coarsen(CoarseningLevel& level, const SurfaceGraph& fine_graph,
                        const Eigen::MatrixXd& features,
                        const std::vector<Eigen::Vector3d>& positions) {
  const int n = level.fine_count();
  require(fine_graph.num_vertices == n, ErrorKind::Contract, "coarsen: graph size mismatch");
  require(static_cast<int>(positions.size()) == n, ErrorKind::Contract,
          "coarsen: position count mismatch");
  const int nc = level.coarse_count();

  level.coarse_positions.assign(nc, Eigen::Vector3d::Zero());
  for (int c = 0; c < nc; ++c) {
    for (int v : level.members[c]) level.coarse_positions[c] += positions[v];
    level.coarse_positions[c] /= static_cast<double>(level.members[c].size());
  }

  // Coarse edge (A,B) exists iff some fine edge crosses clusters A != B.
  std::vector<std::vector<int>> adj(nc);
  for (int v = 0; v < n; ++v)
    for (int e = fine_graph.offsets[v]; e < fine_graph.offsets[v + 1]; ++e) {
      int a = level.assignment[v], b = level.assignment[fine_graph.dst[e]];
      if (a != b) adj[a].push_back(b);
    }
  SurfaceGraph& cg = level.coarse_graph;
  cg = SurfaceGraph{};
  cg.num_vertices = nc;
  cg.offsets.assign(nc + 1, 0);
  for (int c = 0; c < nc; ++c) {
    std::sort(adj[c].begin(), adj[c].end());
    adj[c].erase(std::unique(adj[c].begin(), adj[c].end()), adj[c].end());
    cg.offsets[c + 1] = cg.offsets[c] + static_cast<int>(adj[c].size());
  }
  const int ec = cg.offsets[nc];
  cg.dst.resize(ec);
  cg.offset.resize(ec);
  cg.rho.resize(ec);
  cg.theta.assign(ec, std::numeric_limits<double>::quiet_NaN());
  for (int c = 0; c < nc; ++c)
    for (size_t k = 0; k < adj[c].size(); ++k) {
      int idx = cg.offsets[c] + static_cast<int>(k);
      int b = adj[c][k];
      cg.dst[idx] = b;
      cg.offset[idx] = level.coarse_positions[c] - level.coarse_positions[b];
      cg.rho[idx] = cg.offset[idx].norm();
    }

  return pool_features(level, features);
}

PoolPair pool_pair(const SurfaceGraph& graph, const Eigen::MatrixXd& features,
                   const std::vector<Eigen::Vector3d>& positions, uint64_t seed) {
  PoolPair out;
  out.first = graclus_match(graph, {}, shuffled_order(graph.num_vertices, splitmix64(seed)));
  Eigen::MatrixXd f1 = coarsen(out.first, graph, features, positions);

  const SurfaceGraph& g1 = out.first.coarse_graph;
  out.second = graclus_match(g1, {}, shuffled_order(g1.num_vertices, splitmix64(seed ^ 0x9d2c5680u)));
  out.features = coarsen(out.second, g1, f1, out.first.coarse_positions);
  out.positions = out.second.coarse_positions;
  return out;
}

Eigen::MatrixXd unpool(std::span<const CoarseningLevel* const> levels,
                       const Eigen::MatrixXd& coarse) {
  Eigen::MatrixXd f = coarse;
  for (size_t i = levels.size(); i-- > 0;) f = unpool_features(*levels[i], f);
  return f;
}

}  // namespace parcelnet
