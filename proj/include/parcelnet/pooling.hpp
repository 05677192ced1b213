#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "parcelnet/surface_graph.hpp"

namespace parcelnet {

// One round of pairwise clustering: every cluster has 1 or 2 members and the
// assignment partitions the fine vertices. Coarse graph and positions are
// filled by coarsen().
struct CoarseningLevel {
  std::vector<int> assignment;            // fine vertex -> coarse vertex
  std::vector<std::vector<int>> members;  // coarse vertex -> fine members
  SurfaceGraph coarse_graph;
  std::vector<Eigen::Vector3d> coarse_positions;

  int fine_count() const { return static_cast<int>(assignment.size()); }
  int coarse_count() const { return static_cast<int>(members.size()); }
};

// Normalized-cut-style matching weight w_ij * (1/deg_i + 1/deg_j) per
// directed edge, with unit base weights.
std::vector<double> normalized_cut_weights(const SurfaceGraph& graph);

// Greedy maximal matching: visit unmarked vertices in `visit_order`, pair
// each with the unmarked neighbor of largest weight (ties to the lowest
// neighbor id), mark both. Leftover vertices become singletons. No
// eigenvector computation anywhere.
CoarseningLevel graclus_match(const SurfaceGraph& graph,
                              std::span<const double> edge_weights,
                              const std::vector<int>& visit_order);

// Coarse features are member sums, coarse positions member means, coarse
// edges the union of crossing fine edges (intra-cluster edges vanish).
// Fills level.coarse_graph / coarse_positions and returns pooled features.
Eigen::MatrixXd coarsen(CoarseningLevel& level, const Eigen::MatrixXd& features,
                        const std::vector<Eigen::Vector3d>& positions);

// Sum rows over each cluster (the pooling rule).
Eigen::MatrixXd pool_features(const CoarseningLevel& level, const Eigen::MatrixXd& fine);
// Copy each coarse row back to all cluster members (the reverse scheme).
Eigen::MatrixXd unpool_features(const CoarseningLevel& level, const Eigen::MatrixXd& coarse);

struct PoolPair {
  CoarseningLevel first, second;
  Eigen::MatrixXd features;
  std::vector<Eigen::Vector3d> positions;

  const SurfaceGraph& coarse_graph() const { return second.coarse_graph; }
};

// Two match+coarsen rounds ("clustering twice divides the vertices by
// four", up to unmatched singletons). Visit orders are seeded shuffles.
PoolPair pool_pair(const SurfaceGraph& graph, const Eigen::MatrixXd& features,
                   const std::vector<Eigen::Vector3d>& positions, uint64_t seed);

// Copy-back through stacked levels, coarsest first: restores the original
// vertex count and order.
Eigen::MatrixXd unpool(std::span<const CoarseningLevel* const> levels,
                       const Eigen::MatrixXd& coarse);

}  // namespace parcelnet
