#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "parcelnet/mesh.hpp"

namespace parcelnet {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sparse symmetric vertex graph in CSR form, plus the raw per-edge geometry
// the pseudo-coordinates are derived from. Directed edges: (i, j) is stored
// for both directions; no self-loops. Edges of vertex i are
// [offsets[i], offsets[i+1]) with neighbor ids in `dst`, sorted ascending.
struct SurfaceGraph {
  int num_vertices = 0;
  std::vector<int> offsets;  // size N+1
  std::vector<int> dst;      // size E (directed)

  // Raw records per directed edge (i, j), aligned with `dst`:
  std::vector<Eigen::Vector3d> offset;  // pos_i - pos_j
  std::vector<double> rho;              // geodesic distance i -> j
  std::vector<double> theta;            // tangent-plane angle at i, filled by
                                        // intrinsic_pseudo_coords; NaN before

  int num_edges() const { return static_cast<int>(dst.size()); }
  int degree(int v) const { return offsets[v + 1] - offsets[v]; }
  int source_of(int edge) const;  // O(log N)
};

// Per-edge k-dimensional coordinates scaled into [0,1] per dimension,
// with the scaling recorded for exact inversion.
struct EdgePseudoCoords {
  int dim = 0;
  Eigen::MatrixXd values;    // E x dim, in [0,1]
  Eigen::VectorXd scale_lo;  // per-dimension raw min
  Eigen::VectorXd scale_hi;  // per-dimension raw max
  int degenerate_theta_count = 0;  // edges where the tangent projection vanished

  double unscale(int edge, int d) const {
    return scale_lo[d] + values(edge, d) * (scale_hi[d] - scale_lo[d]);
  }
};

// Orthonormal reference frame at a vertex: outward normal, tangent basis,
// and the maximal-curvature direction inside the tangent plane.
struct VertexFrame {
  Eigen::Vector3d normal;
  Eigen::Vector3d tangent_u;  // first tangent axis (fallback direction)
  Eigen::Vector3d tangent_v;
  Eigen::Vector3d curvature_dir;  // unit, in the tangent plane
  double k1 = 0.0, k2 = 0.0;      // principal curvatures, |k1| >= |k2|
  bool umbilic = false;           // fallback used (flat or k1 ~ k2)
};

struct GeodesicLimit {
  double max_distance = kInf;
  int max_hops = -1;  // < 0: unbounded
};

// Connects each vertex to its <= hops-hop face-adjacency neighborhood.
// rho is the Dijkstra geodesic (equals the edge length for 1-hop edges),
// offset is pos_i - pos_j. Throws Error(Data) on disconnected meshes,
// naming the component count.
SurfaceGraph build_surface_graph(const TriangleMesh& mesh, int hops = 1);

// Dijkstra over mesh edge lengths. Entries outside the limit stay +inf.
// With max_hops >= 0, paths are restricted to at most that many edges.
std::vector<double> geodesic_distances(const TriangleMesh& mesh, int source,
                                       GeodesicLimit limit = {});

// Area-weighted normals, tangent bases, and maximal-curvature directions
// from a least-squares quadric fit over the one-ring. Vertices with fewer
// than 3 neighbors are an error naming the vertex. Flat/umbilic vertices
// fall back to the first tangent axis.
std::vector<VertexFrame> estimate_vertex_frames(const TriangleMesh& mesh);

// u_E(v_i, v_j) = pos_i - pos_j, min-max scaled to [0,1] per dimension over
// the whole graph. A dimension with zero range maps to 0.5.
EdgePseudoCoords extrinsic_pseudo_coords(const SurfaceGraph& graph,
                                         const std::vector<Eigen::Vector3d>& positions);

// u_I(v_i, v_j) = (rho, theta): geodesic distance and the angle between the
// tangent-plane projection of (pos_j - pos_i) and the maximal-curvature
// direction at v_i, in [0, 2*pi). rho is min-max scaled, theta divided by
// 2*pi. Fills graph.theta. Zero-length projections give theta = 0 and are
// counted in degenerate_theta_count.
EdgePseudoCoords intrinsic_pseudo_coords(SurfaceGraph& graph,
                                         const std::vector<VertexFrame>& frames,
                                         const TriangleMesh& mesh);

}  // namespace parcelnet
