#include "parcelnet/surface_graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "parcelnet/error.hpp"

namespace parcelnet {

int SurfaceGraph::source_of(int edge) const {
  auto it = std::upper_bound(offsets.begin(), offsets.end(), edge);
  return static_cast<int>(it - offsets.begin()) - 1;
}

namespace {

double edge_length(const TriangleMesh& mesh, int a, int b) {
  return (mesh.positions[a] - mesh.positions[b]).norm();
}

// Dijkstra from `source` over the one-ring adjacency, stopping once every
// vertex in `targets` (when non-null) has been finalized.
std::vector<double> dijkstra(const TriangleMesh& mesh,
                             const std::vector<std::vector<int>>& adj, int source,
                             GeodesicLimit limit, const std::vector<int>* targets = nullptr) {
  const int n = mesh.num_vertices();
  std::vector<double> dist(n, kInf);
  std::vector<int> hops(n, 0);
  // (distance, vertex): vertex id breaks distance ties deterministically.
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  std::vector<char> done(n, 0);
  int remaining = targets ? static_cast<int>(targets->size()) : -1;
  std::vector<char> is_target;
  if (targets) {
    is_target.assign(n, 0);
    for (int t : *targets) is_target[t] = 1;
  }
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (done[v]) continue;
    done[v] = 1;
    if (targets && is_target[v] && --remaining == 0) break;
    if (limit.max_hops >= 0 && hops[v] >= limit.max_hops) continue;
    for (int w : adj[v]) {
      double nd = d + edge_length(mesh, v, w);
      if (nd > limit.max_distance) continue;
      if (nd < dist[w]) {
        dist[w] = nd;
        hops[w] = hops[v] + 1;
        heap.push({nd, w});
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<double> geodesic_distances(const TriangleMesh& mesh, int source,
                                       GeodesicLimit limit) {
  require(source >= 0 && source < mesh.num_vertices(), ErrorKind::Contract,
          "geodesic source out of range");
  return dijkstra(mesh, mesh.vertex_adjacency(), source, limit);
}

SurfaceGraph build_surface_graph(const TriangleMesh& mesh, int hops) {
  require(hops >= 1, ErrorKind::Contract, "hops must be >= 1");
  int comps = mesh.component_count();
  require(comps == 1, ErrorKind::Data,
          "mesh is disconnected: " + std::to_string(comps) + " components");

  const int n = mesh.num_vertices();
  auto adj = mesh.vertex_adjacency();

  SurfaceGraph g;
  g.num_vertices = n;
  g.offsets.assign(n + 1, 0);

  std::vector<std::vector<int>> nbrs(n);
  if (hops == 1) {
    nbrs = adj;
  } else {
    // BFS out to `hops` rings.
    std::vector<int> ring(n, -1);
    for (int s = 0; s < n; ++s) {
      std::vector<int> frontier{s}, reached;
      ring[s] = 0;
      for (int h = 1; h <= hops; ++h) {
        std::vector<int> next;
        for (int v : frontier)
          for (int w : adj[v])
            if (ring[w] < 0) {
              ring[w] = h;
              next.push_back(w);
              reached.push_back(w);
            }
        frontier = std::move(next);
      }
      nbrs[s] = reached;
      std::sort(nbrs[s].begin(), nbrs[s].end());
      ring[s] = -1;
      for (int v : reached) ring[v] = -1;
    }
  }

  for (int v = 0; v < n; ++v) g.offsets[v + 1] = g.offsets[v] + static_cast<int>(nbrs[v].size());
  const int e = g.offsets[n];
  g.dst.resize(e);
  g.offset.resize(e);
  g.rho.resize(e);
  g.theta.assign(e, std::numeric_limits<double>::quiet_NaN());

  for (int v = 0; v < n; ++v) {
    std::vector<double> rho_v;
    if (hops > 1) {
      auto d = dijkstra(mesh, adj, v, {}, &nbrs[v]);
      rho_v.reserve(nbrs[v].size());
      for (int w : nbrs[v]) rho_v.push_back(d[w]);
    }
    for (size_t k = 0; k < nbrs[v].size(); ++k) {
      int idx = g.offsets[v] + static_cast<int>(k);
      int w = nbrs[v][k];
      g.dst[idx] = w;
      g.offset[idx] = mesh.positions[v] - mesh.positions[w];
      g.rho[idx] = hops == 1 ? edge_length(mesh, v, w) : rho_v[k];
    }
  }
  return g;
}

std::vector<VertexFrame> estimate_vertex_frames(const TriangleMesh& mesh) {
  const int n = mesh.num_vertices();
  auto adj = mesh.vertex_adjacency();

  // Accumulate area-weighted face normals (cross product is 2*area*unit normal).
  std::vector<Eigen::Vector3d> normal(n, Eigen::Vector3d::Zero());
  for (const auto& f : mesh.faces) {
    const auto& a = mesh.positions[f[0]];
    const auto& b = mesh.positions[f[1]];
    const auto& c = mesh.positions[f[2]];
    Eigen::Vector3d fn = (b - a).cross(c - a);
    for (int k = 0; k < 3; ++k) normal[f[k]] += fn;
  }

  std::vector<VertexFrame> frames(n);
  for (int v = 0; v < n; ++v) {
    require(static_cast<int>(adj[v].size()) >= 3, ErrorKind::Data,
            "vertex " + std::to_string(v) + " has fewer than 3 neighbors");
    VertexFrame& fr = frames[v];
    double nl = normal[v].norm();
    require(nl > 0, ErrorKind::Data, "vertex " + std::to_string(v) + " has zero normal");
    fr.normal = normal[v] / nl;

    // Tangent basis from a fixed global reference, so the flat-case fallback
    // direction is deterministic.
    Eigen::Vector3d ref(0, 0, 1);
    if (std::abs(fr.normal.dot(ref)) > 0.9) ref = Eigen::Vector3d(1, 0, 0);
    fr.tangent_u = (ref - fr.normal.dot(ref) * fr.normal).normalized();
    fr.tangent_v = fr.normal.cross(fr.tangent_u);

    // Least-squares fit of the one-ring heights to z = (a x^2 + 2 b x y + c y^2) / 2.
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    double scale = 0.0;
    for (int w : adj[v]) {
      Eigen::Vector3d d = mesh.positions[w] - mesh.positions[v];
      double x = d.dot(fr.tangent_u), y = d.dot(fr.tangent_v), z = d.dot(fr.normal);
      Eigen::Vector3d row(0.5 * x * x, x * y, 0.5 * y * y);
      ata += row * row.transpose();
      atb += row * z;
      scale += d.norm();
    }
    scale /= static_cast<double>(adj[v].size());
    Eigen::Vector3d abc = ata.ldlt().solve(atb);

    Eigen::Matrix2d shape;
    shape << abc[0], abc[1], abc[1], abc[2];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(shape);
    double l0 = eig.eigenvalues()[0], l1 = eig.eigenvalues()[1];
    int imax = std::abs(l0) >= std::abs(l1) ? 0 : 1;
    fr.k1 = eig.eigenvalues()[imax];
    fr.k2 = eig.eigenvalues()[1 - imax];

    // Flat (curvature negligible at the one-ring scale) or umbilic
    // (principal curvatures indistinguishable): direction is undefined,
    // use the deterministic tangent_u fallback.
    bool flat = std::abs(fr.k1) * scale < 1e-7;
    bool umbilic = std::abs(fr.k1) - std::abs(fr.k2) <= 0.1 * std::abs(fr.k1);
    if (flat || umbilic) {
      fr.umbilic = true;
      fr.curvature_dir = fr.tangent_u;
    } else {
      Eigen::Vector2d dir = eig.eigenvectors().col(imax);
      // Canonical sign: the direction is an axis, pick one half deterministically.
      if (dir[0] < 0 || (dir[0] == 0 && dir[1] < 0)) dir = -dir;
      fr.curvature_dir = (dir[0] * fr.tangent_u + dir[1] * fr.tangent_v).normalized();
    }
  }
  return frames;
}

namespace {

// Min-max scale one column into [0,1], mapping zero-range columns to 0.5.
void scale_column(Eigen::MatrixXd& values, int col, double lo, double hi) {
  if (hi - lo < 1e-300) {
    values.col(col).setConstant(0.5);
  } else {
    values.col(col) = (values.col(col).array() - lo) / (hi - lo);
  }
}

}  // namespace

EdgePseudoCoords extrinsic_pseudo_coords(const SurfaceGraph& graph,
                                         const std::vector<Eigen::Vector3d>& positions) {
  require(static_cast<int>(positions.size()) == graph.num_vertices, ErrorKind::Contract,
          "positions do not match graph");
  const int e = graph.num_edges();
  EdgePseudoCoords pc;
  pc.dim = 3;
  pc.values.resize(e, 3);
  for (int v = 0; v < graph.num_vertices; ++v)
    for (int k = graph.offsets[v]; k < graph.offsets[v + 1]; ++k) {
      Eigen::Vector3d diff = positions[v] - positions[graph.dst[k]];
      pc.values.row(k) = diff.transpose();
    }
  pc.scale_lo.resize(3);
  pc.scale_hi.resize(3);
  for (int d = 0; d < 3; ++d) {
    double lo = e > 0 ? pc.values.col(d).minCoeff() : 0.0;
    double hi = e > 0 ? pc.values.col(d).maxCoeff() : 0.0;
    pc.scale_lo[d] = lo;
    pc.scale_hi[d] = hi;
    scale_column(pc.values, d, lo, hi);
  }
  return pc;
}

EdgePseudoCoords intrinsic_pseudo_coords(SurfaceGraph& graph,
                                         const std::vector<VertexFrame>& frames,
                                         const TriangleMesh& mesh) {
  require(static_cast<int>(frames.size()) == graph.num_vertices, ErrorKind::Contract,
          "frames do not match graph");
  const int e = graph.num_edges();
  EdgePseudoCoords pc;
  pc.dim = 2;
  pc.values.resize(e, 2);
  pc.degenerate_theta_count = 0;

  for (int v = 0; v < graph.num_vertices; ++v) {
    const VertexFrame& fr = frames[v];
    Eigen::Vector3d axis_v = fr.normal.cross(fr.curvature_dir);
    for (int k = graph.offsets[v]; k < graph.offsets[v + 1]; ++k) {
      Eigen::Vector3d d = mesh.positions[graph.dst[k]] - mesh.positions[v];
      Eigen::Vector3d proj = d - d.dot(fr.normal) * fr.normal;
      double theta;
      if (proj.norm() < 1e-12 * std::max(d.norm(), 1e-300)) {
        theta = 0.0;
        ++pc.degenerate_theta_count;
      } else {
        theta = std::atan2(proj.dot(axis_v), proj.dot(fr.curvature_dir));
        if (theta < 0) theta += 2.0 * M_PI;
      }
      graph.theta[k] = theta;
      pc.values(k, 0) = graph.rho[k];
      pc.values(k, 1) = theta;
    }
  }

  pc.scale_lo.resize(2);
  pc.scale_hi.resize(2);
  double rlo = e > 0 ? pc.values.col(0).minCoeff() : 0.0;
  double rhi = e > 0 ? pc.values.col(0).maxCoeff() : 0.0;
  pc.scale_lo[0] = rlo;
  pc.scale_hi[0] = rhi;
  scale_column(pc.values, 0, rlo, rhi);
  // theta is scaled by its full period, not the observed range.
  pc.scale_lo[1] = 0.0;
  pc.scale_hi[1] = 2.0 * M_PI;
  pc.values.col(1) /= 2.0 * M_PI;
  return pc;
}

}  // namespace parcelnet
