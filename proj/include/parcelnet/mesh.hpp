#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace parcelnet {

// Triangle mesh with optional per-vertex features. Faces must be triangles
// with three distinct in-range indices, and the induced edge graph must be
// connected; validate() enforces both.
struct TriangleMesh {
  std::vector<Eigen::Vector3d> positions;
  std::vector<std::array<int, 3>> faces;
  Eigen::MatrixXd features;  // N x M; M = 3 by default, may be empty

  int num_vertices() const { return static_cast<int>(positions.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }

  // Throws Error(Data) on invalid faces, disconnected surfaces (message
  // names the component count), or a feature row-count mismatch.
  void validate() const;

  // One-ring vertex adjacency from faces, sorted and deduplicated.
  std::vector<std::vector<int>> vertex_adjacency() const;

  // Number of connected components of the edge graph.
  int component_count() const;
};

// Unit sphere by repeated 4-to-1 subdivision of an icosahedron, vertices
// projected onto the sphere after each round. V = 10 * 4^level + 2.
TriangleMesh make_icosphere(int level);

// Open cylinder patch of radius `radius` whose axis is the z-axis; used in
// tests for curvature directions. Rings x segments vertex grid.
TriangleMesh make_cylinder_patch(int rings, int segments, double radius, double height);

// --- File formats -----------------------------------------------------------
// OFF and OBJ (triangles only). Features: one line per vertex with M
// whitespace-separated decimals. Labels: one non-negative integer per line.
// Loaders throw Error(Data) naming the file and the expected count.

TriangleMesh load_mesh(const std::string& path);  // dispatch on extension
TriangleMesh load_off(const std::string& path);
TriangleMesh load_obj(const std::string& path);
void save_off(const TriangleMesh& mesh, const std::string& path);

Eigen::MatrixXd load_features(const std::string& path, int expected_rows);
void save_features(const Eigen::MatrixXd& features, const std::string& path);

std::vector<int> load_labels(const std::string& path, int expected_rows);
void save_labels(const std::vector<int>& labels, const std::string& path);

// Legacy-VTK polydata with one integer scalar per vertex, for external viewers.
void save_vtk_labeled(const TriangleMesh& mesh, const std::vector<int>& labels,
                      const std::string& path);

}  // namespace parcelnet
