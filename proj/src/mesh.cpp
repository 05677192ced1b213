#include "parcelnet/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "parcelnet/error.hpp"

namespace parcelnet {

namespace {

// Atomic write: stream into path.tmp, rename on success.
class AtomicFile {
 public:
  explicit AtomicFile(const std::string& path) : path_(path), tmp_(path + ".tmp"), out_(tmp_) {
    require(out_.good(), ErrorKind::Data, "cannot open for writing: " + path);
  }
  std::ofstream& stream() { return out_; }
  void commit() {
    out_.close();
    require(out_.good(), ErrorKind::Data, "write failed: " + path_);
    std::filesystem::rename(tmp_, path_);
  }

 private:
  std::string path_, tmp_;
  std::ofstream out_;
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void TriangleMesh::validate() const {
  const int n = num_vertices();
  require(n > 0, ErrorKind::Data, "mesh has no vertices");
  for (size_t f = 0; f < faces.size(); ++f) {
    const auto& t = faces[f];
    for (int k = 0; k < 3; ++k)
      require(t[k] >= 0 && t[k] < n, ErrorKind::Data,
              "face " + std::to_string(f) + " references vertex " + std::to_string(t[k]) +
                  " outside [0, " + std::to_string(n) + ")");
    require(t[0] != t[1] && t[1] != t[2] && t[0] != t[2], ErrorKind::Data,
            "face " + std::to_string(f) + " is degenerate");
  }
  int comps = component_count();
  require(comps == 1, ErrorKind::Data,
          "mesh is disconnected: " + std::to_string(comps) + " components");
  if (features.size() > 0)
    require(features.rows() == n, ErrorKind::Data,
            "feature rows (" + std::to_string(features.rows()) + ") != vertex count (" +
                std::to_string(n) + ")");
}

std::vector<std::vector<int>> TriangleMesh::vertex_adjacency() const {
  std::vector<std::vector<int>> adj(positions.size());
  for (const auto& t : faces) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  }
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

int TriangleMesh::component_count() const {
  const int n = num_vertices();
  auto adj = vertex_adjacency();
  std::vector<char> seen(n, 0);
  int comps = 0;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++comps;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
  }
  return comps;
}

TriangleMesh make_icosphere(int level) {
  require(level >= 0 && level <= 6, ErrorKind::Contract, "icosphere level must be in [0, 6]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.positions = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1},
  };
  for (auto& p : mesh.positions) p.normalize();
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::Vector3d m = (mesh.positions[a] + mesh.positions[b]).normalized();
      int idx = static_cast<int>(mesh.positions.size());
      mesh.positions.push_back(m);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.faces.size() * 4);
    for (const auto& f : mesh.faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(next);
  }
  return mesh;
}

TriangleMesh make_cylinder_patch(int rings, int segments, double radius, double height) {
  require(rings >= 2 && segments >= 3, ErrorKind::Contract, "cylinder patch too small");
  TriangleMesh mesh;
  // Open angular sweep of 2/3 of the circle so the patch has a boundary.
  const double sweep = 4.0 * M_PI / 3.0;
  for (int r = 0; r < rings; ++r) {
    double z = height * (static_cast<double>(r) / (rings - 1) - 0.5);
    for (int s = 0; s < segments; ++s) {
      double a = sweep * static_cast<double>(s) / (segments - 1);
      mesh.positions.push_back({radius * std::cos(a), radius * std::sin(a), z});
    }
  }
  auto vid = [&](int r, int s) { return r * segments + s; };
  for (int r = 0; r + 1 < rings; ++r)
    for (int s = 0; s + 1 < segments; ++s) {
      mesh.faces.push_back({vid(r, s), vid(r, s + 1), vid(r + 1, s)});
      mesh.faces.push_back({vid(r, s + 1), vid(r + 1, s + 1), vid(r + 1, s)});
    }
  return mesh;
}

TriangleMesh load_mesh(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".off") return load_off(path);
  if (ext == ".obj") return load_obj(path);
  throw Error(ErrorKind::Data, "unsupported mesh format: " + path);
}

TriangleMesh load_off(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Data, "cannot open mesh file: " + path);
  std::string tok;
  in >> tok;
  require(tok == "OFF", ErrorKind::Data, path + ": missing OFF header");
  long nv = 0, nf = 0, ne = 0;
  in >> nv >> nf >> ne;
  require(in.good() && nv > 0 && nf >= 0, ErrorKind::Data, path + ": bad OFF counts");
  TriangleMesh mesh;
  mesh.positions.resize(nv);
  for (long i = 0; i < nv; ++i) {
    in >> mesh.positions[i].x() >> mesh.positions[i].y() >> mesh.positions[i].z();
    require(in.good(), ErrorKind::Data, path + ": truncated vertex list, expected " + std::to_string(nv));
  }
  mesh.faces.resize(nf);
  for (long i = 0; i < nf; ++i) {
    int cnt = 0;
    in >> cnt;
    require(in.good() && cnt == 3, ErrorKind::Data, path + ": only triangle faces are supported");
    in >> mesh.faces[i][0] >> mesh.faces[i][1] >> mesh.faces[i][2];
    require(in.good(), ErrorKind::Data, path + ": truncated face list, expected " + std::to_string(nf));
  }
  mesh.validate();
  return mesh;
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Data, "cannot open mesh file: " + path);
  TriangleMesh mesh;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "v") {
      Eigen::Vector3d p;
      require(static_cast<bool>(ls >> p.x() >> p.y() >> p.z()), ErrorKind::Data,
              path + ":" + std::to_string(lineno) + ": bad vertex line");
      mesh.positions.push_back(p);
    } else if (head == "f") {
      std::array<int, 3> f{};
      std::string ref;
      int k = 0;
      while (ls >> ref) {
        require(k < 3, ErrorKind::Data,
                path + ":" + std::to_string(lineno) + ": only triangle faces are supported");
        // "i", "i/t", "i/t/n", "i//n" all start with the vertex index.
        f[k++] = std::stoi(ref) - 1;
      }
      require(k == 3, ErrorKind::Data, path + ":" + std::to_string(lineno) + ": face needs 3 vertices");
      mesh.faces.push_back(f);
    }
  }
  mesh.validate();
  return mesh;
}

void save_off(const TriangleMesh& mesh, const std::string& path) {
  AtomicFile file(path);
  auto& out = file.stream();
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
  for (const auto& p : mesh.positions)
    out << fmt_double(p.x()) << ' ' << fmt_double(p.y()) << ' ' << fmt_double(p.z()) << '\n';
  for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  file.commit();
}

Eigen::MatrixXd load_features(const std::string& path, int expected_rows) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Data, "cannot open feature file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (row.empty()) continue;
    if (!rows.empty())
      require(row.size() == rows.front().size(), ErrorKind::Data,
              path + ": ragged feature rows");
    rows.push_back(std::move(row));
  }
  require(static_cast<int>(rows.size()) == expected_rows, ErrorKind::Data,
          path + ": expected " + std::to_string(expected_rows) + " feature rows, found " +
              std::to_string(rows.size()));
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void save_features(const Eigen::MatrixXd& features, const std::string& path) {
  AtomicFile file(path);
  auto& out = file.stream();
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      if (j) out << ' ';
      out << fmt_double(features(i, j));
    }
    out << '\n';
  }
  file.commit();
}

std::vector<int> load_labels(const std::string& path, int expected_rows) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Data, "cannot open label file: " + path);
  std::vector<int> labels;
  long v;
  while (in >> v) {
    require(v >= 0, ErrorKind::Data, path + ": negative label " + std::to_string(v));
    labels.push_back(static_cast<int>(v));
  }
  require(static_cast<int>(labels.size()) == expected_rows, ErrorKind::Data,
          path + ": expected " + std::to_string(expected_rows) + " labels, found " +
              std::to_string(labels.size()));
  return labels;
}

void save_labels(const std::vector<int>& labels, const std::string& path) {
  AtomicFile file(path);
  for (int l : labels) file.stream() << l << '\n';
  file.commit();
}

void save_vtk_labeled(const TriangleMesh& mesh, const std::vector<int>& labels,
                      const std::string& path) {
  require(static_cast<int>(labels.size()) == mesh.num_vertices(), ErrorKind::Contract,
          "label count does not match mesh");
  AtomicFile file(path);
  auto& out = file.stream();
  out << "# vtk DataFile Version 3.0\nparcelnet labels\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& p : mesh.positions)
    out << fmt_double(p.x()) << ' ' << fmt_double(p.y()) << ' ' << fmt_double(p.z()) << '\n';
  out << "POLYGONS " << mesh.num_faces() << ' ' << mesh.num_faces() * 4 << '\n';
  for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  out << "POINT_DATA " << mesh.num_vertices() << "\nSCALARS label int 1\nLOOKUP_TABLE default\n";
  for (int l : labels) out << l << '\n';
  file.commit();
}

}  // namespace parcelnet
