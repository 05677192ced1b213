#include "parcelnet/synthetic.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "parcelnet/error.hpp"
#include "parcelnet/rng.hpp"
#include "parcelnet/surface_graph.hpp"

namespace parcelnet {

Eigen::MatrixXd make_label_projection(int regions, uint64_t seed) {
  Rng rng = Rng(seed).fork(hash_str("label-projection"));
  Eigen::MatrixXd p(regions, 3);
  for (int i = 0; i < regions; ++i)
    for (int j = 0; j < 3; ++j) p(i, j) = rng.normal();
  return p;
}

SynthLabels synth_labels_voronoi(const TriangleMesh& mesh, int regions, uint64_t seed,
                                 const Eigen::MatrixXd* projection, double noise_sigma) {
  const int n = mesh.num_vertices();
  require(regions >= 1 && regions <= n, ErrorKind::Contract,
          "regions must be in [1, vertex count]");

  Rng rng(seed);
  // Partial Fisher-Yates: `regions` distinct seed vertices.
  auto pool = identity_order(n);
  std::vector<int> seeds(regions);
  for (int k = 0; k < regions; ++k) {
    int j = k + rng.uniform_int(n - k);
    std::swap(pool[k], pool[j]);
    seeds[k] = pool[k];
  }

  SynthLabels out;
  out.seeds = seeds;
  out.labels.assign(n, 0);
  std::vector<double> best(n, kInf);
  for (int s = 0; s < regions; ++s) {
    auto dist = geodesic_distances(mesh, seeds[s]);
    for (int v = 0; v < n; ++v) {
      // Lexicographic (distance, seed index): ties go to the earlier seed,
      // which keeps every Voronoi cell geodesically connected.
      if (dist[v] < best[v]) {
        best[v] = dist[v];
        out.labels[v] = s;
      }
    }
  }

  Eigen::MatrixXd proj =
      projection ? *projection : make_label_projection(regions, seed);
  require(proj.rows() == regions && proj.cols() == 3, ErrorKind::Contract,
          "projection must be regions x 3");

  Rng noise = rng.fork(hash_str("feature-noise"));
  out.features.resize(n, 3);
  for (int v = 0; v < n; ++v)
    for (int j = 0; j < 3; ++j)
      out.features(v, j) = proj(out.labels[v], j) + noise_sigma * noise.normal();
  return out;
}

std::string write_synth_dataset(const SynthDatasetSpec& spec, const std::string& out_dir) {
  require(spec.subjects >= 1, ErrorKind::Config, "subjects must be >= 1");
  require(spec.regions >= 2, ErrorKind::Config, "regions must be >= 2");
  std::filesystem::create_directories(out_dir);

  TriangleMesh mesh = make_icosphere(spec.level);
  Eigen::MatrixXd proj = make_label_projection(spec.regions, spec.seed);

  std::string manifest_path = out_dir + "/manifest.txt";
  std::string tmp = manifest_path + ".tmp";
  std::ofstream manifest(tmp);
  require(manifest.good(), ErrorKind::Data, "cannot write " + manifest_path);

  for (int s = 0; s < spec.subjects; ++s) {
    char id[32];
    std::snprintf(id, sizeof(id), "subject_%03d", s);
    uint64_t subject_seed = splitmix64(spec.seed ^ splitmix64(0x5eedba5e + s));
    SynthLabels synth =
        synth_labels_voronoi(mesh, spec.regions, subject_seed, &proj, spec.noise_sigma);

    std::string mesh_file = std::string(id) + ".off";
    std::string feat_file = std::string(id) + ".feat.txt";
    std::string label_file = std::string(id) + ".labels.txt";
    save_off(mesh, out_dir + "/" + mesh_file);
    save_features(synth.features, out_dir + "/" + feat_file);
    save_labels(synth.labels, out_dir + "/" + label_file);
    manifest << id << ' ' << mesh_file << ' ' << feat_file << ' ' << label_file << '\n';
  }
  manifest.close();
  require(manifest.good(), ErrorKind::Data, "write failed: " + manifest_path);
  std::filesystem::rename(tmp, manifest_path);
  return manifest_path;
}

}  // namespace parcelnet
