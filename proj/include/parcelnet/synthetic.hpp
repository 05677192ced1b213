#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "parcelnet/mesh.hpp"

namespace parcelnet {

struct SynthLabels {
  std::vector<int> labels;    // per vertex, in [0, regions)
  Eigen::MatrixXd features;   // N x 3
  std::vector<int> seeds;     // the sampled seed vertices
};

// Geodesic-Voronoi ground truth: `regions` seed vertices sampled from `seed`,
// every vertex labeled by its geodesically nearest seed (ties by seed order,
// which keeps each region connected). Features are one-hot labels projected
// to 3 dims by a random matrix plus Gaussian noise.
//
// `projection` (regions x 3) is the label-to-feature encoding; pass the same
// matrix for every subject of a dataset so the mapping is learnable across
// subjects. When null, a matrix is drawn deterministically from `seed`.
SynthLabels synth_labels_voronoi(const TriangleMesh& mesh, int regions, uint64_t seed,
                                 const Eigen::MatrixXd* projection = nullptr,
                                 double noise_sigma = 0.3);

// Projection drawn from N(0,1) entries; the dataset-level "fixed random matrix".
Eigen::MatrixXd make_label_projection(int regions, uint64_t seed);

struct SynthDatasetSpec {
  int level = 3;      // icosphere subdivision level
  int regions = 8;
  int subjects = 10;
  uint64_t seed = 7;
  double noise_sigma = 0.3;
};

// Writes subject_###.off/.feat.txt/.labels.txt plus manifest.txt under
// out_dir. Re-running with the same spec produces identical bytes.
// Returns the manifest path.
std::string write_synth_dataset(const SynthDatasetSpec& spec, const std::string& out_dir);

}  // namespace parcelnet
