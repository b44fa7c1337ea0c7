#pragma once

#include <cstdint>
#include <vector>

#include "lesionbox/labels.hpp"
#include "lesionbox/types.hpp"

namespace lesionbox {

/// Parameters of the synthetic TOF-MRA-like volume generator.
struct PhantomSpec {
  std::uint64_t seed = 0;
  std::array<int, 3> dims{64, 64, 64};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  int n_lesions = 3;
  std::pair<double, double> lesion_radius_range{2.0, 4.0}; // mm
  int vessel_count = 3;
  double background_intensity = 0.0;
  double vessel_intensity = 100.0;
  double lesion_intensity = 200.0;
  double noise_sigma = 0.0;

  void validate() const;
};

struct PhantomResult {
  Volume3 image;
  Volume3 mask; // binary lesion mask
  std::vector<LesionInstance> truth;
};

/// Deterministic function of the spec: random-walk vessel tubes, then
/// non-overlapping lesion ellipsoids tangent to a vessel (a voxel belongs to
/// a lesion iff its center lies inside the ellipsoid), then additive Gaussian
/// noise on the image. Truth comes from connected_components(mask, 26).
/// Throws PlacementFailure when a lesion cannot be placed in 1000 attempts.
PhantomResult generate(const PhantomSpec& spec);

/// Classical baseline detector: binarize at intensity_threshold, 26-connected
/// components, drop components below min_voxels, emit each component's tight
/// box with score = clamp(mean component intensity / max volume intensity,
/// 0, 1).
std::vector<Detection> baseline_detect(const Volume3& image,
                                       double intensity_threshold,
                                       std::int64_t min_voxels);

} // namespace lesionbox
