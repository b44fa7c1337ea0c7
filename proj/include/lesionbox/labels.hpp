#pragma once

#include <cstdint>
#include <vector>

#include "lesionbox/types.hpp"

namespace lesionbox {

/// One connected ground-truth lesion extracted from a binary mask.
/// The box is the tight voxel bound (min index .. max index + 1 per axis);
/// the center is the unweighted mean of the member voxel indices.
struct LesionInstance {
  int id = 0;
  std::int64_t voxel_count = 0;
  Box3 box;
  std::array<double, 3> center{0, 0, 0};
  double volume_mm3 = 0.0;
};

/// Partitions the nonzero voxels of a mask into maximal connected components
/// under 6- (faces) or 26- (faces+edges+corners) adjacency. Instances are
/// sorted by descending voxel_count (ties keep discovery order) and assigned
/// ids 1..K. Components smaller than min_voxels are dropped.
std::vector<LesionInstance> connected_components(const Volume3& mask,
                                                 int connectivity = 26,
                                                 std::int64_t min_voxels = 1);

/// Per-voxel component id (0 = background), ids matching the instances
/// returned by connected_components for the same mask and connectivity
/// (no min_voxels filtering).
std::vector<int> component_labels(const Volume3& mask, int connectivity = 26);

/// Unweighted per-axis mean of voxel indices. Throws EmptyInstance.
std::array<double, 3> center_of_mass(const std::vector<std::array<int, 3>>& voxels);

/// Euclidean distance in mm after per-axis multiplication by spacing.
double compare_centers(const std::array<double, 3>& predicted,
                       const std::array<double, 3>& truth,
                       const std::array<double, 3>& spacing);

} // namespace lesionbox
