#pragma once

#include "lesionbox/types.hpp"

namespace lesionbox {

/// Result of crop_nonzero: the cropped volume plus the voxel index of the
/// crop origin in the source volume.
struct CropResult {
  Volume3 volume;
  std::array<int, 3> offset{0, 0, 0};
};

/// Minimal axis-aligned sub-volume containing all strictly nonzero voxels.
/// An all-zero volume is returned unchanged with offset (0,0,0).
CropResult crop_nonzero(const Volume3& vol);

/// Standardizes to zero mean and unit population standard deviation over all
/// voxels: out = (in - mu) / max(sigma, 1e-8). Constant volumes map to zero.
Volume3 zscore(const Volume3& vol);

enum class ResampleMode { Trilinear, Nearest };

/// Resamples to the target spacing. Output dims are
/// round(dims * spacing / target), clamped to >= 1. Sample points align the
/// voxel centers of the first and last voxel per axis, with edge clamping;
/// resampling to the source spacing reproduces the input bit-for-bit. The
/// affine is updated so voxel-center world positions are preserved.
Volume3 resample(const Volume3& vol, const std::array<double, 3>& target_spacing,
                 ResampleMode mode);

} // namespace lesionbox
