#pragma once

#include <cstdint>
#include <vector>

#include "lesionbox/types.hpp"

namespace lesionbox {

/// Multi-level anchor grid configuration. Defaults: patch 256x224x56,
/// strides [4, 8, 16], three sizes per level derived from the stride,
/// positive/negative IoU thresholds 0.5/0.4.
struct AnchorConfig {
  std::array<int, 3> patch_dims{256, 224, 56};
  std::vector<int> levels{4, 8, 16};
  // sizes_per_level[l] lists anchor edge-length triples for level l
  std::vector<std::vector<std::array<double, 3>>> sizes_per_level;
  double pos_iou = 0.5;
  double neg_iou = 0.4;

  AnchorConfig() {
    for (int s : levels)
      sizes_per_level.push_back(default_sizes(s));
  }

  static std::vector<std::array<double, 3>> default_sizes(int stride) {
    const double s = stride;
    return {{2 * s, 2 * s, 2 * s}, {3 * s, 3 * s, 3 * s}, {4 * s, 4 * s, 2 * s}};
  }

  void validate() const;

  /// Closed-form anchor count: sum over levels of
  /// prod_i ceil(patch_dims[i]/stride) * num_sizes.
  std::int64_t anchor_count() const;
};

/// Per-anchor role after ground-truth assignment.
enum class AnchorRole : std::uint8_t { Negative, Positive, Ignore };

struct AnchorAssignment {
  struct Entry {
    AnchorRole role = AnchorRole::Negative;
    int gt = -1; // matched ground-truth index when positive
  };
  std::vector<Entry> anchors;
  std::vector<int> forced_anchor; // per ground-truth box
};

/// Tiles anchors over the patch: per level with stride s, ceil(dim/s) cells
/// per axis, cells centered at (k+0.5)*s, one anchor per configured size.
/// Ordering: level-major, then z, y, x, then size index.
std::vector<Box3> generate_anchors(const AnchorConfig& cfg);

/// Retina-style assignment: max-IoU >= pos_iou -> positive (argmax gt, ties
/// to the lowest gt index); max-IoU < neg_iou -> negative; otherwise ignore.
/// Every gt then forces its best-IoU anchor positive, so each gt has at
/// least one positive anchor even when all IoUs fall below pos_iou.
AnchorAssignment assign_anchors(const std::vector<Box3>& anchors,
                                const std::vector<Box3>& gts,
                                const AnchorConfig& cfg);

/// (dx,dy,dz, lx,ly,lz): center offsets normalized by the anchor extent and
/// log extent ratios. Throws DegenerateGt when the gt has a zero extent.
std::array<double, 6> encode_box(const Box3& anchor, const Box3& gt);

/// Exact inverse of encode_box.
Box3 decode_box(const Box3& anchor, const std::array<double, 6>& target);

} // namespace lesionbox
