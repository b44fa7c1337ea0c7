#include "lesionbox/anchors.hpp"

#include <cmath>

#include "lesionbox/geometry.hpp"

namespace lesionbox {

void AnchorConfig::validate() const {
  if (!(0.0 <= neg_iou && neg_iou <= pos_iou && pos_iou <= 1.0))
    throw Error("AnchorConfig: need 0 <= neg_iou <= pos_iou <= 1");
  for (int i = 0; i < 3; ++i)
    if (patch_dims[i] < 1)
      throw Error("AnchorConfig: patch_dims must be >= 1");
  if (levels.empty() || levels.size() != sizes_per_level.size())
    throw Error("AnchorConfig: one size list per level required");
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (levels[l] < 1)
      throw Error("AnchorConfig: strides must be >= 1");
    if (sizes_per_level[l].empty())
      throw Error("AnchorConfig: each level needs at least one size");
    for (const auto& sz : sizes_per_level[l])
      for (double e : sz)
        if (!(e > 0.0))
          throw Error("AnchorConfig: anchor sizes must be > 0");
  }
}

std::int64_t AnchorConfig::anchor_count() const {
  std::int64_t total = 0;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    std::int64_t cells = 1;
    for (int i = 0; i < 3; ++i)
      cells *= (patch_dims[i] + levels[l] - 1) / levels[l];
    total += cells * std::int64_t(sizes_per_level[l].size());
  }
  return total;
}

std::vector<Box3> generate_anchors(const AnchorConfig& cfg) {
  cfg.validate();
  std::vector<Box3> anchors;
  anchors.reserve(static_cast<std::size_t>(cfg.anchor_count()));
  for (std::size_t l = 0; l < cfg.levels.size(); ++l) {
    const int s = cfg.levels[l];
    std::array<int, 3> cells;
    for (int i = 0; i < 3; ++i)
      cells[i] = (cfg.patch_dims[i] + s - 1) / s;
    for (int z = 0; z < cells[2]; ++z)
      for (int y = 0; y < cells[1]; ++y)
        for (int x = 0; x < cells[0]; ++x) {
          const double cx = (x + 0.5) * s;
          const double cy = (y + 0.5) * s;
          const double cz = (z + 0.5) * s;
          for (const auto& sz : cfg.sizes_per_level[l]) {
            Box3 b;
            b.min = {cx - sz[0] / 2, cy - sz[1] / 2, cz - sz[2] / 2};
            b.max = {cx + sz[0] / 2, cy + sz[1] / 2, cz + sz[2] / 2};
            anchors.push_back(b);
          }
        }
  }
  return anchors;
}

AnchorAssignment assign_anchors(const std::vector<Box3>& anchors,
                                const std::vector<Box3>& gts,
                                const AnchorConfig& cfg) {
  cfg.validate();
  AnchorAssignment out;
  out.anchors.resize(anchors.size());
  out.forced_anchor.assign(gts.size(), -1);
  if (gts.empty())
    return out; // all negative

  // per-gt best anchor for the forcing pass
  std::vector<double> best_gt_iou(gts.size(), -1.0);

  for (std::size_t a = 0; a < anchors.size(); ++a) {
    double best = -1.0;
    int best_gt = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double v = iou(anchors[a], gts[g]);
      if (v > best) { // ties keep the lowest gt index
        best = v;
        best_gt = static_cast<int>(g);
      }
      if (v > best_gt_iou[g]) { // ties keep the lowest anchor index
        best_gt_iou[g] = v;
        out.forced_anchor[g] = static_cast<int>(a);
      }
    }
    if (best >= cfg.pos_iou)
      out.anchors[a] = {AnchorRole::Positive, best_gt};
    else if (best < cfg.neg_iou)
      out.anchors[a] = {AnchorRole::Negative, -1};
    else
      out.anchors[a] = {AnchorRole::Ignore, -1};
  }

  // Forcing pass: each gt claims its best-IoU anchor. If an earlier gt
  // already claimed it, fall back to the best unclaimed anchor so every gt
  // keeps at least one positive anchor.
  std::vector<bool> claimed(anchors.size(), false);
  for (std::size_t g = 0; g < gts.size(); ++g) {
    int a = out.forced_anchor[g];
    if (a >= 0 && claimed[static_cast<std::size_t>(a)]) {
      a = -1;
      double best = -1.0;
      for (std::size_t c = 0; c < anchors.size(); ++c) {
        if (claimed[c])
          continue;
        const double v = iou(anchors[c], gts[g]);
        if (v > best) {
          best = v;
          a = static_cast<int>(c);
        }
      }
      out.forced_anchor[g] = a;
    }
    if (a >= 0) {
      claimed[static_cast<std::size_t>(a)] = true;
      out.anchors[static_cast<std::size_t>(a)] = {AnchorRole::Positive,
                                                  static_cast<int>(g)};
    }
  }
  return out;
}

namespace {
void split(const Box3& b, std::array<double, 3>& center,
           std::array<double, 3>& extent) {
  for (int i = 0; i < 3; ++i) {
    center[i] = (b.min[i] + b.max[i]) / 2.0;
    extent[i] = b.max[i] - b.min[i];
  }
}
} // namespace

std::array<double, 6> encode_box(const Box3& anchor, const Box3& gt) {
  std::array<double, 3> ac, ae, gc, ge;
  split(anchor, ac, ae);
  split(gt, gc, ge);
  std::array<double, 6> t;
  for (int i = 0; i < 3; ++i) {
    if (!(ae[i] > 0.0))
      throw Error("encode_box: anchor must have positive extent");
    if (!(ge[i] > 0.0))
      throw DegenerateGt("encode_box: gt extent is zero on an axis");
    t[i] = (gc[i] - ac[i]) / ae[i];
    t[i + 3] = std::log(ge[i] / ae[i]);
  }
  return t;
}

Box3 decode_box(const Box3& anchor, const std::array<double, 6>& target) {
  std::array<double, 3> ac, ae;
  split(anchor, ac, ae);
  Box3 out;
  for (int i = 0; i < 3; ++i) {
    const double c = ac[i] + target[i] * ae[i];
    const double e = ae[i] * std::exp(target[i + 3]);
    out.min[i] = c - e / 2.0;
    out.max[i] = c + e / 2.0;
  }
  return out;
}

} // namespace lesionbox
