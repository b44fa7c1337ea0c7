#include "lesionbox/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace lesionbox {

double box_volume(const Box3& b) {
  double v = 1.0;
  for (int i = 0; i < 3; ++i)
    v *= std::max(0.0, b.max[i] - b.min[i]);
  return v;
}

double intersection_volume(const Box3& a, const Box3& b) {
  double v = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double lo = std::max(a.min[i], b.min[i]);
    const double hi = std::min(a.max[i], b.max[i]);
    if (hi <= lo)
      return 0.0;
    v *= hi - lo;
  }
  return v;
}

Box3 enclosing_box(const Box3& a, const Box3& b) {
  Box3 c;
  for (int i = 0; i < 3; ++i) {
    c.min[i] = std::min(a.min[i], b.min[i]);
    c.max[i] = std::max(a.max[i], b.max[i]);
  }
  return c;
}

double iou(const Box3& a, const Box3& b) {
  const double inter = intersection_volume(a, b);
  const double uni = box_volume(a) + box_volume(b) - inter;
  if (uni <= 0.0)
    return 0.0;
  return inter / uni;
}

double giou(const Box3& a, const Box3& b) {
  const double base = iou(a, b);
  const double c = box_volume(enclosing_box(a, b));
  if (c <= 0.0)
    return base;
  const double inter = intersection_volume(a, b);
  const double uni = box_volume(a) + box_volume(b) - inter;
  return base - (c - uni) / c;
}

std::vector<Detection> nms(const std::vector<Detection>& dets,
                           double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) {
                     return dets[i].score > dets[j].score;
                   });

  std::vector<Detection> kept;
  std::vector<bool> suppressed(dets.size(), false);
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    if (suppressed[i])
      continue;
    kept.push_back(dets[i]);
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (!suppressed[j] && iou(dets[i].box, dets[j].box) > iou_threshold)
        suppressed[j] = true;
    }
  }
  return kept;
}

} // namespace lesionbox
