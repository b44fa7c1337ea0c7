#pragma once

#include <vector>

#include "lesionbox/types.hpp"

namespace lesionbox {

double box_volume(const Box3& b);

/// Intersection volume of two boxes (0 when they do not overlap).
double intersection_volume(const Box3& a, const Box3& b);

/// Smallest axis-aligned box enclosing both inputs.
Box3 enclosing_box(const Box3& a, const Box3& b);

/// Intersection over union. Defined as 0 when the union volume is 0.
double iou(const Box3& a, const Box3& b);

/// Generalized IoU: iou(a,b) - (|C| - |union|)/|C| with C the enclosing box.
/// Falls back to iou when |C| = 0 (both boxes degenerate and coincident).
double giou(const Box3& a, const Box3& b);

/// Greedy non-maximum suppression. Repeatedly keeps the highest-score
/// remaining detection and discards remaining detections with IoU strictly
/// above the threshold against it. Ties in score keep the earlier input
/// index first. Output is sorted by descending score.
std::vector<Detection> nms(const std::vector<Detection>& dets,
                           double iou_threshold);

} // namespace lesionbox
