#pragma once

#include <string>
#include <vector>

#include "lesionbox/types.hpp"

namespace lesionbox {

/// One scan's ground-truth boxes and candidate detections.
struct ScanResult {
  std::string scan_id;
  std::vector<Box3> gts;
  std::vector<Detection> detections;
};

/// Per-scan greedy matching result.
struct MatchResult {
  std::vector<int> detection_gt; // matched gt index per detection, -1 = FP
  std::vector<bool> gt_hit;      // per gt
};

/// Monotone (FPPS, sensitivity) operating points, ascending in fpps.
struct FrocCurve {
  std::vector<std::pair<double, double>> points; // (fpps, sensitivity)
  int num_scans = 0;
  std::int64_t num_gts = 0;
};

/// Greedy score-ordered matching: detections in descending score (ties keep
/// input order); a detection is a TP when its IoU with some unmatched gt is
/// >= iou_threshold, matched to the highest-IoU such gt (ties to the lowest
/// gt index); each gt matches at most once.
MatchResult match_scan(const ScanResult& scan, double iou_threshold);

/// Pools all detection scores; for each distinct score (descending) keeps
/// detections with score >= cut, matches per scan, and records
/// (total FP / num_scans, total TP / num_gts). Prepends (0,0) when there is
/// no fpps-0 point.
FrocCurve froc_curve(const std::vector<ScanResult>& scans,
                     double iou_threshold);

/// Maximum sensitivity among curve points with fpps <= fpps_query
/// (step interpolation); 0 when no point qualifies.
double sensitivity_at(const FrocCurve& curve, double fpps_query);

/// CSV: header "fpps,sensitivity" then one row per point, 6 decimals.
std::string froc_csv(const FrocCurve& curve);

/// Single-polyline SVG plot with axis labels "FPPS" and "Sensitivity".
std::string froc_svg(const FrocCurve& curve);

struct FrocReport {
  FrocCurve curve;
  // (operating point, sensitivity_at) rows in the input order
  std::vector<std::pair<double, double>> table;
  std::string csv;
  std::string svg;
};

FrocReport froc_report(const std::vector<ScanResult>& scans,
                       double iou_threshold,
                       const std::vector<double>& operating_points);

} // namespace lesionbox
