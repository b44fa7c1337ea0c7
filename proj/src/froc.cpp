#include "lesionbox/froc.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "lesionbox/geometry.hpp"

namespace lesionbox {

MatchResult match_scan(const ScanResult& scan, double iou_threshold) {
  MatchResult res;
  res.detection_gt.assign(scan.detections.size(), -1);
  res.gt_hit.assign(scan.gts.size(), false);

  std::vector<std::size_t> order(scan.detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) {
                     return scan.detections[i].score > scan.detections[j].score;
                   });

  for (std::size_t d : order) {
    double best = -1.0;
    int best_gt = -1;
    for (std::size_t g = 0; g < scan.gts.size(); ++g) {
      if (res.gt_hit[g])
        continue;
      const double v = iou(scan.detections[d].box, scan.gts[g]);
      if (v >= iou_threshold && v > best) { // ties keep the lowest gt index
        best = v;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt >= 0) {
      res.detection_gt[d] = best_gt;
      res.gt_hit[std::size_t(best_gt)] = true;
    }
  }
  return res;
}

FrocCurve froc_curve(const std::vector<ScanResult>& scans,
                     double iou_threshold) {
  if (scans.empty())
    throw Error("froc_curve: need at least one scan");

  FrocCurve curve;
  curve.num_scans = static_cast<int>(scans.size());
  for (const auto& s : scans)
    curve.num_gts += std::int64_t(s.gts.size());

  std::set<double, std::greater<double>> cuts;
  for (const auto& s : scans)
    for (const auto& d : s.detections)
      cuts.insert(d.score);

  for (double cut : cuts) {
    std::int64_t tp = 0, fp = 0;
    for (const auto& s : scans) {
      ScanResult kept{s.scan_id, s.gts, {}};
      for (const auto& d : s.detections)
        if (d.score >= cut)
          kept.detections.push_back(d);
      const MatchResult m = match_scan(kept, iou_threshold);
      for (int g : m.detection_gt)
        (g >= 0 ? tp : fp) += 1;
    }
    const double fpps = double(fp) / double(curve.num_scans);
    const double sens =
        curve.num_gts > 0 ? double(tp) / double(curve.num_gts) : 0.0;
    curve.points.emplace_back(fpps, sens);
  }

  const bool has_zero =
      !curve.points.empty() && curve.points.front().first == 0.0;
  if (!has_zero)
    curve.points.insert(curve.points.begin(), {0.0, 0.0});
  return curve;
}

double sensitivity_at(const FrocCurve& curve, double fpps_query) {
  double best = 0.0;
  for (const auto& [fpps, sens] : curve.points)
    if (fpps <= fpps_query)
      best = std::max(best, sens);
  return best;
}

std::string froc_csv(const FrocCurve& curve) {
  std::string out = "fpps,sensitivity\n";
  char buf[64];
  for (const auto& [fpps, sens] : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", fpps, sens);
    out += buf;
  }
  return out;
}

std::string froc_svg(const FrocCurve& curve) {
  const double w = 640, h = 480, ml = 70, mr = 20, mt = 20, mb = 60;
  double max_fpps = 1e-9;
  for (const auto& p : curve.points)
    max_fpps = std::max(max_fpps, p.first);

  auto px = [&](double fpps) {
    return ml + (fpps / max_fpps) * (w - ml - mr);
  };
  auto py = [&](double sens) { return h - mb - sens * (h - mt - mb); };

  char buf[256];
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"480\" viewBox=\"0 0 640 480\">\n";
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"black\"/>\n",
                ml, h - mb, w - mr, h - mb);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"black\"/>\n",
                ml, mt, ml, h - mb);
  svg += buf;
  svg += "<text x=\"340\" y=\"470\" text-anchor=\"middle\" "
         "font-size=\"16\">FPPS</text>\n";
  svg += "<text x=\"20\" y=\"250\" text-anchor=\"middle\" font-size=\"16\" "
         "transform=\"rotate(-90 20 250)\">Sensitivity</text>\n";

  std::string pts;
  for (const auto& [fpps, sens] : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(fpps), py(sens));
    pts += buf;
  }
  if (!pts.empty())
    pts.pop_back();
  svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" "
         "points=\"" +
         pts + "\"/>\n";
  svg += "</svg>\n";
  return svg;
}

FrocReport froc_report(const std::vector<ScanResult>& scans,
                       double iou_threshold,
                       const std::vector<double>& operating_points) {
  FrocReport rep;
  rep.curve = froc_curve(scans, iou_threshold);
  for (double q : operating_points)
    rep.table.emplace_back(q, sensitivity_at(rep.curve, q));
  rep.csv = froc_csv(rep.curve);
  rep.svg = froc_svg(rep.curve);
  return rep;
}

} // namespace lesionbox
