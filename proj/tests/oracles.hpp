// Independent reference implementations used to check the library. These are
// deliberately written from the definitions, not from the library code paths
// they verify.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <set>
#include <vector>

#include "lesionbox/types.hpp"

namespace oracles {

// splitmix64: tiny deterministic stream for Monte-Carlo sampling
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
};

// Monte-Carlo IoU estimate: uniform samples over the enclosing box of the
// pair, counting membership in the intersection and the union.
inline double mc_iou(const lesionbox::Box3& a, const lesionbox::Box3& b,
                     std::uint64_t samples, std::uint64_t seed) {
  double lo[3], hi[3];
  for (int i = 0; i < 3; ++i) {
    lo[i] = std::min(a.min[i], b.min[i]);
    hi[i] = std::max(a.max[i], b.max[i]);
  }
  SplitMix64 rng(seed);
  std::uint64_t in_inter = 0, in_union = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    double p[3];
    for (int i = 0; i < 3; ++i)
      p[i] = lo[i] + rng.uniform() * (hi[i] - lo[i]);
    bool in_a = true, in_b = true;
    for (int i = 0; i < 3; ++i) {
      in_a = in_a && p[i] >= a.min[i] && p[i] <= a.max[i];
      in_b = in_b && p[i] >= b.min[i] && p[i] <= b.max[i];
    }
    in_inter += in_a && in_b;
    in_union += in_a || in_b;
  }
  if (in_union == 0)
    return 0.0;
  return double(in_inter) / double(in_union);
}

// Breadth-first connected components over a binary voxel grid. Returns the
// partition as a canonical set of sorted linear-index lists.
inline std::vector<std::vector<std::size_t>>
bfs_components(const std::vector<char>& mask, const std::array<int, 3>& dims,
               int connectivity) {
  auto linear = [&](int x, int y, int z) {
    return std::size_t(z) * dims[1] * dims[0] + std::size_t(y) * dims[0] +
           std::size_t(x);
  };
  std::vector<char> seen(mask.size(), 0);
  std::vector<std::vector<std::size_t>> comps;
  for (int z0 = 0; z0 < dims[2]; ++z0)
    for (int y0 = 0; y0 < dims[1]; ++y0)
      for (int x0 = 0; x0 < dims[0]; ++x0) {
        const std::size_t start = linear(x0, y0, z0);
        if (!mask[start] || seen[start])
          continue;
        std::vector<std::size_t> comp;
        std::deque<std::array<int, 3>> queue{{x0, y0, z0}};
        seen[start] = 1;
        while (!queue.empty()) {
          const auto [x, y, z] = queue.front();
          queue.pop_front();
          comp.push_back(linear(x, y, z));
          for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
              for (int dx = -1; dx <= 1; ++dx) {
                const int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
                if (manhattan == 0)
                  continue;
                if (connectivity == 6 && manhattan != 1)
                  continue;
                const int nx = x + dx, ny = y + dy, nz = z + dz;
                if (nx < 0 || ny < 0 || nz < 0 || nx >= dims[0] ||
                    ny >= dims[1] || nz >= dims[2])
                  continue;
                const std::size_t ni = linear(nx, ny, nz);
                if (mask[ni] && !seen[ni]) {
                  seen[ni] = 1;
                  queue.push_back({nx, ny, nz});
                }
              }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
  std::sort(comps.begin(), comps.end());
  return comps;
}

// FROC reference: enumerates every distinct score cut and recomputes greedy
// matching from scratch against the definitions in the evaluation contract.
struct OracleScan {
  std::vector<lesionbox::Box3> gts;
  std::vector<lesionbox::Detection> dets;
};

inline double oracle_iou(const lesionbox::Box3& a, const lesionbox::Box3& b) {
  double inter = 1.0, va = 1.0, vb = 1.0;
  for (int i = 0; i < 3; ++i) {
    va *= std::max(0.0, a.max[i] - a.min[i]);
    vb *= std::max(0.0, b.max[i] - b.min[i]);
    inter *= std::max(0.0, std::min(a.max[i], b.max[i]) -
                               std::max(a.min[i], b.min[i]));
  }
  const double uni = va + vb - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

inline std::vector<std::pair<double, double>>
froc_points(const std::vector<OracleScan>& scans, double iou_threshold) {
  std::int64_t num_gts = 0;
  for (const auto& s : scans)
    num_gts += std::int64_t(s.gts.size());

  std::set<double> score_set;
  for (const auto& s : scans)
    for (const auto& d : s.dets)
      score_set.insert(d.score);
  std::vector<double> cuts(score_set.rbegin(), score_set.rend());

  std::vector<std::pair<double, double>> points;
  for (double cut : cuts) {
    std::int64_t tp = 0, fp = 0;
    for (const auto& s : scans) {
      std::vector<std::size_t> order;
      for (std::size_t i = 0; i < s.dets.size(); ++i)
        if (s.dets[i].score >= cut)
          order.push_back(i);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t i, std::size_t j) {
                         return s.dets[i].score > s.dets[j].score;
                       });
      std::vector<bool> used(s.gts.size(), false);
      for (std::size_t di : order) {
        int best_gt = -1;
        double best = -1.0;
        for (std::size_t g = 0; g < s.gts.size(); ++g) {
          if (used[g])
            continue;
          const double v = oracle_iou(s.dets[di].box, s.gts[g]);
          if (v >= iou_threshold && v > best) {
            best = v;
            best_gt = int(g);
          }
        }
        if (best_gt >= 0) {
          used[std::size_t(best_gt)] = true;
          ++tp;
        } else {
          ++fp;
        }
      }
    }
    points.emplace_back(double(fp) / double(scans.size()),
                        num_gts > 0 ? double(tp) / double(num_gts) : 0.0);
  }
  if (points.empty() || points.front().first != 0.0)
    points.insert(points.begin(), {0.0, 0.0});
  return points;
}

} // namespace oracles
