#include "lesionbox/labels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lesionbox {
namespace {

std::vector<std::array<int, 3>> neighbor_offsets(int connectivity) {
  std::vector<std::array<int, 3>> offs;
  if (connectivity == 6) {
    offs = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  } else if (connectivity == 26) {
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (dx || dy || dz)
            offs.push_back({dx, dy, dz});
  } else {
    throw Error("connectivity must be 6 or 26");
  }
  return offs;
}

struct RawComponent {
  std::int64_t count = 0;
  std::array<int, 3> lo{}, hi{};
  std::array<double, 3> sum{0, 0, 0};
};

// Flood fill in scan order. labels[i] gets the 1-based discovery index.
std::vector<RawComponent> flood(const Volume3& mask, int connectivity,
                                std::vector<int>& labels) {
  const auto offs = neighbor_offsets(connectivity);
  const auto& d = mask.dims;
  labels.assign(mask.voxel_count(), 0);
  std::vector<RawComponent> comps;
  std::vector<std::array<int, 3>> stack;

  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x) {
        const std::size_t idx = mask.index(x, y, z);
        if (labels[idx] != 0 || mask.data[idx] == 0.0)
          continue;
        const int id = static_cast<int>(comps.size()) + 1;
        RawComponent comp;
        comp.lo = comp.hi = {x, y, z};
        labels[idx] = id;
        stack.assign(1, {x, y, z});
        while (!stack.empty()) {
          const auto [cx, cy, cz] = stack.back();
          stack.pop_back();
          ++comp.count;
          const int cur[3] = {cx, cy, cz};
          for (int i = 0; i < 3; ++i) {
            comp.lo[i] = std::min(comp.lo[i], cur[i]);
            comp.hi[i] = std::max(comp.hi[i], cur[i]);
            comp.sum[i] += cur[i];
          }
          for (const auto& o : offs) {
            const int nx = cx + o[0], ny = cy + o[1], nz = cz + o[2];
            if (nx < 0 || ny < 0 || nz < 0 || nx >= d[0] || ny >= d[1] ||
                nz >= d[2])
              continue;
            const std::size_t nidx = mask.index(nx, ny, nz);
            if (labels[nidx] == 0 && mask.data[nidx] != 0.0) {
              labels[nidx] = id;
              stack.push_back({nx, ny, nz});
            }
          }
        }
        comps.push_back(comp);
      }
  return comps;
}

// Discovery-order rank -> descending-voxel-count rank (stable on ties).
std::vector<int> size_ranking(const std::vector<RawComponent>& comps) {
  std::vector<int> order(comps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return comps[std::size_t(a)].count > comps[std::size_t(b)].count;
  });
  std::vector<int> rank(comps.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    rank[std::size_t(order[i])] = static_cast<int>(i);
  return rank;
}

} // namespace

std::vector<LesionInstance> connected_components(const Volume3& mask,
                                                 int connectivity,
                                                 std::int64_t min_voxels) {
  std::vector<int> labels;
  const auto comps = flood(mask, connectivity, labels);
  const auto rank = size_ranking(comps);
  const double vox_mm3 = mask.spacing[0] * mask.spacing[1] * mask.spacing[2];

  std::vector<const RawComponent*> sorted(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i)
    sorted[std::size_t(rank[i])] = &comps[i];

  std::vector<LesionInstance> out;
  for (const RawComponent* c : sorted) {
    if (c->count < min_voxels)
      continue;
    LesionInstance inst;
    inst.id = static_cast<int>(out.size()) + 1;
    inst.voxel_count = c->count;
    for (int i = 0; i < 3; ++i) {
      inst.box.min[i] = c->lo[i];
      inst.box.max[i] = c->hi[i] + 1;
      inst.center[i] = c->sum[i] / double(c->count);
    }
    inst.volume_mm3 = double(c->count) * vox_mm3;
    out.push_back(inst);
  }
  return out;
}

std::vector<int> component_labels(const Volume3& mask, int connectivity) {
  std::vector<int> labels;
  const auto comps = flood(mask, connectivity, labels);
  const auto rank = size_ranking(comps);
  for (int& l : labels)
    if (l != 0)
      l = rank[std::size_t(l - 1)] + 1;
  return labels;
}

std::array<double, 3>
center_of_mass(const std::vector<std::array<int, 3>>& voxels) {
  if (voxels.empty())
    throw EmptyInstance("center_of_mass: empty voxel list");
  std::array<double, 3> sum{0, 0, 0};
  for (const auto& v : voxels)
    for (int i = 0; i < 3; ++i)
      sum[i] += v[i];
  for (int i = 0; i < 3; ++i)
    sum[i] /= double(voxels.size());
  return sum;
}

double compare_centers(const std::array<double, 3>& predicted,
                       const std::array<double, 3>& truth,
                       const std::array<double, 3>& spacing) {
  double sq = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = (predicted[i] - truth[i]) * spacing[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

} // namespace lesionbox
