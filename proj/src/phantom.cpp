#include "lesionbox/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "lesionbox/rng.hpp"

namespace lesionbox {

void PhantomSpec::validate() const {
  for (int i = 0; i < 3; ++i)
    if (dims[i] < 1 || !(spacing[i] > 0.0))
      throw Error("PhantomSpec: bad dims/spacing");
  if (n_lesions < 0 || vessel_count < 0)
    throw Error("PhantomSpec: counts must be >= 0");
  if (!(lesion_radius_range.first > 0.0) ||
      lesion_radius_range.second < lesion_radius_range.first)
    throw Error("PhantomSpec: bad lesion radius range");
  double min_extent = dims[0] * spacing[0];
  for (int i = 1; i < 3; ++i)
    min_extent = std::min(min_extent, dims[i] * spacing[i]);
  if (lesion_radius_range.second > min_extent / 4.0)
    throw Error("PhantomSpec: lesion radius exceeds a quarter of the "
                "smallest physical extent");
  if (noise_sigma < 0.0)
    throw Error("PhantomSpec: noise_sigma must be >= 0");
  if (noise_sigma == 0.0 &&
      !(lesion_intensity > vessel_intensity &&
        vessel_intensity > background_intensity))
    throw Error("PhantomSpec: need lesion > vessel > background intensity");
}

namespace {

constexpr double kVesselRadiusVox = 1.5;

std::array<double, 3> random_unit(Rng& rng) {
  while (true) {
    std::array<double, 3> v{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n > 1e-6)
      return {v[0] / n, v[1] / n, v[2] / n};
  }
}

void paint_ball(Volume3& img, const std::array<double, 3>& c, double r,
                double value) {
  const int lo[3] = {std::max(0, int(std::floor(c[0] - r))),
                     std::max(0, int(std::floor(c[1] - r))),
                     std::max(0, int(std::floor(c[2] - r)))};
  const int hi[3] = {std::min(img.dims[0] - 1, int(std::ceil(c[0] + r))),
                     std::min(img.dims[1] - 1, int(std::ceil(c[1] + r))),
                     std::min(img.dims[2] - 1, int(std::ceil(c[2] + r)))};
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) {
        const double dx = x - c[0], dy = y - c[1], dz = z - c[2];
        if (dx * dx + dy * dy + dz * dz <= r * r)
          img.at(x, y, z) = value;
      }
}

} // namespace

PhantomResult generate(const PhantomSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  PhantomResult res{Volume3(spec.dims, spec.spacing),
                    Volume3(spec.dims, spec.spacing),
                    {}};
  std::fill(res.image.data.begin(), res.image.data.end(),
            spec.background_intensity);

  // vessels: random-walk tubes
  std::vector<std::array<double, 3>> path;
  for (int v = 0; v < spec.vessel_count; ++v) {
    std::array<double, 3> pos{rng.uniform(2.0, spec.dims[0] - 3.0),
                              rng.uniform(2.0, spec.dims[1] - 3.0),
                              rng.uniform(2.0, spec.dims[2] - 3.0)};
    std::array<double, 3> dir = random_unit(rng);
    const int steps = 2 * std::max({spec.dims[0], spec.dims[1], spec.dims[2]});
    for (int s = 0; s < steps; ++s) {
      paint_ball(res.image, pos, kVesselRadiusVox, spec.vessel_intensity);
      path.push_back(pos);
      for (int i = 0; i < 3; ++i)
        pos[i] += dir[i];
      if (pos[0] < 1 || pos[1] < 1 || pos[2] < 1 ||
          pos[0] > spec.dims[0] - 2 || pos[1] > spec.dims[1] - 2 ||
          pos[2] > spec.dims[2] - 2)
        break;
      const std::array<double, 3> jitter = random_unit(rng);
      double n = 0.0;
      for (int i = 0; i < 3; ++i) {
        dir[i] += 0.25 * jitter[i];
        n += dir[i] * dir[i];
      }
      n = std::sqrt(n);
      for (int i = 0; i < 3; ++i)
        dir[i] /= n;
    }
  }

  // lesions: non-overlapping ellipsoids tangent to a vessel
  struct Placed {
    std::array<double, 3> center;
    double max_r;
  };
  std::vector<Placed> placed;
  for (int l = 0; l < spec.n_lesions; ++l) {
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      std::array<double, 3> radii_vox;
      double max_r = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double r_mm = rng.uniform(spec.lesion_radius_range.first,
                                        spec.lesion_radius_range.second);
        radii_vox[i] = r_mm / spec.spacing[i];
        max_r = std::max(max_r, radii_vox[i]);
      }

      std::array<double, 3> anchor;
      if (!path.empty()) {
        anchor = path[std::size_t(rng.uniform_int(path.size()))];
      } else {
        anchor = {rng.uniform(0.0, spec.dims[0] - 1.0),
                  rng.uniform(0.0, spec.dims[1] - 1.0),
                  rng.uniform(0.0, spec.dims[2] - 1.0)};
      }
      const std::array<double, 3> dir = random_unit(rng);
      std::array<double, 3> center;
      bool in_bounds = true;
      for (int i = 0; i < 3; ++i) {
        // integer center keeps the voxelized ellipsoid symmetric, so the
        // voxel center of mass equals the ellipsoid center exactly
        center[i] = std::round(anchor[i] +
                               dir[i] * (max_r + kVesselRadiusVox + 1.0));
        if (center[i] - radii_vox[i] < 0.5 ||
            center[i] + radii_vox[i] > spec.dims[i] - 1.5)
          in_bounds = false;
      }
      if (!in_bounds)
        continue;

      bool separated = true;
      for (const Placed& p : placed) {
        double d2 = 0.0;
        for (int i = 0; i < 3; ++i)
          d2 += (center[i] - p.center[i]) * (center[i] - p.center[i]);
        if (std::sqrt(d2) <= max_r + p.max_r + 2.5) {
          separated = false;
          break;
        }
      }
      if (!separated)
        continue;

      for (int z = int(center[2] - radii_vox[2]); z <= int(center[2] + radii_vox[2]); ++z)
        for (int y = int(center[1] - radii_vox[1]); y <= int(center[1] + radii_vox[1]); ++y)
          for (int x = int(center[0] - radii_vox[0]); x <= int(center[0] + radii_vox[0]); ++x) {
            const double dx = (x - center[0]) / radii_vox[0];
            const double dy = (y - center[1]) / radii_vox[1];
            const double dz = (z - center[2]) / radii_vox[2];
            if (dx * dx + dy * dy + dz * dz <= 1.0) {
              res.mask.at(x, y, z) = 1.0;
              res.image.at(x, y, z) = spec.lesion_intensity;
            }
          }
      placed.push_back({center, max_r});
      ok = true;
    }
    if (!ok)
      throw PlacementFailure("phantom: could not place lesion " +
                             std::to_string(l + 1) + " in 1000 attempts");
  }

  if (spec.noise_sigma > 0.0)
    for (double& v : res.image.data)
      v += spec.noise_sigma * rng.gaussian();

  res.truth = connected_components(res.mask, 26);
  return res;
}

std::vector<Detection> baseline_detect(const Volume3& image,
                                       double intensity_threshold,
                                       std::int64_t min_voxels) {
  double vol_max = image.data.empty() ? 0.0 : image.data[0];
  for (double v : image.data)
    vol_max = std::max(vol_max, v);

  const auto& d = image.dims;
  std::vector<bool> visited(image.voxel_count(), false);
  std::vector<Detection> dets;
  std::vector<std::array<int, 3>> stack;

  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x) {
        const std::size_t idx = image.index(x, y, z);
        if (visited[idx] || image.data[idx] < intensity_threshold)
          continue;
        std::int64_t count = 0;
        double isum = 0.0;
        int lo[3] = {x, y, z}, hi[3] = {x, y, z};
        visited[idx] = true;
        stack.assign(1, {x, y, z});
        while (!stack.empty()) {
          const auto [cx, cy, cz] = stack.back();
          stack.pop_back();
          ++count;
          isum += image.at(cx, cy, cz);
          const int cur[3] = {cx, cy, cz};
          for (int i = 0; i < 3; ++i) {
            lo[i] = std::min(lo[i], cur[i]);
            hi[i] = std::max(hi[i], cur[i]);
          }
          for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
              for (int dx = -1; dx <= 1; ++dx) {
                if (!dx && !dy && !dz)
                  continue;
                const int nx = cx + dx, ny = cy + dy, nz = cz + dz;
                if (nx < 0 || ny < 0 || nz < 0 || nx >= d[0] || ny >= d[1] ||
                    nz >= d[2])
                  continue;
                const std::size_t nidx = image.index(nx, ny, nz);
                if (!visited[nidx] &&
                    image.data[nidx] >= intensity_threshold) {
                  visited[nidx] = true;
                  stack.push_back({nx, ny, nz});
                }
              }
        }
        if (count < min_voxels)
          continue;
        Detection det;
        for (int i = 0; i < 3; ++i) {
          det.box.min[i] = lo[i];
          det.box.max[i] = hi[i] + 1;
        }
        const double mean = isum / double(count);
        det.score =
            vol_max > 0.0 ? std::clamp(mean / vol_max, 0.0, 1.0) : 0.0;
        dets.push_back(det);
      }

  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.score > b.score;
                   });
  return dets;
}

} // namespace lesionbox
