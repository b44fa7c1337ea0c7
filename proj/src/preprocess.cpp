#include "lesionbox/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "lesionbox/detail/kahan.hpp"

namespace lesionbox {

CropResult crop_nonzero(const Volume3& vol) {
  std::array<int, 3> lo = vol.dims;
  std::array<int, 3> hi{-1, -1, -1};
  for (int z = 0; z < vol.dims[2]; ++z)
    for (int y = 0; y < vol.dims[1]; ++y)
      for (int x = 0; x < vol.dims[0]; ++x) {
        if (vol.at(x, y, z) == 0.0)
          continue;
        const int idx[3] = {x, y, z};
        for (int i = 0; i < 3; ++i) {
          lo[i] = std::min(lo[i], idx[i]);
          hi[i] = std::max(hi[i], idx[i]);
        }
      }

  if (hi[0] < 0) // all zero: identity crop
    return CropResult{vol, {0, 0, 0}};

  const std::array<int, 3> dims{hi[0] - lo[0] + 1, hi[1] - lo[1] + 1,
                                hi[2] - lo[2] + 1};
  Volume3 out(dims, vol.spacing, vol.affine);
  // shift the affine origin so cropped voxel (0,0,0) keeps its world position
  for (int r = 0; r < 3; ++r)
    out.affine[r][3] = vol.affine[r][3] + vol.affine[r][0] * lo[0] +
                       vol.affine[r][1] * lo[1] + vol.affine[r][2] * lo[2];
  for (int z = 0; z < dims[2]; ++z)
    for (int y = 0; y < dims[1]; ++y)
      for (int x = 0; x < dims[0]; ++x)
        out.at(x, y, z) = vol.at(x + lo[0], y + lo[1], z + lo[2]);
  return CropResult{std::move(out), lo};
}

Volume3 zscore(const Volume3& vol) {
  const double n = static_cast<double>(vol.data.size());
  detail::KahanSum s;
  for (double v : vol.data)
    s.add(v);
  const double mean = s.value() / n;
  detail::KahanSum sq;
  for (double v : vol.data)
    sq.add((v - mean) * (v - mean));
  const double sigma = std::sqrt(sq.value() / n);
  const double denom = std::max(sigma, 1e-8);

  Volume3 out = vol;
  for (double& v : out.data)
    v = (v - mean) / denom;
  return out;
}

namespace {

double sample_trilinear(const Volume3& v, double x, double y, double z) {
  x = std::clamp(x, 0.0, double(v.dims[0] - 1));
  y = std::clamp(y, 0.0, double(v.dims[1] - 1));
  z = std::clamp(z, 0.0, double(v.dims[2] - 1));
  const int x0 = int(x), y0 = int(y), z0 = int(z);
  const int x1 = std::min(x0 + 1, v.dims[0] - 1);
  const int y1 = std::min(y0 + 1, v.dims[1] - 1);
  const int z1 = std::min(z0 + 1, v.dims[2] - 1);
  const double fx = x - x0, fy = y - y0, fz = z - z0;
  if (fx == 0.0 && fy == 0.0 && fz == 0.0)
    return v.at(x0, y0, z0); // exact grid hit, no rounding
  const double c00 = v.at(x0, y0, z0) * (1 - fx) + v.at(x1, y0, z0) * fx;
  const double c10 = v.at(x0, y1, z0) * (1 - fx) + v.at(x1, y1, z0) * fx;
  const double c01 = v.at(x0, y0, z1) * (1 - fx) + v.at(x1, y0, z1) * fx;
  const double c11 = v.at(x0, y1, z1) * (1 - fx) + v.at(x1, y1, z1) * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return c0 * (1 - fz) + c1 * fz;
}

double sample_nearest(const Volume3& v, double x, double y, double z) {
  const int xi = std::clamp(int(std::llround(x)), 0, v.dims[0] - 1);
  const int yi = std::clamp(int(std::llround(y)), 0, v.dims[1] - 1);
  const int zi = std::clamp(int(std::llround(z)), 0, v.dims[2] - 1);
  return v.at(xi, yi, zi);
}

} // namespace

Volume3 resample(const Volume3& vol,
                 const std::array<double, 3>& target_spacing,
                 ResampleMode mode) {
  for (double t : target_spacing)
    if (!(t > 0.0))
      throw BadDims("resample: target spacing must be > 0");

  std::array<int, 3> out_dims;
  std::array<double, 3> scale;  // output index -> source index factor
  std::array<double, 3> offset; // constant term (only for 1-voxel axes)
  for (int i = 0; i < 3; ++i) {
    const double exact = vol.dims[i] * vol.spacing[i] / target_spacing[i];
    out_dims[i] = std::max(1, int(std::llround(exact)));
    if (out_dims[i] > 1) {
      scale[i] = double(vol.dims[i] - 1) / double(out_dims[i] - 1);
      offset[i] = 0.0;
    } else {
      scale[i] = 0.0;
      offset[i] = double(vol.dims[i] - 1) / 2.0;
    }
  }

  Volume3 out(out_dims, target_spacing, vol.affine);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c)
      out.affine[r][c] = vol.affine[r][c] * scale[c];
    out.affine[r][3] = vol.affine[r][3] + vol.affine[r][0] * offset[0] +
                       vol.affine[r][1] * offset[1] +
                       vol.affine[r][2] * offset[2];
  }

  for (int z = 0; z < out_dims[2]; ++z) {
    const double sz = z * scale[2] + offset[2];
    for (int y = 0; y < out_dims[1]; ++y) {
      const double sy = y * scale[1] + offset[1];
      for (int x = 0; x < out_dims[0]; ++x) {
        const double sx = x * scale[0] + offset[0];
        out.at(x, y, z) = (mode == ResampleMode::Trilinear)
                              ? sample_trilinear(vol, sx, sy, sz)
                              : sample_nearest(vol, sx, sy, sz);
      }
    }
  }
  return out;
}

} // namespace lesionbox
