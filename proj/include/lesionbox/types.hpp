#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "lesionbox/errors.hpp"

namespace lesionbox {

using Affine4 = std::array<std::array<double, 4>, 4>;

inline Affine4 identity_affine() {
  return {{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
}

inline Affine4 diagonal_affine(const std::array<double, 3>& s) {
  return {{{s[0], 0, 0, 0}, {0, s[1], 0, 0}, {0, 0, s[2], 0}, {0, 0, 0, 1}}};
}

/// A 3-D scalar grid with voxel spacing and a voxel-index -> world-mm affine.
/// Data is stored x-fastest (then y, then z). Immutable by convention after
/// construction; all pipeline stages return new volumes.
struct Volume3 {
  std::array<int, 3> dims{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  Affine4 affine = identity_affine();
  std::vector<double> data;

  Volume3() : data(1, 0.0) {}

  Volume3(std::array<int, 3> d, std::array<double, 3> sp, Affine4 a)
      : dims(d), spacing(sp), affine(a),
        data(static_cast<std::size_t>(d[0]) * d[1] * d[2], 0.0) {
    validate_shape();
  }

  Volume3(std::array<int, 3> d, std::array<double, 3> sp)
      : Volume3(d, sp, diagonal_affine(sp)) {}

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(z) * dims[1] * dims[0] +
           static_cast<std::size_t>(y) * dims[0] + static_cast<std::size_t>(x);
  }

  double at(int x, int y, int z) const { return data[index(x, y, z)]; }
  double& at(int x, int y, int z) { return data[index(x, y, z)]; }

  void validate_shape() const {
    for (int i = 0; i < 3; ++i) {
      if (dims[i] < 1)
        throw BadDims("Volume3: dims must be >= 1");
      if (!(spacing[i] > 0.0))
        throw BadDims("Volume3: spacing must be > 0");
    }
    if (affine[3] != std::array<double, 4>{0, 0, 0, 1})
      throw BadDims("Volume3: affine last row must be (0,0,0,1)");
  }
};

/// Axis-aligned 3-D box in continuous voxel coordinates, [min, max] per axis.
/// A voxel (i,j,k) corresponds to the box [(i,j,k),(i+1,j+1,k+1)].
struct Box3 {
  std::array<double, 3> min{0, 0, 0};
  std::array<double, 3> max{0, 0, 0};
};

/// A predicted box with a confidence score in [0,1].
struct Detection {
  Box3 box;
  double score = 0.0;
};

} // namespace lesionbox
