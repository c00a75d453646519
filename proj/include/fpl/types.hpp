#pragma once

#include <array>

#include <Eigen/Dense>

namespace fpl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Index3 = std::array<int, 3>;

// Element-major coefficient and nodal storage.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Packed symmetric 3x3 layout: xx, yy, zz, xy, xz, yz.
constexpr int kSymComponents = 6;
constexpr int kSymIndex[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};

inline Mat3 unpack_symmetric(const double* s) {
  Mat3 m;
  m << s[0], s[3], s[4], s[3], s[1], s[5], s[4], s[5], s[2];
  return m;
}

}  // namespace fpl
