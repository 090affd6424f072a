#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace uhl {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;
using Vec4 = Eigen::Vector4cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Pauli matrices and the 2x2 identity.
///
/// The computational basis is |0> = spin up (sigma_z = +1), |1> = spin down.
/// Two-spin product states are ordered |00>, |01>, |10>, |11> with the first
/// factor belonging to the driven spin A.
struct PauliAlgebra {
  static Mat2 sigma_x() { Mat2 m; m << 0, 1, 1, 0; return m; }
  static Mat2 sigma_y() { Mat2 m; m << 0, -I, I, 0; return m; }
  static Mat2 sigma_z() { Mat2 m; m << 1, 0, 0, -1; return m; }
  static Mat2 identity2() { return Mat2::Identity(); }
};

/// Kronecker product of two 2x2 matrices, first factor acting on spin A.
inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace uhl
