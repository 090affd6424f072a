#pragma once

#include "uhlmann_lab/pauli.hpp"

namespace uhl::linalg {

/// exp(-i t H) for Hermitian H, via its eigendecomposition.
MatX exp_minus_i_hermitian(const MatX& H, double t);

/// Closest unitary in Frobenius norm (the unitary factor of the polar decomposition).
MatX polar_unitary(const MatX& V);

/// Largest singular value.
double spectral_norm(const MatX& M);

/// ||V^dagger V - 1|| in operator norm.
double unitarity_defect(const MatX& V);

/// ||M - M^dagger|| in operator norm.
double hermiticity_defect(const MatX& M);

}  // namespace uhl::linalg
