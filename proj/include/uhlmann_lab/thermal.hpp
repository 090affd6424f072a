#pragma once

#include <array>
#include <utility>

#include "uhlmann_lab/spinmodel.hpp"

namespace uhl {

/// Thermal equilibrium state e^{-beta H}/Z at the loop origin phi0 (k_B = 1).
struct GibbsEnsemble {
  Mat4 rho = Mat4::Zero();
  /// Z overflows to +inf for very low T; log_Z is always finite.
  double Z = 0.0;
  double log_Z = 0.0;
  std::array<double, 4> populations{};  // level order, p_j = e^{-beta E_j}/Z
  double beta = 0.0;
  double T = 0.0;
};

GibbsEnsemble gibbs_state(const ModelParams& p, double T);
GibbsEnsemble gibbs_state(const Eigensystem& es, const ModelParams& p, double T);

/// Shifted Boltzmann weights e^{-beta (E_j - E_min)} normalized to one.
std::array<double, 4> boltzmann_populations(const std::array<double, 4>& energies, double beta);

/// The six level pairs (i < j) in the order used by HeatCapacityBreakdown.
inline constexpr std::array<std::pair<int, int>, 6> kLevelPairs{
    {{kE1, kE2}, {kE1, kE3}, {kE1, kE4}, {kE2, kE3}, {kE2, kE4}, {kE3, kE4}}};

/// Heat capacity at theta = pi/2 and its split into two-level contributions.
struct HeatCapacityBreakdown {
  double total = 0.0;
  std::array<double, 6> pairwise{};  // indexed like kLevelPairs
  std::array<double, 6> gaps{};      // Delta_ij = E_i - E_j

  /// Contribution of levels (i, j), i != j, in either order.
  double pair(int i, int j) const;
  double gap(int i, int j) const;
};

/// Energies at theta = pi/2: E1 = (g + sqrt(g^2+4))/2, E3 = (-g + sqrt(g^2+4))/2.
std::array<double, 4> equatorial_energies(double g);

/// Total from the sech^2 closed form; pairwise terms as beta^2 p_i p_j Delta_ij^2.
HeatCapacityBreakdown heat_capacity(double g, double T);

/// beta^2 p_i^2 Delta_ij^2 e^{beta Delta_ij} evaluated literally (overflows at large beta).
double pairwise_heat_capacity_literal(double g, double T, int i, int j);

/// Two-level Schottky form for the ground / first-excited pair.
double schottky_c24(double g, double T);

}  // namespace uhl
