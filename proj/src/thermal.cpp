#include "uhlmann_lab/thermal.hpp"

#include <algorithm>
#include <cmath>

#include "uhlmann_lab/errors.hpp"

namespace uhl {

std::array<double, 4> boltzmann_populations(const std::array<double, 4>& energies, double beta) {
  const double emin = *std::min_element(energies.begin(), energies.end());
  std::array<double, 4> w{};
  double sum = 0.0;
  for (int j = 0; j < 4; ++j) {
    w[j] = std::exp(-beta * (energies[j] - emin));
    sum += w[j];
  }
  for (double& x : w) x /= sum;
  return w;
}

GibbsEnsemble gibbs_state(const Eigensystem& es, const ModelParams& p, double T) {
  require_positive_temperature(T);
  GibbsEnsemble out;
  out.T = T;
  out.beta = 1.0 / T;
  out.populations = boltzmann_populations(es.energies, out.beta);

  const double emin = *std::min_element(es.energies.begin(), es.energies.end());
  double shifted = 0.0;
  for (double e : es.energies) shifted += std::exp(-out.beta * (e - emin));
  out.log_Z = -out.beta * emin + std::log(shifted);
  out.Z = std::exp(out.log_Z);

  const Mat4 basis = es.basis(p.phi0);
  out.rho.setZero();
  for (int j = 0; j < 4; ++j) out.rho += out.populations[j] * basis.col(j) * basis.col(j).adjoint();
  return out;
}

GibbsEnsemble gibbs_state(const ModelParams& p, double T) {
  require_positive_temperature(T);
  return gibbs_state(eigensystem(p), p, T);
}

std::array<double, 4> equatorial_energies(double g) {
  const double s = std::sqrt(g * g + 4.0);
  const double e1 = 0.5 * (g + s), e3 = 0.5 * (s - g);
  return {e1, -e1, e3, -e3};
}

namespace {

int pair_slot(int i, int j) {
  if (i > j) std::swap(i, j);
  for (int k = 0; k < 6; ++k)
    if (kLevelPairs[k].first == i && kLevelPairs[k].second == j) return k;
  throw Error(ErrorCode::InvalidArgument, "no level pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
}

double sech2(double x) {
  // 4 e^{-2|x|} / (1 + e^{-2|x|})^2 stays finite for large |x|.
  const double e = std::exp(-2.0 * std::abs(x));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

double HeatCapacityBreakdown::pair(int i, int j) const { return pairwise[pair_slot(i, j)]; }

double HeatCapacityBreakdown::gap(int i, int j) const {
  const double d = gaps[pair_slot(i, j)];
  return i < j ? d : -d;
}

HeatCapacityBreakdown heat_capacity(double g, double T) {
  require_positive_temperature(T);
  const double beta = 1.0 / T;
  const auto e = equatorial_energies(g);
  const auto pop = boltzmann_populations(e, beta);

  HeatCapacityBreakdown out;
  const double s = std::sqrt(g * g + 4.0);
  out.total = (g * g * sech2(g / (2.0 * T)) + (g * g + 4.0) * sech2(s / (2.0 * T))) / (4.0 * T * T);
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kLevelPairs[k];
    const double d = e[i] - e[j];
    out.gaps[k] = d;
    out.pairwise[k] = beta * beta * pop[i] * pop[j] * d * d;
  }
  return out;
}

double pairwise_heat_capacity_literal(double g, double T, int i, int j) {
  require_positive_temperature(T);
  const double beta = 1.0 / T;
  const auto e = equatorial_energies(g);
  const auto pop = boltzmann_populations(e, beta);
  const double d = e[i] - e[j];
  return beta * beta * pop[i] * pop[i] * d * d * std::exp(beta * d);
}

double schottky_c24(double g, double T) {
  require_positive_temperature(T);
  const auto e = equatorial_energies(g);
  const double x = (e[kE2] - e[kE4]) / T;
  // x^2 e^x / (1 + e^x)^2 is even in x; evaluate with e^{-|x|}.
  const double q = std::exp(-std::abs(x));
  return x * x * q / ((1.0 + q) * (1.0 + q));
}

}  // namespace uhl
