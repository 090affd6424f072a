#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "uhlmann_lab/errors.hpp"
#include "uhlmann_lab/linalg.hpp"
#include "uhlmann_lab/spinmodel.hpp"

using namespace uhl;

namespace {

Eigen::VectorXd sorted_eigenvalues(const Mat4& h) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(h);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("hamiltonian: decoupled spin in a z field") {
  const auto ev = sorted_eigenvalues(hamiltonian({0.0, 0.0}, 0.0));
  CHECK(ev(0) == doctest::Approx(-1).epsilon(1e-14));
  CHECK(ev(1) == doctest::Approx(-1).epsilon(1e-14));
  CHECK(ev(2) == doctest::Approx(1).epsilon(1e-14));
  CHECK(ev(3) == doctest::Approx(1).epsilon(1e-14));
}

TEST_CASE("hamiltonian: equatorial spectrum at g = 1") {
  const auto ev = sorted_eigenvalues(hamiltonian({1.0, pi / 2}, 0.0));
  const double big = (1 + std::sqrt(5.0)) / 2, small = (std::sqrt(5.0) - 1) / 2;
  CHECK(std::abs(ev(0) + big) < 1e-13);
  CHECK(std::abs(ev(1) + small) < 1e-13);
  CHECK(std::abs(ev(2) - small) < 1e-13);
  CHECK(std::abs(ev(3) - big) < 1e-13);
}

TEST_CASE("hamiltonian: rotating frame conjugation and hermiticity") {
  const ModelParams p{0.5, 0.3};
  const Mat4 lhs = rotation_unitary(1.1) * hamiltonian(p, 0.0) * rotation_unitary(1.1).adjoint();
  CHECK((lhs - hamiltonian(p, 1.1)).norm() < 1e-13);
  CHECK(linalg::hermiticity_defect(hamiltonian(p, 1.1)) < 1e-14);
  // Independent assembly from Pauli strings.
  CHECK((MatX(hamiltonian(p, 1.1)) - oracle::hamiltonian(0.5, 0.3, 1.1)).norm() < 1e-14);
}

TEST_CASE("spectrum: closed form at g = 1, theta = pi/2") {
  const auto es = spectrum({1.0, pi / 2});
  CHECK(es.energies[kE1] == doctest::Approx(1.6180339887).epsilon(1e-9));
  CHECK(es.energies[kE3] == doctest::Approx(0.6180339887).epsilon(1e-9));
  CHECK(es.method == EigenMethod::ClosedForm);
}

TEST_CASE("spectrum: eigenpair residuals against the dense solver") {
  const ModelParams p{0.7, 0.4};
  const auto es = spectrum(p);
  const Mat4 h = hamiltonian(p, 0.0);
  for (int j = 0; j < 4; ++j) {
    const Vec4 u = es.state(j);
    CHECK((h * u - es.energies[j] * u).norm() < 1e-12);
  }
  auto e = es.energies;
  std::sort(e.begin(), e.end());
  const auto dense = oracle::dense_energies(0.7, 0.4);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(e[k] - dense(k)) < 1e-12);
}

TEST_CASE("spectrum: theta = 0 zeroes the first and last closed-form components") {
  // Only the E1/E2 pair survives the closed form at theta = 0; the E3/E4 formulas are 0/0.
  CHECK_THROWS_AS(spectrum({0.3, 0.0}), Error);
  try {
    spectrum({0.3, 0.0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularEigenvector);
  }
  const auto es = eigensystem({0.3, 0.0});
  CHECK(es.method == EigenMethod::DenseFallback);
  for (int j : {kE1, kE2}) {
    CHECK(std::abs(es.components(j, 0)) < 1e-14);
    CHECK(std::abs(es.components(j, 3)) < 1e-14);
  }
  // The remaining pair is the flip-flop doublet |01>, |10>, untouched by the coupling.
  CHECK(std::abs(es.components(kE3, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(es.components(kE4, 3)) == doctest::Approx(1.0));
  for (int j = 0; j < 4; ++j) {
    const Vec4 u = es.state(j);
    CHECK((hamiltonian({0.3, 0.0}, 0.0) * u - es.energies[j] * u).norm() < 1e-12);
  }
}

TEST_CASE("spectrum: g = 0 degenerate fallback orders levels and fixes phases") {
  const ModelParams p{0.0, 0.8};
  const auto es = eigensystem(p);
  CHECK(es.method == EigenMethod::DenseFallback);
  CHECK(es.energies[kE1] == doctest::Approx(1.0));
  CHECK(es.energies[kE3] == doctest::Approx(1.0));
  for (int j = 0; j < 4; ++j) {
    const Vec4 u = es.state(j);
    CHECK((hamiltonian(p, 0.0) * u - es.energies[j] * u).norm() < 1e-12);
    for (int i = 0; i < 4; ++i) {
      if (std::abs(es.components(j, i)) > 1e-12) {
        CHECK(es.components(j, i) > 0);
        break;
      }
    }
  }
  // Same call, same basis.
  CHECK((eigensystem(p).components - es.components).norm() == 0.0);
}

TEST_CASE("spectrum: dense fallback agrees with the closed form where both apply") {
  for (const ModelParams p : {ModelParams{0.7, 0.4}, ModelParams{1.3, 2.5}, ModelParams{0.2, 1.57}}) {
    const auto a = spectrum(p), b = spectrum_dense(p);
    for (int j = 0; j < 4; ++j) {
      const cplx ov = a.state(j).dot(b.state(j));
      CHECK(std::abs(std::abs(ov) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("spectrum: invalid parameters") {
  CHECK_THROWS_AS(spectrum({-0.1, 1.0}), Error);
  CHECK_THROWS_AS(spectrum({0.5, 3.5}), Error);
}

TEST_CASE("rotation unitary") {
  CHECK((rotation_unitary(0.0) - Mat4::Identity()).norm() < 1e-15);
  CHECK((rotation_unitary(two_pi) - Mat4::Identity()).norm() < 1e-14);
  CHECK((rotation_unitary(0.8) - linalg::exp_minus_i_hermitian(rotation_generator(), 0.8)).norm() < 1e-14);
  for (const ModelParams p : {ModelParams{0.2, 0.3}, ModelParams{1.7, 2.2}}) {
    const Mat4 lhs = rotation_unitary(0.8) * hamiltonian(p, 0.0) * rotation_unitary(0.8).adjoint();
    CHECK((lhs - hamiltonian(p, 0.8)).norm() < 1e-13);
  }
}

TEST_CASE("berry phase: vanishes modulo 2 pi at theta = 0") {
  const auto es = eigensystem({0.5, 0.0});
  // Winding states pick up a full 2 pi, which is zero modulo 2 pi.
  for (int j = 0; j < 4; ++j) CHECK(std::abs(wrap_phase(berry_phase(j, es))) < 1e-14);
}

TEST_CASE("berry phase: closed form vs. trapezoid line integral") {
  const ModelParams p{0.5, 1.0};
  const auto es = spectrum(p);
  // The oracle diagonalizes H(phi) itself and fixes the gauge continuously.
  auto state = [&](double phi) -> Eigen::VectorXcd {
    Eigen::SelfAdjointEigenSolver<MatX> solver(oracle::hamiltonian(0.5, 1.0, phi));
    Eigen::VectorXcd v = solver.eigenvectors().col(0);  // ground state, energy E2
    // Single-valued gauge: fix the |00> amplitude real positive.
    v *= std::conj(v(0)) / std::abs(v(0));
    return v;
  };
  const double oracle_value = oracle::berry_line_integral(state, 2048);
  CHECK(std::abs(wrap_phase(berry_phase(kE2, es) - oracle_value)) < 1e-6);
}

TEST_CASE("invariant: particle-hole symmetry and isospectrality") {
  for (double g : {0.1, 0.8, 1.9})
    for (double th : {0.2, 1.2, 2.9}) {
      const auto e = energies(g, th);
      CHECK(e[kE1] + e[kE2] == 0.0);
      CHECK(e[kE3] + e[kE4] == 0.0);
      CHECK(e[kE1] >= e[kE3]);
      CHECK(e[kE3] >= 0.0);
      const auto ref = sorted_eigenvalues(hamiltonian({g, th}, 0.0));
      double drift = 0.0;
      for (int k = 0; k <= 64; ++k) {
        const auto ev = sorted_eigenvalues(hamiltonian({g, th}, two_pi * k / 64));
        drift = std::max(drift, (ev - ref).cwiseAbs().maxCoeff());
      }
      CHECK(drift < 1e-12);
    }
}

TEST_CASE("invariant: completeness of the normalized eigenvectors") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ug(0.05, 2.0), ut(0.05, pi - 0.05);
  for (int draw = 0; draw < 50; ++draw) {
    const ModelParams p{ug(rng), ut(rng)};
    const auto es = spectrum(p);
    Mat4 sum = Mat4::Zero();
    for (int j = 0; j < 4; ++j) sum += es.state(j) * es.state(j).adjoint();
    CHECK((sum - Mat4::Identity()).norm() < 1e-10);
  }
}

TEST_CASE("invariant: berry phase matches the line integral on a 10x10 grid") {
  double worst = 0.0;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b) {
      const double g = 0.1 + 1.9 * a / 9, th = 0.15 + (pi - 0.3) * b / 9;
      const auto es = spectrum({g, th});
      for (int j = 0; j < 4; ++j) {
        const Vec4 u0 = es.state(j);
        auto state = [&](double phi) -> Eigen::VectorXcd { return rotation_unitary(phi) * u0; };
        worst = std::max(worst, std::abs(wrap_phase(berry_phase(j, es) - oracle::berry_line_integral(state, 2048))));
      }
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("wrap and circular distance") {
  CHECK(wrap_phase(pi) == doctest::Approx(pi));
  CHECK(wrap_phase(-pi) == doctest::Approx(pi));
  CHECK(wrap_phase(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(circular_distance(pi - 1e-9, -pi + 1e-9) < 1e-8);
}
