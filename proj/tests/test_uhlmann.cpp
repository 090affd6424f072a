#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "uhlmann_lab/analysis.hpp"
#include "uhlmann_lab/errors.hpp"
#include "uhlmann_lab/linalg.hpp"
#include "uhlmann_lab/uhlmann.hpp"

using namespace uhl;

namespace {

MatX rho_of(const ModelParams& p, double T, double phi) {
  return oracle::gibbs_by_expm(p.g, p.theta, phi, T);
}

double holonomy_error(const ModelParams& p, double T, int steps) {
  const MatX closed = holonomy_closed_form(p, T).V;
  const MatX ode = holonomy_ode(composite_connection_function(p, T), p.phi0, {steps, false}).V;
  return oracle::opnorm(closed - ode);
}

}  // namespace

TEST_CASE("connection: infinite temperature gives a vanishing field") {
  const auto a = connection_composite({0.6, 1.0}, 1e6);
  CHECK(a.coefficients.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("connection: theta = 0 gives a vanishing field") {
  const auto a = connection_composite({0.6, 0.0}, 0.3);
  CHECK(a.coefficients.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("connection: closed form matches the commutator construction") {
  const ModelParams p{0.6, pi / 2};
  const auto a = connection_composite(p, 0.5);
  const MatX ref = oracle::connection_commutator([&](double phi) { return rho_of(p, 0.5, phi); }, 0.0);
  CHECK((a.operator_form() - ref).norm() < 1e-8);
}

TEST_CASE("connection: commutator oracle at generic parameters, Hermitian generator") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ug(0.05, 2.0), ut(0.1, pi - 0.1), uT(0.3, 1.5), uphi(0.0, two_pi);
  for (int draw = 0; draw < 20; ++draw) {
    const ModelParams p{ug(rng), ut(rng), uphi(rng)};
    const double T = uT(rng);
    const auto a = connection_composite(p, T);
    const MatX ref = oracle::connection_commutator([&](double phi) { return rho_of(p, T, phi); }, p.phi0);
    CHECK((a.operator_form() - ref).norm() < 1e-7);
    const MatX k = I * a.operator_form();
    CHECK((k - k.adjoint()).norm() < 1e-13);
    CHECK(a.coefficients.diagonal().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("connection_generic: equal populations give zero field") {
  const std::array<double, 4> pop{0.25, 0.25, 0.25, 0.25};
  const MatX basis = MatX::Identity(4, 4);
  const MatX ov = MatX::Random(4, 4) * I;
  CHECK(connection_generic(pop, basis, ov).coefficients.norm() == 0.0);
}

TEST_CASE("connection_generic: pure state keeps full weight on rows and columns of the occupied state") {
  const std::array<double, 4> pop{1.0, 0.0, 0.0, 0.0};
  MatX ov = MatX::Constant(4, 4, cplx(0.0, 0.3));
  const auto a = connection_generic(pop, MatX::Identity(4, 4), ov);
  for (int k = 1; k < 4; ++k) {
    CHECK(std::abs(a.coefficients(0, k) - ov(0, k)) < 1e-15);
    CHECK(std::abs(a.coefficients(k, 0) - ov(k, 0)) < 1e-15);
  }
  // Empty-empty pairs are degenerate: zeroed and counted.
  CHECK(a.degenerate_pairs == 3);
  CHECK(a.coefficients(1, 2) == cplx(0.0));
}

TEST_CASE("connection_generic: 2x2 analytic expansion") {
  // rho = diag(p, 1-p) in a basis |psi_j> with overlap w = <psi_0|d psi_1>.
  const double p = 0.3;
  const cplx w(0.2, 0.7);
  const std::array<double, 2> pop{p, 1 - p};
  MatX ov(2, 2);
  ov << cplx(0, 0.1), w, -std::conj(w), cplx(0, -0.4);
  const auto a = connection_generic(pop, MatX::Identity(2, 2), ov);
  const double f = std::pow(std::sqrt(1 - p) - std::sqrt(p), 2);
  CHECK(std::abs(a.coefficients(0, 1) - f * w) < 1e-15);
  CHECK(std::abs(a.coefficients(1, 0) + f * std::conj(w)) < 1e-15);
  CHECK_THROWS_AS(connection_generic(pop, MatX::Identity(3, 3), ov), Error);
}

TEST_CASE("holonomy: infinite temperature gives the identity and a zero phase") {
  const auto h = holonomy_closed_form({0.5, 1.1}, 1e6);
  CHECK((h.V - MatX::Identity(4, 4)).norm() < 1e-8);
  CHECK(std::abs(uhlmann_phase_composite({0.5, 1.1}, 1e6).phase) < 1e-8);
}

TEST_CASE("holonomy: closed form equals a 4096-step path-ordered integration") {
  CHECK(holonomy_error({0.6, pi / 2}, 0.5, 4096) < 1e-8);
  CHECK(holonomy_error({1.3, 0.7, 0.9}, 0.25, 4096) < 1e-8);
}

TEST_CASE("holonomy: unitarity of the closed form") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ug(0.0, 2.0), ut(0.0, pi), uT(0.01, 2.0);
  for (int draw = 0; draw < 50; ++draw) {
    const auto h = holonomy_closed_form({ug(rng), ut(rng)}, uT(rng));
    CHECK(linalg::unitarity_defect(h.V) < 1e-12);
    CHECK(linalg::hermiticity_defect(h.K) < 1e-13);
  }
}

TEST_CASE("holonomy_ode: zero field and constant field") {
  const ConnectionFunction zero = [](double) { return MatX::Zero(3, 3); };
  CHECK((holonomy_ode(zero, 0.0).V - MatX::Identity(3, 3)).norm() == 0.0);

  MatX m(2, 2);
  m << cplx(0, 0.3), cplx(0.2, 0.1), cplx(-0.2, 0.1), cplx(0, -0.5);  // anti-Hermitian
  const ConnectionFunction constant = [m](double) { return m; };
  const MatX expected = (two_pi * m).exp();
  CHECK((holonomy_ode(constant, 0.4, {2048, true}).V - expected).norm() < 1e-10);
}

TEST_CASE("holonomy_ode: fourth-order convergence") {
  const ModelParams p{0.6, pi / 2};
  const double e512 = holonomy_error(p, 0.5, 512), e1024 = holonomy_error(p, 0.5, 1024);
  const double ratio = e512 / e1024;
  MESSAGE("error ratio 512/1024 = " << ratio);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("holonomy_ode: step count validation") {
  const ConnectionFunction zero = [](double) { return MatX::Zero(2, 2); };
  CHECK_THROWS_AS(holonomy_ode(zero, 0.0, {8, true}), Error);
  try {
    holonomy_ode(zero, 0.0, {15, true});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepCountTooSmall);
  }
  CHECK_NOTHROW(holonomy_ode(zero, 0.0, {kMinOdeSteps, true}));
}

TEST_CASE("uhlmann phase: composite transition at the critical temperature") {
  const double tc = critical_constants().T_c;
  CHECK(tc == doctest::Approx(0.7588).epsilon(1e-3));
  const auto below = uhlmann_phase_composite({0.001, pi / 2}, tc * 0.99);
  const auto above = uhlmann_phase_composite({0.001, pi / 2}, tc * 1.01);
  CHECK(std::abs(below.phase - pi) < 1e-6);
  CHECK(std::abs(above.phase) < 1e-6);
}

TEST_CASE("uhlmann phase: branch rule at the negative real axis") {
  CHECK(phase_from_trace(cplx(-0.5, 0.0)).phase == pi);
  CHECK(phase_from_trace(cplx(-0.5, -0.0)).phase == pi);
  CHECK(phase_from_trace(cplx(-0.5, -1e-17)).phase == pi);
  CHECK(phase_from_trace(cplx(-0.5, -1e-6)).phase < -3.0);
  CHECK(phase_from_trace(cplx(1e-12, 0.0)).trace_near_zero);
  CHECK_FALSE(phase_from_trace(cplx(0.3, 0.1)).trace_near_zero);
}

TEST_CASE("uhlmann phase: independent of the eigenvector gauge") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ug(0.05, 2.0), ut(0.1, pi - 0.1), uT(0.02, 1.0), ua(0.0, two_pi);
  for (int draw = 0; draw < 100; ++draw) {
    const ModelParams p{ug(rng), ut(rng)};
    const double T = uT(rng);
    const auto es = eigensystem(p);
    const auto ens = gibbs_state(es, p, T);
    MatX basis = es.basis(0.0);
    for (int j = 0; j < 4; ++j) basis.col(j) *= std::exp(I * ua(rng));
    // d/dphi of U(phi)|psi> at phi = 0 is -i G |psi>.
    const MatX overlaps = -I * basis.adjoint() * MatX(rotation_generator()) * basis;
    const auto field = connection_generic(ens.populations, basis, overlaps);
    const auto rephased = uhlmann_phase(ens.rho, holonomy_rotating_frame(field, rotation_generator()).V);
    const auto reference = uhlmann_phase_composite(p, T);
    if (reference.trace_near_zero) continue;
    CHECK(circular_distance(rephased.phase, reference.phase) < 1e-10);
  }
}

TEST_CASE("uhlmann phase: independent of the loop base point") {
  for (double phi0 : {0.3, 1.7, 4.0}) {
    const auto a = uhlmann_phase_composite({0.8, 1.0, phi0}, 0.3);
    const auto b = uhlmann_phase_composite({0.8, 1.0, 0.0}, 0.3);
    CHECK(circular_distance(a.phase, b.phase) < 1e-10);
    CHECK(std::abs(a.trace_value - b.trace_value) < 1e-10);
  }
}

TEST_CASE("uhlmann phase: quantized at the equator") {
  for (int a = 0; a < 15; ++a)
    for (int b = 0; b < 15; ++b) {
      const double g = 0.02 + 1.98 * a / 14, T = 0.02 + 1.2 * b / 14;
      const auto r = uhlmann_phase_composite({g, pi / 2}, T);
      CHECK(std::abs(r.trace_value.imag()) < 1e-8);
      if (!r.trace_near_zero)
        CHECK(std::min(std::abs(r.phase), std::abs(r.phase - pi)) < 1e-6);
    }
}

TEST_CASE("uhlmann phase: closed form and ODE agree on a 12x12x4 grid") {
  double worst = 0.0;
  for (int a = 0; a < 12; ++a)
    for (int b = 0; b < 12; ++b)
      for (double T : {0.05, 0.2, 0.5, 1.0}) {
        const ModelParams p{0.05 + 1.95 * a / 11, pi * b / 11};
        const auto c = uhlmann_phase_composite(p, T);
        const auto o = uhlmann_phase_composite(p, T, {HolonomyMethod::PathOrderedODE, 4096});
        if (c.trace_near_zero || o.trace_near_zero) continue;
        worst = std::max(worst, circular_distance(c.phase, o.phase));
      }
  CHECK(worst < 1e-7);
}

TEST_CASE("uhlmann phase: zero at high temperature and nonpositive temperature rejected") {
  CHECK(std::abs(uhlmann_phase_composite({0.9, 2.0}, 1e6).phase) < 1e-8);
  CHECK_THROWS_AS(uhlmann_phase_composite({0.9, 2.0}, 0.0), Error);
}
