#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "lax/grid.hpp"
#include "lax/kdv.hpp"
#include "lax/spectral.hpp"

using namespace lax;
using std::complex;

namespace {

Wavefunction plane_wave(const Grid1D& g, int mode) {
  Eigen::VectorXcd v(g.n_points());
  const double k = mode * 2.0 * M_PI / g.length();
  for (int j = 0; j < g.n_points(); ++j)
    v(j) = std::exp(complex<double>(0.0, k * g.points()(j)));
  return Wavefunction(g, v);
}

}  // namespace

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 4), invalid_argument_error);
  CHECK_THROWS_AS(Grid1D(1.0, 1.0, 64), invalid_argument_error);
  Grid1D g(-20.0, 20.0, 512);
  CHECK(g.spacing() == Catch::Approx(40.0 / 512));
  CHECK(g.points()(0) == -20.0);
  // periodic: the last point is one spacing short of x_max
  CHECK(g.points()(511) == Catch::Approx(20.0 - g.spacing()));
}

TEST_CASE("derivative of a constant vanishes") {
  Grid1D g(-10.0, 10.0, 128);
  Wavefunction one(g, Eigen::VectorXcd::Ones(128));
  for (int order = 1; order <= 5; ++order) {
    Wavefunction d = derivative(one, order);
    CHECK(d.values.cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(derivative(one, 0), invalid_argument_error);
  CHECK_THROWS_AS(derivative(one, 6), invalid_argument_error);
}

TEST_CASE("derivative of sin(kx) is k cos(kx)") {
  Grid1D g(-10.0, 10.0, 256);
  const double k = 2.0 * M_PI / g.length();
  Eigen::VectorXcd v(256);
  for (int j = 0; j < 256; ++j) v(j) = std::sin(k * g.points()(j));
  Wavefunction d = derivative(Wavefunction(g, v), 1);
  double err = 0.0;
  for (int j = 0; j < 256; ++j)
    err = std::max(err, std::abs(d.values(j) - complex<double>(k * std::cos(k * g.points()(j)))));
  CHECK(err < 1e-10);
}

TEST_CASE("second derivative of a gaussian matches the finite-difference oracle") {
  // oracle: centered second difference of the analytic gaussian at h = dx/2,
  // Richardson-extrapolated once; fully independent of the spectral path
  Grid1D g(-8.0, 8.0, 256);
  auto f = [](double x) { return std::exp(-x * x); };
  Eigen::VectorXcd v(256);
  for (int j = 0; j < 256; ++j) v(j) = f(g.points()(j));
  Wavefunction d2 = derivative(Wavefunction(g, v), 2);
  const double h = g.spacing() / 2;
  double err = 0.0;
  for (int j = 0; j < 256; ++j) {
    const double x = g.points()(j);
    auto fd = [&](double hh) { return (f(x + hh) - 2 * f(x) + f(x - hh)) / (hh * hh); };
    const double oracle = (4.0 * fd(h / 2) - fd(h)) / 3.0;
    err = std::max(err, std::abs(d2.values(j).real() - oracle));
  }
  CHECK(err < 1e-6);
}

TEST_CASE("derivative rejects non-finite input") {
  Grid1D g(-10.0, 10.0, 64);
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(64);
  v(3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(derivative(Wavefunction(g, v), 1), numeric_error);
}

TEST_CASE("Parseval: x-space norm of derivative equals k-weighted norm") {
  Grid1D g(-15.0, 15.0, 256);
  Eigen::VectorXcd v(256);
  for (int j = 0; j < 256; ++j) {
    const double x = g.points()(j);
    v(j) = std::exp(-x * x / 4.0) * complex<double>(std::cos(0.7 * x), std::sin(0.3 * x));
  }
  Wavefunction psi(g, v);
  const double lhs = derivative(psi, 1).norm_sq();
  SpectralOp op(g);
  Eigen::VectorXcd sp = op.fwd(psi.values);
  double rhs = 0.0;
  for (int j = 0; j < 256; ++j) rhs += sq(g.wavenumbers()(j)) * std::norm(sp(j));
  rhs *= g.spacing() / g.n_points();
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, lhs));
}

TEST_CASE("hamiltonian_matrix free particle has k^2 spectrum with +-k degeneracy") {
  Grid1D g(-10.0, 10.0, 64);
  OperatorMatrix h = hamiltonian_matrix(Eigen::VectorXd::Zero(64), g);
  CHECK(h.hermitian);
  CHECK(h.hermiticity_ok());
  Eigen::VectorXd ev = sym_eigenvalues(h);
  std::vector<double> expect;
  for (int j = 0; j < 64; ++j) expect.push_back(sq(g.wavenumbers()(j)));
  std::sort(expect.begin(), expect.end());
  for (int j = 0; j < 64; ++j) CHECK(std::abs(ev(j) - expect[j]) < 1e-9 * (1.0 + expect[j]));
}

TEST_CASE("hamiltonian_matrix length mismatch") {
  Grid1D g(-10.0, 10.0, 64);
  CHECK_THROWS_AS(hamiltonian_matrix(Eigen::VectorXd::Zero(32), g), invalid_argument_error);
}

TEST_CASE("single soliton bound level is -kappa^2 on the grid") {
  Grid1D g(-20.0, 20.0, 512);
  SpaceTimeField u = single_soliton(1.0);
  OperatorMatrix h = hamiltonian_matrix(u.sample(g, 0.0), g);
  Eigen::VectorXd ev = sym_eigenvalues(h);
  CHECK(std::abs(ev(0) + 1.0) < 1e-4);
  CHECK(ev(1) > -1e-3);  // single bound state only
}

TEST_CASE("operator_apply_cd3 on a plane wave gives a k^3 psi") {
  Grid1D g(-10.0, 10.0, 128);
  Wavefunction psi = plane_wave(g, 9);
  const double k = 9 * 2.0 * M_PI / g.length();
  const double a = -4.0;
  Wavefunction out = operator_apply_cd3(psi, Eigen::VectorXd::Zero(128), a, 0.0);
  double err = 0.0;
  for (int j = 0; j < 128; ++j)
    err = std::max(err, std::abs(out.values(j) - a * k * k * k * psi.values(j)));
  CHECK(err < 1e-9 * std::abs(a * k * k * k));
}

TEST_CASE("operator_apply_cd3 with a=0 reduces to scale-invariant driving v*p") {
  Grid1D g(-10.0, 10.0, 128);
  Wavefunction psi = plane_wave(g, 5);
  const double k = 5 * 2.0 * M_PI / g.length();
  const double v = 1.7;
  Wavefunction out = operator_apply_cd3(psi, Eigen::VectorXd::Random(128), 0.0, v);
  double err = 0.0;
  for (int j = 0; j < 128; ++j)
    err = std::max(err, std::abs(out.values(j) - v * k * psi.values(j)));
  CHECK(err < 1e-10 * std::abs(v * k));
}

TEST_CASE("operator_apply_cd3 matches the dense-matrix oracle on a bound state") {
  Grid1D g(-20.0, 20.0, 256);
  SolitonParams p({1.0}, {1.0});
  Eigen::VectorXd u = single_soliton(1.0).sample(g, 0.0);
  Wavefunction psi = adiabatic_ground_state(p, g, 0.0);
  Wavefunction fast = operator_apply_cd3(psi, u, -4.0, 0.0);
  OperatorMatrix dense = cd3_matrix(u, g, -4.0, 0.0);
  Eigen::VectorXcd slow = dense.entries * psi.values;
  CHECK((fast.values - slow).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("invariant_residual is zero for a static system") {
  Grid1D g(-10.0, 10.0, 64);
  Eigen::VectorXd u(64);
  for (int j = 0; j < 64; ++j) u(j) = -1.0 / std::cosh(g.points()(j));
  OperatorMatrix h = hamiltonian_matrix(u, g);
  OperatorMatrix hcd(Eigen::MatrixXcd::Zero(64, 64), true);
  CHECK(invariant_residual(h, h, 1e-5, hcd, h) < 1e-14);
}

TEST_CASE("invariant residual certifies the third-order CD pair and rejects a wrong one") {
  Grid1D g(-20.0, 20.0, 512);
  const double t = 0.3;
  SpaceTimeField u = single_soliton(1.0);
  const Eigen::VectorXd us = u.sample(g, t);
  Eigen::VectorXd ut(g.n_points());
  for (int j = 0; j < g.n_points(); ++j) ut(j) = u.dt(g.points()(j), t);
  OperatorMatrix had = hamiltonian_matrix(us, g);
  Eigen::MatrixXcd hdot = ut.cast<std::complex<double>>().asDiagonal();

  OperatorMatrix cd_good = cd3_matrix(us, g, -4.0, 0.0);
  const double r_good = invariant_residual_grid(hdot, cd_good, had, g);
  CHECK(r_good < 1e-6);

  OperatorMatrix cd_bad = cd3_matrix(us, g, -2.0, 0.0);
  const double r_bad = invariant_residual_grid(hdot, cd_bad, had, g);
  CHECK(r_bad > 1e-2);

  // gauge stability: c(t) * Identity added to H_cd is inert
  Eigen::MatrixXcd shifted = cd_good.entries;
  shifted.diagonal().array() += 0.37;
  const double r_shift = invariant_residual_grid(hdot, OperatorMatrix(shifted, true), had, g);
  CHECK(std::abs(r_shift - r_good) < 1e-12);
}

TEST_CASE("invariant_residual dimension mismatch") {
  Grid1D g(-10.0, 10.0, 64);
  OperatorMatrix h = hamiltonian_matrix(Eigen::VectorXd::Zero(64), g);
  OperatorMatrix small(Eigen::MatrixXcd::Zero(32, 32), true);
  CHECK_THROWS_AS(invariant_residual(h.entries, small, h), invalid_argument_error);
}

TEST_CASE("OperatorMatrix hermitian flag is checked") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(8, 8);
  CHECK_THROWS_AS(OperatorMatrix(m, true), numeric_error);
  OperatorMatrix ok = make_hermitian(m);
  CHECK(ok.hermiticity_ok());
}
