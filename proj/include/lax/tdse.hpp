#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "lax/kdv.hpp"
#include "lax/spectral.hpp"

namespace lax {

enum class CdMode { none, scalar_vcd, operator_cd3, operator_cd5, linear_p };

// What drives the propagation: the base potential plus one counterdiabatic
// dressing. Factories below assemble the consistent combinations.
struct DrivingSpec {
  SpaceTimeField base;
  CdMode mode = CdMode::none;
  std::optional<SpaceTimeField> vcd;            // scalar_vcd
  std::optional<SpaceTimeField> gauge_phase;    // scalar_vcd frame bookkeeping
  std::optional<SpaceTimeField> linear_coeff;   // linear_p, x-dependent
  std::optional<double> linear_constant;        // linear_p, constant coefficient
  double cd3_a = -4.0;
  double cd3_c1 = 0.0;
  bool gauge_frame = false;

  explicit DrivingSpec(SpaceTimeField b) : base(std::move(b)) {}
};

inline DrivingSpec driving_none(SpaceTimeField u) { return DrivingSpec(std::move(u)); }

inline DrivingSpec driving_scalar_vcd(const SolitonParams& p,
                                      VcdConvention conv = VcdConvention::main_text) {
  if (!p.two_solitons())
    throw invalid_argument_error("driving_scalar_vcd: scalar V_cd requires a two-soliton base");
  DrivingSpec spec(double_soliton(p));
  spec.mode = CdMode::scalar_vcd;
  spec.vcd = cd_potential_vcd(p, conv);
  spec.gauge_phase = gauge_phase(p);
  spec.gauge_frame = true;
  return spec;
}

inline DrivingSpec driving_linear_p(SpaceTimeField u, SpaceTimeField coeff) {
  DrivingSpec spec(std::move(u));
  spec.mode = CdMode::linear_p;
  spec.linear_coeff = std::move(coeff);
  return spec;
}

inline DrivingSpec driving_linear_p_constant(SpaceTimeField u, double coeff) {
  DrivingSpec spec(std::move(u));
  spec.mode = CdMode::linear_p;
  spec.linear_constant = coeff;
  return spec;
}

inline DrivingSpec driving_cd3(SpaceTimeField u, double a = -4.0, double c1 = 0.0) {
  DrivingSpec spec(std::move(u));
  spec.mode = CdMode::operator_cd3;
  spec.cd3_a = a;
  spec.cd3_c1 = c1;
  return spec;
}

inline DrivingSpec driving_cd5(SpaceTimeField u) {
  if (u.max_dx_order() < 2)
    throw invalid_argument_error("driving_cd5: base must provide second derivatives");
  DrivingSpec spec(std::move(u));
  spec.mode = CdMode::operator_cd5;
  return spec;
}

struct PropagationOptions {
  int sample_stride = 100;
  // Reference state for the fidelity series; null disables the series.
  std::function<Wavefunction(const Grid1D&, double)> reference;
};

struct PropagationResult {
  std::vector<double> times;
  std::vector<double> fidelity_series;
  std::vector<double> norm_series;
  Wavefunction final_state;
  double max_norm_drift = 0.0;
};

inline double fidelity(const Wavefunction& a, const Wavefunction& b) {
  const double f = std::abs(inner(a, b));
  return std::min(f, 1.0);
}

namespace detail {

inline bool scheme_is_strang(const DrivingSpec& spec) {
  switch (spec.mode) {
    case CdMode::none:
    case CdMode::scalar_vcd:
      return true;
    case CdMode::linear_p:
      return spec.linear_constant.has_value();
    default:
      return false;
  }
}

// Spectral-radius estimate of the full operator for the RK4 stability check.
inline double rk4_radius(const DrivingSpec& spec, const Grid1D& grid, double t) {
  const double km = grid.k_max();
  double r = km * km;
  const auto& x = grid.points();
  auto max_abs = [&](const SpaceTimeField& f) {
    double m = 0.0;
    for (int j = 0; j < x.size(); j += 8) m = std::max(m, std::abs(f.value(x(j), t)));
    return m;
  };
  switch (spec.mode) {
    case CdMode::linear_p:
      r += (spec.linear_constant ? std::abs(*spec.linear_constant)
                                 : max_abs(*spec.linear_coeff)) *
           km;
      break;
    case CdMode::operator_cd3:
      r += std::abs(spec.cd3_a) * km * km * km + std::abs(spec.cd3_c1) * km;
      break;
    case CdMode::operator_cd5:
      r += 16.0 * std::pow(km, 5) + 40.0 * max_abs(spec.base) * std::pow(km, 3);
      break;
    default:
      break;
  }
  r += max_abs(spec.base);
  return r;
}

}  // namespace detail

// Solves i psi_t = H(t) psi. Strang splitting when the potential is scalar
// (kinetic symbol absorbs a constant linear-p coefficient); classic RK4 on
// the spectrally applied operator when derivative terms are present.
inline PropagationResult propagate(const Wavefunction& psi0, const DrivingSpec& spec, double t0,
                                   double t1, double dt,
                                   const PropagationOptions& opt = {}) {
  if (!(dt > 0) || !(t1 > t0)) throw invalid_argument_error("propagate: bad time window");
  if (std::abs(psi0.norm() - 1.0) > 1e-6)
    throw invalid_argument_error("propagate: psi0 must be normalized");
  if (spec.mode == CdMode::scalar_vcd && !spec.vcd)
    throw invalid_argument_error("propagate: scalar_vcd mode without V_cd field");
  if (spec.mode == CdMode::linear_p && !spec.linear_coeff && !spec.linear_constant)
    throw invalid_argument_error("propagate: linear_p mode without coefficient");
  if (spec.mode == CdMode::operator_cd5 && spec.base.max_dx_order() < 2)
    throw capability_error("propagate: cd5 needs u_xx");

  const Grid1D& grid = psi0.grid;
  const int n = grid.n_points();
  const auto& x = grid.points();
  const auto& k = grid.wavenumbers();
  const bool strang = detail::scheme_is_strang(spec);
  const long nsteps = std::lround((t1 - t0) / dt);

  if (!strang) {
    const double radius = detail::rk4_radius(spec, grid, t0);
    if (radius * dt > 2.7)
      throw step_size_error("propagate: dt " + std::to_string(dt) +
                            " exceeds RK4 stability bound 2.7/" + std::to_string(radius));
  }
  if (grid.k_max() * grid.k_max() * dt >= 0.5 && !strang)
    throw step_size_error("propagate: dt does not resolve the kinetic scale");

  SpectralOp op(grid);
  Eigen::VectorXcd psi = psi0.values;

  PropagationResult result{{}, {}, {}, psi0, 0.0};
  const std::complex<double> im(0.0, 1.0);

  auto record = [&](double t) {
    Wavefunction cur(grid, psi);
    const double nn = cur.norm();
    result.max_norm_drift = std::max(result.max_norm_drift, std::abs(nn - 1.0));
    if (result.max_norm_drift > 1e-3)
      throw step_size_error("propagate: norm drift " + std::to_string(result.max_norm_drift) +
                            " at t=" + std::to_string(t) + "; reduce dt");
    result.times.push_back(t);
    result.norm_series.push_back(nn);
    if (opt.reference) {
      Wavefunction cmp = cur;
      if (spec.gauge_frame && spec.gauge_phase) {
        for (int j = 0; j < n; ++j)
          cmp.values(j) *= std::exp(im * spec.gauge_phase->value(x(j), t));
      }
      cmp.values /= cmp.norm();
      result.fidelity_series.push_back(fidelity(opt.reference(grid, t), cmp));
    }
  };

  if (strang) {
    Eigen::VectorXcd kin_half(n);
    const double c0 = spec.linear_constant.value_or(0.0);
    for (int j = 0; j < n; ++j)
      kin_half(j) = std::exp(-im * (k(j) * k(j) + c0 * k(j)) * (dt / 2));
    Eigen::VectorXd v(n);
    double t = t0;
    record(t);
    for (long s = 0; s < nsteps; ++s) {
      const double tm = t + dt / 2;
      for (int j = 0; j < n; ++j) {
        v(j) = spec.base.value(x(j), tm);
        if (spec.mode == CdMode::scalar_vcd) v(j) += spec.vcd->value(x(j), tm);
      }
      psi = op.inv((op.fwd(psi).array() * kin_half.array()).matrix());
      for (int j = 0; j < n; ++j) psi(j) *= std::exp(-im * v(j) * dt);
      psi = op.inv((op.fwd(psi).array() * kin_half.array()).matrix());
      t = t0 + (s + 1) * dt;
      if ((s + 1) % opt.sample_stride == 0 || s + 1 == nsteps) record(t);
    }
  } else {
    Eigen::VectorXd u(n), uxx(n), c(n);
    auto H_apply = [&](const Eigen::VectorXcd& p, double t) -> Eigen::VectorXcd {
      for (int j = 0; j < n; ++j) u(j) = spec.base.value(x(j), t);
      Eigen::VectorXcd out = op.apply_hamiltonian(p, u);
      Wavefunction w(grid, p);
      switch (spec.mode) {
        case CdMode::linear_p: {
          for (int j = 0; j < n; ++j) c(j) = spec.linear_coeff->value(x(j), t);
          const Eigen::VectorXcd pp = op.momentum_power(p, 1);
          const Eigen::VectorXcd cp = c.cast<std::complex<double>>().cwiseProduct(p);
          out += 0.5 * (c.cast<std::complex<double>>().cwiseProduct(pp) +
                        op.momentum_power(cp, 1));
          break;
        }
        case CdMode::operator_cd3:
          out += operator_apply_cd3(w, u, spec.cd3_a, spec.cd3_c1).values;
          break;
        case CdMode::operator_cd5: {
          for (int j = 0; j < n; ++j) uxx(j) = spec.base.dx(x(j), t, 2);
          out += operator_apply_cd5(w, u, uxx).values;
          break;
        }
        default:
          break;
      }
      return out;
    };
    double t = t0;
    record(t);
    for (long s = 0; s < nsteps; ++s) {
      const Eigen::VectorXcd k1v = -im * H_apply(psi, t);
      const Eigen::VectorXcd k2v = -im * H_apply(psi + (dt / 2) * k1v, t + dt / 2);
      const Eigen::VectorXcd k3v = -im * H_apply(psi + (dt / 2) * k2v, t + dt / 2);
      const Eigen::VectorXcd k4v = -im * H_apply(psi + dt * k3v, t + dt);
      psi += (dt / 6) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      t = t0 + (s + 1) * dt;
      if ((s + 1) % opt.sample_stride == 0 || s + 1 == nsteps) record(t);
    }
  }

  result.final_state = Wavefunction(grid, std::move(psi));
  return result;
}

// Instantaneous eigenstate of the discretized H_ad(t), selected by bound
// level index; phase-aligned against prev when given (maximizes Re<prev|psi>).
inline Wavefunction reference_adiabatic_state(const SpaceTimeField& u, const Grid1D& grid,
                                              double t, int level = 0,
                                              const Wavefunction* prev = nullptr) {
  const OperatorMatrix h = hamiltonian_matrix(u.sample(grid, t), grid);
  const EigenSystem es = sym_eig(h, true);
  int bound = 0;
  while (bound < es.values.size() && es.values(bound) < -1e-9) ++bound;
  if (level >= bound)
    throw invalid_argument_error("reference_adiabatic_state: level index " +
                                 std::to_string(level) + " >= bound-state count " +
                                 std::to_string(bound));
  Wavefunction psi(grid, es.vectors.col(level));
  psi.normalize();
  if (prev) {
    const std::complex<double> ov = inner(*prev, psi);
    if (std::abs(ov) > 0) psi.values *= std::conj(ov) / std::abs(ov);
  } else {
    // fix sign so the dominant-amplitude component is positive real
    int jmax = 0;
    for (int j = 1; j < psi.values.size(); ++j)
      if (std::abs(psi.values(j)) > std::abs(psi.values(jmax))) jmax = j;
    const std::complex<double> a = psi.values(jmax);
    if (std::abs(a) > 0) psi.values *= std::conj(a) / std::abs(a);
  }
  return psi;
}

inline double bound_state_energy(const SpaceTimeField& u, const Grid1D& grid, double t,
                                 int level) {
  const OperatorMatrix h = hamiltonian_matrix(u.sample(grid, t), grid);
  const Eigen::VectorXd vals = sym_eigenvalues(h);
  int bound = 0;
  while (bound < vals.size() && vals(bound) < -1e-9) ++bound;
  if (level >= bound) throw invalid_argument_error("bound_state_energy: level out of range");
  return vals(level);
}

}  // namespace lax
