#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "lax/common.hpp"

namespace lax {

// Uniform periodic grid on [x_min, x_max): point j sits at x_min + j*dx and
// point n wraps to point 0.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, int n_points)
      : x_min_(x_min), x_max_(x_max), n_(n_points) {
    if (n_points < 8) throw invalid_argument_error("Grid1D: n_points must be >= 8");
    if (!(x_max > x_min)) throw invalid_argument_error("Grid1D: x_max must exceed x_min");
    const double dx = spacing();
    x_.resize(n_);
    k_.resize(n_);
    const double dk = 2.0 * M_PI / length();
    for (int j = 0; j < n_; ++j) {
      x_(j) = x_min_ + j * dx;
      // standard FFT frequency layout; j = n/2 carries the negative Nyquist
      k_(j) = dk * (j <= (n_ - 1) / 2 ? j : j - n_);
    }
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  int n_points() const { return n_; }
  double length() const { return x_max_ - x_min_; }
  double spacing() const { return (x_max_ - x_min_) / n_; }
  double k_max() const { return M_PI / spacing(); }

  const Eigen::VectorXd& points() const { return x_; }
  const Eigen::VectorXd& wavenumbers() const { return k_; }

  friend bool operator==(const Grid1D& a, const Grid1D& b) {
    return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_ == b.n_;
  }
  friend bool operator!=(const Grid1D& a, const Grid1D& b) { return !(a == b); }

 private:
  double x_min_, x_max_;
  int n_;
  Eigen::VectorXd x_, k_;
};

struct Wavefunction {
  Grid1D grid;
  Eigen::VectorXcd values;

  Wavefunction(const Grid1D& g, Eigen::VectorXcd v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n_points())
      throw invalid_argument_error("Wavefunction: value count does not match grid");
  }

  static Wavefunction zero(const Grid1D& g) {
    return Wavefunction(g, Eigen::VectorXcd::Zero(g.n_points()));
  }

  double norm_sq() const { return values.squaredNorm() * grid.spacing(); }
  double norm() const { return std::sqrt(norm_sq()); }

  Wavefunction& normalize() {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n))
      throw numeric_error("Wavefunction::normalize: norm is zero or non-finite");
    values /= n;
    return *this;
  }
};

// <a|b> with the grid measure.
inline std::complex<double> inner(const Wavefunction& a, const Wavefunction& b) {
  if (a.grid != b.grid) throw invalid_argument_error("inner: grid mismatch");
  return a.values.dot(b.values) * a.grid.spacing();
}

}  // namespace lax
