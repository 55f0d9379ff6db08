#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "lax/common.hpp"

namespace lax {

// log of tau(x,t) = sum_j exp(log_c_j + a_j x + b_j t) together with exact
// mixed partial derivatives. Derivatives come from the softmax-weight moment
// recursion
//   d^n/dx^n log tau:  g_n = rho_n - sum_{k=1}^{n-1} C(n-1,k) rho_k g_{n-k}
//   d/dt d^m/dx^m log tau: q_m = sig_m - sum_{k=1}^{m} C(m,k) rho_k q_{m-k}
// with rho_k = <a^k>, sig_m = <a^m b> under the softmax weights, which keeps
// the evaluation overflow-free for arbitrarily large exponents.
class ExpSumLog {
 public:
  struct Term {
    double log_c;
    double a;
    double b;
  };

  struct Jet {
    double log_value = 0.0;             // log tau
    std::vector<double> dx;             // dx[m] = d^m/dx^m log tau, m = 0..order
    std::vector<double> dt_dx;          // dt_dx[m] = d/dt d^m/dx^m log tau
  };

  explicit ExpSumLog(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw invalid_argument_error("ExpSumLog: empty term list");
  }

  static double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }

  Jet jet(double x, double t, int order) const {
    const std::size_t m = terms_.size();
    std::vector<double> th(m), w(m);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      th[j] = terms_[j].log_c + terms_[j].a * x + terms_[j].b * t;
      mx = std::max(mx, th[j]);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      w[j] = std::exp(th[j] - mx);
      s += w[j];
    }
    for (auto& v : w) v /= s;

    std::vector<double> rho(order + 1, 0.0), sig(order + 1, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      double ap = 1.0;
      for (int k = 0; k <= order; ++k) {
        rho[k] += w[j] * ap;
        sig[k] += w[j] * ap * terms_[j].b;
        ap *= terms_[j].a;
      }
    }

    Jet out;
    out.log_value = mx + std::log(s);
    out.dx.assign(order + 1, 0.0);
    out.dt_dx.assign(order + 1, 0.0);
    out.dx[0] = out.log_value;
    for (int n = 1; n <= order; ++n) {
      double acc = rho[n];
      for (int k = 1; k < n; ++k) acc -= binom(n - 1, k) * rho[k] * out.dx[n - k];
      out.dx[n] = acc;
    }
    for (int mm = 0; mm <= order; ++mm) {
      double acc = sig[mm];
      for (int k = 1; k <= mm; ++k) acc -= binom(mm, k) * rho[k] * out.dt_dx[mm - k];
      out.dt_dx[mm] = acc;
    }
    return out;
  }

  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

}  // namespace lax
