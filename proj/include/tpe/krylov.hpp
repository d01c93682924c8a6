#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>

namespace tpe {

struct MinresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual_estimate = 0.0;  ///< preconditioned residual norm estimate
};

/// Preconditioned MINRES for symmetric (possibly indefinite) A with SPD
/// preconditioner M; `apply_Minv` applies M^{-1}. Stops when the
/// preconditioned residual drops below rtol times its initial value.
inline MinresResult minres(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply_A,
                           const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply_Minv,
                           const Eigen::VectorXd& b, double rtol, int max_iters) {
  const Eigen::Index n = b.size();
  MinresResult out{Eigen::VectorXd::Zero(n), 0, 0.0};
  Eigen::VectorXd r1 = b;
  Eigen::VectorXd y = apply_Minv(r1);
  const double beta1 = std::sqrt(std::max(0.0, r1.dot(y)));
  if (beta1 == 0.0) return out;

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Eigen::VectorXd r2 = r1;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n), w1(n), w2 = Eigen::VectorXd::Zero(n);
  for (int itn = 1; itn <= max_iters; ++itn) {
    const Eigen::VectorXd v = y / beta;
    y = apply_A(v);
    if (itn >= 2) y -= (beta / oldb) * r1;
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    y = apply_Minv(r2);
    oldb = beta;
    beta = std::sqrt(std::max(0.0, r2.dot(y)));
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::min());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    out.x += phi * w;
    out.iterations = itn;
    out.residual_estimate = phibar;
    if (phibar <= rtol * beta1 || beta == 0.0) break;
  }
  return out;
}

}  // namespace tpe
