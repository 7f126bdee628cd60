#include "nhfp/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nhfp/errors.hpp"

namespace nhfp {

Matrix2cd expm_2x2(const Matrix2cd& h, double dt) {
  const cx half_tr = 0.5 * (h(0, 0) + h(1, 1));
  Matrix2cd a = h;
  a(0, 0) -= half_tr;
  a(1, 1) -= half_tr;
  // a is traceless: a^2 = -det(a) * 1, so exp is cos/sinc in d = sqrt(-det).
  const cx d = std::sqrt(-(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)));
  const cx z = d * dt;
  cx cosz, sinc;
  if (std::abs(z) < 1e-4) {
    const cx z2 = z * z;
    cosz = 1.0 - z2 / 2.0 + z2 * z2 / 24.0;
    sinc = dt * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
  } else {
    cosz = std::cos(z);
    sinc = std::sin(z) / d;
  }
  const cx phase = std::exp(-I * half_tr * dt);
  Matrix2cd e = -I * sinc * a;
  e(0, 0) += cosz;
  e(1, 1) += cosz;
  return phase * e;
}

namespace {

// Times in (0, T) where a loss rate switches on or off, i.e. where
// cos(Omega t + phi) crosses zero. The A and B kinks coincide mod T.
std::vector<double> kink_times(const DriveParams& p) {
  if (p.gamma0 == 0.0) return {};
  const double T = p.period();
  std::vector<double> ts;
  for (int m = -2; m <= 4; ++m) {
    const double t = (0.5 * std::numbers::pi + m * std::numbers::pi - p.phi) / p.omega;
    if (t > 1e-12 * T && t < T * (1.0 - 1e-12)) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  return ts;
}

}  // namespace

Matrix2cd propagator_2x2(const std::function<Matrix2cd(double)>& h_of_t,
                         double t0, double t1, int steps) {
  Matrix2cd u = Matrix2cd::Identity();
  const double dt = (t1 - t0) / steps;
  for (int s = 0; s < steps; ++s) {
    const double tm = t0 + (s + 0.5) * dt;
    u = (expm_2x2(h_of_t(tm), dt) * u).eval();
  }
  return u;
}

Monodromy monodromy(const DriveParams& p, double k, int steps) {
  p.validate();
  if (steps < 1000) throw invalid_argument("monodromy: steps must be >= 1000");
  const double T = p.period();

  std::vector<double> edges = {0.0};
  for (double t : kink_times(p)) edges.push_back(t);
  edges.push_back(T);

  Monodromy m;
  m.k = k;
  m.steps = steps;
  const auto h_of_t = [&](double t) { return bloch_hamiltonian(p, k, t); };
  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double t0 = edges[seg], t1 = edges[seg + 1];
    const int n = std::max(1, int(std::lround(steps * (t1 - t0) / T)));
    m.u_t = (propagator_2x2(h_of_t, t0, t1, n) * m.u_t).eval();
  }
  return m;
}

namespace {

std::array<cx, 2> multipliers(const Matrix2cd& u) {
  const cx tr = u(0, 0) + u(1, 1);
  const cx det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  const cx disc = std::sqrt(tr * tr - 4.0 * det);
  return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

cx quasienergy(cx mu, double T) {
  if (std::abs(mu) < 1e-300)
    throw error("monodromy eigenvalue vanished (total absorption)");
  // eps = i ln(mu)/T; arg in (-pi, pi] puts Re eps in [-Omega/2, Omega/2).
  return cx(-std::arg(mu) / T, std::log(std::abs(mu)) / T);
}

}  // namespace

std::array<cx, 2> quasienergies_from_monodromy(const Monodromy& m, double omega) {
  const double T = 2.0 * std::numbers::pi / omega;
  const auto mu = multipliers(m.u_t);
  return {quasienergy(mu[0], T), quasienergy(mu[1], T)};
}

MonodromyModes monodromy_modes(const Monodromy& m, double omega) {
  const double T = 2.0 * std::numbers::pi / omega;
  const auto mu = multipliers(m.u_t);
  MonodromyModes out;
  for (int i = 0; i < 2; ++i) {
    out.eps[i] = quasienergy(mu[i], T);
    Vector2cd v;
    // Row choice by magnitude keeps the vector well-conditioned.
    if (std::abs(m.u_t(0, 1)) + std::abs(mu[i] - m.u_t(0, 0)) >=
        std::abs(m.u_t(1, 0)) + std::abs(mu[i] - m.u_t(1, 1))) {
      v << m.u_t(0, 1), mu[i] - m.u_t(0, 0);
    } else {
      v << mu[i] - m.u_t(1, 1), m.u_t(1, 0);
    }
    const double n = v.norm();
    if (n < 1e-300) throw error("monodromy eigenvector degenerate");
    out.vec[i] = v / n;
  }
  return out;
}

}  // namespace nhfp
