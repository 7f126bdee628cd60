#include "nhfp/drive.hpp"

#include <cmath>

namespace nhfp {

void DriveParams::validate() const {
  if (!(u0 >= 0.0)) throw invalid_argument("DriveParams: u0 must be >= 0");
  if (!(j0 > 0.0)) throw invalid_argument("DriveParams: j0 must be > 0");
  if (!(lambda > 0.0)) throw invalid_argument("DriveParams: lambda must be > 0");
  if (!(gamma0 >= 0.0)) throw invalid_argument("DriveParams: gamma0 must be >= 0");
  if (!(omega > 0.0)) throw invalid_argument("DriveParams: omega must be > 0");
  if (!(a0 > 0.0)) throw invalid_argument("DriveParams: a0 must be > 0");
  if (!std::isfinite(period())) throw invalid_argument("DriveParams: period not finite");
}

namespace {

double onsite_a(const DriveParams& p, double t) {
  return -p.u0 * std::cos(p.omega * t + p.phi);
}

double hop_1(const DriveParams& p, double t) {
  return p.j0 * std::exp(-p.lambda * (1.0 - std::sin(p.omega * t)));
}

// Heaviside with Theta(0) = 0, so the loss vanishes exactly at the
// switching instant and gamma stays continuous.
double loss_a(const DriveParams& p, double t) {
  double ua = onsite_a(p, t);
  if (ua <= 0.0) return 0.0;
  return -p.gamma0 * std::cos(p.omega * t + p.phi);
}

}  // namespace

DriveSample drive_at(const DriveParams& p, double t) {
  const double sh = t - 0.5 * p.period();
  return DriveSample{hop_1(p, t),   hop_1(p, sh),  onsite_a(p, t),
                     onsite_a(p, sh), loss_a(p, t), loss_a(p, sh)};
}

double coupling_at(const DriveParams& p, Coupling c, double t) {
  const DriveSample s = drive_at(p, t);
  switch (c) {
    case Coupling::j1: return s.j1;
    case Coupling::j2: return s.j2;
    case Coupling::ua: return s.ua;
    case Coupling::ub: return s.ub;
    case Coupling::ga: return s.ga;
    case Coupling::gb: return s.gb;
  }
  return 0.0;
}

Matrix2cd bloch_hamiltonian(const DriveParams& p, double k, double t) {
  const DriveSample s = drive_at(p, t);
  const cx e = std::polar(1.0, 0.5 * k * p.a0);
  const cx off = s.j1 * e + s.j2 * std::conj(e);
  Matrix2cd h;
  h << cx(s.ua, -s.ga), off, std::conj(off), cx(s.ub, -s.gb);
  return h;
}

MatrixXcd realspace_hamiltonian(const DriveParams& p, int n_cells, double t) {
  if (n_cells < 2) throw invalid_argument("realspace_hamiltonian: n_cells must be >= 2");
  const DriveSample s = drive_at(p, t);
  const int n = 2 * n_cells;
  MatrixXcd h = MatrixXcd::Zero(n, n);
  for (int j = 0; j < n_cells; ++j) {
    h(2 * j, 2 * j) = cx(s.ua, -s.ga);
    h(2 * j + 1, 2 * j + 1) = cx(s.ub, -s.gb);
    h(2 * j, 2 * j + 1) = s.j1;
    h(2 * j + 1, 2 * j) = s.j1;
    if (j + 1 < n_cells) {
      h(2 * j + 1, 2 * j + 2) = s.j2;
      h(2 * j + 2, 2 * j + 1) = s.j2;
    }
  }
  return h;
}

MatrixXcd ring_hamiltonian(const DriveParams& p, int n_cells, double t) {
  MatrixXcd h = realspace_hamiltonian(p, n_cells, t);
  const DriveSample s = drive_at(p, t);
  h(2 * n_cells - 1, 0) = s.j2;
  h(0, 2 * n_cells - 1) = s.j2;
  return h;
}

cx HarmonicSet::reconstruct(Coupling f, double t, double omega) const {
  cx sum = 0.0;
  for (int n = -m_max_; n <= m_max_; ++n)
    sum += c(f, n) * std::polar(1.0, -n * omega * t);
  return sum;
}

HarmonicSet drive_harmonics(const DriveParams& p, int m_max, int n_samples) {
  if (m_max < 1) throw invalid_argument("drive_harmonics: m_max must be >= 1");
  if (n_samples < 4 * m_max)
    throw invalid_argument("drive_harmonics: n_samples must be >= 4*m_max");
  if ((n_samples & (n_samples - 1)) != 0)
    throw invalid_argument("drive_harmonics: n_samples must be a power of two");

  const double T = p.period();
  HarmonicSet h(m_max, n_samples);

  // Sample each coupling once, then project onto exp(+i n Omega t)/N.
  std::array<VectorXd, 6> samples;
  for (int f = 0; f < 6; ++f) samples[f].resize(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    const DriveSample d = drive_at(p, s * T / n_samples);
    samples[0][s] = d.j1;
    samples[1][s] = d.j2;
    samples[2][s] = d.ua;
    samples[3][s] = d.ub;
    samples[4][s] = d.ga;
    samples[5][s] = d.gb;
  }
  // c_n = (1/N) sum_s f_s exp(+i n Omega t_s); the couplings are real, so
  // only n >= 0 is accumulated and the rest mirrors by conjugation.
  std::array<VectorXcd, 6> acc;
  for (int f = 0; f < 6; ++f) acc[f] = VectorXcd::Zero(m_max + 1);
  for (int s = 0; s < n_samples; ++s) {
    const double ang = 2.0 * std::numbers::pi * s / n_samples;
    const cx step(std::cos(ang), std::sin(ang));
    cx r = 1.0;
    for (int n = 0; n <= m_max; ++n) {
      for (int f = 0; f < 6; ++f) acc[f][n] += samples[f][s] * r;
      r *= step;
    }
  }
  for (int f = 0; f < 6; ++f)
    for (int n = 0; n <= m_max; ++n) {
      const cx c = acc[f][n] / double(n_samples);
      h.at(static_cast<Coupling>(f), n) = c;
      if (n > 0) h.at(static_cast<Coupling>(f), -n) = std::conj(c);
    }
  return h;
}

Matrix2cd bloch_harmonic_block(const HarmonicSet& h, const DriveParams& p,
                               double k, int m) {
  const double c = std::cos(0.5 * k * p.a0);
  const double s = std::sin(0.5 * k * p.a0);
  const cx j1 = h.c(Coupling::j1, m), j2 = h.c(Coupling::j2, m);
  const cx ua = h.c(Coupling::ua, m), ub = h.c(Coupling::ub, m);
  const cx ga = h.c(Coupling::ga, m), gb = h.c(Coupling::gb, m);
  Matrix2cd block;
  block << ua - I * ga, (j1 + j2) * c + I * (j1 - j2) * s,
      (j1 + j2) * c - I * (j1 - j2) * s, ub - I * gb;
  return block;
}

}  // namespace nhfp
