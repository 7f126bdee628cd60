#include "nhfp/dynamics.hpp"

#include <cmath>

#include "nhfp/errors.hpp"

namespace nhfp {

namespace {

// dpsi = -i H(t) psi without forming H; couplings evaluated once per call.
void apply_rhs(const DriveParams& p, Boundary boundary, double t,
               const VectorXcd& psi, VectorXcd& out) {
  const DriveSample d = drive_at(p, t);
  const int nc = int(psi.size()) / 2;
  const cx da(d.ua, -d.ga), db(d.ub, -d.gb);
  for (int j = 0; j < nc; ++j) {
    cx a = da * psi[2 * j] + d.j1 * psi[2 * j + 1];
    cx b = db * psi[2 * j + 1] + d.j1 * psi[2 * j];
    if (j > 0)
      a += d.j2 * psi[2 * j - 1];
    else if (boundary == Boundary::ring)
      a += d.j2 * psi[2 * nc - 1];
    if (j + 1 < nc)
      b += d.j2 * psi[2 * j + 2];
    else if (boundary == Boundary::ring)
      b += d.j2 * psi[0];
    out[2 * j] = -I * a;
    out[2 * j + 1] = -I * b;
  }
}

struct Rk4 {
  VectorXcd k1, k2, k3, k4, tmp;
  explicit Rk4(int n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}

  void step(const DriveParams& p, Boundary b, double t, double dt,
            VectorXcd& psi) {
    apply_rhs(p, b, t, psi, k1);
    tmp = psi + 0.5 * dt * k1;
    apply_rhs(p, b, t + 0.5 * dt, tmp, k2);
    tmp = psi + 0.5 * dt * k2;
    apply_rhs(p, b, t + 0.5 * dt, tmp, k3);
    tmp = psi + dt * k3;
    apply_rhs(p, b, t + dt, tmp, k4);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

Trajectory integrate(const DriveParams& p, VectorXcd psi, int input_site,
                     int n_cycles, const PropagateOptions& opt) {
  p.validate();
  if (opt.steps_per_cycle < 500)
    throw invalid_argument("propagate: steps_per_cycle must be >= 500");
  if (opt.snapshots_per_cycle < 1 ||
      opt.steps_per_cycle % opt.snapshots_per_cycle != 0)
    throw invalid_argument(
        "propagate: snapshots_per_cycle must divide steps_per_cycle");
  if (n_cycles < 1) throw invalid_argument("propagate: n_cycles must be >= 1");

  const int n = int(psi.size());
  const int nc = n / 2;
  Trajectory traj;
  traj.params = p;
  traj.n_cells = nc;
  traj.boundary = opt.boundary;
  traj.input_site = input_site;
  traj.steps_per_cycle = opt.steps_per_cycle;
  traj.snapshots_per_cycle = opt.snapshots_per_cycle;

  const double dt = p.period() / opt.steps_per_cycle;
  const int stride = opt.steps_per_cycle / opt.snapshots_per_cycle;
  const int total_steps = opt.steps_per_cycle * n_cycles;
  const int n_stored = n_cycles * opt.snapshots_per_cycle + 1;
  traj.times.resize(n_stored);
  traj.psi.reserve(n_stored);

  const bool check =
      opt.check_boundary && opt.boundary == Boundary::open && nc >= 8;
  auto check_edges = [&](const VectorXcd& st) {
    const double peak = st.cwiseAbs().maxCoeff();
    double edge = 0.0;
    for (int s : {0, 1, 2, 3, n - 4, n - 3, n - 2, n - 1})
      edge = std::max(edge, std::abs(st[s]));
    if (edge > 1e-6 * peak)
      throw lattice_too_small_error(
          "wave packet reached the lattice boundary; enlarge the lattice",
          2 * nc + 1);
  };

  Rk4 rk(n);
  int stored = 0;
  traj.times[stored] = 0.0;
  traj.psi.push_back(psi);
  ++stored;
  for (int step = 0; step < total_steps; ++step) {
    rk.step(p, opt.boundary, step * dt, dt, psi);
    if ((step + 1) % stride == 0) {
      traj.times[stored] = (step + 1) * dt;
      traj.psi.push_back(psi);
      ++stored;
      if (check) check_edges(psi);
    }
  }
  return traj;
}

}  // namespace

Trajectory propagate(const DriveParams& p, int n_cells, int cell, Input input,
                     int n_cycles, const PropagateOptions& opt) {
  if (n_cells < 2) throw invalid_argument("propagate: n_cells must be >= 2");
  if (cell < 0 || cell >= n_cells) throw invalid_argument("propagate: cell index");
  if (opt.boundary == Boundary::open) {
    // Light cone estimate: at most 2 cells per cycle plus a 4-cell margin.
    const int margin = 2 * n_cycles + 4;
    if (cell - margin < 0 || cell + margin >= n_cells) {
      const int needed = 2 * margin + 1;
      throw lattice_too_small_error(
          "propagate: light cone would reach the boundary; need >= " +
              std::to_string(needed) + " cells around the input",
          needed);
    }
  }
  const int site = 2 * cell + (input == Input::A ? 0 : 1);
  VectorXcd psi0 = VectorXcd::Zero(2 * n_cells);
  psi0[site] = 1.0;
  return integrate(p, std::move(psi0), site, n_cycles, opt);
}

Trajectory propagate_state(const DriveParams& p, const VectorXcd& psi0,
                           int n_cycles, const PropagateOptions& opt) {
  if (psi0.size() < 4 || psi0.size() % 2 != 0)
    throw invalid_argument("propagate_state: state size must be even, >= 4");
  return integrate(p, psi0, -1, n_cycles, opt);
}

VectorXd center_of_mass(const Trajectory& traj) {
  const int ns = traj.n_stored();
  VectorXd com(ns);
  for (int s = 0; s < ns; ++s) {
    double w = 0.0, xw = 0.0;
    for (int site = 0; site < traj.n_sites(); ++site) {
      const double dens = std::norm(traj.psi[s][site]);
      w += dens;
      xw += dens * traj.position(site);
    }
    com[s] = xw / w / traj.params.a0;
  }
  return com;
}

double com_cycle_slope(const Trajectory& traj, int from, int to) {
  const VectorXd com = center_of_mass(traj);
  int n = 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int c = from; c <= to; ++c) {
    const int idx = traj.cycle_index(c);
    if (idx >= traj.n_stored())
      throw invalid_argument("com_cycle_slope: trajectory too short");
    const double x = c, y = com[idx];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw invalid_argument("com_cycle_slope: need at least 2 cycles");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

VectorXd norm_series(const Trajectory& traj) {
  VectorXd out(traj.n_stored());
  for (int s = 0; s < traj.n_stored(); ++s) out[s] = traj.psi[s].squaredNorm();
  return out;
}

DecayFit norm_decay(const Trajectory& traj, int from, int to) {
  const VectorXd norms = norm_series(traj);
  if (traj.params.gamma0 > 0.0) {
    for (int s = 1; s < norms.size(); ++s)
      if (norms[s] > norms[s - 1] * (1.0 + 1e-9))
        throw error("norm_decay: norm not non-increasing (integrator failure)");
  }
  int n = 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int c = from; c <= to; ++c) {
    const int idx = traj.cycle_index(c);
    if (idx >= traj.n_stored())
      throw invalid_argument("norm_decay: trajectory too short");
    const double x = traj.times[idx], y = std::log(norms[idx]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double rss = 0.0;
  for (int c = from; c <= to; ++c) {
    const int idx = traj.cycle_index(c);
    const double r =
        std::log(norms[idx]) - (slope * traj.times[idx] + intercept);
    rss += r * r;
  }
  return {-slope, std::sqrt(rss / n)};
}

SpectralMap spacetime_spectrum(const Trajectory& traj, const VectorXd& e_grid,
                               const VectorXd& k_grid, int fold_replicas) {
  const int n_cycles = (traj.n_stored() - 1) / traj.snapshots_per_cycle;
  if (n_cycles < 4)
    throw invalid_argument("spacetime_spectrum: need at least 4 cycles");
  const double omega = traj.params.omega;
  const int ne = int(e_grid.size()), nk = int(k_grid.size());
  const int ns = traj.n_stored(), nsite = traj.n_sites();

  SpectralMap map;
  map.e_grid = e_grid;
  map.k_grid = k_grid;
  map.omega = omega;
  map.intensity.setZero(ne, nk);

  // Two-stage DFT with a flat window: first over time per site at every
  // replica-shifted energy, then over space. Peaks of exp(-i eps t) land
  // at E = Re eps with the e^{+iEt} kernel; the e^{-ikx} kernel matches
  // bloch_state's plane-wave convention.
  const int nrep = 2 * fold_replicas + 1;
  MatrixXcd time_amp(nsite, ne * nrep);
  for (int col = 0; col < ne * nrep; ++col) {
    const int ie = col % ne, rep = col / ne - fold_replicas;
    const double energy = e_grid[ie] + rep * omega;
    VectorXcd kernel(ns);
    for (int s = 0; s < ns; ++s)
      kernel[s] = std::polar(1.0, energy * traj.times[s]);
    for (int site = 0; site < nsite; ++site) {
      cx acc = 0.0;
      for (int s = 0; s < ns; ++s) acc += traj.psi[s][site] * kernel[s];
      time_amp(site, col) = acc;
    }
  }
  for (int ik = 0; ik < nk; ++ik) {
    VectorXcd phase(nsite);
    for (int site = 0; site < nsite; ++site)
      phase[site] = std::polar(1.0, -k_grid[ik] * traj.position(site));
    for (int col = 0; col < ne * nrep; ++col) {
      cx acc = 0.0;
      for (int site = 0; site < nsite; ++site)
        acc += time_amp(site, col) * phase[site];
      map.intensity(col % ne, ik) += std::norm(acc);
    }
  }
  return map;
}

VectorXcd bloch_state(const DriveParams& p, int n_cells, double k,
                      const Vector2cd& amplitude) {
  VectorXcd psi(2 * n_cells);
  for (int j = 0; j < n_cells; ++j) {
    psi[2 * j] = amplitude[0] * std::polar(1.0, k * p.a0 * j);
    psi[2 * j + 1] = amplitude[1] * std::polar(1.0, k * (p.a0 * j + 0.5 * p.a0));
  }
  psi /= psi.norm();
  return psi;
}

}  // namespace nhfp
