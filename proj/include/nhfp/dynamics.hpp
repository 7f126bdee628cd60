#pragma once
#include <vector>

#include "nhfp/drive.hpp"
#include "nhfp/spectral.hpp"
#include "nhfp/types.hpp"

namespace nhfp {

enum class Boundary { open, ring };

/// Complex site amplitudes of a finite chain sampled in time. Sites are
/// ordered A0 B0 A1 B1 ...; positions are x_A = j a0, x_B = j a0 + a0/2.
struct Trajectory {
  DriveParams params;
  int n_cells = 0;
  Boundary boundary = Boundary::open;
  int input_site = -1;          ///< flat site index of the injection (-1: custom)
  int steps_per_cycle = 0;
  int snapshots_per_cycle = 0;
  VectorXd times;               ///< stored sample times (uniform)
  std::vector<VectorXcd> psi;   ///< one state per stored time

  int n_sites() const { return 2 * n_cells; }
  int n_stored() const { return int(times.size()); }
  /// Stored index of the sample at t = cycle * T.
  int cycle_index(int cycle) const { return cycle * snapshots_per_cycle; }
  double position(int site) const {
    const int cell = site / 2;
    return params.a0 * (cell + (site % 2 ? 0.5 : 0.0));
  }
};

struct PropagateOptions {
  int steps_per_cycle = 2000;
  int snapshots_per_cycle = 20;
  Boundary boundary = Boundary::open;
  bool check_boundary = true;   ///< enforce the no-reflection invariant
};

/// Classic fixed-step 4th-order integration of i dpsi/dt = H(t) psi for a
/// single-site excitation: psi(0) = 1 on the chosen sublattice of `cell`,
/// 0 elsewhere. Throws lattice_too_small_error (with a suggested size)
/// when the light cone cannot clear the boundary margin, or when boundary
/// amplitude exceeds 1e-6 of the peak during the run.
Trajectory propagate(const DriveParams& p, int n_cells, int cell, Input input,
                     int n_cycles, const PropagateOptions& opt = {});

/// Same integrator for an arbitrary initial state (used by the Floquet-
/// mode and ring cross-checks; no boundary check on rings).
Trajectory propagate_state(const DriveParams& p, const VectorXcd& psi0,
                           int n_cycles, const PropagateOptions& opt = {});

/// Density-normalized center of mass in unit cells at every stored step.
VectorXd center_of_mass(const Trajectory& traj);

/// Least-squares slope of the center of mass at integer periods over
/// cycles [from, to] (cells per cycle).
double com_cycle_slope(const Trajectory& traj, int from = 2, int to = 5);

/// Squared norm <psi|psi> at every stored step.
VectorXd norm_series(const Trajectory& traj);

/// Log-linear fit of the norm decay over integer periods of cycles
/// [from, to]: <psi|psi> ~ exp(-Gamma t). Throws when the norm is not
/// non-increasing (integrator failure) for gamma0 > 0.
struct DecayFit {
  double gamma;
  double residual;  ///< rms residual of the log-linear fit
};
DecayFit norm_decay(const Trajectory& traj, int from = 2, int to = 5);

/// Space-time Fourier spectrum |FT psi|^2 folded into the first
/// Floquet-Bloch Brillouin zone; flat window, replica-summed over
/// `fold_replicas` zone shifts in E.
SpectralMap spacetime_spectrum(const Trajectory& traj, const VectorXd& e_grid,
                               const VectorXd& k_grid, int fold_replicas = 3);

/// Bloch plane wave on the chain: psi_site = amp_sublattice exp(i k x).
/// Pairs with bloch_hamiltonian's momentum convention, so a mode built
/// from the 2-vector eigenstate at k evolves with exp(-i eps(k) t).
VectorXcd bloch_state(const DriveParams& p, int n_cells, double k,
                      const Vector2cd& amplitude);

}  // namespace nhfp
