#pragma once
#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nhfp/drive.hpp"
#include "nhfp/types.hpp"

namespace nhfp {

/// Truncated Floquet matrix at one momentum. Harmonic blocks n, l run over
/// [-n_harmonics, n_harmonics]; block (n, l) is the (n-l)-th Fourier block
/// of the Bloch Hamiltonian, and the diagonal blocks carry the -n*Omega
/// shift. Dimension D = 2 (2 n_harmonics + 1).
MatrixXcd build_floquet_matrix(const HarmonicSet& h, const DriveParams& p,
                               double k, int n_harmonics);

/// Convenience overload that computes its own harmonics (m_max =
/// 2*n_harmonics, sampled finely enough for the quasienergy tolerances).
MatrixXcd build_floquet_matrix(const DriveParams& p, double k, int n_harmonics);

/// Harmonic table sized for a Floquet matrix of the given truncation.
HarmonicSet harmonics_for_truncation(const DriveParams& p, int n_harmonics);

/// Biorthogonal eigensystem of a Floquet matrix: right vectors of the
/// matrix, left vectors of its adjoint, paired by eigenvalue and rescaled
/// so that <left_j | right_j> = 1.
struct FloquetEigensystem {
  double k = 0.0;
  int n_harmonics = 0;
  VectorXcd quasienergies;  ///< D eigenvalues
  MatrixXcd right;          ///< columns u_j
  MatrixXcd left;           ///< columns u~_j, scaled so left_j^H right_j = 1

  int dim() const { return int(quasienergies.size()); }
  /// Component block (harmonic n) of eigenvector column j.
  Vector2cd right_block(int j, int n) const {
    return right.block<2, 1>(2 * (n + n_harmonics), j);
  }
  Vector2cd left_block(int j, int n) const {
    return left.block<2, 1>(2 * (n + n_harmonics), j);
  }
};

/// Diagonalize a Floquet matrix biorthogonally. Throws
/// degenerate_spectrum_error when two eigenvalues coincide within
/// 1e-8 * ||matrix|| (pairing ambiguous) and exceptional_point_error when
/// |<left|right>| < 1e-8 before normalization.
FloquetEigensystem diagonalize_biorthogonal(const MatrixXcd& matrix,
                                            double k = 0.0,
                                            int n_harmonics = 0);

/// One physical first-zone Floquet mode: folded quasienergy, full
/// harmonic-space vectors, and the t=0 mode phi(0) = sum_n u^n with its
/// biorthogonal dual.
struct FloquetMode {
  cx eps;                ///< Re in [-Omega/2, Omega/2)
  int column = -1;       ///< column index in the parent eigensystem
  VectorXcd u;           ///< right harmonic vector
  VectorXcd u_dual;      ///< left harmonic vector (biorthonormal partner)
  Vector2cd phi0;        ///< physical mode at t = 0
  Vector2cd phi0_dual;   ///< dual of phi0 in sublattice space
};

/// Select the two physical first-zone representatives (Re eps in
/// [-Omega/2, Omega/2)). Throws truncation_error unless exactly two
/// replica families have their representative in the zone.
std::array<FloquetMode, 2> first_zone_modes(const FloquetEigensystem& es,
                                            double omega);

/// Expansion coefficients C_alpha = <phi0_dual_alpha | psi0> of a
/// sublattice amplitude in the two first-zone modes. The duals come from
/// inverting the 2x2 mode matrix, so sum_alpha C_alpha phi0_alpha
/// reconstructs psi0 exactly; throws exceptional_point_error if the mode
/// matrix is numerically singular.
std::array<cx, 2> expansion_coefficients(const std::array<FloquetMode, 2>& modes,
                                         const Vector2cd& psi0);

/// Continuity-tracked quasienergy band over a k grid.
struct TrackedBand {
  std::vector<cx> eps;           ///< folded quasienergy per k
  std::vector<double> re_unfolded;  ///< accumulated real part per k
  std::vector<VectorXcd> u;      ///< right harmonic vector per k
  std::vector<VectorXcd> u_dual; ///< left harmonic vector per k
  std::vector<Vector2cd> phi0;
  std::vector<Vector2cd> phi0_dual;
  double z_raw = 0.0;            ///< winding before rounding
  int z = 0;
  double z_residual = 0.0;
  double mean_im = 0.0;          ///< k-averaged Im eps
};

/// Zone-folded, continuity-tracked band structure with gap and windings.
struct BandStructure {
  DriveParams params;
  int n_harmonics = 0;
  VectorXd k_grid;
  std::array<TrackedBand, 2> bands;
  double gap = 0.0;       ///< largest uncovered arc of the quasienergy circle
  bool gap_closed = false;
  double gap_closure_tol = 1e-3;

  double omega() const { return params.omega; }
};

struct BandStructureOptions {
  int n_harmonics = 40;
  bool convergence_check = true;   ///< verify +5 harmonics at probe momenta
  double convergence_tol = 1e-8;
  bool refine_gap = true;          ///< sub-grid extremum refinement of the gap
  double gap_closure_tol = 1e-3;   ///< in units of j0
  int max_refine_depth = 3;        ///< bisection levels on tracking failure
};

/// Diagonalize over the k grid, track bands by maximal biorthogonal
/// overlap (with k-bisection on ambiguity), unfold the real parts, and
/// fill gap and windings.
BandStructure band_structure(const DriveParams& p, const VectorXd& k_grid,
                             const BandStructureOptions& opt = {});

/// Default 256-point momentum grid covering [-pi/a0, pi/a0).
VectorXd default_k_grid(const DriveParams& p, int n = 256);

/// The gap stored in a BandStructure: the largest arc of the quasienergy
/// circle [-Omega/2, Omega/2) not covered by any band, zero when a band
/// winds. Reported "closed" when below the closure tolerance.
double gap(const BandStructure& bs);

/// Largest circular gap between sampled folded quasienergies: the grid
/// estimate of the uncovered arc (no refinement).
double uncovered_arc(std::vector<double> folded_values, double omega);

/// First-zone folded real parts at a momentum, any quasienergy route.
using ZoneRealsFn = std::function<std::array<double, 2>(double)>;

/// Uncovered arc from sampled (folded Re eps, k) points, refined by
/// following the branches at the arc edges to their extrema with extra
/// zone_re evaluations. An empty function skips the refinement.
double refined_uncovered_arc(
    const std::vector<std::pair<double, double>>& e_k_points, double omega,
    const ZoneRealsFn& zone_re, double k_step);

/// Winding number of one tracked band. Throws winding_undefined_error
/// when |z_raw - round(z_raw)| > 0.05.
struct Winding {
  int z;
  double residual;
};
Winding winding_number(const BandStructure& bs, int band);

/// Gap scan over (omega, gamma0) grids with per-column truncation chosen
/// by the self-convergence rule. Failed cells are flagged, not fatal.
struct GapScanResult {
  VectorXd omega_grid;
  VectorXd gamma_grid;
  MatrixXd gap;               ///< gap(i_omega, i_gamma)
  Eigen::MatrixXi flag;       ///< 0 ok, 1 diagonalization/selection failure
  std::vector<int> n_harmonics; ///< truncation used per omega column
  double closure_tol = 1e-3;
  /// First gamma0 bracketing the closure per omega; NaN when the scan
  /// does not bracket a closure in the scanned range.
  VectorXd threshold;
};

struct GapScanOptions {
  int k_points = 128;
  double closure_tol = 1e-3;
  bool refine = true;
  int n_harmonics = 0;  ///< 0: choose per column by the convergence rule
};

GapScanResult gap_scan(const DriveParams& base, const VectorXd& omega_grid,
                       const VectorXd& gamma_grid, const GapScanOptions& opt = {});

/// Smallest truncation (in steps of 5 from 15) whose first-zone
/// quasienergies at a set of probe momenta agree with the +5 truncation
/// to within tol.
int choose_n_harmonics(const DriveParams& p, double tol = 1e-8,
                       int start = 15, int max_n = 80);

/// Retarded Green's function G(E) = sum_j u_j u~_j^H / (E - eps_j + i eta)
/// in the harmonic-space basis of the eigensystem.
MatrixXcd green_function(const FloquetEigensystem& es, cx energy,
                         double eta = 0.0);

}  // namespace nhfp
