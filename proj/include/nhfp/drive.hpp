#pragma once
#include <array>
#include <numbers>

#include "nhfp/errors.hpp"
#include "nhfp/types.hpp"

namespace nhfp {

/// Parameters of the periodically driven, lossy Rice-Mele chain.
/// Energies are measured in units of j0, times in 1/j0, lengths in a0.
struct DriveParams {
  double u0 = 1.0;      ///< onsite-potential amplitude
  double j0 = 1.0;      ///< hopping scale (sets the unit of energy)
  double lambda = 1.75; ///< hopping-modulation depth (dimensionless)
  double gamma0 = 0.4;  ///< loss amplitude
  double phi = 0.0;     ///< drive phase (radians)
  double omega = 1.1;   ///< driving frequency (hbar = 1)
  double a0 = 1.0;      ///< lattice constant

  double period() const { return 2.0 * std::numbers::pi / omega; }

  /// Throws invalid_argument if any parameter is out of range.
  void validate() const;
};

/// The six instantaneous coupling values of the drive protocol.
struct DriveSample {
  double j1, j2;  ///< intra-cell / inter-cell hopping amplitudes
  double ua, ub;  ///< onsite potentials on the A / B sublattice
  double ga, gb;  ///< loss rates on the A / B sublattice (>= 0)
};

/// Evaluate the closed-form drive protocol at time t.
///
///   u_a(t)     = -u0 cos(Omega t + phi)
///   J_1(t)     = j0 exp(-lambda (1 - sin Omega t))
///   gamma_a(t) = -gamma0 Theta(u_a(t)) cos(Omega t + phi)
///
/// with the B-sublattice quantities obtained by the half-period shift
/// t -> t - T/2. Theta is the Heaviside step with Theta(0) = 0, which keeps
/// the loss rates continuous at the switching instants.
DriveSample drive_at(const DriveParams& p, double t);

/// Bloch Hamiltonian of the chain at momentum k and time t, in the (A, B)
/// sublattice basis and the plane-wave convention exp(+i k x) with
/// sublattice positions x_A = j a0, x_B = j a0 + a0/2:
///
///   H_AB(k,t) = J1 e^{+i k a0/2} + J2 e^{-i k a0/2}
///             = (J1+J2) cos(k a0/2) sigma_x - (J1-J2) sin(k a0/2) sigma_y
///
/// plus (u_a - i gamma_a) on the A diagonal and (u_b - i gamma_b) on B.
/// In this convention the low-loss band of the dissipative pump winds in
/// the +k direction and a packet on it moves in +x, so band slopes,
/// winding signs and real-space transport are mutually consistent.
Matrix2cd bloch_hamiltonian(const DriveParams& p, double k, double t);

/// Dense real-space Hamiltonian of an open chain of n_cells unit cells
/// (2*n_cells sites, ordering A0 B0 A1 B1 ...). Intra-cell bond J1(t)
/// between A_j,B_j; inter-cell bond J2(t) between B_j,A_{j+1}; onsite
/// u - i*gamma. Throws invalid_argument for n_cells < 2.
MatrixXcd realspace_hamiltonian(const DriveParams& p, int n_cells, double t);

/// Same chain closed into a ring (periodic boundary conditions); used by
/// the cross-check suites, not part of the open-chain contract.
MatrixXcd ring_hamiltonian(const DriveParams& p, int n_cells, double t);

/// Which coupling function a harmonic table refers to.
enum class Coupling { j1, j2, ua, ub, ga, gb };
inline constexpr std::array<Coupling, 6> all_couplings = {
    Coupling::j1, Coupling::j2, Coupling::ua,
    Coupling::ub, Coupling::ga, Coupling::gb};

/// Scalar value of one coupling function at time t.
double coupling_at(const DriveParams& p, Coupling c, double t);

/// Tables of Fourier coefficients c_n of the six coupling functions,
/// with the convention f(t) = sum_n c_n exp(-i n Omega t).
class HarmonicSet {
 public:
  HarmonicSet(int m_max, int n_samples)
      : m_max_(m_max), n_samples_(n_samples),
        coeff_{VectorXcd::Zero(2 * m_max + 1), VectorXcd::Zero(2 * m_max + 1),
               VectorXcd::Zero(2 * m_max + 1), VectorXcd::Zero(2 * m_max + 1),
               VectorXcd::Zero(2 * m_max + 1), VectorXcd::Zero(2 * m_max + 1)} {}

  int m_max() const { return m_max_; }
  int n_samples() const { return n_samples_; }

  /// Coefficient c_n; zero outside the stored range.
  cx c(Coupling f, int n) const {
    if (n < -m_max_ || n > m_max_) return 0.0;
    return coeff_[static_cast<int>(f)][n + m_max_];
  }
  cx& at(Coupling f, int n) { return coeff_[static_cast<int>(f)][n + m_max_]; }

  /// Reconstruct f(t) from the stored coefficients.
  cx reconstruct(Coupling f, double t, double omega) const;

 private:
  int m_max_;
  int n_samples_;
  std::array<VectorXcd, 6> coeff_;
};

/// Fourier coefficients of all six couplings by uniform DFT sampling over
/// one period. Requires n_samples >= 4*m_max and n_samples a power of two.
HarmonicSet drive_harmonics(const DriveParams& p, int m_max, int n_samples);

/// 2x2 Fourier block H^(m) of the Bloch Hamiltonian, assembled from a
/// HarmonicSet: H_k(t) = sum_m H^(m)(k) exp(-i m Omega t).
Matrix2cd bloch_harmonic_block(const HarmonicSet& h, const DriveParams& p,
                               double k, int m);

}  // namespace nhfp
