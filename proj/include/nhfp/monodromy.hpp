#pragma once
#include <array>
#include <functional>

#include "nhfp/drive.hpp"
#include "nhfp/types.hpp"

namespace nhfp {

/// One-period propagator U(T) of the 2x2 Bloch Hamiltonian at momentum k.
/// Its eigenvalues mu = exp(-i eps T) define quasienergies without any
/// harmonic truncation, which makes it the brute-force reference for the
/// Floquet-matrix route.
struct Monodromy {
  double k = 0.0;
  Matrix2cd u_t = Matrix2cd::Identity();
  int steps = 0;
};

/// Compose U(T) from per-slice closed-form 2x2 exponentials of the
/// midpoint-sampled Bloch Hamiltonian (second-order accurate per slice).
/// Slice boundaries are aligned with the loss switching instants so the
/// midpoint rule keeps its order across the kinks. Requires steps >= 1000.
Monodromy monodromy(const DriveParams& p, double k, int steps = 4000);

/// Quasienergies from the monodromy eigenvalues, eps = i ln(mu) / T,
/// with Re folded into [-Omega/2, Omega/2). Throws on a vanishing
/// eigenvalue (total absorption).
std::array<cx, 2> quasienergies_from_monodromy(const Monodromy& m, double omega);

/// Eigenvalues and unit-norm eigenvectors of U(T); vectors correspond
/// index-wise to quasienergies_from_monodromy.
struct MonodromyModes {
  std::array<cx, 2> eps;
  std::array<Vector2cd, 2> vec;
};
MonodromyModes monodromy_modes(const Monodromy& m, double omega);

/// Closed-form exp(-i dt h) for a 2x2 matrix (split into trace and
/// traceless parts; entire in the traceless invariant, branch-free).
Matrix2cd expm_2x2(const Matrix2cd& h, double dt);

/// Time-ordered 2x2 propagator over [t0, t1] from midpoint-sampled slice
/// exponentials of an arbitrary Hamiltonian function.
Matrix2cd propagator_2x2(const std::function<Matrix2cd(double)>& h_of_t,
                         double t0, double t1, int steps);

}  // namespace nhfp
