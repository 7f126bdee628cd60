#pragma once
#include <array>

#include "nhfp/floquet.hpp"
#include "nhfp/types.hpp"

namespace nhfp {

/// Which sublattice carries the unit-amplitude injection.
enum class Input { A, B };

inline Vector2cd input_state(Input in) {
  return in == Input::A ? Vector2cd(1.0, 0.0) : Vector2cd(0.0, 1.0);
}

/// Intensity I(E, k) on a rectangular grid of the first Floquet-Bloch
/// Brillouin zone, optionally with the two band-resolved layers.
struct SpectralMap {
  VectorXd e_grid;          ///< energies in [-Omega/2, Omega/2)
  VectorXd k_grid;
  MatrixXd intensity;       ///< (nE x nk), >= 0
  std::array<MatrixXd, 2> band_intensity;  ///< per-band layers (may be empty)
  bool normalized_per_k = false;
  double omega = 0.0;

  /// Scale every column so that sum_E I dE / Omega = 1.
  void normalize_per_k();
};

struct SpectralOptions {
  double eta = 0.02;        ///< floor broadening, units of j0
  bool normalize = true;
};

/// Momentum- and energy-resolved population density of a state injected on
/// one sublattice site: the squared magnitude of the Fourier-transformed
/// Floquet expansion, with Lorentzian widths |Im eps| + eta. Band layers
/// carry the single-band (no cross term) contributions.
SpectralMap spectral_density(const BandStructure& bs, const VectorXd& e_grid,
                             Input input, const SpectralOptions& opt = {});

/// Homogeneously filled single-band map: per-k normalized Lorentzian ridge
/// along band `band`. Used for quantization checks of the pumped shift.
SpectralMap band_occupation_map(const BandStructure& bs, const VectorXd& e_grid,
                                int band, double eta = 0.02);

/// Pumped displacement per cycle carried by one band,
///   L/a0 = int dE/Omega int dk a0/(2 pi) I_band(E,k) dRe(eps)/dk T,
/// with centered finite differences on the unfolded dispersion. The map
/// must carry the band layer for `band`.
double pumped_shift(const BandStructure& bs, const SpectralMap& map, int band);

/// Expansion coefficients of the input state at every k of a band
/// structure; column alpha holds C_alpha(k).
Eigen::Matrix2Xcd expansion_over_zone(const BandStructure& bs, Input input);

/// Default energy grid: n cell centers covering [-Omega/2, Omega/2).
VectorXd default_e_grid(double omega, int n = 64);

}  // namespace nhfp
