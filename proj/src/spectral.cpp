#include "nhfp/spectral.hpp"

#include <cmath>

#include "nhfp/errors.hpp"

namespace nhfp {

void SpectralMap::normalize_per_k() {
  if (normalized_per_k) return;
  const double de = e_grid.size() > 1 ? e_grid[1] - e_grid[0] : omega;
  for (int ik = 0; ik < intensity.cols(); ++ik) {
    const double total = intensity.col(ik).sum() * de / omega;
    if (total <= 0.0) continue;
    intensity.col(ik) /= total;
    for (auto& layer : band_intensity)
      if (layer.size() > 0) layer.col(ik) /= total;
  }
  normalized_per_k = true;
}

VectorXd default_e_grid(double omega, int n) {
  return center_grid(-0.5 * omega, 0.5 * omega, n);
}

Eigen::Matrix2Xcd expansion_over_zone(const BandStructure& bs, Input input) {
  const int nk = int(bs.k_grid.size());
  const Vector2cd psi0 = input_state(input);
  Eigen::Matrix2Xcd c(2, nk);
  for (int ik = 0; ik < nk; ++ik) {
    std::array<FloquetMode, 2> modes;
    for (int b = 0; b < 2; ++b) {
      modes[b].phi0 = bs.bands[b].phi0[ik];
      modes[b].phi0_dual = bs.bands[b].phi0_dual[ik];
    }
    const auto coeff = expansion_coefficients(modes, psi0);
    c(0, ik) = coeff[0];
    c(1, ik) = coeff[1];
  }
  return c;
}

namespace {

// Fourier amplitude of band alpha at (E, k): C_alpha sum_l u^l / (E - eps
// + i(|Im eps| growing by eta) - l Omega). u must be the harmonic vector of
// the first-zone representative.
Vector2cd band_amplitude(const VectorXcd& u, cx eps, cx coeff, double e,
                         double omega, double eta, int n_harmonics) {
  Vector2cd amp = Vector2cd::Zero();
  const cx pole = cx(eps.real(), eps.imag() - eta);
  for (int l = -n_harmonics; l <= n_harmonics; ++l) {
    const cx denom = e - pole - double(l) * omega;
    amp += u.segment<2>(2 * (l + n_harmonics)) / denom;
  }
  return coeff * amp;
}

}  // namespace

SpectralMap spectral_density(const BandStructure& bs, const VectorXd& e_grid,
                             Input input, const SpectralOptions& opt) {
  const int nk = int(bs.k_grid.size());
  const int ne = int(e_grid.size());
  const double omega = bs.omega();

  SpectralMap map;
  map.e_grid = e_grid;
  map.k_grid = bs.k_grid;
  map.omega = omega;
  map.intensity.setZero(ne, nk);
  map.band_intensity[0].setZero(ne, nk);
  map.band_intensity[1].setZero(ne, nk);

  // The map lives on the quasienergy circle: intensities of the true line
  // shape are folded into the zone by summing over zone shifts m. Distinct
  // true energies add incoherently; the two bands interfere at equal true
  // energy.
  const int fold = 3;
  const Eigen::Matrix2Xcd coeff = expansion_over_zone(bs, input);
  for (int ik = 0; ik < nk; ++ik) {
    for (int ie = 0; ie < ne; ++ie) {
      double total = 0.0;
      double band_total[2] = {0.0, 0.0};
      for (int m = -fold; m <= fold; ++m) {
        const double energy = e_grid[ie] + m * omega;
        Vector2cd sum = Vector2cd::Zero();
        for (int b = 0; b < 2; ++b) {
          const Vector2cd amp = band_amplitude(
              bs.bands[b].u[ik], bs.bands[b].eps[ik], coeff(b, ik), energy,
              omega, opt.eta, bs.n_harmonics);
          band_total[b] += amp.squaredNorm();
          sum += amp;
        }
        total += sum.squaredNorm();
      }
      map.intensity(ie, ik) = total;
      map.band_intensity[0](ie, ik) = band_total[0];
      map.band_intensity[1](ie, ik) = band_total[1];
    }
  }
  if (opt.normalize) map.normalize_per_k();
  return map;
}

SpectralMap band_occupation_map(const BandStructure& bs, const VectorXd& e_grid,
                                int band, double eta) {
  if (band < 0 || band > 1) throw invalid_argument("band_occupation_map: band");
  const int nk = int(bs.k_grid.size());
  const int ne = int(e_grid.size());
  const double omega = bs.omega();
  const double de = ne > 1 ? e_grid[1] - e_grid[0] : omega;

  SpectralMap map;
  map.e_grid = e_grid;
  map.k_grid = bs.k_grid;
  map.omega = omega;
  map.intensity.setZero(ne, nk);

  for (int ik = 0; ik < nk; ++ik) {
    const cx eps = bs.bands[band].eps[ik];
    const double width = -eps.imag() + eta;
    for (int ie = 0; ie < ne; ++ie) {
      // Periodic Lorentzian: replicas at eps + l Omega.
      double v = 0.0;
      for (int l = -3; l <= 3; ++l) {
        const double d = e_grid[ie] - eps.real() - l * omega;
        v += width / (d * d + width * width);
      }
      map.intensity(ie, ik) = v;
    }
    const double total = map.intensity.col(ik).sum() * de / omega;
    map.intensity.col(ik) /= total;
  }
  map.band_intensity[band] = map.intensity;
  map.normalized_per_k = true;
  return map;
}

double pumped_shift(const BandStructure& bs, const SpectralMap& map, int band) {
  if (band < 0 || band > 1) throw invalid_argument("pumped_shift: band");
  const MatrixXd& layer = map.band_intensity[band];
  if (layer.size() == 0)
    throw invalid_argument("pumped_shift: map lacks the band layer");
  if (int(map.k_grid.size()) != int(bs.k_grid.size()))
    throw invalid_argument("pumped_shift: map and band structure k grids differ");

  const int nk = int(bs.k_grid.size());
  const int ne = int(map.e_grid.size());
  const double omega = bs.omega();
  const double period = bs.params.period();
  const double de = ne > 1 ? map.e_grid[1] - map.e_grid[0] : omega;
  const double dk = nk > 1 ? bs.k_grid[1] - bs.k_grid[0] : 0.0;
  const auto& u = bs.bands[band].re_unfolded;
  const double wrap_total = bs.bands[band].z_raw * omega;

  double shift = 0.0;
  for (int ik = 0; ik < nk; ++ik) {
    // Centered difference on the unfolded dispersion, periodic in k up to
    // the winding offset.
    const double up = ik + 1 < nk ? u[ik + 1] : u[0] + wrap_total;
    const double um = ik - 1 >= 0 ? u[ik - 1] : u[nk - 1] - wrap_total;
    const double slope = (up - um) / (2.0 * dk);
    const double e_weight = layer.col(ik).sum() * de / omega;
    shift += e_weight * slope * dk;
  }
  return shift * period / (2.0 * std::numbers::pi);
}

}  // namespace nhfp
