#include "nhfp/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nhfp/errors.hpp"
#include "nhfp/lapack_eig.hpp"
#include "nhfp/parallel.hpp"

namespace nhfp {

HarmonicSet harmonics_for_truncation(const DriveParams& p, int n_harmonics) {
  // The loss kink limits the DFT coefficients to O(n_samples^-2) accuracy;
  // 65536 samples keeps that error near 1e-10 so the quasienergy budget of
  // the monodromy cross-check (1e-8) is dominated by the truncation itself.
  const int m_max = 2 * n_harmonics;
  int n_samples = 65536;
  while (n_samples < 4 * m_max) n_samples *= 2;
  return drive_harmonics(p, m_max, n_samples);
}

MatrixXcd build_floquet_matrix(const HarmonicSet& h, const DriveParams& p,
                               double k, int n_harmonics) {
  if (n_harmonics < 1) throw invalid_argument("build_floquet_matrix: n_harmonics >= 1");
  if (h.m_max() < 2 * n_harmonics)
    throw invalid_argument("build_floquet_matrix: harmonic set too small");
  const int nb = 2 * n_harmonics + 1;
  MatrixXcd m = MatrixXcd::Zero(2 * nb, 2 * nb);
  for (int r = 0; r < nb; ++r) {
    const int n = r - n_harmonics;
    for (int c = 0; c < nb; ++c) {
      const int l = c - n_harmonics;
      Matrix2cd block = bloch_harmonic_block(h, p, k, n - l);
      if (n == l) {
        block(0, 0) -= n * p.omega;
        block(1, 1) -= n * p.omega;
      }
      m.block<2, 2>(2 * r, 2 * c) = block;
    }
  }
  return m;
}

MatrixXcd build_floquet_matrix(const DriveParams& p, double k, int n_harmonics) {
  return build_floquet_matrix(harmonics_for_truncation(p, n_harmonics), p, k,
                              n_harmonics);
}

FloquetEigensystem diagonalize_biorthogonal(const MatrixXcd& matrix, double k,
                                            int n_harmonics) {
  if (!matrix.allFinite())
    throw invalid_argument("diagonalize_biorthogonal: matrix not finite");
  FloquetEigensystem es;
  es.k = k;
  es.n_harmonics = n_harmonics > 0 ? n_harmonics
                                   : int((matrix.rows() / 2 - 1) / 2);
  MatrixXcd vr, vl;
  eig_general(matrix, es.quasienergies, vr, vl);
  const int d = es.dim();

  // zgeev pairs left and right vectors by index; rescale the left ones so
  // <left_j | right_j> = 1. Self-orthogonal pairs mean a coalescence of
  // eigenvectors, checked before the plain eigenvalue-degeneracy scan so
  // exceptional points are reported as such.
  es.right = std::move(vr);
  es.left = std::move(vl);
  for (int j = 0; j < d; ++j) {
    const cx s = es.left.col(j).dot(es.right.col(j));  // conj(left)^T right
    if (std::abs(s) < 1e-8)
      throw exceptional_point_error(
          "left/right eigenvectors nearly self-orthogonal (exceptional point)");
    es.left.col(j) /= std::conj(s);
  }

  const double pair_tol = 1e-8 * matrix.norm();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::abs(es.quasienergies[i] - es.quasienergies[j]) < pair_tol)
        throw degenerate_spectrum_error(
            "eigenvalue pairing ambiguous: two eigenvalues within tolerance");
  return es;
}

std::array<FloquetMode, 2> first_zone_modes(const FloquetEigensystem& es,
                                            double omega) {
  std::vector<int> in_zone;
  for (int j = 0; j < es.dim(); ++j) {
    const double re = es.quasienergies[j].real();
    if (std::floor(re / omega + 0.5) == 0.0) in_zone.push_back(j);
  }
  if (in_zone.size() != 2)
    throw truncation_error("first_zone_modes: found " +
                           std::to_string(in_zone.size()) +
                           " first-zone representatives instead of 2 "
                           "(harmonic truncation too small)");
  std::sort(in_zone.begin(), in_zone.end(), [&](int a, int b) {
    const cx ea = es.quasienergies[a], eb = es.quasienergies[b];
    if (ea.real() != eb.real()) return ea.real() < eb.real();
    return ea.imag() < eb.imag();
  });

  std::array<FloquetMode, 2> modes;
  for (int m = 0; m < 2; ++m) {
    FloquetMode& mode = modes[m];
    mode.column = in_zone[m];
    mode.eps = es.quasienergies[mode.column];
    mode.u = es.right.col(mode.column);
    mode.u_dual = es.left.col(mode.column);
    mode.phi0.setZero();
    mode.phi0_dual.setZero();
    for (int n = -es.n_harmonics; n <= es.n_harmonics; ++n) {
      mode.phi0 += es.right_block(mode.column, n);
      mode.phi0_dual += es.left_block(mode.column, n);
    }
  }
  return modes;
}

std::array<cx, 2> expansion_coefficients(const std::array<FloquetMode, 2>& modes,
                                         const Vector2cd& psi0) {
  Matrix2cd m;
  m.col(0) = modes[0].phi0;
  m.col(1) = modes[1].phi0;
  const cx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double scale = modes[0].phi0.norm() * modes[1].phi0.norm();
  if (std::abs(det) < 1e-8 * scale)
    throw exceptional_point_error(
        "expansion_coefficients: mode matrix singular (exceptional point)");
  const Vector2cd c = m.inverse() * psi0;
  return {c[0], c[1]};
}

VectorXd default_k_grid(const DriveParams& p, int n) {
  const double kmax = std::numbers::pi / p.a0;
  return halfopen_grid(-kmax, kmax, n);
}

namespace {

// Harmonic-index shift of an eigenvector: blocks move by `shift`, new
// blocks outside the window are zero.
VectorXcd shift_blocks(const VectorXcd& u, int shift) {
  const int d = int(u.size());
  VectorXcd out = VectorXcd::Zero(d);
  const int nb = d / 2;
  for (int b = 0; b < nb; ++b) {
    const int src = b - shift;
    if (src >= 0 && src < nb) out.segment<2>(2 * b) = u.segment<2>(2 * src);
  }
  return out;
}

// Sign flip of the B components: gauge factor relating the eigenvectors
// at k and k + 2 pi / a0.
VectorXcd zone_wrap_gauge(const VectorXcd& u) {
  VectorXcd out = u;
  for (int b = 0; b < int(u.size()) / 2; ++b) out[2 * b + 1] = -out[2 * b + 1];
  return out;
}

// Normalized biorthogonal overlap, maximized over harmonic shifts of the
// target vector. Shifts keep the overlap meaningful when the first-zone
// representative hops a replica between adjacent momenta.
double mode_overlap(const FloquetMode& from, const VectorXcd& to_u) {
  double best = 0.0;
  for (int shift : {-1, 0, 1}) {
    const VectorXcd shifted = shift_blocks(to_u, shift);
    const double n1 = from.u_dual.norm(), n2 = shifted.norm();
    if (n1 == 0.0 || n2 == 0.0) continue;
    best = std::max(best, std::abs(from.u_dual.dot(shifted)) / (n1 * n2));
  }
  return best;
}

struct Assignment {
  int perm = 0;         // 0: from[b] -> to[b], 1: from[b] -> to[1-b]
  double confidence = 0.0;
};

Assignment assign_modes(const std::array<FloquetMode, 2>& from,
                        const std::array<FloquetMode, 2>& to,
                        bool wrap_gauge = false) {
  double s[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      VectorXcd target = to[b].u;
      if (wrap_gauge) target = zone_wrap_gauge(target);
      s[a][b] = mode_overlap(from[a], target);
    }
  const double keep = std::min(s[0][0], s[1][1]);
  const double swap = std::min(s[0][1], s[1][0]);
  Assignment out;
  out.perm = keep >= swap ? 0 : 1;
  out.confidence = std::max(keep, swap);
  return out;
}

struct ZoneSolver {
  const DriveParams& p;
  const HarmonicSet& h;
  int n_harmonics;

  std::array<FloquetMode, 2> modes_at(double k) const {
    const MatrixXcd m = build_floquet_matrix(h, p, k, n_harmonics);
    return first_zone_modes(diagonalize_biorthogonal(m, k, n_harmonics),
                            p.omega);
  }

  // Folded first-zone real parts, eigenvalues only.
  std::array<double, 2> zone_re(double k) const {
    const VectorXcd w = eig_values(build_floquet_matrix(h, p, k, n_harmonics));
    std::array<double, 2> out{};
    int found = 0;
    for (int j = 0; j < int(w.size()); ++j) {
      if (std::floor(w[j].real() / p.omega + 0.5) == 0.0) {
        if (found < 2) out[found] = w[j].real();
        ++found;
      }
    }
    if (found != 2)
      throw truncation_error("zone_re: first-zone selection found " +
                             std::to_string(found) + " values");
    return out;
  }
};

// Recursive assignment with bisection refinement on low confidence.
Assignment assign_with_refinement(const ZoneSolver& solver,
                                  const std::array<FloquetMode, 2>& from,
                                  double k_from,
                                  const std::array<FloquetMode, 2>& to,
                                  double k_to, int depth, bool wrap_gauge) {
  const Assignment direct = assign_modes(from, to, wrap_gauge);
  if (direct.confidence >= 0.5 || depth <= 0) return direct;
  // Insert the midpoint and compose the two half-assignments. The wrap
  // gauge, when present, is applied on the second half only.
  const double k_mid = 0.5 * (k_from + k_to);
  const auto mid = solver.modes_at(k_mid);
  const Assignment a1 =
      assign_with_refinement(solver, from, k_from, mid, k_mid, depth - 1, false);
  const Assignment a2 = assign_with_refinement(solver, mid, k_mid, to, k_to,
                                               depth - 1, wrap_gauge);
  Assignment out;
  out.perm = a1.perm ^ a2.perm;
  out.confidence = std::min(a1.confidence, a2.confidence);
  return out;
}

double fold_increment(double value, double reference, double omega) {
  return fold_halfopen(value - reference, omega);
}

}  // namespace

double refined_uncovered_arc(
    const std::vector<std::pair<double, double>>& e_k_points, double omega,
    const ZoneRealsFn& zone_re, double k_step) {
  if (e_k_points.empty()) return omega;
  std::vector<std::pair<double, double>> pts = e_k_points;
  std::sort(pts.begin(), pts.end());
  double max_gap = (pts.front().first + omega) - pts.back().first;
  std::size_t lo = pts.size() - 1, hi = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double g = pts[i].first - pts[i - 1].first;
    if (g > max_gap) {
      max_gap = g;
      lo = i - 1;
      hi = i;
    }
  }
  if (!zone_re) return max_gap;

  // Follow the branch through its extremum near each arc edge: iterated
  // five-point search on the branch value closest (circularly) to the
  // current reference.
  auto branch = [&](double k, double ref) {
    const auto re = zone_re(k);
    const double d0 = fold_increment(re[0], ref, omega);
    const double d1 = fold_increment(re[1], ref, omega);
    return ref + (std::abs(d0) <= std::abs(d1) ? d0 : d1);
  };
  auto refine_extremum = [&](std::pair<double, double> edge, double sign) {
    double center = edge.second, half = k_step, best = edge.first, ref = edge.first;
    for (int pass = 0; pass < 10; ++pass) {
      double vals[5], kk[5];
      int arg = 2;
      for (int i = 0; i < 5; ++i) {
        kk[i] = center + half * (i - 2) / 2.0;
        vals[i] = branch(kk[i], ref);
        if (sign * vals[i] > sign * vals[arg]) arg = i;
      }
      best = vals[arg];
      center = kk[arg];
      ref = best;
      // Recenter without shrinking while the extremum keeps walking; a
      // winding branch has no turning point and must be followed until
      // the crossing shows up.
      if (arg != 0 && arg != 4) half /= 2.0;
    }
    return best;
  };
  const double e_lo = refine_extremum(pts[lo], +1.0);
  const double e_hi = refine_extremum(pts[hi], -1.0);
  double g = e_hi - e_lo;
  g -= omega * std::floor(g / omega);
  if (g > 0.5 * omega) g = 0.0;  // branches crossed: the arc is covered
  return g;
}

int choose_n_harmonics(const DriveParams& p, double tol, int start, int max_n) {
  p.validate();
  const double kmax = std::numbers::pi / p.a0;
  const std::array<double, 3> probes = {0.0, 0.5 * kmax, kmax};
  auto zone_pair = [&](const HarmonicSet& h, int n_h, double k) {
    ZoneSolver solver{p, h, n_h};
    auto re = solver.zone_re(k);
    std::sort(re.begin(), re.end());
    return re;
  };
  for (int n = start; n <= max_n; n += 5) {
    const HarmonicSet h = harmonics_for_truncation(p, n + 5);
    double worst = 0.0;
    bool ok = true;
    for (double k : probes) {
      try {
        const auto a = zone_pair(h, n, k);
        const auto b = zone_pair(h, n + 5, k);
        worst = std::max({worst, std::abs(a[0] - b[0]), std::abs(a[1] - b[1])});
      } catch (const truncation_error&) {
        ok = false;
        break;
      }
    }
    if (ok && worst < tol) return n;
  }
  throw truncation_error("choose_n_harmonics: no truncation up to " +
                         std::to_string(max_n) + " met the tolerance");
}

BandStructure band_structure(const DriveParams& p, const VectorXd& k_grid,
                             const BandStructureOptions& opt) {
  p.validate();
  const int nk = int(k_grid.size());
  if (nk < 8) throw invalid_argument("band_structure: k_grid too sparse");
  for (int i = 1; i < nk; ++i)
    if (!(k_grid[i] > k_grid[i - 1]))
      throw invalid_argument("band_structure: k_grid must be ascending");

  const HarmonicSet harmonics =
      harmonics_for_truncation(p, opt.n_harmonics + (opt.convergence_check ? 5 : 0));
  const ZoneSolver solver{p, harmonics, opt.n_harmonics};

  if (opt.convergence_check) {
    const ZoneSolver wider{p, harmonics, opt.n_harmonics + 5};
    const double kmax = std::numbers::pi / p.a0;
    for (double k : {0.0, 0.37 * kmax, 0.81 * kmax, kmax}) {
      auto a = solver.zone_re(k), b = wider.zone_re(k);
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      const double dev =
          std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
      if (dev > opt.convergence_tol)
        throw truncation_error(
            "band_structure: +5 harmonic check failed (deviation " +
            std::to_string(dev) + " at k=" + std::to_string(k) + ")");
    }
  }

  std::vector<std::array<FloquetMode, 2>> zone(nk);
  parallel_for(std::size_t(nk), [&](std::size_t i) {
    zone[i] = solver.modes_at(k_grid[int(i)]);
  });

  BandStructure bs;
  bs.params = p;
  bs.n_harmonics = opt.n_harmonics;
  bs.k_grid = k_grid;
  bs.gap_closure_tol = opt.gap_closure_tol;

  // Track band identity across k, then close the loop back to k_grid[0].
  // perm is cumulative: band b at k_i is zone[i][b ^ perm[i]].
  std::vector<int> perm(nk, 0);
  for (int i = 1; i < nk; ++i) {
    const Assignment a = assign_with_refinement(
        solver, zone[i - 1], k_grid[i - 1], zone[i], k_grid[i],
        opt.max_refine_depth, false);
    if (a.confidence < 0.5)
      throw tracking_error("band tracking ambiguous between k=" +
                           std::to_string(k_grid[i - 1]) + " and k=" +
                           std::to_string(k_grid[i]));
    perm[i] = perm[i - 1] ^ a.perm;
  }
  const Assignment wrap = assign_with_refinement(
      solver, zone[nk - 1], k_grid[nk - 1], zone[0],
      k_grid[0] + 2.0 * std::numbers::pi / p.a0, opt.max_refine_depth, true);
  if (wrap.confidence < 0.5)
    throw tracking_error("band tracking ambiguous across the zone wrap");

  for (int b = 0; b < 2; ++b) {
    TrackedBand& band = bs.bands[b];
    band.eps.resize(nk);
    band.re_unfolded.resize(nk);
    band.u.resize(nk);
    band.u_dual.resize(nk);
    band.phi0.resize(nk);
    band.phi0_dual.resize(nk);
    double acc = 0.0;
    for (int i = 0; i < nk; ++i) {
      const FloquetMode& m = zone[i][b ^ perm[i]];
      band.eps[i] = m.eps;
      band.u[i] = m.u;
      band.u_dual[i] = m.u_dual;
      band.phi0[i] = m.phi0;
      band.phi0_dual[i] = m.phi0_dual;
      if (i == 0)
        acc = m.eps.real();
      else
        acc += fold_increment(m.eps.real(), fold_halfopen(acc, p.omega), p.omega);
      band.re_unfolded[i] = acc;
    }
    // Close the loop: the band continues into zone[0][...] (wrap gauge).
    const int wrap_target = b ^ perm[nk - 1] ^ wrap.perm;
    const double end_val =
        acc + fold_increment(zone[0][wrap_target].eps.real(),
                             fold_halfopen(acc, p.omega), p.omega);
    band.z_raw = (end_val - band.re_unfolded[0]) / p.omega;
    band.z = int(std::lround(band.z_raw));
    band.z_residual = std::abs(band.z_raw - band.z);
    double im = 0.0;
    for (int i = 0; i < nk; ++i) im += band.eps[i].imag();
    band.mean_im = im / nk;
  }

  std::vector<std::pair<double, double>> pts;
  pts.reserve(2 * nk);
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < nk; ++i)
      pts.emplace_back(fold_halfopen(bs.bands[b].eps[i].real(), p.omega),
                       k_grid[i]);
  const double k_step = nk > 1 ? (k_grid[1] - k_grid[0]) : 0.1;
  ZoneRealsFn refine_fn;
  if (opt.refine_gap)
    refine_fn = [&solver](double k) { return solver.zone_re(k); };
  bs.gap = refined_uncovered_arc(pts, p.omega, refine_fn, k_step);
  bs.gap_closed = bs.gap <= opt.gap_closure_tol * p.j0;
  return bs;
}

double gap(const BandStructure& bs) { return bs.gap; }

double uncovered_arc(std::vector<double> folded_values, double omega) {
  if (folded_values.empty()) return omega;
  std::sort(folded_values.begin(), folded_values.end());
  double max_gap = (folded_values.front() + omega) - folded_values.back();
  for (std::size_t i = 1; i < folded_values.size(); ++i)
    max_gap = std::max(max_gap, folded_values[i] - folded_values[i - 1]);
  return max_gap;
}

Winding winding_number(const BandStructure& bs, int band) {
  if (band < 0 || band > 1) throw invalid_argument("winding_number: band index");
  const TrackedBand& b = bs.bands[band];
  if (b.z_residual > 0.05)
    throw winding_undefined_error(
        "winding undefined: band does not cleanly wind (residual " +
            std::to_string(b.z_residual) + ")",
        b.z_residual);
  return {b.z, b.z_residual};
}

GapScanResult gap_scan(const DriveParams& base, const VectorXd& omega_grid,
                       const VectorXd& gamma_grid, const GapScanOptions& opt) {
  if (omega_grid.size() == 0 || gamma_grid.size() == 0)
    throw invalid_argument("gap_scan: grids must be nonempty");
  const int no = int(omega_grid.size()), ng = int(gamma_grid.size());

  GapScanResult res;
  res.omega_grid = omega_grid;
  res.gamma_grid = gamma_grid;
  res.gap.resize(no, ng);
  res.flag = Eigen::MatrixXi::Zero(no, ng);
  res.closure_tol = opt.closure_tol;
  res.n_harmonics.resize(no);
  res.threshold = VectorXd::Constant(no, std::nan(""));

  // Truncation per omega column, chosen at the strongest loss of the column.
  for (int io = 0; io < no; ++io) {
    DriveParams p = base;
    p.omega = omega_grid[io];
    p.gamma0 = gamma_grid.maxCoeff();
    res.n_harmonics[io] = opt.n_harmonics > 0 ? opt.n_harmonics
                                              : choose_n_harmonics(p);
  }

  // The loss harmonics scale linearly with gamma0 while the other four
  // couplings do not depend on it, so one reference table per column serves
  // every cell.
  std::vector<HarmonicSet> column_ref;
  column_ref.reserve(no);
  for (int io = 0; io < no; ++io) {
    DriveParams p = base;
    p.omega = omega_grid[io];
    p.gamma0 = 1.0;
    column_ref.push_back(harmonics_for_truncation(p, res.n_harmonics[io]));
  }

  parallel_for(std::size_t(no) * ng, [&](std::size_t cell) {
    const int io = int(cell / ng), ig = int(cell % ng);
    DriveParams p = base;
    p.omega = omega_grid[io];
    p.gamma0 = gamma_grid[ig];
    HarmonicSet h = column_ref[io];
    for (int n = -h.m_max(); n <= h.m_max(); ++n) {
      h.at(Coupling::ga, n) *= p.gamma0;
      h.at(Coupling::gb, n) *= p.gamma0;
    }
    const ZoneSolver solver{p, h, res.n_harmonics[io]};
    const double kmax = std::numbers::pi / p.a0;
    const double k_step = 2.0 * kmax / opt.k_points;
    try {
      std::vector<std::pair<double, double>> pts;
      pts.reserve(2 * opt.k_points);
      for (int i = 0; i < opt.k_points; ++i) {
        const double k = -kmax + i * k_step;
        const auto re = solver.zone_re(k);
        pts.emplace_back(fold_halfopen(re[0], p.omega), k);
        pts.emplace_back(fold_halfopen(re[1], p.omega), k);
      }
      double g = refined_uncovered_arc(pts, p.omega, {}, k_step);
      // Refine only where sampling noise matters for the closure question.
      if (opt.refine && g < 0.05)
        g = refined_uncovered_arc(
            pts, p.omega, [&solver](double k) { return solver.zone_re(k); },
            k_step);
      res.gap(io, ig) = g;
    } catch (const error&) {
      res.gap(io, ig) = std::nan("");
      res.flag(io, ig) = 1;
    }
  });

  for (int io = 0; io < no; ++io) {
    bool seen_open = false;
    for (int ig = 0; ig < ng; ++ig) {
      if (res.flag(io, ig)) continue;
      const double g = res.gap(io, ig);
      if (g > opt.closure_tol * base.j0) {
        seen_open = true;
      } else if (seen_open) {
        res.threshold[io] = gamma_grid[ig];
        break;
      }
    }
  }
  return res;
}

MatrixXcd green_function(const FloquetEigensystem& es, cx energy, double eta) {
  const int d = es.dim();
  MatrixXcd weighted(d, d);
  for (int j = 0; j < d; ++j) {
    const cx denom = energy - es.quasienergies[j] + I * eta;
    weighted.col(j) = es.right.col(j) / denom;
  }
  return weighted * es.left.adjoint();
}

}  // namespace nhfp
