// nhfp: non-Hermitian Floquet analysis of the driven, lossy Rice-Mele pump.
//
// Subcommands write deterministic CSV files (JSON header line, 17-digit
// floats, fixed row order) so identical configurations produce
// byte-identical outputs.
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "nhfp/csv.hpp"
#include "nhfp/dynamics.hpp"
#include "nhfp/errors.hpp"
#include "nhfp/floquet.hpp"
#include "nhfp/monodromy.hpp"
#include "nhfp/parallel.hpp"
#include "nhfp/run_config.hpp"
#include "nhfp/spectral.hpp"

namespace {

using namespace nhfp;
namespace fs = std::filesystem;

struct CliState {
  RunConfig config;
  std::string out_dir = ".";
  bool si = false;
  SiScale scale;
};

nlohmann::json file_header(const CliState& st, const std::string& command) {
  nlohmann::json h;
  h["tool"] = "nhfp";
  h["command"] = command;
  h["config"] = st.config.to_json();
  h["si"] = st.si;
  if (st.si)
    h["si_factors"] = {{"j0_per_um", st.scale.j0_per_um},
                       {"a0_um", st.scale.a0_um}};
  return h;
}

std::string out_path(const CliState& st, const std::string& name) {
  fs::create_directories(st.out_dir);
  return (fs::path(st.out_dir) / name).string();
}

VectorXd inclusive_grid(double lo, double hi, int n) {
  VectorXd g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

// ---------------------------------------------------------------- bands --
int cmd_bands(const CliState& st) {
  const RunConfig& cfg = st.config;
  BandStructureOptions opt;
  opt.n_harmonics = cfg.bands.n_harmonics;
  const BandStructure bs =
      band_structure(cfg.model, default_k_grid(cfg.model, cfg.bands.nk), opt);

  const double e_scale = st.si ? st.scale.j0_per_um : 1.0;
  const double k_scale = st.si ? 1.0 / st.scale.a0_um : 1.0;
  CsvWriter csv(out_path(st, "bands.csv"), file_header(st, "bands"),
                {"k", "band", "re_eps_folded", "im_eps", "re_eps_unfolded"});
  for (int i = 0; i < bs.k_grid.size(); ++i)
    for (int b = 0; b < 2; ++b)
      csv.row({bs.k_grid[i] * k_scale, double(b + 1),
               bs.bands[b].eps[i].real() * e_scale,
               bs.bands[b].eps[i].imag() * e_scale,
               bs.bands[b].re_unfolded[i] * e_scale});

  nlohmann::json summary;
  summary["gap"] = bs.gap * e_scale;
  summary["gap_closed"] = bs.gap_closed;
  for (int b = 0; b < 2; ++b) {
    nlohmann::json wb;
    try {
      const Winding w = winding_number(bs, b);
      wb["z"] = w.z;
      wb["residual"] = w.residual;
      wb["label"] = w.z > 0 ? "right-moving" : (w.z < 0 ? "left-moving" : "flat");
    } catch (const winding_undefined_error& e) {
      wb["z"] = nullptr;
      wb["residual"] = e.residual;
      wb["label"] = "undefined";
    }
    wb["mean_im_eps"] = bs.bands[b].mean_im * e_scale;
    summary["band_" + std::to_string(b + 1)] = wb;
  }
  csv.comment_json("summary", summary);

  std::cout << "bands: gap=" << format_double(bs.gap * e_scale)
            << (bs.gap_closed ? " (closed)" : " (open)") << "\n";
  for (int b = 0; b < 2; ++b) {
    const auto& wb = summary["band_" + std::to_string(b + 1)];
    std::cout << "  band " << b + 1 << ": winding "
              << (wb["z"].is_null() ? std::string("undefined (residual=") +
                                          format_double(wb["residual"]) + ")"
                                    : std::to_string(int(wb["z"])))
              << ", mean Im eps " << format_double(double(wb["mean_im_eps"]))
              << "\n";
  }
  return 0;
}

// -------------------------------------------------------------- gapscan --
int cmd_gapscan(const CliState& st) {
  const RunConfig& cfg = st.config;
  const VectorXd omegas = inclusive_grid(cfg.gapscan.omega_min,
                                         cfg.gapscan.omega_max,
                                         cfg.gapscan.omega_count);
  const VectorXd gammas = inclusive_grid(cfg.gapscan.gamma_min,
                                         cfg.gapscan.gamma_max,
                                         cfg.gapscan.gamma_count);
  GapScanOptions opt;
  opt.k_points = cfg.gapscan.k_points;
  opt.n_harmonics = cfg.gapscan.n_harmonics;
  opt.closure_tol = cfg.gapscan.closure_tol;
  const GapScanResult scan = gap_scan(cfg.model, omegas, gammas, opt);

  const double e_scale = st.si ? st.scale.j0_per_um : 1.0;
  {
    CsvWriter csv(out_path(st, "gapscan.csv"), file_header(st, "gapscan"),
                  {"omega", "gamma0", "gap", "flag"});
    for (int io = 0; io < omegas.size(); ++io)
      for (int ig = 0; ig < gammas.size(); ++ig)
        csv.row({omegas[io] * e_scale, gammas[ig] * e_scale,
                 scan.gap(io, ig) * e_scale, double(scan.flag(io, ig))});
  }
  {
    CsvWriter csv(out_path(st, "gapscan_threshold.csv"),
                  file_header(st, "gapscan"), {"omega", "gamma_star"});
    for (int io = 0; io < omegas.size(); ++io)
      csv.row({omegas[io] * e_scale, scan.threshold[io] * e_scale});
  }
  int flagged = 0;
  for (int io = 0; io < omegas.size(); ++io)
    for (int ig = 0; ig < gammas.size(); ++ig) flagged += scan.flag(io, ig);
  std::cout << "gapscan: " << omegas.size() << "x" << gammas.size()
            << " cells, " << flagged << " flagged\n";
  for (int io = 0; io < omegas.size(); ++io)
    if (std::isfinite(scan.threshold[io]))
      std::cout << "  omega=" << format_double(omegas[io] * e_scale)
                << ": gamma*=" << format_double(scan.threshold[io] * e_scale)
                << "\n";
  return 0;
}

// --------------------------------------------------------------- evolve --
void write_trajectory(const CliState& st, const Trajectory& traj,
                      const std::string& tag) {
  const double t_scale = st.si ? st.scale.time(1.0) : 1.0;
  const double x_scale = st.si ? st.scale.a0_um : 1.0;
  const VectorXd com = center_of_mass(traj);
  const VectorXd norms = norm_series(traj);
  const double t_period = traj.params.period();

  CsvWriter csv(out_path(st, "evolve_com_" + tag + ".csv"),
                file_header(st, "evolve"), {"t", "cycle", "com_cells", "norm"});
  for (int s = 0; s < traj.n_stored(); ++s)
    csv.row({traj.times[s] * t_scale, traj.times[s] / t_period,
             com[s] * x_scale, norms[s]});

  nlohmann::json summary;
  const int n_cycles = (traj.n_stored() - 1) / traj.snapshots_per_cycle;
  std::vector<double> per_cycle;
  for (int c = 1; c <= n_cycles; ++c)
    per_cycle.push_back(
        (com[traj.cycle_index(c)] - com[traj.cycle_index(c - 1)]) * x_scale);
  summary["per_cycle_displacement"] = per_cycle;
  if (n_cycles >= 5)
    summary["com_slope_cycles_2_5"] = com_cycle_slope(traj, 2, 5) * x_scale;
  if (traj.params.gamma0 > 0.0 && n_cycles >= 5) {
    const DecayFit fit = norm_decay(traj, 2, 5);
    summary["gamma_fit"] = fit.gamma / t_scale;
    summary["gamma_fit_residual"] = fit.residual;
  }
  csv.comment_json("summary", summary);
  std::cout << "evolve " << tag << ": com(" << n_cycles
            << "T)=" << format_double(com[traj.cycle_index(n_cycles)] * x_scale)
            << " norm=" << format_double(norms[traj.n_stored() - 1]) << "\n";
}

int cmd_evolve(const CliState& st) {
  const RunConfig& cfg = st.config;
  std::vector<std::pair<std::string, Input>> runs;
  if (cfg.evolve.input == "A" || cfg.evolve.input == "both")
    runs.emplace_back("A", Input::A);
  if (cfg.evolve.input == "B" || cfg.evolve.input == "both")
    runs.emplace_back("B", Input::B);

  PropagateOptions opt;
  opt.steps_per_cycle = cfg.evolve.steps_per_cycle;
  opt.snapshots_per_cycle = cfg.evolve.snapshots_per_cycle;
  for (const auto& [tag, input] : runs) {
    const Trajectory traj = propagate(cfg.model, cfg.evolve.n_cells,
                                      cfg.evolve.n_cells / 2, input,
                                      cfg.evolve.cycles, opt);
    write_trajectory(st, traj, tag);
    if (cfg.evolve.spectrum) {
      const VectorXd e_grid = default_e_grid(cfg.model.omega, 64);
      const VectorXd k_grid = default_k_grid(cfg.model, 64);
      SpectralMap map = spacetime_spectrum(traj, e_grid, k_grid);
      map.normalize_per_k();
      const double e_scale = st.si ? st.scale.j0_per_um : 1.0;
      const double k_scale = st.si ? 1.0 / st.scale.a0_um : 1.0;
      CsvWriter csv(out_path(st, "evolve_spacetime_" + tag + ".csv"),
                    file_header(st, "evolve"), {"E", "k", "intensity"});
      for (int ik = 0; ik < k_grid.size(); ++ik)
        for (int ie = 0; ie < e_grid.size(); ++ie)
          csv.row({e_grid[ie] * e_scale, k_grid[ik] * k_scale,
                   map.intensity(ie, ik)});
    }
  }
  return 0;
}

// ------------------------------------------------------------- spectrum --
int cmd_spectrum(const CliState& st) {
  const RunConfig& cfg = st.config;
  const Input input = cfg.spectrum.input == "A" ? Input::A : Input::B;
  const VectorXd e_grid = default_e_grid(cfg.model.omega, cfg.spectrum.ne);
  const VectorXd k_grid = default_k_grid(cfg.model, cfg.spectrum.nk);
  const bool want_analytic =
      cfg.spectrum.source == "analytic" || cfg.spectrum.source == "both";
  const bool want_simulated =
      cfg.spectrum.source == "simulated" || cfg.spectrum.source == "both";

  SpectralMap analytic, simulated;
  if (want_analytic) {
    BandStructureOptions opt;
    opt.n_harmonics = cfg.spectrum.n_harmonics;
    const BandStructure bs = band_structure(cfg.model, k_grid, opt);
    SpectralOptions sopt;
    sopt.eta = cfg.spectrum.eta;
    analytic = spectral_density(bs, e_grid, input, sopt);
  }
  if (want_simulated) {
    PropagateOptions opt;
    opt.steps_per_cycle = cfg.spectrum.steps_per_cycle;
    opt.snapshots_per_cycle = cfg.spectrum.snapshots_per_cycle;
    const Trajectory traj =
        propagate(cfg.model, cfg.spectrum.n_cells, cfg.spectrum.n_cells / 2,
                  input, cfg.spectrum.cycles, opt);
    simulated = spacetime_spectrum(traj, e_grid, k_grid);
    simulated.normalize_per_k();
  }

  const double e_scale = st.si ? st.scale.j0_per_um : 1.0;
  const double k_scale = st.si ? 1.0 / st.scale.a0_um : 1.0;
  std::vector<std::string> cols = {"E", "k"};
  if (want_analytic) cols.push_back("intensity_analytic");
  if (want_simulated) cols.push_back("intensity_simulated");
  CsvWriter csv(out_path(st, "spectrum.csv"), file_header(st, "spectrum"), cols);
  for (int ik = 0; ik < k_grid.size(); ++ik)
    for (int ie = 0; ie < e_grid.size(); ++ie) {
      std::vector<double> row = {e_grid[ie] * e_scale, k_grid[ik] * k_scale};
      if (want_analytic) row.push_back(analytic.intensity(ie, ik));
      if (want_simulated) row.push_back(simulated.intensity(ie, ik));
      csv.row(row);
    }
  std::cout << "spectrum: " << cfg.spectrum.ne << "x" << cfg.spectrum.nk
            << " grid written\n";
  return 0;
}

// ---------------------------------------------------------------- check --
struct CheckOutcome {
  std::string name;
  double value;
  double tolerance;
  bool pass;
  std::string note;
};

int cmd_check(const CliState& st) {
  const RunConfig& cfg = st.config;
  const DriveParams& p = cfg.model;
  const int n_h = cfg.check.n_harmonics;
  std::vector<CheckOutcome> results;
  auto record = [&](const std::string& name, double value, double tol,
                    const std::string& note = "") {
    results.push_back({name, value, tol, value <= tol, note});
  };

  const VectorXd k_grid = default_k_grid(p, cfg.check.nk);

  // quasienergy agreement: truncated Floquet matrix vs monodromy
  try {
    const HarmonicSet h = harmonics_for_truncation(p, n_h);
    std::vector<double> dev(k_grid.size());
    parallel_for(std::size_t(k_grid.size()), [&](std::size_t i) {
      const double k = k_grid[int(i)];
      const auto modes = first_zone_modes(
          diagonalize_biorthogonal(build_floquet_matrix(h, p, k, n_h), k, n_h),
          p.omega);
      const auto oracle = quasienergies_from_monodromy(
          monodromy(p, k, cfg.check.monodromy_steps), p.omega);
      double worst = 0.0;
      for (const auto& m : modes)
        worst = std::max(worst, std::min(std::abs(m.eps - oracle[0]),
                                         std::abs(m.eps - oracle[1])));
      dev[i] = worst;
    });
    record("quasienergy_vs_monodromy", *std::max_element(dev.begin(), dev.end()),
           cfg.check.quasienergy_tol);
  } catch (const error& e) {
    results.push_back({"quasienergy_vs_monodromy", std::nan(""), 0.0, false,
                       e.what()});
  }

  // biorthonormality residual
  try {
    const HarmonicSet h = harmonics_for_truncation(p, n_h);
    double worst = 0.0;
    for (double k : {k_grid[0], k_grid[k_grid.size() / 3],
                     k_grid[2 * k_grid.size() / 3]}) {
      const FloquetEigensystem es =
          diagonalize_biorthogonal(build_floquet_matrix(h, p, k, n_h), k, n_h);
      const MatrixXcd gram = es.left.adjoint() * es.right;
      worst = std::max(worst, (gram - MatrixXcd::Identity(es.dim(), es.dim()))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    record("biorthonormality_residual", worst, 1e-10);
  } catch (const error& e) {
    results.push_back({"biorthonormality_residual", std::nan(""), 0.0, false,
                       e.what()});
  }

  // truncation self-convergence at probe momenta
  try {
    const HarmonicSet h = harmonics_for_truncation(p, n_h + 5);
    double worst = 0.0;
    for (double frac : {0.0, 0.37, 0.81, 1.0}) {
      const double k = frac * std::numbers::pi / p.a0;
      auto zone = [&](int n) {
        auto modes = first_zone_modes(
            diagonalize_biorthogonal(build_floquet_matrix(h, p, k, n), k, n),
            p.omega);
        std::array<double, 2> re = {modes[0].eps.real(), modes[1].eps.real()};
        std::sort(re.begin(), re.end());
        return re;
      };
      const auto a = zone(n_h), b = zone(n_h + 5);
      worst = std::max({worst, std::abs(a[0] - b[0]), std::abs(a[1] - b[1])});
    }
    record("truncation_convergence", worst, 1e-8);
  } catch (const error& e) {
    results.push_back({"truncation_convergence", std::nan(""), 0.0, false,
                       std::string("truncation check failed: ") + e.what()});
  }

  // Hermitian reality / loss sign of the first-zone modes
  try {
    const HarmonicSet h = harmonics_for_truncation(p, n_h);
    double worst = 0.0;
    for (int i = 0; i < k_grid.size(); i += 4) {
      const auto modes = first_zone_modes(
          diagonalize_biorthogonal(
              build_floquet_matrix(h, p, k_grid[i], n_h), k_grid[i], n_h),
          p.omega);
      for (const auto& m : modes)
        worst = std::max(worst, p.gamma0 == 0.0 ? std::abs(m.eps.imag())
                                                : m.eps.imag());
    }
    record(p.gamma0 == 0.0 ? "hermitian_reality" : "loss_sign", worst, 1e-10);
  } catch (const error& e) {
    results.push_back({"hermitian_reality", std::nan(""), 0.0, false, e.what()});
  }

  // monodromy step-halving convergence
  {
    const Monodromy a = monodromy(p, 0.77, cfg.check.monodromy_steps);
    const Monodromy b = monodromy(p, 0.77, 2 * cfg.check.monodromy_steps);
    record("monodromy_step_halving", (a.u_t - b.u_t).norm(), 1e-10);
  }

  // gap and winding from the monodromy route vs the Floquet-matrix route
  try {
    BandStructureOptions opt;
    opt.n_harmonics = n_h;
    const BandStructure bs = band_structure(p, k_grid, opt);

    auto zone_re = [&](double k) {
      const auto eps =
          quasienergies_from_monodromy(monodromy(p, k, 30000), p.omega);
      return std::array<double, 2>{eps[0].real(), eps[1].real()};
    };
    std::vector<std::pair<double, double>> pts;
    std::vector<std::array<double, 2>> sampled(k_grid.size());
    parallel_for(std::size_t(k_grid.size()), [&](std::size_t i) {
      sampled[i] = zone_re(k_grid[int(i)]);
    });
    for (int i = 0; i < k_grid.size(); ++i) {
      pts.emplace_back(sampled[i][0], k_grid[i]);
      pts.emplace_back(sampled[i][1], k_grid[i]);
    }
    const double g_mono = refined_uncovered_arc(
        pts, p.omega, zone_re, k_grid[1] - k_grid[0]);
    record("gap_vs_monodromy", std::abs(g_mono - bs.gap), 1e-6);

    // winding from monodromy eigenvector tracking
    std::vector<MonodromyModes> modes(k_grid.size());
    parallel_for(std::size_t(k_grid.size()), [&](std::size_t i) {
      modes[i] = monodromy_modes(monodromy(p, k_grid[int(i)], 30000), p.omega);
    });
    int perm = 0;
    std::array<double, 2> acc = {modes[0].eps[0].real(), modes[0].eps[1].real()};
    const std::array<double, 2> start = acc;
    auto advance = [&](const MonodromyModes& prev, MonodromyModes next,
                       bool wrap) {
      if (wrap) {  // eigenvectors at k + 2 pi/a0 carry a sign flip on B
        next.vec[0][1] = -next.vec[0][1];
        next.vec[1][1] = -next.vec[1][1];
      }
      const double keep =
          std::min(std::abs(prev.vec[perm].dot(next.vec[0])),
                   std::abs(prev.vec[1 - perm].dot(next.vec[1])));
      const double swap =
          std::min(std::abs(prev.vec[perm].dot(next.vec[1])),
                   std::abs(prev.vec[1 - perm].dot(next.vec[0])));
      perm = swap > keep ? 1 : 0;
      for (int b = 0; b < 2; ++b) {
        const double f = next.eps[b == 0 ? perm : 1 - perm].real();
        acc[b] += fold_halfopen(f - fold_halfopen(acc[b], p.omega), p.omega);
      }
    };
    for (std::size_t i = 1; i < modes.size(); ++i)
      advance(modes[i - 1], modes[i], false);
    advance(modes[modes.size() - 1], modes[0], true);
    const double z0 = (acc[0] - start[0]) / p.omega;
    const double z1 = (acc[1] - start[1]) / p.omega;
    double winding_dev = 0.0;
    std::string note;
    if (bs.bands[0].z_residual <= 0.05 && bs.bands[1].z_residual <= 0.05) {
      const double d0 = std::min(std::abs(z0 - bs.bands[0].z),
                                 std::abs(z1 - bs.bands[0].z));
      const double d1 = std::min(std::abs(z0 - bs.bands[1].z),
                                 std::abs(z1 - bs.bands[1].z));
      winding_dev = std::max(d0, d1);
      note = "Z(floquet) = {" + std::to_string(bs.bands[0].z) + "," +
             std::to_string(bs.bands[1].z) + "}";
    } else {
      note = "winding undefined on both routes (open gap)";
      const double r0 = std::abs(z0 - std::lround(z0));
      winding_dev = (r0 > 0.05) == (bs.bands[0].z_residual > 0.05) ? 0.0 : 1.0;
    }
    record("winding_vs_monodromy", winding_dev, 0.05, note);
  } catch (const error& e) {
    results.push_back({"gap_vs_monodromy", std::nan(""), 0.0, false, e.what()});
  }

  // short propagation: unitarity or contractivity
  {
    PropagateOptions opt;
    opt.steps_per_cycle = 2000;
    const Trajectory traj = propagate(p, 61, 30, Input::A, 5, opt);
    const VectorXd norms = norm_series(traj);
    if (p.gamma0 == 0.0) {
      double drift = 0.0;
      for (int s = 0; s < norms.size(); ++s)
        drift = std::max(drift, std::abs(norms[s] - 1.0));
      record("norm_drift_5_cycles", drift, 1e-9);
    } else {
      double growth = 0.0;
      for (int s = 1; s < norms.size(); ++s)
        growth = std::max(growth, norms[s] / norms[s - 1] - 1.0);
      record("norm_contractivity", growth, 1e-9);
    }
  }

  CsvWriter csv(out_path(st, "check.csv"), file_header(st, "check"),
                {"check", "value", "tolerance", "status", "note"});
  bool all_pass = true;
  for (const CheckOutcome& r : results) {
    csv.raw_row({r.name, format_double(r.value), format_double(r.tolerance),
                 r.pass ? "ok" : "FAIL", r.note});
    std::cout << (r.pass ? "[ok]   " : "[FAIL] ") << r.name << ": "
              << format_double(r.value) << " (tol " << format_double(r.tolerance)
              << ")" << (r.note.empty() ? "" : "  " + r.note) << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-Hermitian Floquet analysis of the driven lossy Rice-Mele chain"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path;
  std::string out_dir = ".";
  bool si = false;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--si", si, "scale outputs by the documented experimental units");
  app.add_option("--set", overrides,
                 "override a config field, e.g. --set model.gamma0=0.8");

  auto* bands = app.add_subcommand("bands", "folded quasienergy bands, gap, windings");
  auto* gapscan = app.add_subcommand("gapscan", "gap over an (omega, gamma0) grid");
  auto* evolve = app.add_subcommand("evolve", "real-space wave-packet evolution");
  auto* spectrum = app.add_subcommand("spectrum", "intensity I(E,k) maps");
  auto* check = app.add_subcommand("check", "oracle cross-check suite");

  CLI11_PARSE(app, argc, argv);

  try {
    CliState st;
    if (!config_path.empty()) st.config = RunConfig::from_file(config_path);
    for (const std::string& o : overrides) st.config.apply_override(o);
    st.config.validate();
    st.out_dir = out_dir;
    st.si = si;

    if (bands->parsed()) return cmd_bands(st);
    if (gapscan->parsed()) return cmd_gapscan(st);
    if (evolve->parsed()) return cmd_evolve(st);
    if (spectrum->parsed()) return cmd_spectrum(st);
    if (check->parsed()) return cmd_check(st);
    return 1;
  } catch (const invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const lattice_too_small_error& e) {
    std::cerr << "validation error: " << e.what()
              << " (suggested n_cells >= " << e.suggested_cells << ")\n";
    return 1;
  } catch (const error& e) {
    std::cerr << "numerical check failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
}
