#pragma once
#include <string>
#include <vector>

#include "nhfp/drive.hpp"
#include "nhfp/vendor_json.hpp"

namespace nhfp {

/// Resolved configuration of one CLI run: a flat model section plus one
/// section per command. Unknown keys are rejected so typos surface as
/// validation errors.
struct RunConfig {
  DriveParams model;

  struct Bands {
    int nk = 256;
    int n_harmonics = 40;
  } bands;

  struct GapScan {
    double omega_min = 0.5, omega_max = 2.0;
    int omega_count = 20;
    double gamma_min = 0.0, gamma_max = 0.6;
    int gamma_count = 20;
    int k_points = 128;
    int n_harmonics = 0;  ///< 0: per-column convergence rule
    double closure_tol = 1e-3;
  } gapscan;

  struct Evolve {
    int n_cells = 201;
    int cycles = 5;
    int steps_per_cycle = 2000;
    int snapshots_per_cycle = 20;
    std::string input = "A";  ///< "A", "B" or "both"
    bool spectrum = false;    ///< also write the space-time spectrum
  } evolve;

  struct Spectrum {
    int nk = 64;
    int ne = 64;
    int n_harmonics = 40;
    std::string input = "A";
    std::string source = "both";  ///< "analytic", "simulated" or "both"
    double eta = 0.02;
    int cycles = 32;      ///< simulated-trajectory length
    int n_cells = 161;
    int steps_per_cycle = 2000;
    int snapshots_per_cycle = 16;
  } spectrum;

  struct Check {
    int nk = 64;
    int n_harmonics = 40;
    int monodromy_steps = 300000;
    double quasienergy_tol = 1e-8;
  } check;

  /// Parse from JSON text; missing sections/fields keep their defaults.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);

  /// Apply "section.key=value" overrides (CLI flags win over the file).
  void apply_override(const std::string& assignment);

  /// Full resolved configuration, defaults included.
  nlohmann::json to_json() const;

  void validate() const;
};

/// Documented experimental scale factors for the --si flag: energies in
/// 1/um via j0 = 0.144/um, lengths via a0 = 3.4 um (two waveguides at
/// 1.7 um spacing), propagation distance (time) in um via 1/j0.
struct SiScale {
  double j0_per_um = 0.144;
  double a0_um = 3.4;
  double energy(double e) const { return e * j0_per_um; }
  double time(double t) const { return t / j0_per_um; }
  double length_cells(double x) const { return x * a0_um; }
  double momentum(double k) const { return k / a0_um; }
};

}  // namespace nhfp
