#include "nhfp/run_config.hpp"

#include <fstream>

#include "nhfp/errors.hpp"

namespace nhfp {

namespace {

using nlohmann::json;

// Field-by-field section reader that rejects unknown keys.
class Section {
 public:
  Section(const json& j, const std::string& name) : name_(name) {
    if (j.contains(name)) {
      if (!j.at(name).is_object())
        throw invalid_argument("config: section '" + name + "' must be an object");
      obj_ = j.at(name);
    }
  }

  template <typename T>
  void field(const char* key, T& target) {
    if (obj_.contains(key)) {
      try {
        target = obj_.at(key).get<T>();
      } catch (const json::exception&) {
        throw invalid_argument("config: bad value for '" + name_ + "." + key + "'");
      }
      obj_.erase(key);
    }
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      throw invalid_argument("config: unknown key '" + name_ + "." + it.key() + "'");
  }

 private:
  std::string name_;
  json obj_ = json::object();
};

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw invalid_argument("config: top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "model" && k != "bands" && k != "gapscan" && k != "evolve" &&
        k != "spectrum" && k != "check")
      throw invalid_argument("config: unknown section '" + k + "'");
  }
  RunConfig c;
  {
    Section s(j, "model");
    s.field("u0", c.model.u0);
    s.field("j0", c.model.j0);
    s.field("lambda", c.model.lambda);
    s.field("gamma0", c.model.gamma0);
    s.field("phi", c.model.phi);
    s.field("omega", c.model.omega);
    s.field("a0", c.model.a0);
    s.finish();
  }
  {
    Section s(j, "bands");
    s.field("nk", c.bands.nk);
    s.field("n_harmonics", c.bands.n_harmonics);
    s.finish();
  }
  {
    Section s(j, "gapscan");
    s.field("omega_min", c.gapscan.omega_min);
    s.field("omega_max", c.gapscan.omega_max);
    s.field("omega_count", c.gapscan.omega_count);
    s.field("gamma_min", c.gapscan.gamma_min);
    s.field("gamma_max", c.gapscan.gamma_max);
    s.field("gamma_count", c.gapscan.gamma_count);
    s.field("k_points", c.gapscan.k_points);
    s.field("n_harmonics", c.gapscan.n_harmonics);
    s.field("closure_tol", c.gapscan.closure_tol);
    s.finish();
  }
  {
    Section s(j, "evolve");
    s.field("n_cells", c.evolve.n_cells);
    s.field("cycles", c.evolve.cycles);
    s.field("steps_per_cycle", c.evolve.steps_per_cycle);
    s.field("snapshots_per_cycle", c.evolve.snapshots_per_cycle);
    s.field("input", c.evolve.input);
    s.field("spectrum", c.evolve.spectrum);
    s.finish();
  }
  {
    Section s(j, "spectrum");
    s.field("nk", c.spectrum.nk);
    s.field("ne", c.spectrum.ne);
    s.field("n_harmonics", c.spectrum.n_harmonics);
    s.field("input", c.spectrum.input);
    s.field("source", c.spectrum.source);
    s.field("eta", c.spectrum.eta);
    s.field("cycles", c.spectrum.cycles);
    s.field("n_cells", c.spectrum.n_cells);
    s.field("steps_per_cycle", c.spectrum.steps_per_cycle);
    s.field("snapshots_per_cycle", c.spectrum.snapshots_per_cycle);
    s.finish();
  }
  {
    Section s(j, "check");
    s.field("nk", c.check.nk);
    s.field("n_harmonics", c.check.n_harmonics);
    s.field("monodromy_steps", c.check.monodromy_steps);
    s.field("quasienergy_tol", c.check.quasienergy_tol);
    s.finish();
  }
  c.validate();
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_argument("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  return from_json(j);
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw invalid_argument("override must look like section.key=value: " +
                           assignment);
  const std::string section = assignment.substr(0, dot);
  const std::string key = assignment.substr(dot + 1, eq - dot - 1);
  const std::string value = assignment.substr(eq + 1);

  json patch = to_json();
  if (!patch.contains(section) || !patch[section].contains(key))
    throw invalid_argument("override: unknown field '" + section + "." + key + "'");
  json& slot = patch[section][key];
  try {
    if (slot.is_string())
      slot = value;
    else if (slot.is_boolean())
      slot = (value == "true" || value == "1");
    else if (slot.is_number_integer())
      slot = std::stoi(value);
    else
      slot = std::stod(value);
  } catch (const std::exception&) {
    throw invalid_argument("override: bad value in '" + assignment + "'");
  }
  *this = from_json(patch);
}

nlohmann::json RunConfig::to_json() const {
  json j;
  j["model"] = {{"u0", model.u0},         {"j0", model.j0},
                {"lambda", model.lambda}, {"gamma0", model.gamma0},
                {"phi", model.phi},       {"omega", model.omega},
                {"a0", model.a0}};
  j["bands"] = {{"nk", bands.nk}, {"n_harmonics", bands.n_harmonics}};
  j["gapscan"] = {{"omega_min", gapscan.omega_min},
                  {"omega_max", gapscan.omega_max},
                  {"omega_count", gapscan.omega_count},
                  {"gamma_min", gapscan.gamma_min},
                  {"gamma_max", gapscan.gamma_max},
                  {"gamma_count", gapscan.gamma_count},
                  {"k_points", gapscan.k_points},
                  {"n_harmonics", gapscan.n_harmonics},
                  {"closure_tol", gapscan.closure_tol}};
  j["evolve"] = {{"n_cells", evolve.n_cells},
                 {"cycles", evolve.cycles},
                 {"steps_per_cycle", evolve.steps_per_cycle},
                 {"snapshots_per_cycle", evolve.snapshots_per_cycle},
                 {"input", evolve.input},
                 {"spectrum", evolve.spectrum}};
  j["spectrum"] = {{"nk", spectrum.nk},
                   {"ne", spectrum.ne},
                   {"n_harmonics", spectrum.n_harmonics},
                   {"input", spectrum.input},
                   {"source", spectrum.source},
                   {"eta", spectrum.eta},
                   {"cycles", spectrum.cycles},
                   {"n_cells", spectrum.n_cells},
                   {"steps_per_cycle", spectrum.steps_per_cycle},
                   {"snapshots_per_cycle", spectrum.snapshots_per_cycle}};
  j["check"] = {{"nk", check.nk},
                {"n_harmonics", check.n_harmonics},
                {"monodromy_steps", check.monodromy_steps},
                {"quasienergy_tol", check.quasienergy_tol}};
  return j;
}

void RunConfig::validate() const {
  model.validate();
  auto positive = [](int v, const char* what) {
    if (v < 1) throw invalid_argument(std::string("config: ") + what + " must be >= 1");
  };
  positive(bands.nk, "bands.nk");
  positive(bands.n_harmonics, "bands.n_harmonics");
  positive(gapscan.omega_count, "gapscan.omega_count");
  positive(gapscan.gamma_count, "gapscan.gamma_count");
  positive(gapscan.k_points, "gapscan.k_points");
  if (gapscan.omega_min <= 0.0)
    throw invalid_argument("config: gapscan.omega_min must be > 0");
  if (gapscan.omega_max < gapscan.omega_min)
    throw invalid_argument("config: gapscan omega range is empty");
  if (gapscan.gamma_max < gapscan.gamma_min || gapscan.gamma_min < 0.0)
    throw invalid_argument("config: gapscan gamma range is invalid");
  positive(evolve.n_cells, "evolve.n_cells");
  positive(evolve.cycles, "evolve.cycles");
  if (evolve.input != "A" && evolve.input != "B" && evolve.input != "both")
    throw invalid_argument("config: evolve.input must be A, B or both");
  positive(spectrum.nk, "spectrum.nk");
  positive(spectrum.ne, "spectrum.ne");
  positive(spectrum.cycles, "spectrum.cycles");
  if (spectrum.input != "A" && spectrum.input != "B")
    throw invalid_argument("config: spectrum.input must be A or B");
  if (spectrum.source != "analytic" && spectrum.source != "simulated" &&
      spectrum.source != "both")
    throw invalid_argument("config: spectrum.source must be analytic, simulated or both");
  positive(check.nk, "check.nk");
  positive(check.n_harmonics, "check.n_harmonics");
}

}  // namespace nhfp
