#include "crfv/config.hpp"

#include <charconv>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace crfv {

namespace {

struct BadValue {
  std::string why;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> w;
  for (std::string t; in >> t;) w.push_back(t);
  return w;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) throw BadValue{"expected a number, got '" + s + "'"};
  return v;
}

long to_long(const std::string& s) {
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw BadValue{"expected an integer, got '" + s + "'"};
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  throw BadValue{"expected true or false, got '" + s + "'"};
}

Vec3 to_vec3(const std::string& s) {
  const auto w = words(s);
  if (w.size() != 3) throw BadValue{"expected three numbers, got '" + s + "'"};
  return {to_double(w[0]), to_double(w[1]), to_double(w[2])};
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

struct Key {
  Setter set;
  std::string help;
};

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> k = {
      {"mesh.file", {[](RunConfig& c, const std::string& v) { c.mesh_file = v; }, "tet mesh file (overrides mesh.n)"}},
      {"mesh.n",
       {[](RunConfig& c, const std::string& v) {
          const int n = static_cast<int>(to_long(v));
          c.cells = {n, n, n};
        },
        "cells per side of the structured box"}},
      {"mesh.cells",
       {[](RunConfig& c, const std::string& v) {
          const auto w = words(v);
          if (w.size() != 3) throw BadValue{"expected three integers"};
          for (int i = 0; i < 3; ++i) c.cells[static_cast<std::size_t>(i)] = static_cast<int>(to_long(w[static_cast<std::size_t>(i)]));
        },
        "cells along x, y, z"}},
      {"mesh.lo", {[](RunConfig& c, const std::string& v) { c.box.lo = to_vec3(v); }, "box lower corner"}},
      {"mesh.hi", {[](RunConfig& c, const std::string& v) { c.box.hi = to_vec3(v); }, "box upper corner"}},
      {"case", {[](RunConfig& c, const std::string& v) { c.case_name = v; }, "constant | transport | vortex"}},
      {"case.rho", {[](RunConfig& c, const std::string& v) { c.rho_bar = to_double(v); }, "reference density"}},
      {"case.u", {[](RunConfig& c, const std::string& v) { c.u_bar = to_vec3(v); }, "boundary velocity (transport), x-speed (vortex)"}},
      {"case.delta", {[](RunConfig& c, const std::string& v) { c.delta = to_double(v); }, "vortex density modulation"}},
      {"case.q0", {[](RunConfig& c, const std::string& v) { c.q0 = to_double(v); }, "vortex amplitude"}},
      {"time.T", {[](RunConfig& c, const std::string& v) { c.T = to_double(v); }, "final time"}},
      {"time.dt", {[](RunConfig& c, const std::string& v) { c.dt = to_double(v); }, "time step (default dt_factor * h)"}},
      {"time.dt_factor", {[](RunConfig& c, const std::string& v) { c.dt_factor = to_double(v); }, "dt = dt_factor * h"}},
      {"mu", {[](RunConfig& c, const std::string& v) { c.mu = to_double(v); }, "shear viscosity"}},
      {"lambda", {[](RunConfig& c, const std::string& v) { c.lambda = to_double(v); }, "bulk viscosity"}},
      {"gamma", {[](RunConfig& c, const std::string& v) { c.gamma = to_double(v); }, "adiabatic exponent"}},
      {"pressure.a", {[](RunConfig& c, const std::string& v) { c.pressure_a = to_double(v); }, "p = a rho^gamma"}},
      {"reg.kappa", {[](RunConfig& c, const std::string& v) { c.reg.kappa = static_cast<int>(to_long(v)); }, "density diffusion switch (0|1)"}},
      {"reg.kappa_tilde",
       {[](RunConfig& c, const std::string& v) { c.reg.kappa_tilde = static_cast<int>(to_long(v)); }, "pressure regularization switch (0|1)"}},
      {"reg.eta", {[](RunConfig& c, const std::string& v) { c.reg.eta = to_double(v); }, "pressure regularization exponent"}},
      {"reg.omega", {[](RunConfig& c, const std::string& v) { c.reg.omega = to_double(v); }, "density diffusion exponent"}},
      {"solver.fp_tol", {[](RunConfig& c, const std::string& v) { c.fp_tol = to_double(v); }, "Picard tolerance"}},
      {"solver.fp_max", {[](RunConfig& c, const std::string& v) { c.fp_max = static_cast<int>(to_long(v)); }, "Picard iteration budget"}},
      {"solver.theta", {[](RunConfig& c, const std::string& v) { c.theta = to_double(v); }, "initial Picard damping"}},
      {"solver.anderson",
       {[](RunConfig& c, const std::string& v) { c.anderson = static_cast<int>(to_long(v)); }, "Anderson mixing depth, 0 for plain Picard"}},
      {"solver.linear",
       {[](RunConfig& c, const std::string& v) {
          if (v == "auto") c.lin.kind = LinearSolverKind::Auto;
          else if (v == "direct") c.lin.kind = LinearSolverKind::Direct;
          else if (v == "iterative") c.lin.kind = LinearSolverKind::Iterative;
          else throw BadValue{"expected auto, direct or iterative"};
        },
        "auto | direct | iterative"}},
      {"solver.lin_tol", {[](RunConfig& c, const std::string& v) { c.lin.tol = to_double(v); }, "linear solver tolerance"}},
      {"solver.exec",
       {[](RunConfig& c, const std::string& v) {
          if (v == "serial") c.exec = Exec::Serial;
          else if (v == "parallel") c.exec = Exec::Parallel;
          else throw BadValue{"expected serial or parallel"};
        },
        "serial | parallel kernels"}},
      {"quadrature.degree", {[](RunConfig& c, const std::string& v) { c.quad_degree = static_cast<int>(to_long(v)); }, "quadrature degree for data"}},
      {"output.dir", {[](RunConfig& c, const std::string& v) { c.output_dir = v; }, "output directory (env CRFV_OUTPUT_DIR overrides)"}},
      {"output.vtk_every", {[](RunConfig& c, const std::string& v) { c.vtk_every = static_cast<int>(to_long(v)); }, "VTK cadence in steps, 0 = off"}},
      {"check.mass", {[](RunConfig& c, const std::string& v) { c.check_mass = to_bool(v); }, "mass balance certificate"}},
      {"check.energy", {[](RunConfig& c, const std::string& v) { c.check_energy = to_bool(v); }, "energy inequality certificate"}},
      {"check.errors", {[](RunConfig& c, const std::string& v) { c.check_errors = to_bool(v); }, "error ledger and exactness certificate"}},
      {"check.consistency", {[](RunConfig& c, const std::string& v) { c.check_consistency = to_bool(v); }, "consistency residual ledger"}},
      {"eoc.min_c", {[](RunConfig& c, const std::string& v) { c.eoc_min_c = to_double(v); }, "required EOC of the continuity residual"}},
      {"eoc.min_m", {[](RunConfig& c, const std::string& v) { c.eoc_min_m = to_double(v); }, "required EOC of the momentum residual"}},
      {"levels",
       {[](RunConfig& c, const std::string& v) {
          c.levels.clear();
          for (const auto& w : words(v)) c.levels.push_back(static_cast<int>(to_long(w)));
        },
        "cells per side of each refinement level"}},
      {"seed", {[](RunConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_long(v)); }, "random seed for the identity suite"}},
  };
  return k;
}

void require(bool ok, const std::string& key, const std::string& why) {
  if (!ok) throw ConfigError(key + ": " + why, 0, key);
}

void validate(RunConfig& c) {
  require(c.mu > 0.0, "mu", "viscosity must be positive");
  require(c.lambda + 2.0 * c.mu / 3.0 > 0.0, "lambda", "lambda + 2 mu / 3 must be positive");
  require(c.gamma > 1.0, "gamma", "adiabatic exponent must exceed 1");
  require(c.pressure_a > 0.0, "pressure.a", "pressure coefficient must be positive");
  require(c.reg.kappa == 0 || c.reg.kappa == 1, "reg.kappa", "must be 0 or 1");
  require(c.reg.kappa_tilde == 0 || c.reg.kappa_tilde == 1, "reg.kappa_tilde", "must be 0 or 1");
  require(c.reg.eta > 0.0, "reg.eta", "must be positive");
  require(c.reg.omega > 0.0, "reg.omega", "must be positive");
  require(c.T > 0.0, "time.T", "final time must be positive");
  require(!c.dt || *c.dt > 0.0, "time.dt", "time step must be positive");
  require(c.dt_factor > 0.0, "time.dt_factor", "must be positive");
  require(c.fp_tol > 0.0, "solver.fp_tol", "must be positive");
  require(c.fp_max >= 1, "solver.fp_max", "must be at least 1");
  require(c.theta > 0.0 && c.theta <= 1.0, "solver.theta", "must lie in (0, 1]");
  require(c.anderson >= 0, "solver.anderson", "must be nonnegative");
  require(c.lin.tol > 0.0, "solver.lin_tol", "must be positive");
  require(c.rho_bar > 0.0, "case.rho", "density must be positive");
  require(std::abs(c.delta) < 1.0, "case.delta", "modulation must satisfy |delta| < 1");
  require(c.quad_degree >= 1 && c.quad_degree <= 12, "quadrature.degree", "must lie in 1..12");
  require(c.vtk_every >= 0, "output.vtk_every", "must be nonnegative");
  require(!c.levels.empty(), "levels", "at least one level");
  for (int n : c.levels) require(n >= 1, "levels", "cells per side must be positive");
  for (int n : c.cells) require(n >= 1, "mesh.cells", "cells per side must be positive");
  for (int i = 0; i < 3; ++i) require(c.box.hi[i] > c.box.lo[i], "mesh.hi", "box must have positive extent");
  require(c.case_name == "constant" || c.case_name == "transport" || c.case_name == "vortex", "case",
          "expected constant, transport or vortex");
  if (c.case_name == "vortex") {
    require(c.box.lo.isZero() && c.box.hi.isOnes(), "mesh.lo", "the vortex case lives on the unit cube");
  }

  RegularizationParams r = c.reg;
  r.h = 1.0;
  const std::string w = r.range_warning();
  if (!w.empty()) c.warnings.push_back(w);
  if (const char* dir = std::getenv("CRFV_OUTPUT_DIR"); dir != nullptr && *dir != '\0') c.output_dir = dir;
}

}  // namespace

ManufacturedCase RunConfig::make_case() const {
  const PressureLaw pl = law();
  ManufacturedCase c;
  if (case_name == "constant") c = case_constant(mu, lambda, pl, rho_bar);
  else if (case_name == "transport") c = case_transport(mu, lambda, pl, rho_bar, u_bar);
  else {
    CaseCOptions o;
    o.rho_bar = rho_bar;
    o.delta = delta;
    o.u_bar = u_bar[0];
    o.q0 = q0;
    c = case_vortex(mu, lambda, pl, o);
  }
  c.T = T;
  c.box = box;
  return c;
}

TetMesh RunConfig::make_mesh() const {
  if (!mesh_file.empty()) return read_mesh_file(mesh_file);
  return structured_box_mesh(cells[0], cells[1], cells[2], box);
}

int RunConfig::steps(double h) const {
  const double step = dt ? *dt : dt_factor * h;
  return std::max(1, static_cast<int>(std::lround(T / step)));
}

double RunConfig::time_step(double h) const { return T / steps(h); }

SchemeParams RunConfig::scheme_params(double h) const {
  SchemeParams p;
  p.dt = time_step(h);
  p.mu = mu;
  p.lambda = lambda;
  p.law = law();
  p.reg = reg;
  p.reg.h = h;
  p.fp_tol = fp_tol;
  p.fp_max = fp_max;
  p.theta = theta;
  p.anderson = anderson;
  p.lin = lin;
  p.exec = exec;
  return p;
}

RunConfig load_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", line, "");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    const auto it = keys().find(key);
    if (it == keys().end()) throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", line, key);
    if (value.empty()) throw ConfigError("line " + std::to_string(line) + ": empty value for '" + key + "'", line, key);
    if (const auto prev = seen.find(key); prev != seen.end())
      throw ConfigError("line " + std::to_string(line) + ": '" + key + "' already set on line " +
                            std::to_string(prev->second),
                        line, key);
    seen[key] = line;
    try {
      it->second.set(c, value);
    } catch (const BadValue& e) {
      throw ConfigError("line " + std::to_string(line) + ": " + key + ": " + e.why, line, key);
    }
  }
  validate(c);
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'", 0, "");
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> config_keys() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : keys()) out.emplace_back(k, v.help);
  return out;
}

}  // namespace crfv
