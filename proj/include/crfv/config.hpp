#pragma once

#include "crfv/manufactured.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crfv {

/// Parse or validation failure. line is 1-based, or 0 for constraint violations.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line, std::string key)
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

struct RunConfig {
  // mesh: a file, or a structured box with n cells per side
  std::string mesh_file;
  std::array<int, 3> cells{4, 4, 4};
  Box box;

  // data
  std::string case_name = "vortex";
  double rho_bar = 1.0;
  Vec3 u_bar = Vec3(0.5, 0.0, 0.0);
  double delta = 0.25;
  double q0 = 200.0;

  // time: steps = round(T / dt) with dt given directly or as dt_factor * h
  double T = 0.5;
  std::optional<double> dt;
  double dt_factor = 1.0;

  double mu = 1.0;
  double lambda = 0.0;
  double gamma = 2.0;
  double pressure_a = 1.0;

  RegularizationParams reg;  // h is filled from the mesh
  double fp_tol = 1e-9;
  int fp_max = 100;
  double theta = 1.0;
  int anderson = 5;
  LinearSolverOptions lin;
  Exec exec = Exec::Parallel;
  int quad_degree = 4;

  std::string output_dir = "out";
  int vtk_every = 0;  // 0 disables field output
  bool check_mass = true;
  bool check_energy = true;
  bool check_errors = true;
  bool check_consistency = true;
  double eoc_min_c = 0.25;
  double eoc_min_m = 0.15;
  std::vector<int> levels{4, 6, 8, 12};
  std::uint64_t seed = 1;

  std::vector<std::string> warnings;

  PressureLaw law() const { return PressureLaw::isentropic(pressure_a, gamma); }
  ManufacturedCase make_case() const;
  TetMesh make_mesh() const;
  /// Scheme parameters for a mesh of size h with the time step resolved.
  SchemeParams scheme_params(double h) const;
  int steps(double h) const;
  double time_step(double h) const;
};

/// key = value lines, '#' comments, blank lines ignored. Unknown keys and malformed values are
/// errors carrying the line number; constraint violations name the key.
RunConfig load_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// Every recognized key with a one-line description, for --help output and the README.
std::vector<std::pair<std::string, std::string>> config_keys();

}  // namespace crfv
