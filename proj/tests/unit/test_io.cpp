#include "doctest.h"

#include "crfv/app.hpp"
#include "crfv/config.hpp"
#include "crfv/output.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crfv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("crfv_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream f(p);
  std::size_t n = 0;
  for (std::string line; std::getline(f, line);) ++n;
  return n;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("minimal config uses the defaults") {
    const RunConfig c = load_config("case = constant\n");
    CHECK(c.case_name == "constant");
    CHECK(c.mu == 1.0);
    CHECK(c.warnings.empty());
    CHECK(c.make_mesh().num_elements() == 6 * 4 * 4 * 4);
  }

  TEST_CASE("comments, blank lines and lists") {
    const RunConfig c = load_config("# header\n\ncase = transport   # inline\ncase.u = 0.1 0.2 0.3\nlevels = 2 3\n");
    CHECK(c.u_bar == Vec3(0.1, 0.2, 0.3));
    CHECK(c.levels == std::vector<int>{2, 3});
  }

  TEST_CASE("eta outside the admissible range warns") {
    const RunConfig c = load_config("reg.kappa_tilde = 1\nreg.eta = 0.9\n");
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0].find("eta") != std::string::npos);
  }

  TEST_CASE("invalid values name the key") {
    try {
      load_config("mu = -1\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key() == "mu");
      CHECK(std::string(e.what()).find("mu") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config("solver.theta = 2\n"), ConfigError);
    CHECK_THROWS_AS(load_config("solver.anderson = -1\n"), ConfigError);
    CHECK_THROWS_AS(load_config("case = vortex\nmesh.hi = 2 1 1\n"), ConfigError);
  }

  TEST_CASE("parse errors carry the line number") {
    try {
      load_config("mu = 1\n\nfoo.bar = 3\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 3);
      CHECK(e.key() == "foo.bar");
    }
    try {
      load_config("mu = 1\nmu = 2\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(load_config("mu = abc\n"), ConfigError);
    CHECK_THROWS_AS(load_config("mu =\n"), ConfigError);
    CHECK_THROWS_AS(load_config("no equals sign\n"), ConfigError);
  }

  TEST_CASE("every key is documented") {
    const auto keys = config_keys();
    CHECK(keys.size() > 30);
    for (const auto& [k, d] : keys) CHECK_FALSE(d.empty());
  }

  TEST_CASE("VTK round trip") {
    const fs::path dir = scratch("vtk");
    fs::create_directories(dir);
    const TetMesh m = structured_box_mesh(2, 1, 1);
    State s;
    s.rho = QField(m);
    for (std::size_t k = 0; k < s.rho.size(); ++k) s.rho[k] = 1.0 + 1.0 / (3.0 + static_cast<double>(k));
    s.u = project_V(m, VectorFunction([](const Vec3& x) { return Vec3(x[0], std::sin(x[1]), 0.1); }));
    const PressureLaw law = PressureLaw::isentropic(1.0, 1.4);
    const RegularizationParams reg;
    const std::string path = (dir / "s.vtk").string();
    write_vtk(path, s, law, reg);
    const VtkCellData d = read_vtk(path);
    CHECK(d.cells == m.num_elements());
    CHECK(d.points == m.num_vertices());
    REQUIRE(d.scalars.count("rho") == 1);
    CHECK(d.scalars.at("rho") == s.rho.values());
    const QVecField mean = element_mean(s.u);
    for (std::size_t k = 0; k < m.num_elements(); ++k) {
      CHECK(d.scalars.at("pressure")[k] == p_h(law, reg, s.rho[k]));
      CHECK(d.vectors.at("velocity")[k] == mean[k]);
    }
    CHECK_THROWS_AS(write_vtk((dir / "missing" / "x.vtk").string(), s, law, reg), std::runtime_error);
    fs::remove_all(dir);
  }

  TEST_CASE("ledgers have one row per time level") {
    const fs::path dir = scratch("ledgers");
    RunConfig c = load_config("case = transport\nmesh.n = 2\ntime.T = 0.3\ntime.dt = 0.1\noutput.vtk_every = 1\n");
    c.output_dir = dir.string();
    std::ostringstream log;
    const Outcome o = run_solve(c, log);
    CHECK(o.exit_code() == 0);
    for (const char* f : {"mass.csv", "energy.csv", "errors.csv", "consistency.csv"})
      CHECK(count_lines(dir / f) == 3 + 2);
    for (int k = 0; k <= 3; ++k) CHECK(fs::exists(dir / ("state_0000" + std::to_string(k) + ".vtk")));
    fs::remove_all(dir);
  }

  TEST_CASE("exit codes") {
    Outcome o;
    CHECK(o.exit_code() == 0);
    o.certificates.push_back({"x", false, ""});
    CHECK(o.exit_code() == 1);
    o.solver_failed = true;
    CHECK(o.exit_code() == 2);
  }
}
