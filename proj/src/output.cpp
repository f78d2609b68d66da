#include "crfv/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crfv {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

void close_out(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_vtk(const std::string& path, const State& s, const PressureLaw& law, const RegularizationParams& reg) {
  const TetMesh& mesh = s.rho.mesh();
  auto f = open_out(path);
  f << "# vtk DataFile Version 3.0\n";
  f << "crfv state k=" << s.k << " t=" << fmt(s.t) << "\n";
  f << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  f << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec3& x : mesh.vertices()) f << fmt(x[0]) << ' ' << fmt(x[1]) << ' ' << fmt(x[2]) << '\n';
  const std::size_t ne = mesh.num_elements();
  f << "CELLS " << ne << ' ' << 5 * ne << '\n';
  for (const auto& t : mesh.tets()) f << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  f << "CELL_TYPES " << ne << '\n';
  for (std::size_t k = 0; k < ne; ++k) f << "10\n";
  f << "CELL_DATA " << ne << '\n';
  f << "SCALARS rho double 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < ne; ++k) f << fmt(s.rho[k]) << '\n';
  f << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < ne; ++k) f << fmt(p_h(law, reg, s.rho[k])) << '\n';
  const QVecField u = element_mean(s.u);
  f << "VECTORS velocity double\n";
  for (std::size_t k = 0; k < ne; ++k) f << fmt(u[k][0]) << ' ' << fmt(u[k][1]) << ' ' << fmt(u[k][2]) << '\n';
  close_out(f, path);
}

VtkCellData read_vtk(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read '" + path + "'");
  VtkCellData d;
  std::string tok;
  const auto fail = [&](const std::string& why) { throw std::runtime_error("'" + path + "': " + why); };
  while (f >> tok) {
    if (tok == "POINTS") {
      std::string type;
      f >> d.points >> type;
      double x;
      for (std::size_t i = 0; i < 3 * d.points; ++i) f >> x;
    } else if (tok == "CELLS") {
      std::size_t total;
      f >> d.cells >> total;
      long x;
      for (std::size_t i = 0; i < total; ++i) f >> x;
    } else if (tok == "CELL_TYPES") {
      std::size_t n;
      f >> n;
      int x;
      for (std::size_t i = 0; i < n; ++i) f >> x;
    } else if (tok == "SCALARS") {
      std::string name, type, lt, table;
      int comps;
      f >> name >> type >> comps >> lt >> table;
      std::vector<double> v(d.cells);
      for (auto& x : v) f >> x;
      d.scalars[name] = std::move(v);
    } else if (tok == "VECTORS") {
      std::string name, type;
      f >> name >> type;
      std::vector<Vec3> v(d.cells);
      for (auto& x : v) f >> x[0] >> x[1] >> x[2];
      d.vectors[name] = std::move(v);
    }
    if (f.fail()) fail("malformed VTK near '" + tok + "'");
  }
  return d;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  auto f = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
    f << '\n';
  }
  close_out(f, path);
}

void write_mass_csv(const std::string& path, const LedgerSet& l) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : l.mass)
    rows.push_back({std::to_string(r.k), fmt(r.t), fmt(r.step.mass), fmt(r.step.outflow), fmt(r.step.inflow),
                    fmt(r.step.step_residual), fmt(r.residual)});
  write_csv(path, {"step", "time", "mass", "outflow", "inflow", "step_residual", "cumulative_residual"}, rows);
}

void write_energy_csv(const std::string& path, const LedgerSet& l) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < l.energy.size(); ++k) {
    const auto& e = l.energy[k];
    rows.push_back({std::to_string(k), fmt(l.times[k]), fmt(e.kinetic), fmt(e.internal), fmt(e.energy),
                    fmt(e.viscous), fmt(e.time_dissipation), fmt(e.upwind_dissipation), fmt(e.upwind_entropy),
                    fmt(e.diffusion_entropy), fmt(e.outflow_internal), fmt(e.outflow_kinetic), fmt(e.inflow_entropy),
                    fmt(e.inflow_internal), fmt(e.inflow_kinetic), fmt(e.boundary_viscous), fmt(e.boundary_pressure),
                    fmt(e.boundary_convective), fmt(e.forcing_work), fmt(e.slack), fmt(e.identity_residual),
                    std::to_string(l.iterations[k]), fmt(l.min_rho[k])});
  }
  write_csv(path,
            {"step", "time", "kinetic", "internal", "energy", "viscous", "time_dissipation", "upwind_dissipation",
             "upwind_entropy", "diffusion_entropy", "outflow_internal", "outflow_kinetic", "inflow_entropy",
             "inflow_internal", "inflow_kinetic", "boundary_viscous", "boundary_pressure", "boundary_convective",
             "forcing_work", "slack", "identity_residual", "fp_iterations", "min_rho"},
            rows);
}

void write_consistency_csv(const std::string& path, const LedgerSet& l) {
  std::vector<std::string> header{"step", "time"};
  for (const auto& n : l.c_names) header.push_back("C_" + n);
  for (const auto& n : l.m_names) header.push_back("M_" + n);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < l.consistency_c.size(); ++k) {
    std::vector<std::string> r{std::to_string(k), fmt(l.times[k])};
    for (double x : l.consistency_c[k]) r.push_back(fmt(x));
    for (double x : l.consistency_m[k]) r.push_back(fmt(x));
    rows.push_back(std::move(r));
  }
  write_csv(path, header, rows);
}

void write_errors_csv(const std::string& path, const LedgerSet& l) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : l.errors)
    rows.push_back({std::to_string(e.k), fmt(e.t), fmt(e.rel_energy), fmt(e.rel_energy_h), fmt(e.velocity_l2),
                    fmt(e.velocity_h1), fmt(e.cumulative_l2), fmt(e.cumulative_h1)});
  write_csv(path,
            {"step", "time", "rel_energy", "rel_energy_h", "velocity_l2", "velocity_h1", "cumulative_l2",
             "cumulative_h1"},
            rows);
}

namespace {

struct Series {
  std::string name;
  std::vector<double> values;
  std::optional<double> order;
};

std::vector<Series> series(const ConvergenceReport& rep) {
  std::vector<Series> s;
  const auto pick = [&](auto get) {
    std::vector<double> v;
    for (const auto& l : rep.levels) v.push_back(get(l));
    return v;
  };
  s.push_back({"rel_energy", pick([](const LevelResult& l) { return l.rel_energy; }), rep.eoc_rel_energy});
  s.push_back({"grad_error", pick([](const LevelResult& l) { return l.grad_error; }), rep.eoc_grad_error});
  for (std::size_t i = 0; i < rep.eoc_c.size(); ++i)
    s.push_back({"C_" + rep.c_names[i], pick([i](const LevelResult& l) { return l.consistency_c[i]; }), rep.eoc_c[i]});
  for (std::size_t i = 0; i < rep.eoc_m.size(); ++i)
    s.push_back({"M_" + rep.m_names[i], pick([i](const LevelResult& l) { return l.consistency_m[i]; }), rep.eoc_m[i]});
  return s;
}

}  // namespace

void write_eoc_csv(const std::string& path, const ConvergenceReport& rep) {
  std::vector<std::string> header{"quantity"};
  for (const auto& l : rep.levels) header.push_back("h=" + fmt(l.h));
  header.push_back("eoc");
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : series(rep)) {
    std::vector<std::string> r{s.name};
    for (double v : s.values) r.push_back(fmt(v));
    r.push_back(rep.exact ? "exact" : s.order ? fmt(*s.order) : "nan");
    rows.push_back(std::move(r));
  }
  write_csv(path, header, rows);
}

std::string eoc_table(const ConvergenceReport& rep) {
  std::ostringstream os;
  char buf[64];
  os << "case " << rep.case_name << "\n";
  std::snprintf(buf, sizeof buf, "%-16s", "n");
  os << buf;
  for (const auto& l : rep.levels) {
    std::snprintf(buf, sizeof buf, "%12d", l.n);
    os << buf;
  }
  os << "         eoc\n";
  std::snprintf(buf, sizeof buf, "%-16s", "h");
  os << buf;
  for (const auto& l : rep.levels) {
    std::snprintf(buf, sizeof buf, "%12.4g", l.h);
    os << buf;
  }
  os << "\n";
  for (const auto& s : series(rep)) {
    std::snprintf(buf, sizeof buf, "%-16s", s.name.c_str());
    os << buf;
    for (double v : s.values) {
      std::snprintf(buf, sizeof buf, "%12.4e", v);
      os << buf;
    }
    if (rep.exact) std::snprintf(buf, sizeof buf, "%12s", "exact");
    else if (s.order) std::snprintf(buf, sizeof buf, "%12.3f", *s.order);
    else std::snprintf(buf, sizeof buf, "%12s", "-");
    os << buf << "\n";
  }
  return os.str();
}

}  // namespace crfv
