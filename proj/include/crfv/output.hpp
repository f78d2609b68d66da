#pragma once

#include "crfv/manufactured.hpp"

#include <map>
#include <string>
#include <vector>

namespace crfv {

/// Legacy ASCII VTK unstructured grid with cell data rho, pressure p_h(rho) and the element
/// mean velocity. Values are written with round-trip precision. Throws std::runtime_error
/// naming the path on I/O failure.
void write_vtk(const std::string& path, const State& s, const PressureLaw& law, const RegularizationParams& reg);

struct VtkCellData {
  std::size_t points = 0;
  std::size_t cells = 0;
  std::map<std::string, std::vector<double>> scalars;
  std::map<std::string, std::vector<Vec3>> vectors;
};

VtkCellData read_vtk(const std::string& path);

/// Round-trip formatting used by every ledger.
std::string fmt(double x);

/// Writes rows to path, header first. Throws std::runtime_error naming the path on failure.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// One row per time level, starting at k = 0.
struct LedgerSet {
  std::vector<MassLedgerRow> mass;
  std::vector<EnergyLedger> energy;  // energy[0] holds the initial energy only
  std::vector<std::vector<double>> consistency_c, consistency_m;
  std::vector<std::string> c_names, m_names;
  std::vector<ErrorRow> errors;
  std::vector<double> times;
  std::vector<int> iterations;
  std::vector<double> min_rho;
};

void write_mass_csv(const std::string& path, const LedgerSet& l);
void write_energy_csv(const std::string& path, const LedgerSet& l);
void write_consistency_csv(const std::string& path, const LedgerSet& l);
void write_errors_csv(const std::string& path, const LedgerSet& l);

void write_eoc_csv(const std::string& path, const ConvergenceReport& rep);
/// Aligned text table of per-level values and fitted orders.
std::string eoc_table(const ConvergenceReport& rep);

}  // namespace crfv
