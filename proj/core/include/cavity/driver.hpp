#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cavity/model.hpp"
#include "cavity/qed_cc.hpp"
#include "cavity/qed_hf.hpp"

namespace cavity {

enum class ScanVariable { Omega, LambdaX, LambdaY, LambdaZ, OriginZ };

ScanVariable parse_scan_variable(const std::string& name);
std::string scan_variable_name(ScanVariable v);

struct ScanSpec {
  ScanVariable variable = ScanVariable::Omega;
  std::vector<double> values;  // eV for omega, a.u. for lambda, Angstrom for origin shifts
};

enum class ReportFormat { Json, Csv };

struct RunConfig {
  std::filesystem::path dump_path;
  Vec3 lambda = Vec3::Zero();
  double omega_ev = 0.0;
  Scheme scheme{2, 2};
  bool hierarchy = false;
  ScfOptions scf;
  CcOptions cc;
  std::optional<ScanSpec> scan;
  std::optional<std::filesystem::path> output;
  ReportFormat format = ReportFormat::Json;

  void validate() const;
  /// Schemes solved for this configuration, lowest photon rank first.
  std::vector<Scheme> schemes() const;
};

/// Outcome of SCF plus the requested CC schemes at one parameter point.
struct PointResult {
  double scan_value = 0.0;
  ScfState scf;
  std::vector<EnergyReport> cc;
  std::vector<bool> photon_frozen;
  std::vector<std::string> warnings;

  const EnergyReport* find(Scheme s) const;
  /// Total energy of the highest requested scheme.
  double total_energy() const;
};

struct RunReport {
  RunConfig config;
  std::string dump_sha256;
  std::string label;
  std::size_t n_ao = 0;
  std::size_t n_electrons = 0;
  std::vector<PointResult> points;  // one entry unless scanning
  bool complete = true;             // false if a scan aborted part way
  std::string error;
};

std::string sha256_file(const std::filesystem::path& path);

/// Integrals of the same molecule translated by `shift` (bohr); the nuclear
/// charge is N_e + charge.
IntegralSet shift_origin(const IntegralSet& ints, const Vec3& shift, int charge = 0);

/// SCF followed by each scheme in `schemes`, sharing the SCF.
PointResult run_point(const IntegralSet& ints, const CavityConfig& cavity, const ScfOptions& scf,
                      const CcOptions& cc, const std::vector<Scheme>& schemes);

RunReport run_single(const RunConfig& config);
RunReport run_single(const RunConfig& config, const IntegralSet& ints);
RunReport run_scan(const RunConfig& config);
RunReport run_scan(const RunConfig& config, const IntegralSet& ints);

/// Energies rounded to 10 decimals; stable key order.
std::string report_json(const RunReport& report);
/// Header: variable,E_scf,corr_20,corr_21,corr_22,E_total
std::string report_csv(const RunReport& report);
void emit_report(const RunReport& report, ReportFormat format, const std::filesystem::path& path);

/// Fixed-point display, e.g. 7 decimals as in published tables.
std::string format_energy(double value, int decimals = 7);

}  // namespace cavity
