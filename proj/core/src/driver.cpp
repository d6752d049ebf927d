#include "cavity/driver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "cavity/integral_io.hpp"

namespace cavity {

namespace {

using ojson = nlohmann::ordered_json;

double round10(double x) { return std::round(x * 1e10) / 1e10; }

std::string csv_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", x);
  return buf;
}

ojson vec3(const Vec3& v, bool energy_like = false) {
  auto f = [&](double x) { return energy_like ? round10(x) : x; };
  return ojson::array({f(v(0)), f(v(1)), f(v(2))});
}

CavityConfig cavity_for(const RunConfig& c) {
  CavityConfig cav;
  cav.lambda = c.lambda;
  cav.omega = ev_to_hartree(c.omega_ev);
  cav.scheme = c.scheme;
  return cav;
}

}  // namespace

ScanVariable parse_scan_variable(const std::string& name) {
  if (name == "omega") return ScanVariable::Omega;
  if (name == "lambda-x") return ScanVariable::LambdaX;
  if (name == "lambda-y") return ScanVariable::LambdaY;
  if (name == "lambda-z") return ScanVariable::LambdaZ;
  if (name == "origin-z") return ScanVariable::OriginZ;
  throw InputError("unknown scan variable '" + name + "'");
}

std::string scan_variable_name(ScanVariable v) {
  switch (v) {
    case ScanVariable::Omega: return "omega";
    case ScanVariable::LambdaX: return "lambda-x";
    case ScanVariable::LambdaY: return "lambda-y";
    case ScanVariable::LambdaZ: return "lambda-z";
    case ScanVariable::OriginZ: return "origin-z";
  }
  return "?";
}

void RunConfig::validate() const {
  CavityConfig cav = cavity_for(*this);
  cav.validate();
  if (!std::isfinite(omega_ev) || omega_ev < 0) throw InputError("omega must be finite and >= 0 eV");
  if (scf.density_threshold <= 0 || scf.residual_threshold <= 0 || cc.residual_threshold <= 0)
    throw InputError("thresholds must be positive");
  if (scan) {
    if (scan->values.empty()) throw InputError("scan needs at least one value");
    for (std::size_t i = 0; i < scan->values.size(); ++i) {
      if (!std::isfinite(scan->values[i])) throw InputError("scan values must be finite");
      for (std::size_t j = 0; j < i; ++j)
        if (scan->values[i] == scan->values[j]) throw InputError("scan values must be distinct");
      if (scan->variable == ScanVariable::Omega && scan->values[i] < 0) throw InputError("omega scan values must be >= 0");
    }
  }
}

std::vector<Scheme> RunConfig::schemes() const {
  if (!hierarchy) return {scheme};
  std::vector<Scheme> out;
  for (int n = 0; n <= scheme.n; ++n) out.push_back({2, n});
  return out;
}

const EnergyReport* PointResult::find(Scheme s) const {
  for (const auto& r : cc)
    if (r.scheme == s) return &r;
  return nullptr;
}

double PointResult::total_energy() const { return cc.empty() ? scf.energy : cc.back().total_energy; }

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

IntegralSet shift_origin(const IntegralSet& ints, const Vec3& shift, int charge) {
  IntegralSet out = ints;
  const double z_total = static_cast<double>(ints.meta.n_electrons) + charge;
  for (int a = 0; a < 3; ++a) out.dipole[static_cast<std::size_t>(a)] -= shift(a) * ints.overlap;
  for (std::size_t k = 0; k < kQuadComponents.size(); ++k) {
    const int a = kQuadComponents[k][0], b = kQuadComponents[k][1];
    out.quadrupole[k] += shift(a) * ints.dipole[static_cast<std::size_t>(b)] +
                         shift(b) * ints.dipole[static_cast<std::size_t>(a)] - shift(a) * shift(b) * ints.overlap;
  }
  out.meta.nuclear_dipole += z_total * shift;
  return out;
}

PointResult run_point(const IntegralSet& ints, const CavityConfig& cavity, const ScfOptions& scf,
                      const CcOptions& cc, const std::vector<Scheme>& schemes) {
  PointResult p;
  try {
    p.scf = scf_solve(ints, cavity, scf);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string("[qed_hf] ") + e.what(), e.history);
  }
  p.warnings = p.scf.warnings;
  SpinOrbitalHamiltonian h;
  h = export_spinorbital_hamiltonian(p.scf, ints, cavity);
  for (Scheme s : schemes) {
    CcResult r;
    try {
      r = solve_cc(h, s, cc);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string("[qed_cc] ") + e.what(), e.history);
    }
    r.report.scf_energy = p.scf.energy;
    r.report.total_energy = p.scf.energy + r.report.correlation_energy;
    r.report.iterations_scf = p.scf.iteration;
    if (r.photon_frozen)
      p.warnings.push_back("QED-CCSD" + s.name() + ": zero photon frequency, photon blocks frozen at zero");
    p.cc.push_back(std::move(r.report));
    p.photon_frozen.push_back(r.photon_frozen);
  }
  return p;
}

namespace {

RunReport start_report(const RunConfig& config, const IntegralSet& ints) {
  RunReport r;
  r.config = config;
  r.label = ints.meta.label;
  r.n_ao = ints.meta.n_ao;
  r.n_electrons = ints.meta.n_electrons;
  if (!config.dump_path.empty() && std::filesystem::exists(config.dump_path))
    r.dump_sha256 = sha256_file(config.dump_path);
  return r;
}

void stamp(PointResult& p, const RunReport& r, const CavityConfig& cav) {
  for (auto& e : p.cc) {
    e.config_echo.lambda = cav.lambda;
    e.config_echo.omega = cav.omega;
    e.config_echo.omega_ev = hartree_to_ev(cav.omega);
    e.config_echo.scheme = e.scheme;
    e.config_echo.dump_path = r.config.dump_path.string();
    e.config_echo.dump_sha256 = r.dump_sha256;
    e.config_echo.label = r.label;
  }
}

PointResult run_stage(const IntegralSet& ints, const CavityConfig& cav, const RunConfig& config) {
  return run_point(ints, cav, config.scf, config.cc, config.schemes());
}

}  // namespace

RunReport run_single(const RunConfig& config, const IntegralSet& ints) {
  config.validate();
  RunReport r = start_report(config, ints);
  const CavityConfig cav = cavity_for(config);
  PointResult p = run_stage(ints, cav, config);
  stamp(p, r, cav);
  r.points.push_back(std::move(p));
  return r;
}

RunReport run_single(const RunConfig& config) {
  return run_single(config, parse_dump_file(config.dump_path));
}

RunReport run_scan(const RunConfig& config, const IntegralSet& ints) {
  config.validate();
  if (!config.scan) return run_single(config, ints);
  RunReport r = start_report(config, ints);
  for (double value : config.scan->values) {
    CavityConfig cav = cavity_for(config);
    const IntegralSet* use = &ints;
    IntegralSet shifted;
    switch (config.scan->variable) {
      case ScanVariable::Omega: cav.omega = ev_to_hartree(value); break;
      case ScanVariable::LambdaX: cav.lambda(0) = value; break;
      case ScanVariable::LambdaY: cav.lambda(1) = value; break;
      case ScanVariable::LambdaZ: cav.lambda(2) = value; break;
      case ScanVariable::OriginZ:
        shifted = shift_origin(ints, Vec3(0, 0, value / kBohrAngstrom), config.scf.charge);
        use = &shifted;
        break;
    }
    try {
      PointResult p = run_stage(*use, cav, config);
      p.scan_value = value;
      stamp(p, r, cav);
      r.points.push_back(std::move(p));
    } catch (const std::exception& e) {
      r.complete = false;
      r.error = "scan point " + scan_variable_name(config.scan->variable) + "=" + csv_number(value) + ": " + e.what();
      break;
    }
  }
  return r;
}

RunReport run_scan(const RunConfig& config) { return run_scan(config, parse_dump_file(config.dump_path)); }

std::string report_json(const RunReport& r) {
  const RunConfig& c = r.config;
  ojson j;
  j["program"] = "cavity-cc";
  j["dump"] = {{"path", c.dump_path.string()},
               {"sha256", r.dump_sha256},
               {"label", r.label},
               {"n_ao", r.n_ao},
               {"n_electrons", r.n_electrons}};
  ojson cfg;
  cfg["lambda"] = vec3(c.lambda);
  cfg["omega_ev"] = c.omega_ev;
  cfg["omega_hartree"] = ev_to_hartree(c.omega_ev);
  cfg["scheme"] = std::to_string(c.scheme.m) + "," + std::to_string(c.scheme.n);
  cfg["hierarchy"] = c.hierarchy;
  cfg["thresholds"] = {{"scf_density", c.scf.density_threshold},
                       {"scf_residual", c.scf.residual_threshold},
                       {"cc_residual", c.cc.residual_threshold},
                       {"diis", c.cc.diis_size},
                       {"max_iter_scf", c.scf.max_iter},
                       {"max_iter_cc", c.cc.max_iter},
                       {"lindep", c.scf.lindep_threshold}};
  cfg["charge"] = c.scf.charge;
  if (c.scan) {
    ojson vals = ojson::array();
    for (double v : c.scan->values) vals.push_back(v);
    cfg["scan"] = {{"variable", scan_variable_name(c.scan->variable)}, {"values", vals}};
  }
  j["config"] = cfg;

  ojson pts = ojson::array();
  ojson warnings = ojson::array();
  for (const PointResult& p : r.points) {
    ojson pj;
    if (c.scan) pj["value"] = p.scan_value;
    pj["scf"] = {{"energy", round10(p.scf.energy)},
                 {"iterations", p.scf.iteration},
                 {"d_expect", vec3(p.scf.d_expect, true)},
                 {"dropped_vectors", p.scf.dropped_vectors}};
    ojson ccj = ojson::array();
    for (std::size_t k = 0; k < p.cc.size(); ++k) {
      const EnergyReport& e = p.cc[k];
      ccj.push_back({{"scheme", e.scheme.name()},
                     {"correlation_energy", round10(e.correlation_energy)},
                     {"total_energy", round10(e.total_energy)},
                     {"iterations", e.iterations_cc},
                     {"final_residual_norm", e.final_residual_norm},
                     {"photon_blocks_frozen", static_cast<bool>(p.photon_frozen[k])}});
    }
    pj["cc"] = ccj;
    pj["total_energy"] = round10(p.total_energy());
    pts.push_back(pj);
    for (const auto& w : p.warnings) warnings.push_back(w);
  }
  j["points"] = pts;
  j["complete"] = r.complete;
  if (!r.error.empty()) j["error"] = r.error;
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

std::string report_csv(const RunReport& r) {
  std::ostringstream os;
  os << "variable,E_scf,corr_20,corr_21,corr_22,E_total\n";
  for (const PointResult& p : r.points) {
    os << (r.config.scan ? csv_number(p.scan_value) : std::string()) << ',' << csv_number(p.scf.energy);
    for (int n = 0; n <= 2; ++n) {
      os << ',';
      if (const EnergyReport* e = p.find({2, n})) os << csv_number(e->correlation_energy);
    }
    os << ',' << csv_number(p.total_energy()) << '\n';
  }
  return os.str();
}

void emit_report(const RunReport& report, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report to " + path.string());
  out << (format == ReportFormat::Json ? report_json(report) : report_csv(report));
  if (!out) throw std::runtime_error("failed writing report to " + path.string());
}

std::string format_energy(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace cavity
