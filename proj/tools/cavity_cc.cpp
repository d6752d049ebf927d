#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "cavity/driver.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw cavity::InputError("not a number: '" + item + "'");
    }
    if (used != item.size()) throw cavity::InputError("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void apply_thread_env() {
  const char* env = std::getenv("CAVITY_NUM_THREADS");
  if (!env) return;
  const int n = std::atoi(env);
  if (n <= 0) return;
  Eigen::setNbThreads(n);
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity QED Hartree-Fock and QED-CCSD(2,n) energies from a QEDDUMP integral file"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "SCF + coupled-cluster run (optionally a parameter scan)");

  std::string dump, lambda_text = "0,0,0", scheme_text = "2,2", scan_var, values_text, out_path;
  double omega_ev = 0.0;
  bool hierarchy = false, no_diis = false;
  cavity::RunConfig cfg;
  run->add_option("--dump", dump, "QEDDUMP integral file")->required();
  run->add_option("--lambda", lambda_text, "coupling vector x,y,z (a.u.)");
  run->add_option("--omega-ev", omega_ev, "cavity frequency (eV)");
  run->add_option("--scheme", scheme_text, "QED-CCSD scheme 2,0 | 2,1 | 2,2");
  run->add_flag("--hierarchy", hierarchy, "solve every scheme up to --scheme, reusing the SCF");
  run->add_option("--scan", scan_var, "omega | lambda-x | lambda-y | lambda-z | origin-z");
  run->add_option("--values", values_text, "comma-separated scan values (eV, a.u. or Angstrom)");
  run->add_option("--scf-density", cfg.scf.density_threshold, "SCF density threshold");
  run->add_option("--scf-residual", cfg.scf.residual_threshold, "SCF orbital-gradient threshold");
  run->add_option("--cc-residual", cfg.cc.residual_threshold, "CC residual-norm threshold");
  run->add_option("--max-iter-scf", cfg.scf.max_iter, "SCF iteration cap");
  run->add_option("--max-iter-cc", cfg.cc.max_iter, "CC iteration cap");
  run->add_option("--charge", cfg.scf.charge, "molecular charge (origin-shift scans, warnings)");
  run->add_flag("--no-diis", no_diis, "plain Jacobi updates in the CC solver");
  run->add_option("--out", out_path, "report file (.json or .csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  apply_thread_env();

  cavity::RunReport report;
  try {
    cfg.dump_path = dump;
    const auto l = parse_list(lambda_text);
    if (l.size() != 3) throw cavity::InputError("--lambda needs three components");
    cfg.lambda = cavity::Vec3(l[0], l[1], l[2]);
    cfg.omega_ev = omega_ev;
    cfg.scheme = cavity::parse_scheme(scheme_text);
    cfg.hierarchy = hierarchy;
    cfg.cc.use_diis = !no_diis;
    if (!scan_var.empty()) {
      cavity::ScanSpec s;
      s.variable = cavity::parse_scan_variable(scan_var);
      s.values = parse_list(values_text);
      cfg.scan = s;
    } else if (!values_text.empty()) {
      throw cavity::InputError("--values given without --scan");
    }
    if (!out_path.empty()) {
      cfg.output = out_path;
      const auto ext = std::filesystem::path(out_path).extension();
      if (ext == ".csv") cfg.format = cavity::ReportFormat::Csv;
      else if (ext == ".json") cfg.format = cavity::ReportFormat::Json;
      else throw cavity::InputError("--out must end in .json or .csv");
    }
    cfg.validate();
    report = cfg.scan ? cavity::run_scan(cfg) : cavity::run_single(cfg);
  } catch (const cavity::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cavity::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const cavity::StructuralError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const cavity::DataCorruptionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  for (const auto& p : report.points)
    for (const auto& w : p.warnings) std::cerr << "warning: " << w << "\n";

  std::cout << "# " << report.label << "  sha256 " << report.dump_sha256 << "\n";
  std::cout << cavity::report_csv(report);
  if (cfg.output) {
    try {
      cavity::emit_report(report, cfg.format, *cfg.output);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  if (!report.complete) {
    std::cerr << "error: " << report.error << "\n";
    return 2;
  }
  return 0;
}
