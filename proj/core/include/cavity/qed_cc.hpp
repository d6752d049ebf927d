#pragma once

#include <string>
#include <vector>

#include "cavity/model.hpp"

namespace cavity {

struct CcOptions {
  double residual_threshold = 1e-8;
  int max_iter = 200;
  std::size_t diis_size = 5;
  bool use_diis = true;
};

/// Occupied/virtual blocks of the spin-orbital Hamiltonian used by the
/// amplitude equations (indices follow h.occ / h.virt order).
struct CcIntegrals {
  std::size_t n_occ = 0, n_virt = 0;
  DenseTensor f_oo, f_ov, f_vv;
  DenseTensor g_oo, g_ov, g_vv;
  double g_occ_trace = 0.0;
  double omega = 0.0;
  double e_ref = 0.0;
  DenseTensor oooo, ooov, oovo, oovv, ovoo, ovov, ovvo, ovvv, vovv, vvvo, vvvv;

  static CcIntegrals from(const SpinOrbitalHamiltonian& h);
};

/// Residuals sigma_{mu,n} = <R| a_mu b^n e^{-T} H e^{T} |R> for every stored block.
struct CcResiduals {
  AmplitudeSet sigma;  // t0[0] is unused; the reference projection is `energy`
  double energy = 0.0;
  double correlation = 0.0;
  double max_norm = 0.0;
};

CcResiduals compute_residuals(const CcIntegrals& ints, const AmplitudeSet& t);

struct CcWorkspace {
  CcWorkspace(const SpinOrbitalHamiltonian& h, Scheme scheme, CcOptions options = {});

  CcIntegrals ints;
  AmplitudeSet amplitudes;
  CcResiduals residuals;
  AmplitudeSet denominators;  // n! (orbital gap + n omega) per element
  DiisState diis;
  CcOptions options;
  bool photon_frozen = false;  // omega = 0: photon blocks held at zero
  std::vector<std::string> warnings;
};

AmplitudeSet init_amplitudes(const SpinOrbitalHamiltonian& h, Scheme scheme,
                             std::vector<std::string>* warnings = nullptr);
AmplitudeSet init_amplitudes(const CcIntegrals& ints, Scheme scheme, std::vector<std::string>* warnings = nullptr);

/// Evaluates residuals and energy for the workspace amplitudes.
double compute_residuals(CcWorkspace& w);

/// Quasi-Newton step t -= sigma / D followed by DIIS extrapolation.
void update_amplitudes(CcWorkspace& w);

struct CcResult {
  AmplitudeSet amplitudes;
  EnergyReport report;
  bool photon_frozen = false;
};

CcResult solve_cc(const SpinOrbitalHamiltonian& h, Scheme scheme, const CcOptions& options = {});

struct ReductionCheck {
  double corr_20 = 0.0, corr_21 = 0.0, corr_22 = 0.0;
  double max_deviation = 0.0;
  bool photon_frozen = false;
  bool passed = false;
};

/// Solves all three schemes with the photon frequency set to zero and compares.
ReductionCheck scheme_reduction_check(const SpinOrbitalHamiltonian& h, const CcOptions& options = {});

/// The cavity-free limit of h: omega = 0 and zero bilinear coupling.
SpinOrbitalHamiltonian with_zero_frequency(const SpinOrbitalHamiltonian& h);

}  // namespace cavity
