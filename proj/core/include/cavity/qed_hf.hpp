#pragma once

#include <string>
#include <vector>

#include "cavity/model.hpp"

namespace cavity {

struct ScfOptions {
  double density_threshold = 1e-9;
  double residual_threshold = 1e-8;
  int max_iter = 200;
  std::size_t diis_size = 5;
  double lindep_threshold = 1e-5;
  int charge = 0;  // molecular charge; nonzero only triggers the origin-dependence warning
};

struct ScfState {
  Matrix coeffs;  // n_ao x n_mo
  Eigen::VectorXd orbital_energies;
  Matrix density;  // closed-shell, occupation 2
  Matrix fock_ao;
  double energy = 0.0;
  Vec3 d_expect = Vec3::Zero();
  int iteration = 0;
  std::size_t dropped_vectors = 0;
  bool damped = false;
  std::vector<double> residual_history;
  std::vector<std::string> warnings;

  std::size_t n_mo() const { return static_cast<std::size_t>(coeffs.cols()); }
};

/// <d> = tr(D d_e) + d_nuc.
Vec3 dipole_expectation(const Matrix& density, const std::array<Matrix, 3>& dipole, const BasisMeta& meta);

/// lambda . (d_e + d_nuc/N_e S), the one-electron dipole operator entering the DSE.
Matrix dressed_dipole(const IntegralSet& ints, const Vec3& lambda);

/// One-electron part of (lambda . d)^2: -lambda lambda : Q plus the d_nuc/N_e cross terms.
Matrix dipole_square_one_body(const IntegralSet& ints, const Vec3& lambda);

/// h' = h + 1/2 (lambda.d)^2_one-body - (lambda.<d>)(lambda.d).
Matrix build_dressed_core(const IntegralSet& ints, const Vec3& lambda, const Vec3& d_expect);

struct FockBuild {
  Matrix fock;
  Matrix core;  // h'
  double electronic_energy = 0.0;  // 1/2 tr D (h' + F)
  double scalar_shift = 0.0;       // E_nuc + 1/2 (lambda.<d>)^2
  double energy() const { return electronic_energy + scalar_shift; }
};

/// F = h' + J - K/2 + J_d - K_d/2 for a closed-shell density.
FockBuild build_fock(const IntegralSet& ints, const Matrix& density, const Vec3& lambda, const Vec3& d_expect);

/// Coulomb and exchange matrices of the two-electron integrals for density D.
std::pair<Matrix, Matrix> coulomb_exchange(const DenseTensor& eri, const Matrix& density);

ScfState scf_solve(const IntegralSet& ints, const CavityConfig& cavity, const ScfOptions& opts = {});

SpinOrbitalHamiltonian export_spinorbital_hamiltonian(const ScfState& state, const IntegralSet& ints,
                                                      const CavityConfig& cavity);

}  // namespace cavity
