#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cavity/model.hpp"
#include "cavity/qed_cc.hpp"

namespace cavity {

/// Determinants are bit strings over spin orbitals (bit p = orbital p
/// occupied) and stand for a^dagger_{p1} a^dagger_{p2} ... |vac> with
/// p1 < p2 < ...; excitations |ij..ab..> = a^dagger_a a^dagger_b a_j a_i |ref>.
using Determinant = std::uint64_t;

struct FockBasis {
  std::size_t n_so = 0;
  std::vector<Determinant> determinants;  // ascending
  int photon_cap = 0;
  bool sz_restricted = false;

  std::size_t photon_levels() const { return static_cast<std::size_t>(photon_cap) + 1; }
  std::size_t dimension() const { return determinants.size() * photon_levels(); }
  /// Row of (determinant, photon number); -1 if the determinant is absent.
  long index(Determinant d, int photons) const;

  /// All N-electron determinants (optionally only those with N/2 alpha
  /// electrons under spin blocking with n_so/2 spatial orbitals).
  static FockBasis build(std::size_t n_so, std::size_t n_electrons, int photon_cap, bool sz_zero = false,
                         std::size_t max_dimension = 200000);

 private:
  std::unordered_map<Determinant, std::size_t> lookup_;
};

Determinant reference_determinant(const SpinOrbitalHamiltonian& h);

/// Applies a^dagger_{cre[0]} ... a_{ann[...]} (rightmost acts first);
/// returns false if the result vanishes.
bool apply_string(Determinant d, const std::vector<std::size_t>& creators, const std::vector<std::size_t>& annihilators,
                  Determinant& out, int& sign);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Pauli-Fierz Hamiltonian in the determinant x photon-number basis.
SparseMatrix build_hamiltonian_matrix(const SpinOrbitalHamiltonian& h, const FockBasis& basis);

struct Eigenpair {
  double energy = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;
};

Eigenpair fci_ground_state(const Eigen::MatrixXd& matrix);
/// Dense solver up to dimension 2000, Davidson above.
Eigenpair fci_ground_state(const SparseMatrix& matrix, double tol = 1e-10, int max_iter = 500);

struct QedFciResult {
  double energy = 0.0;
  int photon_cap = 0;
  std::vector<double> history;  // energy per cap, starting at cap 1
};

/// Raises the photon cap until successive ground energies differ by less than tol.
QedFciResult qed_fci(const SpinOrbitalHamiltonian& h, double tol = 1e-9, int max_cap = 40, bool sz_zero = true);

/// Dense matrix of the cluster operator T in the Fock basis.
Eigen::MatrixXd cluster_matrix(const SpinOrbitalHamiltonian& h, const AmplitudeSet& t, const FockBasis& basis);

/// Exact residuals from explicit matrix exponentials of T.
CcResiduals residual_oracle(const SpinOrbitalHamiltonian& h, const AmplitudeSet& t, const FockBasis& basis);

}  // namespace cavity
