#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavity/errors.hpp"
#include "cavity/tensor.hpp"

namespace cavity {

using Vec3 = Eigen::Vector3d;
using Matrix = RowMatrix;

inline constexpr double kHartreeEv = 27.211386245988;
inline constexpr double kBohrAngstrom = 0.52917721067;

struct BasisMeta {
  std::size_t n_ao = 0;
  std::size_t n_electrons = 0;
  double nuclear_repulsion = 0.0;
  Vec3 nuclear_dipole = Vec3::Zero();
  std::string label;

  std::size_t n_so() const { return 2 * n_ao; }
  std::size_t n_occupied_so() const { return n_electrons; }
  std::size_t n_virtual_so() const { return n_so() - n_electrons; }
};

/// Hierarchy selector QED-CCSD(2,n).
struct Scheme {
  int m = 2;
  int n = 2;
  bool operator==(const Scheme&) const = default;
  std::string name() const { return "(" + std::to_string(m) + "," + std::to_string(n) + ")"; }
};

Scheme parse_scheme(const std::string& text);

struct CavityConfig {
  Vec3 lambda = Vec3::Zero();
  double omega = 0.0;  // Hartree
  Scheme scheme;
  int oracle_photon_cap = 3;

  void validate() const;
};

/// Second-moment component order: xx, xy, xz, yy, yz, zz.
inline constexpr std::array<std::array<int, 2>, 6> kQuadComponents = {
    {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

struct IntegralSet {
  Matrix overlap;
  Matrix core_h;
  DenseTensor eri;  // (mn|gl), chemists' order
  std::array<Matrix, 3> dipole;
  std::array<Matrix, 6> quadrupole;
  BasisMeta meta;

  /// Empty set with zero-filled arrays for n_ao functions.
  static IntegralSet zeros(std::size_t n_ao);

  /// Full 3x3 second-moment matrix component (a,b).
  const Matrix& quad(int a, int b) const;
};

struct ValidationReport {
  std::size_t dropped_vectors = 0;
  double min_overlap_eigenvalue = 0.0;
};

/// Asserts shapes, symmetries and closed-shell occupancy; counts overlap
/// eigenvalues below the linear-dependence threshold.
ValidationReport validate_integral_set(const IntegralSet& s, double lindep_threshold = 1e-5);

double ev_to_hartree(double ev);
double hartree_to_ev(double ha);

/// Spin-blocked spin orbitals: p < n_spatial is alpha, the rest beta.
inline int spin_of(std::size_t p, std::size_t n_spatial) { return p < n_spatial ? 0 : 1; }
inline std::size_t spatial_of(std::size_t p, std::size_t n_spatial) {
  return p < n_spatial ? p : p - n_spatial;
}

struct SpinOrbitalHamiltonian {
  std::size_t n_spatial = 0;
  std::vector<std::size_t> occ;   // spin-orbital indices occupied in the reference
  std::vector<std::size_t> virt;
  Matrix fock;
  Matrix h_dressed;
  DenseTensor u_antisym;  // <pq||rs>
  Matrix coupling;        // bilinear coupling matrix g_pq
  double omega = 0.0;
  double scalar_shift = 0.0;
  Vec3 d_expectation = Vec3::Zero();

  std::size_t n_so() const { return 2 * n_spatial; }
  /// Reference energy from the stored one- and two-body pieces.
  double reference_energy() const;
  /// Sum of coupling diagonal over occupied spin orbitals.
  double coupling_occupied_trace() const;
};

/// Cluster amplitudes for one QED-CCSD(2,n) scheme.
struct AmplitudeSet {
  Scheme scheme;
  std::map<int, double> t0;       // n = 1..scheme.n
  std::map<int, DenseTensor> t1;  // n = 0..scheme.n, [occ][virt]
  std::map<int, DenseTensor> t2;  // n = 0..scheme.n, [occ][occ][virt][virt]

  static AmplitudeSet zeros(Scheme scheme, std::size_t n_occ, std::size_t n_virt);
  std::size_t size() const;
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& v);
  /// Largest Frobenius norm among the blocks.
  double max_block_norm() const;
};

struct CavityEcho {
  Vec3 lambda = Vec3::Zero();
  double omega_ev = 0.0;
  double omega = 0.0;
  Scheme scheme;
  std::string dump_path;
  std::string dump_sha256;
  std::string label;
};

struct EnergyReport {
  double scf_energy = 0.0;
  double correlation_energy = 0.0;
  double total_energy = 0.0;
  Scheme scheme;
  int iterations_scf = 0;
  int iterations_cc = 0;
  double final_residual_norm = 0.0;
  std::vector<double> residual_history;
  CavityEcho config_echo;
};

}  // namespace cavity
