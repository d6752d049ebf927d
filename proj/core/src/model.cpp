#include "cavity/model.hpp"

#include <cmath>
#include <regex>

namespace cavity {

Scheme parse_scheme(const std::string& text) {
  static const std::regex re(R"(\s*\(?\s*(\d+)\s*,\s*(\d+)\s*\)?\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw InputError("scheme must look like 2,n: '" + text + "'");
  Scheme s{std::stoi(m[1]), std::stoi(m[2])};
  if (s.m != 2 || s.n < 0 || s.n > 2) throw InputError("unsupported scheme " + s.name());
  return s;
}

void CavityConfig::validate() const {
  if (!lambda.allFinite()) throw InputError("lambda must be finite");
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw InputError("omega must be finite and >= 0");
  if (scheme.m != 2 || scheme.n < 0 || scheme.n > 2) throw InputError("unsupported scheme " + scheme.name());
  if (oracle_photon_cap < scheme.n) throw InputError("oracle photon cap below scheme photon rank");
}

IntegralSet IntegralSet::zeros(std::size_t n_ao) {
  IntegralSet s;
  const auto n = static_cast<Eigen::Index>(n_ao);
  s.overlap = Matrix::Zero(n, n);
  s.core_h = Matrix::Zero(n, n);
  s.eri = DenseTensor({n_ao, n_ao, n_ao, n_ao});
  for (auto& d : s.dipole) d = Matrix::Zero(n, n);
  for (auto& q : s.quadrupole) q = Matrix::Zero(n, n);
  s.meta.n_ao = n_ao;
  return s;
}

const Matrix& IntegralSet::quad(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (std::size_t k = 0; k < kQuadComponents.size(); ++k)
    if (kQuadComponents[k][0] == a && kQuadComponents[k][1] == b) return quadrupole[k];
  throw StructuralError("quadrupole component out of range");
}

namespace {

void check_square(const Matrix& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw StructuralError(std::string(what) + ": expected " + std::to_string(n) + "x" +
                          std::to_string(n));
}

void check_symmetric(const Matrix& m, const char* what, double tol) {
  const double dev = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (dev > tol) throw DataCorruptionError(std::string(what) + " is not symmetric");
}

}  // namespace

ValidationReport validate_integral_set(const IntegralSet& s, double lindep_threshold) {
  const std::size_t n_ao = s.meta.n_ao;
  if (n_ao == 0) throw StructuralError("integral set has no basis functions");
  const auto n = static_cast<Eigen::Index>(n_ao);
  check_square(s.overlap, n, "overlap");
  check_square(s.core_h, n, "core Hamiltonian");
  for (const auto& d : s.dipole) check_square(d, n, "dipole");
  for (const auto& q : s.quadrupole) check_square(q, n, "quadrupole");
  if (s.eri.dims() != std::vector<std::size_t>{n_ao, n_ao, n_ao, n_ao})
    throw StructuralError("eri: expected n_ao^4 tensor");
  if (s.meta.n_electrons == 0 || s.meta.n_electrons % 2 != 0)
    throw StructuralError("only closed-shell systems with an even, nonzero electron count are supported");
  if (s.meta.n_electrons > 2 * n_ao) throw StructuralError("more electrons than spin orbitals");

  constexpr double tol = 1e-10;
  check_symmetric(s.overlap, "overlap", tol);
  check_symmetric(s.core_h, "core Hamiltonian", tol);
  for (const auto& d : s.dipole) check_symmetric(d, "dipole", tol);
  for (const auto& q : s.quadrupole) check_symmetric(q, "quadrupole", tol);
  for (std::size_t i = 0; i < n_ao; ++i)
    for (std::size_t j = 0; j < n_ao; ++j)
      for (std::size_t k = 0; k < n_ao; ++k)
        for (std::size_t l = 0; l < n_ao; ++l) {
          const double v = s.eri(i, j, k, l);
          if (std::abs(v - s.eri(j, i, k, l)) > tol || std::abs(v - s.eri(i, j, l, k)) > tol ||
              std::abs(v - s.eri(k, l, i, j)) > tol)
            throw DataCorruptionError("eri violates 8-fold permutational symmetry");
        }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.overlap);
  ValidationReport r;
  r.min_overlap_eigenvalue = es.eigenvalues().minCoeff();
  if (r.min_overlap_eigenvalue <= 0.0) throw DataCorruptionError("overlap is not positive definite");
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) < lindep_threshold) ++r.dropped_vectors;
  if (r.dropped_vectors == n_ao) throw DataCorruptionError("overlap is numerically singular");
  if (2 * (n_ao - r.dropped_vectors) < s.meta.n_electrons)
    throw StructuralError("too few independent orbitals for the electron count");
  return r;
}

double ev_to_hartree(double ev) { return ev / kHartreeEv; }
double hartree_to_ev(double ha) { return ha * kHartreeEv; }

double SpinOrbitalHamiltonian::reference_energy() const {
  double e = scalar_shift;
  for (std::size_t i : occ) e += h_dressed(i, i);
  for (std::size_t i : occ)
    for (std::size_t j : occ) e += 0.5 * u_antisym(i, j, i, j);
  return e;
}

double SpinOrbitalHamiltonian::coupling_occupied_trace() const {
  double t = 0.0;
  for (std::size_t i : occ) t += coupling(i, i);
  return t;
}

AmplitudeSet AmplitudeSet::zeros(Scheme scheme, std::size_t n_occ, std::size_t n_virt) {
  AmplitudeSet a;
  a.scheme = scheme;
  for (int n = 0; n <= scheme.n; ++n) {
    if (n > 0) a.t0[n] = 0.0;
    a.t1[n] = DenseTensor({n_occ, n_virt});
    a.t2[n] = DenseTensor({n_occ, n_occ, n_virt, n_virt});
  }
  return a;
}

std::size_t AmplitudeSet::size() const {
  std::size_t s = t0.size();
  for (const auto& [n, t] : t1) s += t.size();
  for (const auto& [n, t] : t2) s += t.size();
  return s;
}

std::vector<double> AmplitudeSet::flatten() const {
  std::vector<double> v;
  v.reserve(size());
  for (const auto& [n, x] : t0) v.push_back(x);
  for (const auto& [n, t] : t1) v.insert(v.end(), t.storage().begin(), t.storage().end());
  for (const auto& [n, t] : t2) v.insert(v.end(), t.storage().begin(), t.storage().end());
  return v;
}

void AmplitudeSet::unflatten(const std::vector<double>& v) {
  if (v.size() != size()) throw StructuralError("amplitude vector length mismatch");
  auto it = v.begin();
  for (auto& [n, x] : t0) x = *it++;
  for (auto& [n, t] : t1) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(t.size()), t.storage().begin());
    it += static_cast<std::ptrdiff_t>(t.size());
  }
  for (auto& [n, t] : t2) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(t.size()), t.storage().begin());
    it += static_cast<std::ptrdiff_t>(t.size());
  }
}

double AmplitudeSet::max_block_norm() const {
  double m = 0.0;
  for (const auto& [n, x] : t0) m = std::max(m, std::abs(x));
  for (const auto& [n, t] : t1) m = std::max(m, t.norm());
  for (const auto& [n, t] : t2) m = std::max(m, t.norm());
  return m;
}

}  // namespace cavity
