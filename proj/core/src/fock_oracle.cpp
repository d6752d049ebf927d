#include "cavity/fock_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace cavity {

namespace {

using Index = Eigen::Index;

int parity_below(Determinant d, std::size_t p) {
  const Determinant mask = p == 0 ? 0 : ((Determinant{1} << p) - 1);
  return std::popcount(d & mask) & 1;
}

std::vector<std::size_t> occupied(Determinant d) {
  std::vector<std::size_t> out;
  while (d) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(d)));
    d &= d - 1;
  }
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

bool apply_string(Determinant d, const std::vector<std::size_t>& creators,
                  const std::vector<std::size_t>& annihilators, Determinant& out, int& sign) {
  sign = 1;
  for (auto it = annihilators.rbegin(); it != annihilators.rend(); ++it) {
    const Determinant bit = Determinant{1} << *it;
    if (!(d & bit)) return false;
    if (parity_below(d, *it)) sign = -sign;
    d &= ~bit;
  }
  for (auto it = creators.rbegin(); it != creators.rend(); ++it) {
    const Determinant bit = Determinant{1} << *it;
    if (d & bit) return false;
    if (parity_below(d, *it)) sign = -sign;
    d |= bit;
  }
  out = d;
  return true;
}

long FockBasis::index(Determinant d, int photons) const {
  const auto it = lookup_.find(d);
  if (it == lookup_.end() || photons < 0 || photons > photon_cap) return -1;
  return static_cast<long>(it->second * photon_levels() + static_cast<std::size_t>(photons));
}

FockBasis FockBasis::build(std::size_t n_so, std::size_t n_electrons, int photon_cap, bool sz_zero,
                           std::size_t max_dimension) {
  if (n_so > 64) throw StructuralError("Fock basis supports at most 64 spin orbitals");
  if (n_electrons > n_so) throw StructuralError("more electrons than spin orbitals");
  if (photon_cap < 0) throw InputError("photon cap must be non-negative");
  FockBasis b;
  b.n_so = n_so;
  b.photon_cap = photon_cap;
  b.sz_restricted = sz_zero;
  const std::size_t n_spatial = n_so / 2;
  // lexicographic combinations of orbital indices
  std::vector<std::size_t> c(n_electrons);
  for (std::size_t k = 0; k < n_electrons; ++k) c[k] = k;
  while (true) {
    Determinant d = 0;
    std::size_t n_alpha = 0;
    for (std::size_t p : c) {
      d |= Determinant{1} << p;
      if (p < n_spatial) ++n_alpha;
    }
    if (!sz_zero || 2 * n_alpha == n_electrons) {
      b.determinants.push_back(d);
      if (b.determinants.size() * b.photon_levels() > max_dimension)
        throw StructuralError("Fock basis dimension exceeds the configured cap");
    }
    std::size_t k = n_electrons;
    while (k > 0 && c[k - 1] == n_so - n_electrons + k - 1) --k;
    if (k == 0) break;
    ++c[k - 1];
    for (std::size_t m = k; m < n_electrons; ++m) c[m] = c[m - 1] + 1;
  }
  std::sort(b.determinants.begin(), b.determinants.end());
  for (std::size_t i = 0; i < b.determinants.size(); ++i) b.lookup_[b.determinants[i]] = i;
  return b;
}

Determinant reference_determinant(const SpinOrbitalHamiltonian& h) {
  Determinant d = 0;
  for (std::size_t i : h.occ) d |= Determinant{1} << i;
  return d;
}

SparseMatrix build_hamiltonian_matrix(const SpinOrbitalHamiltonian& h, const FockBasis& basis) {
  if (basis.n_so != h.n_so()) throw StructuralError("Fock basis and Hamiltonian disagree on spin orbitals");
  const std::size_t nso = h.n_so();
  const std::size_t levels = basis.photon_levels();
  const auto& u = h.u_antisym;
  std::vector<Eigen::Triplet<double>> trip;

  auto emit = [&](std::size_t col_det, Determinant target, double e_elem, double g_elem) {
    const long row0 = basis.index(target, 0);
    if (row0 < 0) return;
    const std::size_t rd = static_cast<std::size_t>(row0) / levels;
    for (std::size_t n = 0; n < levels; ++n) {
      const auto col = static_cast<Index>(col_det * levels + n);
      if (e_elem != 0.0) trip.emplace_back(static_cast<Index>(rd * levels + n), col, e_elem);
      if (g_elem != 0.0) {
        if (n + 1 < levels)
          trip.emplace_back(static_cast<Index>(rd * levels + n + 1), col, g_elem * std::sqrt(n + 1.0));
        if (n > 0) trip.emplace_back(static_cast<Index>(rd * levels + n - 1), col, g_elem * std::sqrt(double(n)));
      }
    }
  };

  for (std::size_t c = 0; c < basis.determinants.size(); ++c) {
    const Determinant d = basis.determinants[c];
    const auto occ = occupied(d);
    std::vector<std::size_t> vir;
    for (std::size_t p = 0; p < nso; ++p)
      if (!(d & (Determinant{1} << p))) vir.push_back(p);

    double e_diag = h.scalar_shift;
    double g_diag = 0.0;
    for (std::size_t i : occ) {
      e_diag += h.h_dressed(static_cast<Index>(i), static_cast<Index>(i));
      g_diag += h.coupling(static_cast<Index>(i), static_cast<Index>(i));
      for (std::size_t j : occ) e_diag += 0.5 * u(i, j, i, j);
    }
    emit(c, d, e_diag, g_diag);
    for (std::size_t n = 0; n < levels; ++n)
      trip.emplace_back(static_cast<Index>(c * levels + n), static_cast<Index>(c * levels + n), n * h.omega);

    for (std::size_t i : occ)
      for (std::size_t a : vir) {
        Determinant t;
        int s;
        apply_string(d, {a}, {i}, t, s);
        double e = h.h_dressed(static_cast<Index>(a), static_cast<Index>(i));
        for (std::size_t j : occ) e += u(a, j, i, j);
        emit(c, t, s * e, s * h.coupling(static_cast<Index>(a), static_cast<Index>(i)));
      }
    for (std::size_t x = 0; x < occ.size(); ++x)
      for (std::size_t y = x + 1; y < occ.size(); ++y)
        for (std::size_t p = 0; p < vir.size(); ++p)
          for (std::size_t q = p + 1; q < vir.size(); ++q) {
            const std::size_t i = occ[x], j = occ[y], a = vir[p], b = vir[q];
            const double v = u(a, b, i, j);
            if (v == 0.0) continue;
            Determinant t;
            int s;
            apply_string(d, {a, b}, {j, i}, t, s);
            emit(c, t, s * v, 0.0);
          }
  }
  const auto dim = static_cast<Index>(basis.dimension());
  SparseMatrix m(dim, dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigenpair fci_ground_state(const Eigen::MatrixXd& matrix) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", {});
  return {es.eigenvalues()(0), es.eigenvectors().col(0), 1};
}

Eigenpair fci_ground_state(const SparseMatrix& matrix, double tol, int max_iter) {
  const Index dim = matrix.rows();
  if (dim <= 2000) return fci_ground_state(Eigen::MatrixXd(matrix));

  const Eigen::VectorXd diag = matrix.diagonal();
  Index start = 0;
  diag.minCoeff(&start);
  const Index max_sub = 40;
  Eigen::MatrixXd v(dim, max_sub), av(dim, max_sub);
  v.col(0).setZero();
  v(start, 0) = 1.0;
  av.col(0) = matrix * v.col(0);
  Index k = 1;
  std::vector<double> history;
  Eigenpair out;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::MatrixXd sub = v.leftCols(k).transpose() * av.leftCols(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sub + sub.transpose()));
    const double theta = es.eigenvalues()(0);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    Eigen::VectorXd x = v.leftCols(k) * y;
    Eigen::VectorXd ax = av.leftCols(k) * y;
    Eigen::VectorXd r = ax - theta * x;
    const double rn = r.norm();
    history.push_back(rn);
    if (rn < tol) {
      out.energy = theta;
      out.vector = x.normalized();
      out.iterations = it;
      return out;
    }
    if (k == max_sub) {
      v.col(0) = x.normalized();
      av.col(0) = ax / x.norm();
      k = 1;
    }
    for (Index i = 0; i < dim; ++i) {
      const double den = theta - diag(i);
      r(i) = std::abs(den) > 1e-8 ? r(i) / den : r(i) / 1e-8;
    }
    for (int pass = 0; pass < 2; ++pass) r -= v.leftCols(k) * (v.leftCols(k).transpose() * r);
    const double nr = r.norm();
    if (nr < 1e-14) throw ConvergenceError("Davidson subspace collapsed", history);
    v.col(k) = r / nr;
    av.col(k) = matrix * v.col(k);
    ++k;
  }
  throw ConvergenceError("Davidson did not converge", history);
}

QedFciResult qed_fci(const SpinOrbitalHamiltonian& h, double tol, int max_cap, bool sz_zero) {
  QedFciResult r;
  double prev = 0.0;
  for (int cap = 1; cap <= max_cap; ++cap) {
    const FockBasis basis = FockBasis::build(h.n_so(), h.occ.size(), cap, sz_zero);
    const double e = fci_ground_state(build_hamiltonian_matrix(h, basis)).energy;
    r.history.push_back(e);
    if (cap > 1 && std::abs(e - prev) < tol) {
      r.energy = e;
      r.photon_cap = cap;
      return r;
    }
    prev = e;
  }
  throw ConvergenceError("QED-FCI energy not converged in the photon cap", r.history);
}

Eigen::MatrixXd cluster_matrix(const SpinOrbitalHamiltonian& h, const AmplitudeSet& t, const FockBasis& basis) {
  const int nmax = t.scheme.n;
  if (basis.photon_cap < nmax) throw StructuralError("photon cap below the scheme photon rank");
  const std::size_t nd = basis.determinants.size();
  const std::size_t levels = basis.photon_levels();
  const auto dim = static_cast<Index>(basis.dimension());
  Eigen::MatrixXd tm = Eigen::MatrixXd::Zero(dim, dim);
  const std::size_t no = h.occ.size(), nv = h.virt.size();

  auto add = [&](std::size_t col_det, Determinant target, double value, int n) {
    const long row0 = basis.index(target, 0);
    if (row0 < 0) {
      if (value != 0.0) throw StructuralError("amplitude excites outside the Fock basis");
      return;
    }
    for (std::size_t p = 0; p + static_cast<std::size_t>(n) < levels; ++p) {
      // (b^dagger)^n |p> = sqrt((p+n)!/p!) |p+n>
      const double amp = std::sqrt(factorial(static_cast<int>(p) + n) / factorial(static_cast<int>(p)));
      tm(static_cast<Index>(row0) + static_cast<Index>(p + static_cast<std::size_t>(n)),
         static_cast<Index>(col_det * levels + p)) += value * amp;
    }
  };

  for (std::size_t c = 0; c < nd; ++c) {
    const Determinant d = basis.determinants[c];
    for (int n = 0; n <= nmax; ++n) {
      if (n > 0) add(c, d, t.t0.at(n), n);
      const DenseTensor& t1 = t.t1.at(n);
      const DenseTensor& t2 = t.t2.at(n);
      for (std::size_t i = 0; i < no; ++i)
        for (std::size_t a = 0; a < nv; ++a) {
          Determinant r;
          int s;
          if (t1(i, a) != 0.0 && apply_string(d, {h.virt[a]}, {h.occ[i]}, r, s)) add(c, r, s * t1(i, a), n);
        }
      for (std::size_t i = 0; i < no; ++i)
        for (std::size_t j = i + 1; j < no; ++j)
          for (std::size_t a = 0; a < nv; ++a)
            for (std::size_t b = a + 1; b < nv; ++b) {
              Determinant r;
              int s;
              const double x = t2(i, j, a, b);
              if (x != 0.0 && apply_string(d, {h.virt[a], h.virt[b]}, {h.occ[j], h.occ[i]}, r, s))
                add(c, r, s * x, n);
            }
    }
  }
  return tm;
}

CcResiduals residual_oracle(const SpinOrbitalHamiltonian& h, const AmplitudeSet& t, const FockBasis& basis) {
  const int nmax = t.scheme.n;
  if (basis.photon_cap < nmax + 1)
    throw StructuralError("oracle photon cap must exceed the scheme photon rank by one");
  if (basis.sz_restricted) throw StructuralError("residual oracle needs the unrestricted determinant list");
  const Determinant ref = reference_determinant(h);
  const long ref_row = basis.index(ref, 0);
  if (ref_row < 0) throw StructuralError("reference determinant missing from the Fock basis");

  const Eigen::MatrixXd tm = cluster_matrix(h, t, basis);
  const Eigen::MatrixXd ham = Eigen::MatrixXd(build_hamiltonian_matrix(h, basis));
  const Eigen::MatrixXd e_pos = tm.exp();
  const Eigen::MatrixXd e_neg = (-tm).exp();
  const Eigen::VectorXd col = e_neg * (ham * e_pos.col(static_cast<Index>(ref_row)));

  const std::size_t no = h.occ.size(), nv = h.virt.size();
  CcResiduals out;
  out.sigma = AmplitudeSet::zeros(t.scheme, no, nv);
  out.energy = col(static_cast<Index>(ref_row));
  out.correlation = out.energy - h.reference_energy();
  for (int n = 0; n <= nmax; ++n) {
    const double sq = std::sqrt(factorial(n));
    if (n > 0) out.sigma.t0[n] = sq * col(basis.index(ref, n));
    DenseTensor& s1 = out.sigma.t1[n];
    DenseTensor& s2 = out.sigma.t2[n];
    for (std::size_t i = 0; i < no; ++i)
      for (std::size_t a = 0; a < nv; ++a) {
        Determinant r;
        int s;
        apply_string(ref, {h.virt[a]}, {h.occ[i]}, r, s);
        s1(i, a) = sq * s * col(basis.index(r, n));
      }
    for (std::size_t i = 0; i < no; ++i)
      for (std::size_t j = 0; j < no; ++j)
        for (std::size_t a = 0; a < nv; ++a)
          for (std::size_t b = 0; b < nv; ++b) {
            if (i == j || a == b) continue;
            Determinant r;
            int s;
            apply_string(ref, {h.virt[a], h.virt[b]}, {h.occ[j], h.occ[i]}, r, s);
            s2(i, j, a, b) = sq * s * col(basis.index(r, n));
          }
    out.max_norm = std::max({out.max_norm, s1.norm(), s2.norm(), n > 0 ? std::abs(out.sigma.t0[n]) : 0.0});
  }
  return out;
}

}  // namespace cavity
