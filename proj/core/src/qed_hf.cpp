#include "cavity/qed_hf.hpp"

#include <cmath>
#include <sstream>

namespace cavity {

namespace {

using Index = Eigen::Index;

Matrix orthogonalizer(const Matrix& overlap, double lindep, std::size_t& dropped) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(overlap);
  const auto& s = es.eigenvalues();
  std::vector<Index> keep;
  for (Index k = 0; k < s.size(); ++k)
    if (s(k) >= lindep) keep.push_back(k);
  dropped = static_cast<std::size_t>(s.size()) - keep.size();
  Matrix x(overlap.rows(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    x.col(static_cast<Index>(c)) = es.eigenvectors().col(keep[c]) / std::sqrt(s(keep[c]));
  return x;
}

struct Diagonalized {
  Matrix coeffs;
  Eigen::VectorXd energies;
};

Diagonalized diagonalize(const Matrix& fock, const Matrix& x) {
  const Matrix fp = x.transpose() * fock * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fp);
  return {x * es.eigenvectors(), es.eigenvalues()};
}

Matrix density_from(const Matrix& coeffs, std::size_t n_occ) {
  const auto occ = coeffs.leftCols(static_cast<Index>(n_occ));
  return 2.0 * occ * occ.transpose();
}

Eigen::VectorXd as_vector(const Matrix& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

Matrix as_matrix(const Eigen::VectorXd& v, Index n) { return Eigen::Map<const Matrix>(v.data(), n, n); }

}  // namespace

Vec3 dipole_expectation(const Matrix& density, const std::array<Matrix, 3>& dipole, const BasisMeta& meta) {
  Vec3 d = meta.nuclear_dipole;
  if (density.size() == 0) return d;
  for (int a = 0; a < 3; ++a) d(a) += density.cwiseProduct(dipole[static_cast<std::size_t>(a)]).sum();
  return d;
}

Matrix dressed_dipole(const IntegralSet& ints, const Vec3& lambda) {
  Matrix d = Matrix::Zero(ints.overlap.rows(), ints.overlap.cols());
  for (int a = 0; a < 3; ++a) d += lambda(a) * ints.dipole[static_cast<std::size_t>(a)];
  const double per_electron = lambda.dot(ints.meta.nuclear_dipole) / static_cast<double>(ints.meta.n_electrons);
  return d + per_electron * ints.overlap;
}

Matrix dipole_square_one_body(const IntegralSet& ints, const Vec3& lambda) {
  Matrix q = Matrix::Zero(ints.overlap.rows(), ints.overlap.cols());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) q -= lambda(a) * lambda(b) * ints.quad(a, b);
  Matrix de = Matrix::Zero(q.rows(), q.cols());
  for (int a = 0; a < 3; ++a) de += lambda(a) * ints.dipole[static_cast<std::size_t>(a)];
  const double c = lambda.dot(ints.meta.nuclear_dipole) / static_cast<double>(ints.meta.n_electrons);
  return q + 2.0 * c * de + c * c * ints.overlap;
}

Matrix build_dressed_core(const IntegralSet& ints, const Vec3& lambda, const Vec3& d_expect) {
  Matrix h = ints.core_h + 0.5 * dipole_square_one_body(ints, lambda);
  h -= lambda.dot(d_expect) * dressed_dipole(ints, lambda);
  return 0.5 * (h + h.transpose());
}

std::pair<Matrix, Matrix> coulomb_exchange(const DenseTensor& eri, const Matrix& density) {
  const Index n = density.rows();
  const std::size_t nn = static_cast<std::size_t>(n);
  Eigen::Map<const Matrix> e(eri.data(), n * n, n * n);
  const Eigen::VectorXd p = as_vector(density);
  Matrix j = as_matrix(e * p, n);
  Matrix k = Matrix::Zero(n, n);
  for (std::size_t m = 0; m < nn; ++m)
    for (std::size_t g = 0; g < nn; ++g) {
      // rows (nu, lambda) of (m g | nu lambda)
      Eigen::Map<const Matrix> slab(&eri.data()[(m * nn + g) * nn * nn], n, n);
      k.row(static_cast<Index>(m)) += (slab * density.row(static_cast<Index>(g)).transpose()).transpose();
    }
  return {j, k};
}

FockBuild build_fock(const IntegralSet& ints, const Matrix& density, const Vec3& lambda, const Vec3& d_expect) {
  FockBuild out;
  out.core = build_dressed_core(ints, lambda, d_expect);
  auto [j, k] = coulomb_exchange(ints.eri, density);
  Matrix f = out.core + j - 0.5 * k;
  if (lambda.squaredNorm() > 0.0) {
    const Matrix d = dressed_dipole(ints, lambda);
    f += d * density.cwiseProduct(d).sum();
    f -= 0.5 * d * density * d;
  }
  out.fock = 0.5 * (f + f.transpose());
  out.electronic_energy = 0.5 * density.cwiseProduct(out.core + out.fock).sum();
  const double ld = lambda.dot(d_expect);
  out.scalar_shift = ints.meta.nuclear_repulsion + 0.5 * ld * ld;
  return out;
}

namespace {

ScfState scf_attempt(const IntegralSet& ints, const CavityConfig& cavity, const ScfOptions& opts, bool damp) {
  ScfState st;
  st.damped = damp;
  const Matrix x = orthogonalizer(ints.overlap, opts.lindep_threshold, st.dropped_vectors);
  const std::size_t n_occ = ints.meta.n_electrons / 2;
  const Index n = ints.overlap.rows();

  Diagonalized dz = diagonalize(ints.core_h, x);
  Matrix p = density_from(dz.coeffs, n_occ);
  DiisState diis(opts.diis_size);

  for (int it = 1; it <= opts.max_iter; ++it) {
    const Vec3 d = dipole_expectation(p, ints.dipole, ints.meta);
    const FockBuild fb = build_fock(ints, p, cavity.lambda, d);
    const Matrix err = fb.fock * p * ints.overlap - ints.overlap * p * fb.fock;
    const double err_norm = err.norm();
    st.residual_history.push_back(err_norm);

    const bool damping_now = damp && it <= 5;
    Matrix f_use = fb.fock;
    if (!damping_now) {
      diis.push(as_vector(fb.fock), as_vector(err));
      f_use = as_matrix(diis_extrapolate(diis), n);
    }
    dz = diagonalize(f_use, x);
    Matrix p_new = density_from(dz.coeffs, n_occ);
    if (damping_now) p_new = 0.7 * p_new + 0.3 * p;
    const double dp = (p_new - p).cwiseAbs().maxCoeff();
    p = std::move(p_new);
    if (!p.allFinite()) break;
    if (dp < opts.density_threshold && err_norm < opts.residual_threshold) {
      st.iteration = it;
      st.d_expect = dipole_expectation(p, ints.dipole, ints.meta);
      const FockBuild fin = build_fock(ints, p, cavity.lambda, st.d_expect);
      const Diagonalized fz = diagonalize(fin.fock, x);
      st.coeffs = fz.coeffs;
      st.orbital_energies = fz.energies;
      st.density = p;
      st.fock_ao = fin.fock;
      st.energy = fin.energy();
      return st;
    }
  }
  st.iteration = -1;
  return st;
}

}  // namespace

ScfState scf_solve(const IntegralSet& ints, const CavityConfig& cavity, const ScfOptions& opts) {
  if (opts.density_threshold <= 0 || opts.residual_threshold <= 0 || opts.max_iter <= 0)
    throw InputError("SCF thresholds and iteration cap must be positive");
  std::vector<std::string> warnings;
  if (opts.charge != 0)
    warnings.emplace_back(
        "charged system: the Pauli-Fierz energy is not origin invariant; center the molecule at its center of mass");

  ScfState st = scf_attempt(ints, cavity, opts, false);
  if (st.iteration < 0) {
    std::vector<double> first = st.residual_history;
    warnings.emplace_back("SCF did not converge with DIIS; retrying with damping 0.3 for the first 5 iterations");
    st = scf_attempt(ints, cavity, opts, true);
    if (st.iteration < 0) {
      first.insert(first.end(), st.residual_history.begin(), st.residual_history.end());
      std::ostringstream os;
      os << "QED-HF did not converge in " << opts.max_iter << " iterations (last residual "
         << (first.empty() ? 0.0 : first.back()) << ")";
      throw ConvergenceError(os.str(), first);
    }
  }
  if (st.dropped_vectors > 0)
    warnings.emplace_back(std::to_string(st.dropped_vectors) +
                          " near-linearly-dependent overlap eigenvectors removed from the orbital basis");
  st.warnings.insert(st.warnings.begin(), warnings.begin(), warnings.end());
  return st;
}

SpinOrbitalHamiltonian export_spinorbital_hamiltonian(const ScfState& state, const IntegralSet& ints,
                                                      const CavityConfig& cavity) {
  if (state.coeffs.size() == 0) throw InputError("export requires a converged SCF state");
  const Matrix& c = state.coeffs;
  const std::size_t nmo = state.n_mo();
  const std::size_t nso = 2 * nmo;
  const std::size_t n_occ = ints.meta.n_electrons / 2;
  const Vec3& lam = cavity.lambda;
  const double ld = lam.dot(state.d_expect);

  const Matrix h_mo = mo_transform(build_dressed_core(ints, lam, state.d_expect), c, ints.overlap);
  const Matrix d_mo = mo_transform(dressed_dipole(ints, lam), c, ints.overlap);

  DenseTensor chem = mo_transform(ints.eri, c, ints.overlap);
  if (lam.squaredNorm() > 0.0) {
    for (std::size_t p = 0; p < nmo; ++p)
      for (std::size_t q = 0; q < nmo; ++q) {
        const double dpq = d_mo(static_cast<Index>(p), static_cast<Index>(q));
        double* row = &chem(p, q, 0, 0);
        for (std::size_t r = 0; r < nmo; ++r)
          for (std::size_t s = 0; s < nmo; ++s)
            row[r * nmo + s] += dpq * d_mo(static_cast<Index>(r), static_cast<Index>(s));
      }
  }

  SpinOrbitalHamiltonian h;
  h.n_spatial = nmo;
  h.u_antisym = antisymmetrize_eri(spin_block_chem(chem));
  chem = DenseTensor();
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t i = 0; i < n_occ; ++i) h.occ.push_back(s * nmo + i);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t a = n_occ; a < nmo; ++a) h.virt.push_back(s * nmo + a);

  const auto ns = static_cast<Index>(nso);
  const auto nm = static_cast<Index>(nmo);
  h.h_dressed = Matrix::Zero(ns, ns);
  h.coupling = Matrix::Zero(ns, ns);
  const double g_scale = -std::sqrt(cavity.omega / 2.0);
  const Matrix g_spatial =
      g_scale * (d_mo - (ld / static_cast<double>(ints.meta.n_electrons)) * Matrix::Identity(nm, nm));
  for (Index s = 0; s < 2; ++s) {
    h.h_dressed.block(s * nm, s * nm, nm, nm) = h_mo;
    h.coupling.block(s * nm, s * nm, nm, nm) = g_spatial;
  }

  h.fock = h.h_dressed;
  for (std::size_t p = 0; p < nso; ++p)
    for (std::size_t q = 0; q < nso; ++q) {
      double acc = 0.0;
      for (std::size_t i : h.occ) acc += h.u_antisym(p, i, q, i);
      h.fock(static_cast<Index>(p), static_cast<Index>(q)) += acc;
    }
  h.omega = cavity.omega;
  h.scalar_shift = ints.meta.nuclear_repulsion + 0.5 * ld * ld;
  h.d_expectation = state.d_expect;

  const auto& u = h.u_antisym;
  for (std::size_t p = 0; p < nso; ++p)
    for (std::size_t q = 0; q < nso; ++q)
      for (std::size_t r = 0; r < nso; ++r)
        for (std::size_t s = 0; s < nso; ++s)
          if (u(p, q, r, s) != -u(q, p, r, s) || u(p, q, r, s) != -u(p, q, s, r))
            throw DataCorruptionError("antisymmetrized two-body tensor lost antisymmetry");
  return h;
}

}  // namespace cavity
