#include "cavity/qed_cc.hpp"

#include <cmath>
#include <sstream>

#include "ccsd_terms.hpp"

namespace cavity {

using detail::Jet;

namespace {

using Index = Eigen::Index;
using List = std::vector<std::size_t>;

DenseTensor block2(const Matrix& m, const List& a, const List& b) {
  DenseTensor t({a.size(), b.size()});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) t(i, j) = m(static_cast<Index>(a[i]), static_cast<Index>(b[j]));
  return t;
}

DenseTensor block4(const DenseTensor& u, const List& a, const List& b, const List& c, const List& d) {
  DenseTensor t({a.size(), b.size(), c.size(), d.size()});
  double* out = t.data();
  for (std::size_t p : a)
    for (std::size_t q : b)
      for (std::size_t r : c)
        for (std::size_t s : d) *out++ = u(p, q, r, s);
  return t;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

const DenseTensor& at(const Jet& j, int k) {
  static const DenseTensor zero;
  return k >= 0 && static_cast<std::size_t>(k) < j.size() ? j[static_cast<std::size_t>(k)] : zero;
}

double at(const std::vector<double>& v, int k) {
  return k >= 0 && static_cast<std::size_t>(k) < v.size() ? v[static_cast<std::size_t>(k)] : 0.0;
}

/// y_ia r_jb antisymmetrized over (ij) and (ab)
DenseTensor pair_product(const DenseTensor& y, const DenseTensor& r) {
  DenseTensor x = einsum("ia,jb->ijab", y, r);
  x -= permute(x, {1, 0, 2, 3});
  x -= permute(x, {0, 1, 3, 2});
  return x;
}

DenseTensor ensure(DenseTensor t, std::vector<std::size_t> dims) {
  if (t.empty()) return DenseTensor(std::move(dims));
  return t;
}

}  // namespace

CcIntegrals CcIntegrals::from(const SpinOrbitalHamiltonian& h) {
  CcIntegrals c;
  const List& o = h.occ;
  const List& v = h.virt;
  c.n_occ = o.size();
  c.n_virt = v.size();
  c.f_oo = block2(h.fock, o, o);
  c.f_ov = block2(h.fock, o, v);
  c.f_vv = block2(h.fock, v, v);
  c.g_oo = block2(h.coupling, o, o);
  c.g_ov = block2(h.coupling, o, v);
  c.g_vv = block2(h.coupling, v, v);
  c.g_occ_trace = h.coupling_occupied_trace();
  c.omega = h.omega;
  c.e_ref = h.reference_energy();
  const DenseTensor& u = h.u_antisym;
  c.oooo = block4(u, o, o, o, o);
  c.ooov = block4(u, o, o, o, v);
  c.oovo = block4(u, o, o, v, o);
  c.oovv = block4(u, o, o, v, v);
  c.ovoo = block4(u, o, v, o, o);
  c.ovov = block4(u, o, v, o, v);
  c.ovvo = block4(u, o, v, v, o);
  c.ovvv = block4(u, o, v, v, v);
  c.vovv = block4(u, v, o, v, v);
  c.vvvo = block4(u, v, v, v, o);
  c.vvvv = block4(u, v, v, v, v);
  return c;
}

CcResiduals compute_residuals(const CcIntegrals& ints, const AmplitudeSet& t) {
  const int nmax = t.scheme.n;
  const std::size_t o = ints.n_occ, v = ints.n_virt;
  const std::vector<std::size_t> d1 = {o, v}, d2 = {o, o, v, v};

  Jet t1(static_cast<std::size_t>(nmax) + 1), t2(static_cast<std::size_t>(nmax) + 1);
  for (int n = 0; n <= nmax; ++n) {
    t1[static_cast<std::size_t>(n)] = t.t1.at(n);
    t2[static_cast<std::size_t>(n)] = t.t2.at(n);
  }
  const auto ph = detail::ccsd_projections(static_cast<std::size_t>(nmax) + 1, ints.f_oo, ints.f_ov, ints.f_vv,
                                           &ints, t1, t2);
  auto pg = detail::ccsd_projections(static_cast<std::size_t>(nmax) + 2, ints.g_oo, ints.g_ov, ints.g_vv, nullptr,
                                     t1, t2);
  pg.energy[0] += ints.g_occ_trace;

  // derivative of the cluster operator with respect to the photon variable
  std::vector<double> y0(static_cast<std::size_t>(nmax) + 1, 0.0);
  Jet y1(static_cast<std::size_t>(nmax) + 1), y2(static_cast<std::size_t>(nmax) + 1);
  for (int k = 0; k < nmax; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    y0[ku] = (k + 1) * t.t0.at(k + 1);
    y1[ku] = static_cast<double>(k + 1) * t.t1.at(k + 1);
    y2[ku] = static_cast<double>(k + 1) * t.t2.at(k + 1);
  }

  const double w = ints.omega;
  CcResiduals res;
  res.sigma.scheme = t.scheme;
  for (int k = 0; k <= nmax; ++k) {
    double e = (k == 0 ? ints.e_ref : 0.0) + at(ph.energy, k) + at(pg.energy, k - 1) +
               (k + 1) * at(pg.energy, k + 1) + w * at(y0, k - 1);
    DenseTensor r1 = ensure(at(ph.r1, k), d1);
    r1.axpy(1.0, at(pg.r1, k - 1));
    r1.axpy(k + 1.0, at(pg.r1, k + 1));
    r1.axpy(w, at(y1, k - 1));
    DenseTensor r2 = ensure(at(ph.r2, k), d2);
    r2.axpy(1.0, at(pg.r2, k - 1));
    r2.axpy(k + 1.0, at(pg.r2, k + 1));
    r2.axpy(w, at(y2, k - 1));
    for (int a = 0; a <= k; ++a) {
      const double eg = at(pg.energy, k - a);
      const double ya = at(y0, a);
      e += ya * eg;
      r1.axpy(ya, at(pg.r1, k - a));
      r1.axpy(eg, at(y1, a));
      r2.axpy(ya, at(pg.r2, k - a));
      r2.axpy(eg, at(y2, a));
      if (!at(y1, a).empty() && !at(pg.r1, k - a).empty()) r2 += pair_product(at(y1, a), at(pg.r1, k - a));
    }
    const double kf = factorial(k);
    r1 *= kf;
    r2 *= kf;
    if (k == 0) {
      res.energy = e;
    } else {
      res.sigma.t0[k] = kf * e;
      res.max_norm = std::max(res.max_norm, std::abs(kf * e));
    }
    res.max_norm = std::max({res.max_norm, r1.norm(), r2.norm()});
    res.sigma.t1[k] = std::move(r1);
    res.sigma.t2[k] = std::move(r2);
  }
  res.correlation = res.energy - ints.e_ref;
  return res;
}

AmplitudeSet init_amplitudes(const CcIntegrals& ints, Scheme scheme, std::vector<std::string>* warnings) {
  const std::size_t o = ints.n_occ, v = ints.n_virt;
  AmplitudeSet t = AmplitudeSet::zeros(scheme, o, v);
  DenseTensor& t2 = t.t2.at(0);
  for (std::size_t i = 0; i < o; ++i)
    for (std::size_t j = 0; j < o; ++j)
      for (std::size_t a = 0; a < v; ++a)
        for (std::size_t b = 0; b < v; ++b) {
          const double d = ints.f_oo(i, i) + ints.f_oo(j, j) - ints.f_vv(a, a) - ints.f_vv(b, b);
          t2(i, j, a, b) = ints.oovv(i, j, a, b) / d;
        }
  if (scheme.n >= 1) {
    if (ints.omega > 0.0) {
      DenseTensor& t11 = t.t1.at(1);
      for (std::size_t i = 0; i < o; ++i)
        for (std::size_t a = 0; a < v; ++a)
          t11(i, a) = ints.g_ov(i, a) / (ints.f_oo(i, i) - ints.f_vv(a, a) - ints.omega);
    } else if (warnings) {
      warnings->emplace_back("photon frequency is zero: photon amplitudes start from zero");
    }
  }
  return t;
}

AmplitudeSet init_amplitudes(const SpinOrbitalHamiltonian& h, Scheme scheme, std::vector<std::string>* warnings) {
  return init_amplitudes(CcIntegrals::from(h), scheme, warnings);
}

CcWorkspace::CcWorkspace(const SpinOrbitalHamiltonian& h, Scheme scheme, CcOptions opts)
    : ints(CcIntegrals::from(h)), diis(opts.diis_size), options(opts) {
  if (scheme.m != 2 || scheme.n < 0 || scheme.n > 2) throw InputError("unsupported scheme " + scheme.name());
  photon_frozen = scheme.n > 0 && ints.omega == 0.0;
  amplitudes = init_amplitudes(ints, scheme, &warnings);
  if (photon_frozen)
    warnings.emplace_back("photon frequency is zero: photon amplitude blocks frozen at zero (exact, coupling vanishes)");

  const std::size_t o = ints.n_occ, v = ints.n_virt;
  denominators = AmplitudeSet::zeros(scheme, o, v);
  for (int n = 0; n <= scheme.n; ++n) {
    const double nf = factorial(n);
    const double shift = n * ints.omega;
    if (n > 0) denominators.t0[n] = nf * shift;
    DenseTensor& d1 = denominators.t1[n];
    for (std::size_t i = 0; i < o; ++i)
      for (std::size_t a = 0; a < v; ++a) d1(i, a) = nf * (ints.f_vv(a, a) - ints.f_oo(i, i) + shift);
    DenseTensor& d2 = denominators.t2[n];
    for (std::size_t i = 0; i < o; ++i)
      for (std::size_t j = 0; j < o; ++j)
        for (std::size_t a = 0; a < v; ++a)
          for (std::size_t b = 0; b < v; ++b)
            d2(i, j, a, b) =
                nf * (ints.f_vv(a, a) + ints.f_vv(b, b) - ints.f_oo(i, i) - ints.f_oo(j, j) + shift);
  }
}

double compute_residuals(CcWorkspace& w) {
  w.residuals = compute_residuals(w.ints, w.amplitudes);
  return w.residuals.energy;
}

namespace {

void step_block(DenseTensor& t, const DenseTensor& sigma, const DenseTensor& denom, const std::string& name) {
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double d = denom.data()[k];
    if (std::abs(d) < 1e-8) throw DataCorruptionError("small denominator in amplitude block " + name);
    t.data()[k] -= sigma.data()[k] / d;
  }
}

}  // namespace

void update_amplitudes(CcWorkspace& w) {
  AmplitudeSet& t = w.amplitudes;
  const AmplitudeSet& s = w.residuals.sigma;
  const std::vector<double> before = t.flatten();
  for (int n = 0; n <= t.scheme.n; ++n) {
    if (n > 0 && w.photon_frozen) continue;
    if (n > 0) {
      const double d = w.denominators.t0.at(n);
      if (std::abs(d) < 1e-8) throw DataCorruptionError("small denominator in amplitude block t0[" + std::to_string(n) + "]");
      t.t0.at(n) -= s.t0.at(n) / d;
    }
    step_block(t.t1.at(n), s.t1.at(n), w.denominators.t1.at(n), "t1[" + std::to_string(n) + "]");
    step_block(t.t2.at(n), s.t2.at(n), w.denominators.t2.at(n), "t2[" + std::to_string(n) + "]");
  }
  if (!w.options.use_diis) return;
  const std::vector<double> after = t.flatten();
  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(after.data(), static_cast<Index>(after.size()));
  Eigen::VectorXd e = p - Eigen::Map<const Eigen::VectorXd>(before.data(), static_cast<Index>(before.size()));
  w.diis.push(p, e);
  if (w.diis.history.size() < 2) return;
  const Eigen::VectorXd x = diis_extrapolate(w.diis);
  t.unflatten(std::vector<double>(x.data(), x.data() + x.size()));
}

CcResult solve_cc(const SpinOrbitalHamiltonian& h, Scheme scheme, const CcOptions& options) {
  if (options.residual_threshold <= 0 || options.max_iter <= 0)
    throw InputError("CC threshold and iteration cap must be positive");
  CcWorkspace w(h, scheme, options);
  CcResult out;
  out.photon_frozen = w.photon_frozen;
  EnergyReport& r = out.report;
  r.scheme = scheme;
  for (int it = 1; it <= options.max_iter; ++it) {
    compute_residuals(w);
    r.residual_history.push_back(w.residuals.max_norm);
    if (!std::isfinite(w.residuals.max_norm) || !std::isfinite(w.residuals.energy))
      throw ConvergenceError("QED-CCSD" + scheme.name() + " diverged at iteration " + std::to_string(it),
                             r.residual_history);
    if (w.residuals.max_norm < options.residual_threshold) {
      r.iterations_cc = it;
      r.final_residual_norm = w.residuals.max_norm;
      r.scf_energy = w.ints.e_ref;
      r.correlation_energy = w.residuals.correlation;
      r.total_energy = r.scf_energy + r.correlation_energy;
      out.amplitudes = std::move(w.amplitudes);
      return out;
    }
    update_amplitudes(w);
  }
  std::ostringstream os;
  os << "QED-CCSD" << scheme.name() << " did not converge in " << options.max_iter << " iterations (residual "
     << r.residual_history.back() << ")";
  throw ConvergenceError(os.str(), r.residual_history);
}

SpinOrbitalHamiltonian with_zero_frequency(const SpinOrbitalHamiltonian& h) {
  SpinOrbitalHamiltonian z = h;
  z.omega = 0.0;
  z.coupling.setZero();
  return z;
}

ReductionCheck scheme_reduction_check(const SpinOrbitalHamiltonian& h, const CcOptions& options) {
  const SpinOrbitalHamiltonian z = with_zero_frequency(h);
  ReductionCheck c;
  c.corr_20 = solve_cc(z, {2, 0}, options).report.correlation_energy;
  const CcResult r21 = solve_cc(z, {2, 1}, options);
  const CcResult r22 = solve_cc(z, {2, 2}, options);
  c.corr_21 = r21.report.correlation_energy;
  c.corr_22 = r22.report.correlation_energy;
  c.photon_frozen = r21.photon_frozen && r22.photon_frozen;
  c.max_deviation = std::max(std::abs(c.corr_21 - c.corr_20), std::abs(c.corr_22 - c.corr_20));
  c.passed = c.max_deviation <= 10.0 * options.residual_threshold;
  return c;
}

}  // namespace cavity
