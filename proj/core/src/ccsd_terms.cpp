#include "ccsd_terms.hpp"

namespace cavity::detail {

namespace {

const DenseTensor& coef(const Jet& j, std::size_t k) {
  static const DenseTensor zero;
  return k < j.size() ? j[k] : zero;
}

/// out[k] += alpha * sum_{a+b=k} A[a] x B[b]
void mul_into(Jet& out, const std::string& spec, const Jet& a, const Jet& b, double alpha = 1.0) {
  for (std::size_t k = 0; k < out.size(); ++k)
    for (std::size_t i = 0; i <= k; ++i) {
      const DenseTensor& x = coef(a, i);
      const DenseTensor& y = coef(b, k - i);
      if (!x.empty() && !y.empty()) contract(spec, x, y, alpha, out[k], 1.0);
    }
}

/// out[k] += alpha * C x B[k]
void lin_into(Jet& out, const std::string& spec, const DenseTensor& c, const Jet& b, double alpha = 1.0) {
  for (std::size_t k = 0; k < out.size(); ++k)
    if (!coef(b, k).empty()) contract(spec, c, b[k], alpha, out[k], 1.0);
}

/// out[k] += alpha * B[k] x C
void lin_into(Jet& out, const std::string& spec, const Jet& b, const DenseTensor& c, double alpha = 1.0) {
  for (std::size_t k = 0; k < out.size(); ++k)
    if (!coef(b, k).empty()) contract(spec, b[k], c, alpha, out[k], 1.0);
}

void add_const(Jet& out, const DenseTensor& c, double alpha = 1.0) { out[0].axpy(alpha, c); }

void add_jet(Jet& out, const Jet& x, double alpha = 1.0) {
  for (std::size_t k = 0; k < out.size(); ++k) out[k].axpy(alpha, coef(x, k));
}

double scalar_of(const DenseTensor& t) { return t.empty() ? 0.0 : t.data()[0]; }

/// x - x with the listed pair of modes swapped
DenseTensor antisym(const DenseTensor& x, std::vector<std::size_t> perm) {
  if (x.empty()) return x;
  return x - permute(x, perm);
}

const std::vector<std::size_t> kSwapAB = {0, 1, 3, 2};
const std::vector<std::size_t> kSwapIJ = {1, 0, 2, 3};

}  // namespace

Projections ccsd_projections(std::size_t K, const DenseTensor& f_oo, const DenseTensor& f_ov,
                             const DenseTensor& f_vv, const CcIntegrals* V, const Jet& t1, const Jet& t2) {
  Jet t1t1(K);
  mul_into(t1t1, "ia,jb->ijab", t1, t1);
  Jet tau(K), taut(K);
  for (std::size_t k = 0; k < K; ++k) {
    const DenseTensor pair = antisym(t1t1[k], kSwapAB);
    tau[k] = coef(t2, k);
    tau[k].axpy(1.0, pair);
    taut[k] = coef(t2, k);
    taut[k].axpy(0.5, pair);
  }

  // one-body intermediates
  Jet f_ae(K), f_mi(K), f_me(K);
  add_const(f_ae, f_vv);
  lin_into(f_ae, "me,ma->ae", f_ov, t1, -0.5);
  add_const(f_mi, f_oo);
  lin_into(f_mi, "me,ie->mi", f_ov, t1, 0.5);
  add_const(f_me, f_ov);

  Projections out;
  out.energy.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    if (!coef(t1, k).empty()) out.energy[k] += scalar_of(einsum("ia,ia->", f_ov, t1[k]));

  Jet w_mnij(K), w_mbej(K), z(K);
  if (V) {
    lin_into(f_ae, "mf,mafe->ae", t1, V->ovvv);
    lin_into(f_ae, "mnaf,mnef->ae", taut, V->oovv, -0.5);
    lin_into(f_mi, "ne,mnie->mi", t1, V->ooov);
    lin_into(f_mi, "inef,mnef->mi", taut, V->oovv, 0.5);
    lin_into(f_me, "nf,mnef->me", t1, V->oovv);
    for (std::size_t k = 0; k < K; ++k) {
      if (!coef(t2, k).empty()) out.energy[k] += 0.25 * scalar_of(einsum("ijab,ijab->", V->oovv, t2[k]));
      if (!t1t1[k].empty()) out.energy[k] += 0.5 * scalar_of(einsum("ijab,ijab->", V->oovv, t1t1[k]));
    }

    // W_mnij carries the full tau-tau term; W_abef never materializes it
    add_const(w_mnij, V->oooo);
    {
      Jet x(K);
      lin_into(x, "je,mnie->mnij", t1, V->ooov);
      for (std::size_t k = 0; k < K; ++k) w_mnij[k].axpy(1.0, antisym(x[k], kSwapAB));
    }
    lin_into(w_mnij, "ijef,mnef->mnij", tau, V->oovv, 0.5);

    Jet t1t1_jnfb(K);
    mul_into(t1t1_jnfb, "jf,nb->jnfb", t1, t1);
    Jet mix(K);
    add_jet(mix, t2, 0.5);
    add_jet(mix, t1t1_jnfb);
    add_const(w_mbej, V->ovvo);
    lin_into(w_mbej, "jf,mbef->mbej", t1, V->ovvv);
    lin_into(w_mbej, "nb,mnej->mbej", t1, V->oovo, -1.0);
    lin_into(w_mbej, "jnfb,mnef->mbej", mix, V->oovv, -1.0);

    lin_into(z, "ijef,amef->ijam", tau, V->vovv);
  }

  // singles
  out.r1.assign(K, DenseTensor());
  add_const(out.r1, f_ov);
  mul_into(out.r1, "ie,ae->ia", t1, f_ae);
  mul_into(out.r1, "ma,mi->ia", t1, f_mi, -1.0);
  mul_into(out.r1, "imae,me->ia", t2, f_me);
  if (V) {
    lin_into(out.r1, "nf,naif->ia", t1, V->ovov, -1.0);
    lin_into(out.r1, "imef,maef->ia", t2, V->ovvv, -0.5);
    lin_into(out.r1, "mnae,nmei->ia", t2, V->oovo, -0.5);
  }

  // doubles
  Jet f_be(K), f_mj(K);
  add_jet(f_be, f_ae);
  mul_into(f_be, "mb,me->be", t1, f_me, -0.5);
  add_jet(f_mj, f_mi);
  mul_into(f_mj, "je,me->mj", t1, f_me, 0.5);
  Jet p_ab(K), p_ij(K), p_ijab(K);
  mul_into(p_ab, "ijae,be->ijab", t2, f_be);
  mul_into(p_ij, "imab,mj->ijab", t2, f_mj, -1.0);

  out.r2.assign(K, DenseTensor());
  if (V) {
    add_const(out.r2, V->oovv);
    mul_into(out.r2, "mnab,mnij->ijab", tau, w_mnij, 0.5);
    lin_into(out.r2, "ijef,abef->ijab", tau, V->vvvv, 0.5);
    mul_into(p_ab, "mb,ijam->ijab", t1, z, -0.5);
    mul_into(p_ijab, "imae,mbej->ijab", t2, w_mbej);
    Jet t1t1_iema(K);
    mul_into(t1t1_iema, "ie,ma->iema", t1, t1);
    lin_into(p_ijab, "iema,mbej->ijab", t1t1_iema, V->ovvo, -1.0);
    lin_into(p_ij, "ie,abej->ijab", t1, V->vvvo);
    lin_into(p_ab, "ma,mbij->ijab", t1, V->ovoo, -1.0);
  }
  for (std::size_t k = 0; k < K; ++k) {
    out.r2[k].axpy(1.0, antisym(p_ab[k], kSwapAB));
    out.r2[k].axpy(1.0, antisym(p_ij[k], kSwapIJ));
    out.r2[k].axpy(1.0, antisym(antisym(p_ijab[k], kSwapIJ), kSwapAB));
  }
  return out;
}

}  // namespace cavity::detail
