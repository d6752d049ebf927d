#pragma once

#include <vector>

#include "cavity/qed_cc.hpp"

namespace cavity::detail {

/// Truncated power series in the photon creation variable; coefficient k
/// multiplies (b^dagger)^k. Empty coefficients are zero.
using Jet = std::vector<DenseTensor>;

struct Projections {
  std::vector<double> energy;  // <0| e^{-T} O e^{T} |0> (normal-ordered part)
  Jet r1, r2;
};

/// CCSD projections of a normal-ordered operator with Fock-like one-body
/// part (f_oo, f_ov, f_vv) and, if `with_two_body`, the antisymmetrized
/// blocks of `ints`, evaluated with jet amplitudes through order K-1.
Projections ccsd_projections(std::size_t K, const DenseTensor& f_oo, const DenseTensor& f_ov,
                             const DenseTensor& f_vv, const CcIntegrals* two_body, const Jet& t1,
                             const Jet& t2);

}  // namespace cavity::detail
