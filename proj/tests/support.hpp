#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <cctype>
#include <map>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "cavity/fock_oracle.hpp"
#include "cavity/integral_io.hpp"
#include "cavity/model.hpp"
#include "cavity/qed_cc.hpp"
#include "cavity/qed_hf.hpp"
#include "cavity/tensor.hpp"

namespace cavity::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(CAVITY_FIXTURE_DIR) / (name + ".qeddump");
}

inline const nlohmann::json& references() {
  static const nlohmann::json j = [] {
    std::ifstream in(std::filesystem::path(CAVITY_FIXTURE_DIR) / "references.json");
    return nlohmann::json::parse(in);
  }();
  return j;
}

inline const IntegralSet& load_fixture(const std::string& name) {
  static std::map<std::string, IntegralSet> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, parse_dump_file(fixture(name))).first;
  return it->second;
}

inline RowMatrix random_symmetric(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  RowMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
  return m;
}

/// Random real chemists' tensor with full 8-fold symmetry.
inline DenseTensor random_chem_eri(std::size_t n, std::mt19937_64& rng, double scale = 0.1) {
  std::uniform_real_distribution<double> u(-scale, scale);
  DenseTensor g({n, n, n, n});
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q <= p; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s <= r; ++s) {
          if (p * (p + 1) / 2 + q < r * (r + 1) / 2 + s) continue;
          const double v = u(rng);
          for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}})
            for (auto [c, d] : {std::pair{r, s}, std::pair{s, r}}) {
              g(a, b, c, d) = v;
              g(c, d, a, b) = v;
            }
        }
  return g;
}

/// Spin-orbital Hamiltonian with random dense one- and two-body parts (no spin
/// structure), consistent Fock matrix and random bilinear coupling.
inline SpinOrbitalHamiltonian random_hamiltonian(std::size_t n_spatial, std::size_t n_electrons, std::mt19937_64& rng,
                                                 double omega = 0.4, double coupling_scale = 0.05) {
  const std::size_t n = 2 * n_spatial;
  SpinOrbitalHamiltonian h;
  h.n_spatial = n_spatial;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t p = 0; p < n_spatial; ++p)
      (p < n_electrons / 2 ? h.occ : h.virt).push_back(s * n_spatial + p);
  h.h_dressed = random_symmetric(n, rng, 0.3);
  for (std::size_t p = 0; p < n; ++p) h.h_dressed(p, p) += spatial_of(p, n_spatial) < n_electrons / 2 ? -1.0 : 0.5;
  h.u_antisym = antisymmetrize_eri(random_chem_eri(n, rng));
  h.fock = h.h_dressed;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t k : h.occ) h.fock(p, q) += h.u_antisym(p, k, q, k);
  h.coupling = random_symmetric(n, rng, coupling_scale);
  h.omega = omega;
  h.scalar_shift = 0.25;
  return h;
}

inline AmplitudeSet random_amplitudes(Scheme scheme, std::size_t no, std::size_t nv, std::mt19937_64& rng,
                                      double scale = 0.1) {
  std::uniform_real_distribution<double> u(-scale, scale);
  AmplitudeSet t = AmplitudeSet::zeros(scheme, no, nv);
  for (int n = 0; n <= scheme.n; ++n) {
    if (n > 0) t.t0[n] = u(rng);
    for (double& x : t.t1[n].storage()) x = u(rng);
    DenseTensor& t2 = t.t2[n];
    for (std::size_t i = 0; i < no; ++i)
      for (std::size_t j = i + 1; j < no; ++j)
        for (std::size_t a = 0; a < nv; ++a)
          for (std::size_t b = a + 1; b < nv; ++b) {
            const double v = u(rng);
            t2(i, j, a, b) = v;
            t2(j, i, a, b) = -v;
            t2(i, j, b, a) = -v;
            t2(j, i, b, a) = v;
          }
  }
  return t;
}

/// Largest elementwise difference over every block both sets store.
inline double max_block_difference(const AmplitudeSet& a, const AmplitudeSet& b) {
  double m = 0.0;
  for (int n = 0; n <= a.scheme.n; ++n) {
    if (n > 0) m = std::max(m, std::abs(a.t0.at(n) - b.t0.at(n)));
    m = std::max(m, (a.t1.at(n) - b.t1.at(n)).max_abs());
    m = std::max(m, (a.t2.at(n) - b.t2.at(n)).max_abs());
  }
  return m;
}

/// Converged QED-HF spin-orbital Hamiltonian of a fixture.
inline SpinOrbitalHamiltonian fixture_hamiltonian(const std::string& name, const Vec3& lambda, double omega_ev,
                                                  ScfState* state = nullptr) {
  const IntegralSet& ints = load_fixture(name);
  CavityConfig cav;
  cav.lambda = lambda;
  cav.omega = ev_to_hartree(omega_ev);
  ScfState s = scf_solve(ints, cav);
  SpinOrbitalHamiltonian h = export_spinorbital_hamiltonian(s, ints, cav);
  if (state) *state = std::move(s);
  return h;
}

inline DenseTensor random_tensor(std::vector<std::size_t> dims, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseTensor t(std::move(dims));
  for (double& x : t.storage()) x = u(rng);
  return t;
}

/// Loop oracle for any pairwise pattern without batch labels.
inline DenseTensor naive_contract(const std::string& spec, const DenseTensor& a, const DenseTensor& b) {
  const auto comma = spec.find(','), arrow = spec.find("->");
  const std::string la = spec.substr(0, comma), lb = spec.substr(comma + 1, arrow - comma - 1),
                    lo = spec.substr(arrow + 2);
  std::string labels;
  std::map<char, std::size_t> extent;
  for (std::size_t k = 0; k < la.size(); ++k) extent[la[k]] = a.dims()[k];
  for (std::size_t k = 0; k < lb.size(); ++k) extent[lb[k]] = b.dims()[k];
  for (auto [l, e] : extent) labels.push_back(l);
  std::vector<std::size_t> od;
  for (char l : lo) od.push_back(extent[l]);
  DenseTensor out = od.empty() ? DenseTensor::scalar(0.0) : DenseTensor(od);
  std::map<char, std::size_t> idx;
  for (char l : labels) idx[l] = 0;
  auto gather = [&](const std::string& ls) {
    std::vector<std::size_t> v;
    for (char l : ls) v.push_back(idx[l]);
    return v;
  };
  while (true) {
    out.at(gather(lo)) += a.at(gather(la)) * b.at(gather(lb));
    std::size_t k = 0;
    for (; k < labels.size(); ++k) {
      if (++idx[labels[k]] < extent[labels[k]]) break;
      idx[labels[k]] = 0;
    }
    if (k == labels.size()) break;
  }
  return out;
}

struct OrthonormalCase {
  RowMatrix s, c;
};

/// Positive-definite overlap and coefficients with C^T S C = 1.
inline OrthonormalCase random_orthonormal(std::size_t n, std::mt19937_64& rng) {
  RowMatrix a = random_symmetric(n, rng, 0.2);
  a.diagonal().array() += 1.0;
  RowMatrix s = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  RowMatrix x = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                es.eigenvectors().transpose();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_symmetric(n, rng));
  return {s, x * RowMatrix(qr.householderQ())};
}

}  // namespace cavity::testing
