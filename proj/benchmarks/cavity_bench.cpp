#include <filesystem>
#include <random>

#include <benchmark/benchmark.h>

#include "cavity/fock_oracle.hpp"
#include "cavity/integral_io.hpp"
#include "cavity/qed_cc.hpp"
#include "cavity/qed_hf.hpp"

namespace {

using namespace cavity;

DenseTensor random_tensor(std::vector<std::size_t> dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  DenseTensor t(std::move(dims));
  for (double& x : t.storage()) x = u(rng);
  return t;
}

// particle-particle ladder shape: o^2 v^4
void BM_ContractLadder(benchmark::State& state) {
  const auto o = static_cast<std::size_t>(state.range(0));
  const std::size_t v = 4 * o;
  const DenseTensor t2 = random_tensor({o, o, v, v}, 1), w = random_tensor({v, v, v, v}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(einsum("ijef,abef->ijab", t2, w));
  state.counters["flops"] =
      benchmark::Counter(2.0 * o * o * v * v * v * v, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ContractLadder)->Arg(2)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

// ring shape with a permuted output
void BM_ContractRing(benchmark::State& state) {
  const auto o = static_cast<std::size_t>(state.range(0));
  const std::size_t v = 4 * o;
  const DenseTensor t2 = random_tensor({o, o, v, v}, 3), w = random_tensor({o, v, v, o}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(einsum("imae,mbej->ijab", t2, w));
}
BENCHMARK(BM_ContractRing)->Arg(2)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MoTransform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseTensor g = random_tensor({n, n, n, n}, 5);
  RowMatrix c = RowMatrix::Random(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (auto _ : state) benchmark::DoNotOptimize(mo_transform(g, c));
}
BENCHMARK(BM_MoTransform)->RangeMultiplier(2)->Range(8, 48)->Unit(benchmark::kMillisecond);

SpinOrbitalHamiltonian fixture_hamiltonian(const std::string& name) {
  const IntegralSet ints = parse_dump_file(std::filesystem::path(CAVITY_FIXTURE_DIR) / (name + ".qeddump"));
  CavityConfig cav;
  cav.lambda = Vec3(0, 0, 0.1);
  cav.omega = ev_to_hartree(3.0);
  return export_spinorbital_hamiltonian(scf_solve(ints, cav), ints, cav);
}

// one residual evaluation per scheme; n_so = 14 (STO-3G) and 48 (cc-pVDZ) for water
void BM_CcResiduals(benchmark::State& state) {
  static const SpinOrbitalHamiltonian small = fixture_hamiltonian("water_sto3g");
  static const SpinOrbitalHamiltonian large = fixture_hamiltonian("water_ccpvdz");
  const SpinOrbitalHamiltonian& h = state.range(0) == 0 ? small : large;
  const Scheme scheme{2, static_cast<int>(state.range(1))};
  const CcIntegrals ints = CcIntegrals::from(h);
  const AmplitudeSet t = init_amplitudes(ints, scheme);
  for (auto _ : state) benchmark::DoNotOptimize(compute_residuals(ints, t));
  state.counters["n_so"] = static_cast<double>(h.n_so());
}
BENCHMARK(BM_CcResiduals)
    ->ArgsProduct({{0, 1}, {0, 1, 2}})
    ->ArgNames({"basis", "n"})
    ->Unit(benchmark::kMillisecond);

void BM_ResidualOracle(benchmark::State& state) {
  static const SpinOrbitalHamiltonian h = [] {
    const IntegralSet ints = parse_dump_file(std::filesystem::path(CAVITY_FIXTURE_DIR) / "h2_sto3g.qeddump");
    CavityConfig cav;
    cav.lambda = Vec3(0, 0, 0.05);
    cav.omega = ev_to_hartree(20.0);
    return export_spinorbital_hamiltonian(scf_solve(ints, cav), ints, cav);
  }();
  const AmplitudeSet t = init_amplitudes(h, {2, 2});
  const FockBasis basis = FockBasis::build(h.n_so(), h.occ.size(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(residual_oracle(h, t, basis));
}
BENCHMARK(BM_ResidualOracle)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
