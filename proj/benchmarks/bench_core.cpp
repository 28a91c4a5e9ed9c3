#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

#include "unigroup/duhamel.hpp"
#include "unigroup/observables.hpp"

namespace {

using namespace unigroup;

Vector random_state(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = cplx(dist(rng), dist(rng));
  return v;
}

struct Setup {
  explicit Setup(int m, int dim = 2)
      : pair(build_grid(dim == 2 ? Domain::box(1.0, 1.0) : Domain::interval(1.0), m)),
        gram(assemble_mass(pair.basis())) {
    kinetic = assemble_kinetic(pair.basis(), gram);
    potential = assemble_potential_galerkin(pair.basis(), gram, [dim](Point q) {
      return q.x * q.x + (dim == 2 ? q.y * q.y : 0.0);
    });
    hamiltonian = operator_sum(kinetic.assembled, potential);
  }
  ProjectionPair pair;
  GramMatrix gram;
  FactoredOperator kinetic;
  ParticularOperator potential;
  ParticularOperator hamiltonian;
};

// benchmark re-invokes each function while calibrating; build fixtures once
const Setup& cached_setup(int m) {
  static std::map<int, std::unique_ptr<Setup>> cache;
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<Setup>(m);
  return *slot;
}

void BM_AssembleMass2d(benchmark::State& state) {
  const NodalBasis basis(build_grid(Domain::box(1.0, 1.0), static_cast<int>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_mass_matrix(basis));
  }
  state.SetLabel("N=" + std::to_string(basis.size()));
}
BENCHMARK(BM_AssembleMass2d)->Arg(1)->Arg(2)->Arg(3);

void BM_GramConstruction(benchmark::State& state) {
  const NodalBasis basis(build_grid(Domain::box(1.0, 1.0), static_cast<int>(state.range(0))));
  const RealMatrix mass = assemble_mass_matrix(basis);
  for (auto _ : state) {
    GramMatrix gram(mass);
    benchmark::DoNotOptimize(gram.eigen_floor());
  }
  state.SetLabel("N=" + std::to_string(basis.size()));
}
BENCHMARK(BM_GramConstruction)->Arg(1)->Arg(2);

void BM_PropagatorBuild(benchmark::State& state) {
  const Setup& setup = cached_setup(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(PadePropagator::build(setup.hamiltonian, 1e-3, 1));
  }
  state.SetLabel("N=" + std::to_string(setup.gram.size()));
}
BENCHMARK(BM_PropagatorBuild)->Arg(1)->Arg(2);

void BM_PropagatorStep(benchmark::State& state) {
  const Setup& setup = cached_setup(static_cast<int>(state.range(0)));
  const PadePropagator prop = PadePropagator::build(setup.hamiltonian, 1e-3, 1);
  Vector psi = random_state(setup.gram.size(), 5);
  for (auto _ : state) {
    psi = prop.step(psi);
    benchmark::DoNotOptimize(psi);
  }
  state.SetLabel("N=" + std::to_string(setup.gram.size()));
}
BENCHMARK(BM_PropagatorStep)->Arg(1)->Arg(2)->Arg(3);

void BM_MNorm(benchmark::State& state) {
  const Setup& setup = cached_setup(static_cast<int>(state.range(0)));
  const Vector psi = random_state(setup.gram.size(), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(setup.gram.norm(psi));
  }
  state.SetLabel("N=" + std::to_string(setup.gram.size()));
}
BENCHMARK(BM_MNorm)->Arg(2)->Arg(3);

void BM_PicardWindow(benchmark::State& state) {
  const Setup& setup = cached_setup(2);
  const Vector psi0 = normalize(setup.gram, random_state(setup.gram.size(), 9));
  const NonlinearTerm v =
      power_law_term(setup.gram, cplx(-1.0, 0.0), 2, 2.0 * setup.gram.norm(psi0));
  const double tau = 0.32 / v.lipschitz_c;
  const QuadratureRule rule = QuadratureRule::trapezoid(8, tau);
  const DiscreteGroup group =
      DiscreteGroup::forward(setup.kinetic.assembled, rule.substep(), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(picard_solve(group, rule, v, psi0, 1e-10, 100));
  }
  state.SetLabel("N=" + std::to_string(setup.gram.size()));
}
BENCHMARK(BM_PicardWindow);

void BM_HermitianExpm(benchmark::State& state) {
  const Setup& setup = cached_setup(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        hermitian_expm(setup.gram, setup.hamiltonian.matrix, 1e-2));
  }
  state.SetLabel("N=" + std::to_string(setup.gram.size()));
}
BENCHMARK(BM_HermitianExpm)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
