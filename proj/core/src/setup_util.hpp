#pragma once

#include <memory>
#include <random>

#include "unigroup/operators.hpp"
#include "unigroup/propagator.hpp"

// Internal helpers shared by the experiment runners and the acceptance suite.
namespace unigroup::detail {

// Grid + gram + oscillator Hamiltonian H1 = H0 + galerkin(x^2 [+ y^2]).
// Heap-allocate (or keep in place): the operators point at the gram member.
struct OscillatorSetup {
  explicit OscillatorSetup(const Domain& dom, int m)
      : pair(build_grid(dom, m)), gram(assemble_mass(pair.basis())) {
    kinetic = assemble_kinetic(pair.basis(), gram);
    const bool two_d = dom.dim == 2;
    potential = assemble_potential_galerkin(pair.basis(), gram, [two_d](Point q) {
      return q.x * q.x + (two_d ? q.y * q.y : 0.0);
    });
    hamiltonian = operator_sum(kinetic.assembled, potential);
  }

  OscillatorSetup(const OscillatorSetup&) = delete;
  OscillatorSetup& operator=(const OscillatorSetup&) = delete;

  ProjectionPair pair;
  GramMatrix gram;
  FactoredOperator kinetic;
  ParticularOperator potential;
  ParticularOperator hamiltonian;
};

// tau = 1 makes h_tau the M-operator norm of the Hamiltonian.
inline double operator_scale_norm(const OscillatorSetup& s) {
  return PadePropagator::build(s.hamiltonian, 1.0, 1).h_tau();
}

inline Vector random_state(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = cplx(dist(rng), dist(rng));
  return v;
}

inline RealMatrix random_spd(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  RealMatrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = dist(rng);
  return a.transpose() * a + static_cast<double>(n) * RealMatrix::Identity(n, n);
}

inline Matrix random_complex(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = cplx(dist(rng), dist(rng));
  return m;
}

inline ParticularOperator random_m_self_adjoint(const GramMatrix& gram, unsigned seed) {
  Matrix b = random_complex(gram.size(), seed);
  b = (0.5 * (b + b.adjoint().eval())).eval();
  return make_operator(gram, gram.square_root_inverse().cast<cplx>() * b *
                                 gram.square_root().cast<cplx>());
}

}  // namespace unigroup::detail
