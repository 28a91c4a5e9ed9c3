#pragma once

#include <utility>
#include <vector>

#include "unigroup/types.hpp"

namespace unigroup {

// Coefficients c_j = (p+q-j)! p! / ((p+q)! j! (p-j)!) of the Pade numerator
// N_pq(A) = sum_j c_j A^j. Only the diagonal family p == q is supported
// (p in 1..6); the denominator is then D_pp(A) = N_pp(-A).
std::vector<double> pade_coefficients(int p, int q);

// (N_pq(A), D_pq(A)). Throws for p != q or p outside 1..6.
std::pair<Matrix, Matrix> pade_polynomials(int p, int q, const Matrix& a);

// k-th Taylor coefficient of R_pp = D_pp^{-1} N_pp around 0, computed by
// series division. Matches 1/k! for k <= 2p and departs at k = 2p+1.
double pade_taylor_coefficient(int p, int k);

// |1/(2p+1)! - c_{p,2p+1}|: the constant in the one-step error bound
// ||e^{-i tau H} - U|| <= const * h_tau^{2p+1}.
double single_step_bound_constant(int p);

// m^{2p+1}/(2p+1)! * h_tau^{2p+1}: the m-step error bound.
double multi_step_bound(int p, int m_steps, double h_tau);

}  // namespace unigroup
