#pragma once

#include <array>

// 4-point Gauss-Legendre rule on [-1, 1]; exact through degree 7.
namespace unigroup::detail {

constexpr std::array<double, 4> gauss_nodes = {
    -0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
    0.8611363115940526};

constexpr std::array<double, 4> gauss_weights = {
    0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
    0.3478548451374538};

}  // namespace unigroup::detail
