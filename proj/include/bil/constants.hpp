#pragma once

// Central calibration constants for the layer-operator stack.
// All sign/factor conventions live here and are locked by tests/test_layer_operator.cpp;
// changing any of them invalidates every certified mode ledger.

namespace bil {

inline constexpr double PI = 3.141592653589793238462643383279502884;
inline constexpr double EULER_GAMMA = 0.577215664901532860606512090082402431;

// Dirichlet-trace jumps operator: N = KERNEL_SIGN * 2 * K, where K is the
// double-layer kernel with the normal taken at the source point q'.
inline constexpr double KERNEL_SIGN = -1.0;

// Interior representation: phi(z) = INTERIOR_FACTOR * sum_j w_j K(z, q_j') u_j,
// calibrated so the Laplace double layer of unit density equals +1 inside.
inline constexpr double INTERIOR_FACTOR = -1.0;

// Nystrom diagonal of the raw kernel K on a smooth edge: -kappa(q)/(4*pi).
inline constexpr double DIAG_CURVATURE_FACTOR = -1.0 / (4.0 * PI);

} // namespace bil
