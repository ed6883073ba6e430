#pragma once

#include "dgpe/field.hpp"

namespace dgpe {

// Continuum-normalized transforms on the periodic box.
//
//   to_frequency:  u_hat(xi_k) = h^3 * sum_j u(x_j) e^{-i x_j . xi_k}
//   to_physical:   u(x_j) = (8 L^3)^{-1} * sum_k u_hat(xi_k) e^{+i x_j . xi_k}
//
// With x_j = -L + j h and xi_k = pi k / L this reduces to the standard DFT up
// to the scale h^3 and a (-1)^(k1+k2+k3) phase, both folded in here.  Parseval
// holds exactly: h^3 sum_j f g* = (8 L^3)^{-1} sum_k f_hat g_hat*.
//
// The 3D transform is executed as three axis passes of independent 1D FFTs
// parallelized over lines, so results are bitwise independent of the OpenMP
// thread count.
void to_frequency_inplace(Field& f);
void to_physical_inplace(Field& f);

Field to_frequency(const Field& f);
Field to_physical(const Field& f);

namespace ref {
// Serial reference paths, kept for verification and benchmarking.
void forward_serial(Field& f);   // same normalization as to_frequency_inplace
void backward_serial(Field& f);  // same normalization as to_physical_inplace
}  // namespace ref

}  // namespace dgpe
