#pragma once

#include "dgpe/field.hpp"
#include "dgpe/multipliers.hpp"

namespace dgpe::ref {

// Serial counterparts of the parallel kernels, kept as the verification and
// benchmarking baseline (the serial FFT paths live in fft.hpp).

// Plain left-to-right accumulation.
double sum_serial(const double* x, std::size_t n);

// Direct separable DFT (matrix multiply per axis, O(n^4)); no FFTW involved.
// Same normalization as to_frequency.  Intended for small grids.
Field forward_direct(const Field& f);

Field apply_multiplier_serial(const Field& f, const MultiplierField& m);

}  // namespace dgpe::ref
