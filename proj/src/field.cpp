#include "dgpe/field.hpp"

#include <cmath>
#include <string>

#include "dgpe/errors.hpp"
#include "dgpe/reductions.hpp"

namespace dgpe {

void check_finite(const Field& f, const char* what) {
  bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
  for (std::int64_t i = 0; i < f.size(); ++i) {
    const cplx v = f[i];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) bad = true;
  }
  if (bad)
    throw NumericalHealthError(std::string(what) + ": non-finite samples");
}

double max_abs(const Field& f) {
  return det_max(std::size_t(f.size()), [&](std::size_t i) {
    return std::abs(f[std::int64_t(i)]);
  });
}

}  // namespace dgpe
