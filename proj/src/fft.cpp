#include "dgpe/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

#include "dgpe/errors.hpp"

namespace dgpe {

namespace {

// One pair of 1D in-place plans per grid size.  Plan creation is not
// thread-safe and is mutex-guarded; execution through fftw_execute_dft on
// caller-owned buffers is.  FFTW_UNALIGNED removes alignment constraints so
// any std::vector buffer is valid; FFTW_ESTIMATE keeps planning deterministic.
struct LinePlans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit LinePlans(int n) {
    std::vector<cplx> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, flags);
    bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, flags);
    if (!fwd || !bwd) throw NumericalHealthError("fftw planning failed");
  }
  ~LinePlans() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
};

const LinePlans& line_plans(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<LinePlans>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<LinePlans>(n);
  return *slot;
}

inline fftw_complex* fc(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

// Applies the plan along every line of the given axis.  Axis 3 lines are
// contiguous and transformed in place; axes 1 and 2 are gathered through a
// per-thread buffer.  Work is split over lines, so output is bitwise
// identical for any thread count.
void transform_axis(cplx* data, int n, int axis, fftw_plan plan) {
  const std::int64_t n64 = n;
  const std::int64_t nlines = n64 * n64;
  if (axis == 3) {
#pragma omp parallel for schedule(static)
    for (std::int64_t line = 0; line < nlines; ++line) {
      cplx* row = data + line * n64;
      fftw_execute_dft(plan, fc(row), fc(row));
    }
    return;
  }
  const std::int64_t stride = (axis == 2) ? n64 : n64 * n64;
#pragma omp parallel
  {
    std::vector<cplx> buf(n);
#pragma omp for schedule(static)
    for (std::int64_t line = 0; line < nlines; ++line) {
      // axis 2: line = (i1, i3); axis 1: line = (i2, i3)
      const std::int64_t a = line / n64;
      const std::int64_t b = line % n64;
      const std::int64_t start =
          (axis == 2) ? a * n64 * n64 + b : a * n64 + b;
      for (int j = 0; j < n; ++j) buf[j] = data[start + j * stride];
      fftw_execute_dft(plan, fc(buf.data()), fc(buf.data()));
      for (int j = 0; j < n; ++j) data[start + j * stride] = buf[j];
    }
  }
}

// Multiplies by s * (-1)^(i1+i2+i3).  The sign pattern is the phase relating
// the DFT with index origin at the box corner to the centered transform; it
// is identical in both spaces because n is even.
void scale_with_parity(cplx* data, int n, double s) {
  const std::int64_t n64 = n;
#pragma omp parallel for schedule(static)
  for (std::int64_t i1 = 0; i1 < n64; ++i1) {
    for (std::int64_t i2 = 0; i2 < n64; ++i2) {
      cplx* row = data + (i1 * n64 + i2) * n64;
      const double s0 = ((i1 + i2) & 1) ? -s : s;
      for (int i3 = 0; i3 < n; i3 += 2) {
        row[i3] *= s0;
        row[i3 + 1] *= -s0;
      }
    }
  }
}

}  // namespace

void to_frequency_inplace(Field& f) {
  if (f.space() != Space::physical)
    throw ShapeError("to_frequency: field already in frequency space");
  const int n = f.grid().n;
  const auto& plans = line_plans(n);
  transform_axis(f.data(), n, 3, plans.fwd);
  transform_axis(f.data(), n, 2, plans.fwd);
  transform_axis(f.data(), n, 1, plans.fwd);
  scale_with_parity(f.data(), n, f.grid().cell_volume());
  f.space_tag() = Space::frequency;
}

void to_physical_inplace(Field& f) {
  if (f.space() != Space::frequency)
    throw ShapeError("to_physical: field already in physical space");
  const int n = f.grid().n;
  const auto& plans = line_plans(n);
  scale_with_parity(f.data(), n, 1.0 / f.grid().box_volume());
  transform_axis(f.data(), n, 3, plans.bwd);
  transform_axis(f.data(), n, 2, plans.bwd);
  transform_axis(f.data(), n, 1, plans.bwd);
  f.space_tag() = Space::physical;
}

Field to_frequency(const Field& f) {
  Field out = f;
  to_frequency_inplace(out);
  return out;
}

Field to_physical(const Field& f) {
  Field out = f;
  to_physical_inplace(out);
  return out;
}

namespace ref {

namespace {

// Whole-cube serial plans using FFTW's own 3D decomposition; an independent
// execution path against the line-parallel kernels above.
struct CubePlans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit CubePlans(int n) {
    std::vector<cplx> scratch(std::size_t(n) * n * n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd = fftw_plan_dft_3d(n, n, n, p, p, FFTW_FORWARD, flags);
    bwd = fftw_plan_dft_3d(n, n, n, p, p, FFTW_BACKWARD, flags);
    if (!fwd || !bwd) throw NumericalHealthError("fftw planning failed");
  }
  ~CubePlans() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
};

const CubePlans& cube_plans(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<CubePlans>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<CubePlans>(n);
  return *slot;
}

void scale_with_parity_serial(cplx* data, int n, double s) {
  std::int64_t idx = 0;
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3, ++idx)
        data[idx] *= ((i1 + i2 + i3) & 1) ? -s : s;
}

}  // namespace

void forward_serial(Field& f) {
  if (f.space() != Space::physical)
    throw ShapeError("forward_serial: field already in frequency space");
  const auto& plans = cube_plans(f.grid().n);
  fftw_execute_dft(plans.fwd, fc(f.data()), fc(f.data()));
  scale_with_parity_serial(f.data(), f.grid().n, f.grid().cell_volume());
  f.space_tag() = Space::frequency;
}

void backward_serial(Field& f) {
  if (f.space() != Space::frequency)
    throw ShapeError("backward_serial: field already in physical space");
  scale_with_parity_serial(f.data(), f.grid().n, 1.0 / f.grid().box_volume());
  const auto& plans = cube_plans(f.grid().n);
  fftw_execute_dft(plans.bwd, fc(f.data()), fc(f.data()));
  f.space_tag() = Space::physical;
}

}  // namespace ref

}  // namespace dgpe
