// Timing comparison between the OpenMP kernels and the serial reference
// implementations they are tested against. Run with different
// OMP_NUM_THREADS to see scaling; results of both paths are also compared
// so a speedup never comes at the price of a wrong answer.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "dgpe/fft.hpp"
#include "dgpe/field.hpp"
#include "dgpe/multipliers.hpp"
#include "dgpe/reductions.hpp"
#include "dgpe/reference.hpp"

using namespace dgpe;

namespace {

Field random_field(const GridSpec& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field u(g, Space::physical);
  for (std::int64_t i = 0; i < u.size(); ++i) u[i] = {dist(rng), dist(rng)};
  return u;
}

template <class F>
double time_best_of(int reps, F&& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = omp_get_wtime();
    body();
    const double t1 = omp_get_wtime();
    if (t1 - t0 < best) best = t1 - t0;
  }
  return best;
}

double rel_diff(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    num += std::abs(a[i] - b[i]);
    den += std::abs(b[i]);
  }
  return num / den;
}

}  // namespace

int main() {
  const int n = 64;
  const GridSpec g = make_grid(n, 8.0);
  std::printf("grid %d^3, OMP threads available: %d\n\n", n,
              omp_get_max_threads());

  const Field u = random_field(g, 1234);

  // Forward transform.
  Field a = u, b = u;
  const double t_fft_par = time_best_of(3, [&] {
    a = u;
    to_frequency_inplace(a);
  });
  const double t_fft_ser = time_best_of(3, [&] {
    b = u;
    ref::forward_serial(b);
  });
  std::printf("forward transform   parallel %8.2f ms   serial %8.2f ms   x%.2f (rel diff %.2e)\n",
              1e3 * t_fft_par, 1e3 * t_fft_ser, t_fft_ser / t_fft_par,
              rel_diff(a, b));

  // Multiplier application (two transforms plus the pointwise product).
  const MultiplierField K = dipolar_multiplier(g);
  Field pa = u, pb = u;
  const double t_mul_par = time_best_of(3, [&] {
    pa = u;
    pa = apply_multiplier(pa, K);
  });
  const double t_mul_ser = time_best_of(3, [&] {
    pb = u;
    pb = ref::apply_multiplier_serial(pb, K);
  });
  std::printf("multiplier apply    parallel %8.2f ms   serial %8.2f ms   x%.2f (rel diff %.2e)\n",
              1e3 * t_mul_par, 1e3 * t_mul_ser, t_mul_ser / t_mul_par,
              rel_diff(pa, pb));

  // Reduction.
  const std::size_t m = std::size_t(1) << 24;
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> xs(m);
  for (auto& x : xs) x = dist(rng);
  double s_par = 0.0, s_ser = 0.0;
  const double t_red_par =
      time_best_of(5, [&] { s_par = det_sum(m, [&](std::size_t i) { return xs[i]; }); });
  const double t_red_ser =
      time_best_of(5, [&] { s_ser = ref::sum_serial(xs.data(), m); });
  std::printf("sum of %zu doubles  parallel %8.2f ms   serial %8.2f ms   x%.2f (diff %.2e)\n",
              m, 1e3 * t_red_par, 1e3 * t_red_ser, t_red_ser / t_red_par,
              std::abs(s_par - s_ser));
  return 0;
}
