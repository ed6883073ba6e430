#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace dgpe {

// Adaptive quadrature on [a, b]. Wraps GSL QAG (61-point Gauss-Kronrod).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double epsabs = 1e-12, double epsrel = 1e-10);

// Adaptive quadrature on [a, +inf).
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double epsabs = 1e-12, double epsrel = 1e-10);

// Fixed-order Gauss-Legendre on a single panel. Deterministic cost; used
// where the integrand is smooth and an error estimate is not wanted.
double gauss_legendre(const std::function<double(double)>& f, double a,
                      double b, int order);

// The (node, weight) pairs of the same rule, for callers that reuse one node
// set across many integrands.
std::vector<std::pair<double, double>> gauss_legendre_nodes(int order,
                                                            double a, double b);

}  // namespace dgpe
