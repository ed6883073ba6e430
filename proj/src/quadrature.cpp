#include "dgpe/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <memory>
#include <mutex>
#include <string>

#include "dgpe/errors.hpp"

namespace dgpe {
namespace {

// GSL aborts the process by default; switch to error codes exactly once.
void disable_gsl_abort() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

double trampoline(double x, void* params) {
  const auto* f = static_cast<const std::function<double(double)>*>(params);
  return (*f)(x);
}

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const {
    gsl_integration_workspace_free(w);
  }
};

[[noreturn]] void fail(const char* what, int status) {
  throw NumericalHealthError(std::string(what) + ": " + gsl_strerror(status));
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double epsabs, double epsrel) {
  disable_gsl_abort();
  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
      gsl_integration_workspace_alloc(4096));
  gsl_function gf;
  gf.function = &trampoline;
  gf.params = const_cast<std::function<double(double)>*>(&f);
  double result = 0.0, abserr = 0.0;
  const int status =
      gsl_integration_qag(&gf, a, b, epsabs, epsrel, 4096, GSL_INTEG_GAUSS61,
                          ws.get(), &result, &abserr);
  if (status != GSL_SUCCESS) fail("adaptive quadrature failed", status);
  return result;
}

double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double epsabs, double epsrel) {
  disable_gsl_abort();
  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
      gsl_integration_workspace_alloc(4096));
  gsl_function gf;
  gf.function = &trampoline;
  gf.params = const_cast<std::function<double(double)>*>(&f);
  double result = 0.0, abserr = 0.0;
  const int status = gsl_integration_qagiu(&gf, a, epsabs, epsrel, 4096,
                                           ws.get(), &result, &abserr);
  if (status != GSL_SUCCESS) fail("semi-infinite quadrature failed", status);
  return result;
}

double gauss_legendre(const std::function<double(double)>& f, double a,
                      double b, int order) {
  if (order < 1) throw ConfigError("gauss_legendre: order must be positive");
  gsl_integration_glfixed_table* table =
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order));
  if (!table) throw NumericalHealthError("gauss_legendre: table allocation");
  double acc = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(order); ++i) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(a, b, i, &x, &w, table);
    acc += w * f(x);
  }
  gsl_integration_glfixed_table_free(table);
  return acc;
}

std::vector<std::pair<double, double>> gauss_legendre_nodes(int order,
                                                            double a,
                                                            double b) {
  if (order < 1)
    throw ConfigError("gauss_legendre_nodes: order must be positive");
  gsl_integration_glfixed_table* table =
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order));
  if (!table)
    throw NumericalHealthError("gauss_legendre_nodes: table allocation");
  std::vector<std::pair<double, double>> nodes(
      static_cast<std::size_t>(order));
  for (std::size_t i = 0; i < static_cast<std::size_t>(order); ++i) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(a, b, i, &x, &w, table);
    nodes[i] = {x, w};
  }
  gsl_integration_glfixed_table_free(table);
  return nodes;
}

}  // namespace dgpe
