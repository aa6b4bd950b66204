#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace ehrelay {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  bool converged = true;
};

struct QuadratureTolerance {
  double absolute = 1e-8;
  double relative = 1e-8;
  unsigned max_depth = 18;
};

/// Adaptive Gauss-Kronrod (15/31 point) on [lo, hi]; hi may be +inf.
template <typename F>
QuadratureResult integrate(F&& f, double lo, double hi, QuadratureTolerance tol = {}) {
  using boost::math::quadrature::gauss_kronrod;
  QuadratureResult r;
  double l1 = 0.0;
  // Boost stops on error <= relative * L1; the absolute floor only enters the
  // convergence verdict.
  r.value = gauss_kronrod<double, 31>::integrate(f, lo, hi, tol.max_depth, tol.relative,
                                                  &r.error, &l1);
  r.converged = r.error <= std::max(tol.absolute, tol.relative * std::abs(r.value));
  return r;
}

}  // namespace ehrelay
