#include "ehrelay/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ehrelay::specfun {
namespace {

using Real = long double;

constexpr Real kEuler = 0.577215664901532860606512090082402431L;
constexpr Real kEps = std::numeric_limits<Real>::epsilon();
constexpr int kMaxTerms = 10000;

struct OrderZeroOne {
  Real k0;   // K_0(x)
  Real xk1;  // x K_1(x)
};

// Ascending series (x <= 2), written in terms of t = x^2 / 4.
OrderZeroOne series_k01(Real x) {
  const Real t = 0.25L * x * x;
  const Real log_half = std::log(0.5L * x);

  // K_0 = -(ln(x/2) + gamma) I_0 + sum_{k>=1} H_k t^k / (k!)^2
  Real term0 = 1;  // t^k / (k!)^2
  Real i0 = 1;
  Real tail0 = 0;
  Real harmonic = 0;
  // x K_1 = 1 + x ln(x/2) I_1
  //           - t sum_{k>=0} (psi(k+1) + psi(k+2)) t^k / (k! (k+1)!)
  Real term1 = 1;  // t^k / (k! (k+1)!)
  Real i1_sum = 1;
  Real psi_sum = (-kEuler) + (1 - kEuler);
  Real tail1 = psi_sum;
  for (int k = 1; k < kMaxTerms; ++k) {
    term0 *= t / (Real(k) * Real(k));
    term1 *= t / (Real(k) * Real(k + 1));
    harmonic += Real(1) / Real(k);
    i0 += term0;
    tail0 += harmonic * term0;
    i1_sum += term1;
    // psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
    psi_sum = 2 * harmonic + Real(1) / Real(k + 1) - 2 * kEuler;
    tail1 += psi_sum * term1;
    // every partial sum here is O(1) for x <= 2
    if (term0 * (1 + harmonic) < 1e-3L * kEps && term1 * (2 + psi_sum) < 1e-3L * kEps) break;
  }
  const Real k0 = -(log_half + kEuler) * i0 + tail0;
  // x I_1(x) = 2 t sum t^k / (k! (k+1)!)
  const Real xk1 = 1 + log_half * 2 * t * i1_sum - t * tail1;
  return {k0, xk1};
}

// Steed's continued fraction (Temme's CF2) for x > 2, order zero.
OrderZeroOne continued_fraction_k01(Real x) {
  constexpr Real a1 = 0.25L;
  Real b = 2 * (1 + x);
  Real d = 1 / b;
  Real h = d;
  Real delh = d;
  Real q1 = 0;
  Real q2 = 1;
  Real q = a1;
  Real c = a1;
  Real a = -a1;
  Real s = 1 + q * delh;
  for (int i = 1; i < kMaxTerms; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1);
    const Real qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2;
    d = 1 / (b + a * d);
    delh = (b * d - 1) * delh;
    h += delh;
    const Real dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h *= a1;
  const Real k0 = std::sqrt(std::numbers::pi_v<Real> / (2 * x)) * std::exp(-x) / s;
  return {k0, k0 * (x + 0.5L - h)};
}

OrderZeroOne order_zero_one(Real x) {
  return x <= 2 ? series_k01(x) : continued_fraction_k01(x);
}

void check_order(int n) {
  if (n < 0 || n > kMaxOrder)
    throw std::domain_error("bessel order out of range: " + std::to_string(n));
}

}  // namespace

long double scaled_bessel_k(int n, long double x) {
  check_order(n);
  if (!(x > 0)) throw std::domain_error("bessel argument must be positive");
  const auto [k0, xk1] = order_zero_one(x);
  if (n == 0) return k0;
  const Real x2 = x * x;
  Real prev = k0;
  Real cur = xk1;
  for (int k = 1; k < n; ++k) {
    const Real next = x2 * prev + 2 * k * cur;
    prev = cur;
    cur = next;
  }
  return cur;
}

double bessel_k(int n, double x) {
  check_order(n);
  if (!(x > 0)) throw std::domain_error("bessel argument must be positive");
  const Real scaled = scaled_bessel_k(n, x);
  return static_cast<double>(scaled / std::pow(static_cast<Real>(x), n));
}

long double bessel_kernel(int n, long double z) {
  if (n < 1) throw std::domain_error("bessel kernel needs order >= 1");
  if (z < 0) throw std::domain_error("bessel kernel argument must be nonnegative");
  if (z == 0) return std::tgamma(static_cast<Real>(n));
  const Real x = 2 * std::sqrt(z);
  return std::ldexp(scaled_bessel_k(n, x), 1 - n);
}

double xk_small_arg(int n, double x) {
  if (n < 1) throw std::domain_error("small-argument expansion needs order >= 1");
  if (!(x > 0)) throw std::domain_error("small-argument expansion needs x > 0");
  const double log_half = std::log(0.5 * x);
  if (n == 1) return 1.0 + 0.5 * x * x * log_half;

  double sum = 0.0;
  double x2l = 1.0;
  for (int l = 0; l < n; ++l) {
    const double sign = (l % 2 == 0) ? 1.0 : -1.0;
    sum += sign * std::tgamma(n - l) / std::tgamma(l + 1) * x2l * std::ldexp(1.0, n - 2 * l);
    x2l *= x * x;
  }
  // x2l == x^{2n} here
  const double q = ((n + 1) % 2 == 0 ? 1.0 : -1.0) * log_half /
                   (std::ldexp(1.0, n) * std::tgamma(n + 1));
  return 0.5 * sum + x2l * q;
}

}  // namespace ehrelay::specfun
