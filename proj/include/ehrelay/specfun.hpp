#pragma once

// Integer-order modified Bessel functions of the second kind.
//
// Every outage expression in this library reduces to the kernel
//     G_n(z) = 2 z^{n/2} K_n(2 sqrt(z)),
// which is the Gamma(n, 1) expectation of exp(-z / u) scaled by (n-1)!.
// The kernel stays finite as z -> 0 (it tends to (n-1)!), so it is evaluated
// from x^n K_n(x) directly rather than from K_n, which diverges there.

namespace ehrelay::specfun {

inline constexpr int kMaxOrder = 64;

/// K_n(x) for 0 <= n <= kMaxOrder and x > 0.
///
/// Relative error is below 1e-9 wherever the result is representable as a
/// double. Results above the double range come back as +inf; for x beyond
/// roughly 745 the value underflows to 0.
///
/// Throws std::domain_error for n outside [0, kMaxOrder] or x <= 0.
double bessel_k(int n, double x);

/// x^n K_n(x), evaluated by the upward recurrence
///     f_{k+1} = x^2 f_{k-1} + 2k f_k
/// seeded with K_0(x) and x K_1(x). All terms are positive, so the
/// recurrence is stable, and no intermediate K_n is ever formed.
long double scaled_bessel_k(int n, long double x);

/// G_n(z) = 2 z^{n/2} K_n(2 sqrt(z)) for n >= 1, z >= 0. G_n(0) = (n-1)!.
long double bessel_kernel(int n, long double z);

/// Truncated small-argument expansion of x^n K_n(x).
///
/// n = 1:  1 + (x^2 / 2) ln(x / 2)
/// n >= 2: (1/2) sum_{l=0}^{n-1} (-1)^l (n-l-1)!/l! x^{2l} / 2^{2l-n}
///         + x^{2n} (-1)^{n+1} ln(x/2) / (2^n n!)
///
/// Intended for x <= 0.5. Throws std::domain_error for n < 1 or x <= 0.
double xk_small_arg(int n, double x);

}  // namespace ehrelay::specfun
