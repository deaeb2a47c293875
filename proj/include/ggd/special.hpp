#pragma once

// Special functions used throughout the estimators and tests.
//
// Digamma, trigamma and log-gamma shift the argument upward with their
// recurrences and then sum an asymptotic (Stirling-type) series. The
// regularized incomplete gamma and beta functions split between a power
// series and a modified-Lentz continued fraction. All routines throw
// ggd::InvalidArgument outside their domain.

namespace ggd {

double ln_gamma(double z);
double digamma(double z);
double trigamma(double z);

/// Regularized lower incomplete gamma P(a, x).
double reg_inc_gamma(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), without cancellation.
double reg_inc_gamma_upper(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

}  // namespace ggd
