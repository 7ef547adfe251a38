#pragma once

// Brute-force references for the closed forms. Nothing here calls into the engines or
// the moment identities; each routine evaluates the defining sum or integral directly.

#include "qtraj/gaussian_integrals.hpp"
#include "qtraj/model.hpp"

#include <complex>
#include <cstdint>
#include <functional>

namespace qtraj::oracle {

/// Integral of sign(x) * exp(log_f(x)) over [lo, hi] (either bound may be infinite) by
/// adaptive Gauss-Kronrod on pieces placed around the peaks of log_f. `sign` may be
/// empty for a positive integrand.
SignedLog integrate_log(const std::function<double(double)>& log_f,
                        const std::function<int(double)>& sign, double lo, double hi);

/// Integral of x^n exp(-p x^2) over [0, inf).
double half_line_moment(std::int64_t n, double p);

/// Integral of x^n exp(-p x^2 + 2 q x) over the real line.
SignedLog full_line_tilted(std::int64_t n, double p, double q);

/// Ratio of the integrals of z^{2m+2} and z^{2m} against exp(-z^2 tau) exp(-z^2/(2 sigma^2))
/// over the real line: the minimum-mode jump rate per unit tau.
double minimum_rate_ratio(std::int64_t m, double tau, double sigma);

/// Same ratio against exp(-z^2 tau) exp(-(z - z0)^2 / (2 sigma^2)) for the maximum mode,
/// over the full line (`half_line` = false) or over [0, inf).
double maximum_rate_ratio(std::int64_t m, double tau, double z0, double sigma,
                          bool half_line = false);

/// Conditional <z^order> of the continuous density z^{2m} exp(-z^2 tau) g(z), with g the
/// centred (minimum) or shifted (maximum) Gaussian.
double conditional_moment(std::int64_t m, double tau, double z0, double sigma, int order);

/// Steady state of d alpha/dt = eta - i U10 a0 D10 - (i (U11 D11 - delta_p) + kappa) alpha,
/// integrated with RK4 from alpha = 0.
std::complex<double> cavity_steady_state(const CavityParams& params, std::complex<double> d10,
                                         std::complex<double> d11);

/// Partial sum of sum_n |alpha|^{2n}/n! e^{-|alpha|^2} e^{-2 i n phi} for n <= n_max, in
/// 50-digit arithmetic.
std::complex<double> coherent_overlap_series(double alpha_abs, double phi, int n_max);

/// (2m+1)(2m+2) S_{m+1}(b) / S_m(b) in exact rational arithmetic; b is taken as the exact
/// binary value of the double.
double rational_rate_sum_ratio(std::int64_t m, double b);

}  // namespace qtraj::oracle
