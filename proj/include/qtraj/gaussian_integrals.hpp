#pragma once

#include <cstdint>

namespace qtraj {

/// A real number stored as sign * exp(log_abs).
struct SignedLog {
    double log_abs = 0.0;
    int sign = 1;

    double value() const;
};

/// Integral of x^{2n} exp(-p x^2) over [0, inf): (2n-1)!! / (2 (2p)^n) sqrt(pi/p).
double gauss_even_moment(std::int64_t n, double p);
double log_gauss_even_moment(std::int64_t n, double p);

/// Integral of x^{2n+1} exp(-p x^2) over [0, inf): n! / (2 p^{n+1}).
double gauss_odd_moment(std::int64_t n, double p);
double log_gauss_odd_moment(std::int64_t n, double p);

/// log of sum_{k=0}^{floor(n/2)} b^k / ((n-2k)! k!) for b > 0.
double log_tilted_sum(std::int64_t n, double b);

/// Integral of x^n exp(-p x^2 + 2 q x) over the real line with the Gaussian factor
/// exp(q^2/p) sqrt(pi/p) divided out. This is the part that survives in ratios.
SignedLog reduced_tilted_moment(std::int64_t n, double p, double q);

/// Integral of x^n exp(-p x^2 + 2 q x) over the real line, full value (may overflow for
/// large q^2/p; use `log_tilted_gauss_moment` there).
double tilted_gauss_moment(std::int64_t n, double p, double q);
SignedLog log_tilted_gauss_moment(std::int64_t n, double p, double q);

}  // namespace qtraj
