#pragma once

#include <cstdint>
#include <span>

namespace qtraj {

/// log(n!). Exact integer factorials for n <= 20, log-gamma above.
double log_factorial(std::int64_t n);

/// log(n!!) with the conventions 0!! = (-1)!! = 1.
double log_double_factorial(std::int64_t n);

/// log(n choose k); -inf outside 0 <= k <= n.
double log_binomial(std::int64_t n, std::int64_t k);

/// log(sum exp(x)) with max shift; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

}  // namespace qtraj
