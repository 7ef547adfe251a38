#include "qtraj/special.hpp"

#include "qtraj/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace qtraj {
namespace {

constexpr std::int64_t kExactFactorialLimit = 20;  // 20! < 2^63
constexpr std::int64_t kExactDoubleFactorialLimit = 32;  // 32!! = 2^16 16! < 2^64
constexpr std::int64_t kTableSize = 2048;

const std::array<double, kTableSize>& log_factorial_table() {
    static const std::array<double, kTableSize> table = [] {
        std::array<double, kTableSize> t{};
        std::uint64_t exact = 1;
        for (std::int64_t n = 0; n < kTableSize; ++n) {
            if (n <= kExactFactorialLimit) {
                if (n > 0) exact *= static_cast<std::uint64_t>(n);
                t[static_cast<std::size_t>(n)] = std::log(static_cast<double>(exact));
            } else {
                t[static_cast<std::size_t>(n)] = std::lgamma(static_cast<double>(n) + 1.0);
            }
        }
        return t;
    }();
    return table;
}

}  // namespace

double log_factorial(std::int64_t n) {
    if (n < 0) throw ValidationError("log_factorial: negative argument");
    if (n < kTableSize) return log_factorial_table()[static_cast<std::size_t>(n)];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_double_factorial(std::int64_t n) {
    if (n < -1) throw ValidationError("log_double_factorial: argument below -1");
    if (n <= 0) return 0.0;
    if (n <= kExactDoubleFactorialLimit) {
        std::uint64_t exact = 1;
        for (std::int64_t k = n; k > 1; k -= 2) exact *= static_cast<std::uint64_t>(k);
        return std::log(static_cast<double>(exact));
    }
    const std::int64_t k = n / 2;
    if (n % 2 == 0) {
        // (2k)!! = 2^k k!
        return static_cast<double>(k) * std::log(2.0) + log_factorial(k);
    }
    // (2k+1)!! = (2k+1)! / (2^k k!)
    return log_factorial(n) - static_cast<double>(k) * std::log(2.0) - log_factorial(k);
}

double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_sum_exp(std::span<const double> values) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (values.empty()) return neg_inf;
    const double top = *std::max_element(values.begin(), values.end());
    if (top == neg_inf) return neg_inf;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - top);
    return top + std::log(sum);
}

}  // namespace qtraj
