#include "qtraj/gaussian_integrals.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qtraj {
namespace {

void require_positive(double p, const char* who) {
    if (!(p > 0.0)) throw ValidationError(std::string(who) + ": p must be > 0");
}

void require_order(std::int64_t n, const char* who) {
    if (n < 0) throw ValidationError(std::string(who) + ": n must be >= 0");
}

}  // namespace

double SignedLog::value() const {
    return sign == 0 ? 0.0 : sign * std::exp(log_abs);
}

double log_gauss_even_moment(std::int64_t n, double p) {
    require_positive(p, "gauss_even_moment");
    require_order(n, "gauss_even_moment");
    const double dn = static_cast<double>(n);
    return log_double_factorial(2 * n - 1) - std::log(2.0) - dn * std::log(2.0 * p) +
           0.5 * std::log(std::numbers::pi / p);
}

double gauss_even_moment(std::int64_t n, double p) {
    return std::exp(log_gauss_even_moment(n, p));
}

double log_gauss_odd_moment(std::int64_t n, double p) {
    require_positive(p, "gauss_odd_moment");
    require_order(n, "gauss_odd_moment");
    return log_factorial(n) - std::log(2.0) - static_cast<double>(n + 1) * std::log(p);
}

double gauss_odd_moment(std::int64_t n, double p) {
    return std::exp(log_gauss_odd_moment(n, p));
}

double log_tilted_sum(std::int64_t n, double b) {
    require_order(n, "log_tilted_sum");
    if (!(b > 0.0)) throw ValidationError("log_tilted_sum: b must be > 0");
    // terms t_k = b^k / ((n-2k)! k!) are log-concave in k; sum outward from the peak
    // with the ratio t_{k+1}/t_k and drop everything below e^-60 of the peak
    constexpr double kCutoff = -60.0;
    const std::int64_t k_max = n / 2;
    const double log_b = std::log(b);
    const auto log_ratio = [&](std::int64_t k) {
        const double u = static_cast<double>(n - 2 * k);
        return log_b + std::log(u) + std::log(u - 1.0) - std::log(static_cast<double>(k + 1));
    };
    const double dn = static_cast<double>(n);
    const double u0 = (std::sqrt(1.0 + 8.0 * b * dn) - 1.0) / (4.0 * b);
    auto k = static_cast<std::int64_t>(std::clamp(0.5 * (dn - u0), 0.0, static_cast<double>(k_max)));
    while (k < k_max && log_ratio(k) > 0.0) ++k;
    while (k > 0 && log_ratio(k - 1) < 0.0) --k;

    const double log_peak = static_cast<double>(k) * log_b - log_factorial(n - 2 * k) -
                            log_factorial(k);
    double sum = 1.0;
    double rel = 0.0;
    for (std::int64_t j = k; j < k_max; ++j) {
        rel += log_ratio(j);
        if (rel < kCutoff) break;
        sum += std::exp(rel);
    }
    rel = 0.0;
    for (std::int64_t j = k - 1; j >= 0; --j) {
        rel -= log_ratio(j);
        if (rel < kCutoff) break;
        sum += std::exp(rel);
    }
    return log_peak + std::log(sum);
}

SignedLog reduced_tilted_moment(std::int64_t n, double p, double q) {
    require_positive(p, "tilted_gauss_moment");
    require_order(n, "tilted_gauss_moment");
    if (q == 0.0) {
        // symmetric Gaussian: odd moments vanish, even ones are twice the half line
        if (n % 2 != 0) return {-std::numeric_limits<double>::infinity(), 0};
        const double full = std::log(2.0) + log_gauss_even_moment(n / 2, p);
        return {full - 0.5 * std::log(std::numbers::pi / p), 1};
    }
    const double ratio = std::abs(q) / p;
    const double b = p / (4.0 * q * q);
    const int sign = (q < 0.0 && n % 2 != 0) ? -1 : 1;
    return {log_factorial(n) + static_cast<double>(n) * std::log(ratio) + log_tilted_sum(n, b),
            sign};
}

SignedLog log_tilted_gauss_moment(std::int64_t n, double p, double q) {
    SignedLog r = reduced_tilted_moment(n, p, q);
    r.log_abs += q * q / p + 0.5 * std::log(std::numbers::pi / p);
    return r;
}

double tilted_gauss_moment(std::int64_t n, double p, double q) {
    return log_tilted_gauss_moment(n, p, q).value();
}

}  // namespace qtraj
