#include "qtraj/oracles.hpp"

#include "qtraj/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace qtraj::oracle {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// pieces are extended until the integrand drops this far (in log) below the peak
constexpr double kTailDepth = 80.0;

struct Peak {
    double x = 0.0;
    double value = kNegInf;
};

/// Maximum of a function that is log-concave on the half-line selected by `side`
/// (+1: x > 0, -1: x < 0), restricted to [lo, hi].
Peak find_peak(const std::function<double(double)>& f, int side, double lo, double hi) {
    Peak best;
    double best_x = 0.0;
    int best_k = 0;
    bool found = false;
    for (int k = -30; k <= 60; ++k) {
        const double x = side * std::ldexp(1.0, k);
        if (x < lo || x > hi) continue;
        const double v = f(x);
        if (!found || v > best.value) {
            best = {x, v};
            best_x = x;
            best_k = k;
            found = true;
        }
    }
    if (!found || best.value == kNegInf) return {0.0, kNegInf};
    double a = side * std::ldexp(1.0, best_k - 1);
    double b = side * std::ldexp(1.0, best_k + 1);
    if (best_k == -30) a = 0.0;
    if (a > b) std::swap(a, b);
    a = std::max(a, lo);
    b = std::min(b, hi);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(best_x)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    const double v = f(x);
    return v >= best.value ? Peak{x, v} : best;
}

/// Distance from the peak at which f has dropped by `drop`, searching in direction dir.
double drop_distance(const std::function<double(double)>& f, const Peak& peak, int dir,
                     double drop, double limit) {
    double step = 1e-12 * std::max(1.0, std::abs(peak.x));
    const double target = peak.value - drop;
    while (step < limit && f(peak.x + dir * step) > target) step *= 2.0;
    if (step >= limit) return limit;
    double inner = step / 2.0;
    double outer = step;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (inner + outer);
        if (f(peak.x + dir * mid) > target) inner = mid;
        else outer = mid;
    }
    return outer;
}

}  // namespace

SignedLog integrate_log(const std::function<double(double)>& log_f,
                        const std::function<int(double)>& sign, double lo, double hi) {
    if (!(lo < hi)) throw ValidationError("integrate_log: empty interval");
    std::vector<Peak> peaks;
    for (int side : {-1, 1}) {
        const Peak p = find_peak(log_f, side, lo, hi);
        if (p.value > kNegInf) peaks.push_back(p);
    }
    if (peaks.empty()) return {kNegInf, 0};
    double top = kNegInf;
    for (const auto& p : peaks) top = std::max(top, p.value);

    std::vector<double> cuts;
    for (const auto& p : peaks) {
        if (p.value < top - kTailDepth) continue;
        cuts.push_back(p.x);
        for (int dir : {-1, 1}) {
            const double room = dir > 0 ? hi - p.x : p.x - lo;
            if (room <= 0.0) continue;
            const double limit = std::isfinite(room) ? room : 1e300;
            const double width = drop_distance(log_f, p, dir, 1.0, limit);
            const double extent = drop_distance(log_f, p, dir, p.value - top + kTailDepth, limit);
            for (double d = width; d < extent; d *= 2.0) cuts.push_back(p.x + dir * d);
            cuts.push_back(p.x + dir * extent);
        }
    }
    if (lo < 0.0 && hi > 0.0) cuts.push_back(0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                              [&](double x) { return x < lo || x > hi; }),
               cuts.end());

    auto integrand = [&](double x) {
        const double v = log_f(x);
        if (v == kNegInf) return 0.0;
        const int s = sign ? sign(x) : 1;
        return s * std::exp(v - top);
    };
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double err = 0.0;
        total += gauss_kronrod<double, 61>::integrate(integrand, cuts[i], cuts[i + 1], 12, 1e-13,
                                                      &err);
    }
    if (total == 0.0) return {kNegInf, 0};
    return {top + std::log(std::abs(total)), total > 0.0 ? 1 : -1};
}

double half_line_moment(std::int64_t n, double p) {
    const double dn = static_cast<double>(n);
    auto log_f = [=](double x) {
        if (x <= 0.0) return n == 0 ? -p * x * x : kNegInf;
        return dn * std::log(x) - p * x * x;
    };
    return integrate_log(log_f, {}, 0.0, std::numeric_limits<double>::infinity()).value();
}

SignedLog full_line_tilted(std::int64_t n, double p, double q) {
    const double dn = static_cast<double>(n);
    auto log_f = [=](double x) {
        const double power = n == 0 ? 0.0 : (x == 0.0 ? kNegInf : dn * std::log(std::abs(x)));
        return power - p * x * x + 2.0 * q * x;
    };
    auto sign = [=](double x) { return (x < 0.0 && n % 2 != 0) ? -1 : 1; };
    constexpr double inf = std::numeric_limits<double>::infinity();
    return integrate_log(log_f, sign, -inf, inf);
}

namespace {

std::function<double(double)> conditional_log_density(std::int64_t power, double tau, double z0,
                                                      double sigma) {
    const double dn = static_cast<double>(power);
    const double two_var = 2.0 * sigma * sigma;
    return [=](double z) {
        const double p = power == 0 ? 0.0 : (z == 0.0 ? kNegInf : dn * std::log(std::abs(z)));
        return p - z * z * tau - (z - z0) * (z - z0) / two_var;
    };
}

}  // namespace

double minimum_rate_ratio(std::int64_t m, double tau, double sigma) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto num = integrate_log(conditional_log_density(2 * m + 2, tau, 0.0, sigma), {}, -inf, inf);
    const auto den = integrate_log(conditional_log_density(2 * m, tau, 0.0, sigma), {}, -inf, inf);
    return std::exp(num.log_abs - den.log_abs);
}

double maximum_rate_ratio(std::int64_t m, double tau, double z0, double sigma, bool half_line) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double lo = half_line ? 0.0 : -inf;
    const auto num = integrate_log(conditional_log_density(2 * m + 2, tau, z0, sigma), {}, lo, inf);
    const auto den = integrate_log(conditional_log_density(2 * m, tau, z0, sigma), {}, lo, inf);
    return std::exp(num.log_abs - den.log_abs);
}

double conditional_moment(std::int64_t m, double tau, double z0, double sigma, int order) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto base = conditional_log_density(2 * m, tau, z0, sigma);
    const double dk = static_cast<double>(order);
    auto weighted = [=](double z) {
        if (order == 0) return base(z);
        return z == 0.0 ? kNegInf : base(z) + dk * std::log(std::abs(z));
    };
    auto sign = [=](double z) { return (z < 0.0 && order % 2 != 0) ? -1 : 1; };
    const auto num = integrate_log(weighted, sign, -inf, inf);
    const auto den = integrate_log(base, {}, -inf, inf);
    if (num.sign == 0) return 0.0;
    return num.sign * std::exp(num.log_abs - den.log_abs);
}

std::complex<double> cavity_steady_state(const CavityParams& params, std::complex<double> d10,
                                         std::complex<double> d11) {
    const std::complex<double> i{0.0, 1.0};
    const std::complex<double> source = params.eta - i * params.U10() * params.a0 * d10;
    const std::complex<double> decay = i * (params.U11() * d11 - params.delta_p) + params.kappa;
    auto rhs = [&](std::complex<double> a) { return source - decay * a; };
    const double dt = 0.02 / std::abs(decay);
    const double t_end = 60.0 / params.kappa;
    const auto steps = static_cast<std::int64_t>(std::ceil(t_end / dt));
    std::complex<double> a = 0.0;
    for (std::int64_t s = 0; s < steps; ++s) {
        const auto k1 = rhs(a);
        const auto k2 = rhs(a + 0.5 * dt * k1);
        const auto k3 = rhs(a + 0.5 * dt * k2);
        const auto k4 = rhs(a + dt * k3);
        a += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return a;
}

std::complex<double> coherent_overlap_series(double alpha_abs, double phi, int n_max) {
    using boost::multiprecision::cpp_bin_float_50;
    const cpp_bin_float_50 n_mean = cpp_bin_float_50(alpha_abs) * alpha_abs;
    const cpp_bin_float_50 two_phi = cpp_bin_float_50(phi) * 2;
    cpp_bin_float_50 term = exp(-n_mean);  // |alpha|^{2n}/n! e^{-|alpha|^2} at n = 0
    cpp_bin_float_50 re = 0;
    cpp_bin_float_50 im = 0;
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) term = term * n_mean / n;
        re += term * cos(two_phi * n);
        im -= term * sin(two_phi * n);
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

double rational_rate_sum_ratio(std::int64_t m, double b) {
    using boost::multiprecision::cpp_int;
    using boost::multiprecision::cpp_rational;
    const cpp_rational br(b);
    auto factorial = [](std::int64_t n) {
        cpp_int f = 1;
        for (std::int64_t k = 2; k <= n; ++k) f *= k;
        return f;
    };
    auto sum = [&](std::int64_t j) {
        cpp_rational s = 0;
        cpp_rational bk = 1;
        for (std::int64_t k = 0; k <= j; ++k) {
            s += bk / cpp_rational(factorial(2 * j - 2 * k) * factorial(k));
            bk *= br;
        }
        return s;
    };
    const cpp_rational ratio = cpp_rational((2 * m + 1) * (2 * m + 2)) * sum(m + 1) / sum(m);
    return static_cast<double>(ratio);
}

}  // namespace qtraj::oracle
