#include "qtraj/exact_engine.hpp"

#include "qtraj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qtraj {
namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ExactEngine::ExactEngine(AtomNumberDistribution initial, cplx C, double prune_window)
    : dist_(std::move(initial)), C_(C), prune_window_(prune_window) {
    if (!(prune_window_ > 0.0)) throw ValidationError("exact engine: prune window must be > 0");
    renormalize();
}

void ExactEngine::renormalize() {
    auto& logw = dist_.mutable_log_weights();
    const auto& z = dist_.support();
    const double top = logw.empty() ? kNegInf : *std::max_element(logw.begin(), logw.end());
    if (top == kNegInf) throw ContradictionError("exact engine: distribution has no weight");
    double sum = 0.0;
    double sum_z2 = 0.0;
    for (std::size_t i = 0; i < logw.size(); ++i) {
        const double w = std::exp(logw[i] - top);
        const double zi = static_cast<double>(z[i]);
        sum += w;
        sum_z2 += zi * zi * w;
    }
    const double shift = top + std::log(sum);
    for (double& w : logw) w -= shift;
    second_moment_ = sum_z2 / sum;
    dist_.prune(prune_window_);
}

void ExactEngine::apply_count() {
    const auto& z = dist_.support();
    const auto& logw = dist_.log_weights();
    bool possible = false;
    for (std::size_t i = 0; i < z.size() && !possible; ++i) possible = z[i] != 0 && logw[i] > kNegInf;
    if (!possible)
        throw ContradictionError("exact engine: photocount on a state supported only at z = 0");
    auto& w = dist_.mutable_log_weights();
    for (std::size_t i = 0; i < z.size(); ++i) {
        w[i] = z[i] == 0 ? kNegInf : w[i] + 2.0 * std::log(std::abs(static_cast<double>(z[i])));
    }
    ++m_;
    renormalize();
}

void ExactEngine::apply_no_count(double dtau) {
    if (!(dtau >= 0.0)) throw ValidationError("exact engine: negative no-count interval");
    if (dtau == 0.0) return;
    const auto& z = dist_.support();
    auto& w = dist_.mutable_log_weights();
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double zi = static_cast<double>(z[i]);
        w[i] -= zi * zi * dtau;
    }
    tau_ += dtau;
    renormalize();
}

bool ExactEngine::step(double dtau, double eps) {
    if (!(dtau >= 0.0)) throw ValidationError("exact engine: negative step");
    const double p = jump_probability(dtau);
    if (p >= 1.0)
        throw StepSizeError("exact engine: jump probability " + std::to_string(p) +
                                " >= 1, shrink dtau",
                            p);
    const bool counted = p > eps;
    if (counted) apply_count();
    apply_no_count(dtau);
    return counted;
}

AtomNumberDistribution conditional_distribution(const AtomNumberDistribution& initial,
                                                std::int64_t m, double tau) {
    if (m < 0 || tau < 0.0) throw ValidationError("conditional_distribution: m, tau must be >= 0");
    std::vector<double> logw(initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i) {
        const double z = static_cast<double>(initial.support()[i]);
        double w = initial.log_weights()[i] - z * z * tau;
        if (m > 0) w = z == 0.0 ? kNegInf : w + 2.0 * static_cast<double>(m) * std::log(std::abs(z));
        logw[i] = w;
    }
    AtomNumberDistribution out(initial.mode(), initial.support(), std::move(logw));
    out.normalize();
    return out;
}

TrajectoryRecord run_trajectory(const AtomNumberDistribution& initial, cplx C,
                                const StepControl& control, std::uint64_t seed,
                                double prune_window) {
    TrajectoryRecord record;
    record.seed = seed;
    record.engine = "exact";
    ExactEngine engine(initial, C, prune_window);
    UniformStream rng(seed);
    run_steps(engine, control, rng, record);
    return record;
}

}  // namespace qtraj
