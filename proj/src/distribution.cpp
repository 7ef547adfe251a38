#include "qtraj/distribution.hpp"

#include "qtraj/csv.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace qtraj {
namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

AtomNumberDistribution::AtomNumberDistribution(DiffractionMode mode,
                                               std::vector<std::int64_t> support,
                                               std::vector<double> log_weights)
    : mode_(mode), support_(std::move(support)), log_weights_(std::move(log_weights)) {
    if (support_.size() != log_weights_.size())
        throw ValidationError("distribution: support and weights differ in length");
    for (std::size_t i = 1; i < support_.size(); ++i) {
        if (support_[i] <= support_[i - 1])
            throw ValidationError("distribution: support must be strictly increasing");
    }
    for (double w : log_weights_) {
        if (std::isnan(w) || w == std::numeric_limits<double>::infinity())
            throw ValidationError("distribution: log-weights must be finite or -inf");
    }
}

double AtomNumberDistribution::normalize() {
    const double lse = log_sum_exp(log_weights_);
    if (lse == kNegInf) throw ContradictionError("distribution: all weights are zero");
    for (double& w : log_weights_) w -= lse;
    return lse;
}

double AtomNumberDistribution::probability(std::size_t index) const {
    return std::exp(log_weights_.at(index));
}

double AtomNumberDistribution::probability_of(std::int64_t z) const {
    const auto it = std::lower_bound(support_.begin(), support_.end(), z);
    if (it == support_.end() || *it != z) return 0.0;
    return probability(static_cast<std::size_t>(it - support_.begin()));
}

std::vector<double> AtomNumberDistribution::probabilities() const {
    std::vector<double> p(log_weights_.size());
    std::transform(log_weights_.begin(), log_weights_.end(), p.begin(),
                   [](double w) { return std::exp(w); });
    return p;
}

void AtomNumberDistribution::prune(double window) {
    if (log_weights_.empty()) return;
    const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
    if (top == kNegInf) return;
    const double cut = top - window;
    std::size_t out = 0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        if (log_weights_[i] >= cut) {
            support_[out] = support_[i];
            log_weights_[out] = log_weights_[i];
            ++out;
        }
    }
    support_.resize(out);
    log_weights_.resize(out);
}

std::size_t AtomNumberDistribution::argmax_positive() const {
    std::size_t best = support_.size();
    double best_w = kNegInf;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        if (support_[i] > 0 && log_weights_[i] > best_w) {
            best_w = log_weights_[i];
            best = i;
        }
    }
    return best;
}

void AtomNumberDistribution::write_csv(std::ostream& out) const {
    out << "z,probability\n";
    for (std::size_t i = 0; i < support_.size(); ++i) {
        out << support_[i] << ',' << format_double(probability(i)) << '\n';
    }
}

AtomNumberDistribution binomial_minimum(const LatticeGeometry& geom) {
    geom.validate(DiffractionMode::minimum);
    const std::int64_t n = geom.atoms;
    const double frac = static_cast<double>(geom.odd_sites) / static_cast<double>(geom.sites);
    std::vector<std::int64_t> support(static_cast<std::size_t>(n + 1));
    std::vector<double> logw(support.size());
    for (std::int64_t k = 0; k <= n; ++k) {
        support[static_cast<std::size_t>(k)] = 2 * k - n;
        logw[static_cast<std::size_t>(k)] = log_binomial(n, k) +
                                            static_cast<double>(k) * std::log(frac) +
                                            static_cast<double>(n - k) * std::log1p(-frac);
    }
    AtomNumberDistribution dist(DiffractionMode::minimum, std::move(support), std::move(logw));
    dist.normalize();
    return dist;
}

AtomNumberDistribution binomial_maximum(const LatticeGeometry& geom) {
    geom.validate(DiffractionMode::maximum);
    const std::int64_t n = geom.atoms;
    const double frac = geom.illuminated_fraction();
    std::vector<std::int64_t> support(static_cast<std::size_t>(n + 1));
    std::vector<double> logw(support.size());
    for (std::int64_t k = 0; k <= n; ++k) {
        support[static_cast<std::size_t>(k)] = k;
        double w = log_binomial(n, k);
        // K = M puts all mass on z = N; avoid 0 * log(0)
        if (k > 0) w += static_cast<double>(k) * std::log(frac);
        if (n - k > 0) w += frac == 1.0 ? kNegInf : static_cast<double>(n - k) * std::log1p(-frac);
        logw[static_cast<std::size_t>(k)] = w;
    }
    AtomNumberDistribution dist(DiffractionMode::maximum, std::move(support), std::move(logw));
    dist.normalize();
    return dist;
}

AtomNumberDistribution superfluid_distribution(DiffractionMode mode,
                                               const LatticeGeometry& geom) {
    return mode == DiffractionMode::minimum ? binomial_minimum(geom) : binomial_maximum(geom);
}

GaussianSpec gaussian_of(DiffractionMode mode, const LatticeGeometry& geom,
                         std::int64_t min_atoms) {
    geom.validate(mode);
    if (geom.atoms < min_atoms)
        throw ValidationError("gaussian_of: N = " + std::to_string(geom.atoms) +
                              " is below the large-N threshold " + std::to_string(min_atoms));
    const double n = static_cast<double>(geom.atoms);
    if (mode == DiffractionMode::minimum) return {0.0, std::sqrt(n)};
    const double f = geom.illuminated_fraction();
    const double sigma = std::sqrt(n * f * (1.0 - f));
    if (!(sigma > 0.0))
        throw ValidationError("gaussian_of: K = M has no number fluctuations (sigma = 0)");
    return {n * f, sigma};
}

AtomNumberDistribution discretized_gaussian(DiffractionMode mode, const LatticeGeometry& geom,
                                            const GaussianSpec& spec) {
    if (!(spec.sigma > 0.0)) throw ValidationError("discretized_gaussian: sigma must be > 0");
    AtomNumberDistribution base = superfluid_distribution(mode, geom);
    std::vector<double> logw(base.size());
    const double inv2var = 1.0 / (2.0 * spec.variance());
    for (std::size_t i = 0; i < base.size(); ++i) {
        const double d = static_cast<double>(base.support()[i]) - spec.z0;
        logw[i] = -d * d * inv2var;
    }
    AtomNumberDistribution dist(mode, base.support(), std::move(logw));
    dist.normalize();
    return dist;
}

double moment(const AtomNumberDistribution& dist, int order) {
    if (order < 0) throw ValidationError("moment: negative order");
    double sum = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double p = dist.probability(i);
        if (p == 0.0) continue;
        sum += std::pow(static_cast<double>(dist.support()[i]), order) * p;
    }
    return sum;
}

double total_variation(const AtomNumberDistribution& a, const AtomNumberDistribution& b) {
    std::map<std::int64_t, double> diff;
    for (std::size_t i = 0; i < a.size(); ++i) diff[a.support()[i]] += a.probability(i);
    for (std::size_t i = 0; i < b.size(); ++i) diff[b.support()[i]] -= b.probability(i);
    double tv = 0.0;
    for (const auto& [z, d] : diff) tv += std::abs(d);
    return 0.5 * tv;
}

}  // namespace qtraj
