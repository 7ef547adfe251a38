#include "qtraj/full_engine.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qtraj {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

cplx safe_log(cplx v) {
    if (v == cplx{0.0, 0.0}) return {kNegInf, 0.0};
    return std::log(v);
}

void enumerate(std::int64_t remaining, std::size_t site, Configuration& current,
               std::vector<Configuration>& out) {
    if (site + 1 == current.size()) {
        current[site] = remaining;
        out.push_back(current);
        return;
    }
    for (std::int64_t k = remaining; k >= 0; --k) {
        current[site] = k;
        enumerate(remaining - k, site + 1, current, out);
    }
}

}  // namespace

ConfigurationBasis::ConfigurationBasis(std::int64_t atoms, std::int64_t sites, std::int64_t cap)
    : atoms_(atoms), sites_(sites) {
    if (atoms < 0 || sites < 1) throw ValidationError("basis: need N >= 0 and M >= 1");
    const std::int64_t n = count(atoms, sites);
    if (n > cap)
        throw ValidationError("basis: " + std::to_string(n) + " configurations exceed the cap " +
                              std::to_string(cap));
    configs_.reserve(static_cast<std::size_t>(n));
    Configuration current(static_cast<std::size_t>(sites), 0);
    enumerate(atoms, 0, current, configs_);
    for (std::size_t i = 0; i < configs_.size(); ++i) index_.emplace(configs_[i], i);
}

ConfigurationBasis::ConfigurationBasis(std::vector<Configuration> configs)
    : configs_(std::move(configs)) {
    if (!configs_.empty()) {
        sites_ = static_cast<std::int64_t>(configs_.front().size());
        atoms_ = std::accumulate(configs_.front().begin(), configs_.front().end(), std::int64_t{0});
    }
    for (std::size_t i = 0; i < configs_.size(); ++i) {
        const auto& q = configs_[i];
        if (static_cast<std::int64_t>(q.size()) != sites_)
            throw ValidationError("basis: configurations differ in length");
        if (std::any_of(q.begin(), q.end(), [](std::int64_t v) { return v < 0; }))
            throw ValidationError("basis: negative occupation");
        if (!index_.emplace(q, i).second) throw ValidationError("basis: duplicate configuration");
    }
}

std::int64_t ConfigurationBasis::count(std::int64_t atoms, std::int64_t sites) {
    // C(N + M - 1, M - 1) by the multiplicative formula, exact while it fits
    const std::int64_t k = std::min(atoms, sites - 1);
    const std::int64_t n = atoms + sites - 1;
    unsigned __int128 result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        result = result * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
        if (result > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max()))
            return std::numeric_limits<std::int64_t>::max();
    }
    return static_cast<std::int64_t>(result);
}

std::size_t ConfigurationBasis::index_of(const Configuration& q) const {
    const auto it = index_.find(q);
    return it == index_.end() ? configs_.size() : it->second;
}

std::vector<cplx> superfluid_amplitudes(const ConfigurationBasis& basis) {
    std::vector<cplx> c(basis.size());
    const auto n = basis.atoms();
    const double log_m = std::log(static_cast<double>(basis.sites()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        double logp = log_factorial(n) - static_cast<double>(n) * log_m;
        for (auto qj : basis[i]) logp -= log_factorial(qj);
        c[i] = std::exp(0.5 * logp);
    }
    return c;
}

cplx alpha_of(const Configuration& q, const CavityParams& params, const ModeFunctions& modes,
              std::int64_t illuminated) {
    params.validate();
    const cplx i{0.0, 1.0};
    const cplx d10 = coupling_D(q, modes, 1, 0, illuminated);
    const cplx d11 = coupling_D(q, modes, 1, 1, illuminated);
    return (params.eta - i * params.U10() * params.a0 * d10) /
           (i * (params.U11() * d11 - params.delta_p) + params.kappa);
}

cplx phi_of(const Configuration& q, cplx alpha_q, const CavityParams& params,
            const ModeFunctions& modes, std::int64_t illuminated, double t) {
    const cplx i{0.0, 1.0};
    const cplx d10 = coupling_D(q, modes, 1, 0, illuminated);
    const cplx x = params.eta * std::conj(alpha_q) -
                   i * params.U10() * params.a0 * d10 * std::conj(alpha_q);
    return -std::norm(alpha_q) * params.kappa * t + (x - std::conj(x)) * t / 2.0;
}

ConditionalSuperposition::ConditionalSuperposition(ConfigurationBasis basis,
                                                   std::vector<cplx> initial,
                                                   const CavityParams& params,
                                                   const ModeFunctions& modes,
                                                   std::int64_t illuminated)
    : basis_(std::move(basis)), illuminated_(illuminated) {
    if (initial.size() != basis_.size())
        throw ValidationError("superposition: amplitude count does not match the basis");
    if (static_cast<std::int64_t>(modes.sites()) != basis_.sites())
        throw ValidationError("superposition: mode functions do not match the lattice");
    const std::size_t n = basis_.size();
    log_c0_.resize(n);
    alpha_.resize(n);
    phi_rate_.resize(n);
    gamma_log_.assign(n, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        log_c0_[k] = safe_log(initial[k]);
        alpha_[k] = alpha_of(basis_[k], params, modes, illuminated);
        phi_rate_[k] = phi_of(basis_[k], alpha_[k], params, modes, illuminated, 1.0);
    }
    normalize();
}

ConditionalSuperposition ConditionalSuperposition::from_branches(ConfigurationBasis basis,
                                                                 std::vector<cplx> amplitudes,
                                                                 std::vector<cplx> alphas,
                                                                 double kappa) {
    if (amplitudes.size() != basis.size() || alphas.size() != basis.size())
        throw ValidationError("superposition: branch data does not match the basis");
    ConditionalSuperposition s;
    s.basis_ = std::move(basis);
    s.illuminated_ = s.basis_.sites();
    s.alpha_ = std::move(alphas);
    const std::size_t n = s.basis_.size();
    s.log_c0_.resize(n);
    s.phi_rate_.resize(n);
    s.gamma_log_.assign(n, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        s.log_c0_[k] = safe_log(amplitudes[k]);
        s.phi_rate_[k] = -std::norm(s.alpha_[k]) * kappa;
    }
    s.normalize();
    return s;
}

void ConditionalSuperposition::normalize() {
    std::vector<double> log_prob(gamma_log_.size());
    for (std::size_t k = 0; k < gamma_log_.size(); ++k)
        log_prob[k] = 2.0 * (log_c0_[k].real() + gamma_log_[k].real());
    const double lse = log_sum_exp(log_prob);
    if (lse == kNegInf) throw ContradictionError("superposition: state has zero norm");
    for (auto& g : gamma_log_) g -= 0.5 * lse;
}

std::vector<cplx> ConditionalSuperposition::amplitudes() const {
    std::vector<cplx> c(gamma_log_.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        const cplx e = log_c0_[k] + gamma_log_[k];
        c[k] = e.real() == kNegInf ? cplx{0.0, 0.0} : std::exp(e);
    }
    return c;
}

void ConditionalSuperposition::apply_jump() {
    bool possible = false;
    for (std::size_t k = 0; k < alpha_.size() && !possible; ++k) {
        possible = alpha_[k] != cplx{0.0, 0.0} &&
                   (log_c0_[k] + gamma_log_[k]).real() > kNegInf;
    }
    if (!possible) throw ContradictionError("superposition: photocount with no scattered light");
    for (std::size_t k = 0; k < alpha_.size(); ++k) gamma_log_[k] += safe_log(alpha_[k]);
    ++m_;
    normalize();
}

void ConditionalSuperposition::evolve_no_count(double dt) {
    if (!(dt >= 0.0)) throw ValidationError("superposition: negative no-count interval");
    if (dt == 0.0) return;
    for (std::size_t k = 0; k < gamma_log_.size(); ++k) gamma_log_[k] += phi_rate_[k] * dt;
    t_ += dt;
    normalize();
}

double ConditionalSuperposition::photon_expectation_full() const {
    const auto c = amplitudes();
    double sum = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) sum += std::norm(c[k]) * std::norm(alpha_[k]);
    return sum;
}

std::int64_t measured_z(const Configuration& q, DiffractionMode mode, std::int64_t illuminated) {
    std::int64_t z = 0;
    if (mode == DiffractionMode::maximum) {
        for (std::int64_t j = 0; j < illuminated; ++j) z += q[static_cast<std::size_t>(j)];
    } else {
        // site j+1 is odd for even j
        for (std::size_t j = 0; j < q.size(); ++j) z += (j % 2 == 0) ? q[j] : -q[j];
    }
    return z;
}

AtomNumberDistribution ConditionalSuperposition::reduce_to_z(DiffractionMode mode) const {
    const std::int64_t n = basis_.atoms();
    std::vector<std::int64_t> support;
    if (mode == DiffractionMode::maximum) {
        for (std::int64_t z = 0; z <= n; ++z) support.push_back(z);
    } else {
        for (std::int64_t z = -n; z <= n; z += 2) support.push_back(z);
    }
    std::vector<double> prob(support.size(), 0.0);
    const auto c = amplitudes();
    for (std::size_t k = 0; k < c.size(); ++k) {
        const std::int64_t z = measured_z(basis_[k], mode, illuminated_);
        const auto it = std::lower_bound(support.begin(), support.end(), z);
        prob[static_cast<std::size_t>(it - support.begin())] += std::norm(c[k]);
    }
    std::vector<double> logw(prob.size());
    std::transform(prob.begin(), prob.end(), logw.begin(),
                   [](double p) { return p > 0.0 ? std::log(p) : kNegInf; });
    AtomNumberDistribution dist(mode, std::move(support), std::move(logw));
    dist.normalize();
    return dist;
}

Eigen::MatrixXcd ConditionalSuperposition::atomic_density_matrix() const {
    const auto c = amplitudes();
    const auto n = static_cast<Eigen::Index>(c.size());
    Eigen::MatrixXcd rho(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const cplx ai = alpha_[static_cast<std::size_t>(i)];
            const cplx aj = alpha_[static_cast<std::size_t>(j)];
            const cplx overlap = std::exp(-0.5 * std::norm(ai) - 0.5 * std::norm(aj) + ai * std::conj(aj));
            rho(i, j) = c[static_cast<std::size_t>(i)] * std::conj(c[static_cast<std::size_t>(j)]) * overlap;
        }
    }
    return rho;
}

FullEngine::FullEngine(ConditionalSuperposition state, double kappa, double tau_rate,
                       DiffractionMode mode)
    : state_(std::move(state)), kappa_(kappa), tau_rate_(tau_rate), mode_(mode) {
    if (!(kappa_ > 0.0)) throw ValidationError("full engine: kappa must be > 0");
    if (!(tau_rate_ > 0.0))
        throw ValidationError("full engine: tau clock undefined for C = 0 (no transverse probe)");
}

double FullEngine::jump_probability(double dtau) const {
    return 2.0 * kappa_ * state_.photon_expectation_full() * dtau / tau_rate_;
}

bool FullEngine::step(double dtau, double eps) {
    if (!(dtau >= 0.0)) throw ValidationError("full engine: negative step");
    const double p = jump_probability(dtau);
    if (p >= 1.0)
        throw StepSizeError("full engine: jump probability " + std::to_string(p) + " >= 1", p);
    const bool counted = p > eps;
    if (counted) state_.apply_jump();
    state_.evolve_no_count(dtau / tau_rate_);
    tau_ += dtau;
    return counted;
}

}  // namespace qtraj
