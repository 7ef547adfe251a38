#pragma once

#include "qtraj/distribution.hpp"
#include "qtraj/model.hpp"
#include "qtraj/trajectory.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <vector>

namespace qtraj {

using Configuration = std::vector<std::int64_t>;

/// Every placement of N atoms on M sites.
class ConfigurationBasis {
public:
    static constexpr std::int64_t kDefaultCap = 100000;

    ConfigurationBasis(std::int64_t atoms, std::int64_t sites, std::int64_t cap = kDefaultCap);
    /// Basis from an explicit list; rejects duplicates and mismatched lengths.
    explicit ConfigurationBasis(std::vector<Configuration> configs);

    /// C(N + M - 1, M - 1), saturating at INT64_MAX.
    static std::int64_t count(std::int64_t atoms, std::int64_t sites);

    std::size_t size() const { return configs_.size(); }
    std::int64_t sites() const { return sites_; }
    std::int64_t atoms() const { return atoms_; }
    const Configuration& operator[](std::size_t i) const { return configs_[i]; }
    const std::vector<Configuration>& configs() const { return configs_; }
    /// Position of q in the basis; size() if absent.
    std::size_t index_of(const Configuration& q) const;

private:
    std::int64_t atoms_ = 0;
    std::int64_t sites_ = 0;
    std::vector<Configuration> configs_;
    std::map<Configuration, std::size_t> index_;
};

/// Superfluid amplitudes c_q = sqrt(N! / prod q_j! * M^-N).
std::vector<cplx> superfluid_amplitudes(const ConfigurationBasis& basis);

/// Lorentzian cavity amplitude (eta - i U10 a0 D10) / (i (U11 D11 - delta_p) + kappa).
cplx alpha_of(const Configuration& q, const CavityParams& params, const ModeFunctions& modes,
              std::int64_t illuminated);

/// Phi_q(t) = -|alpha_q|^2 kappa t + (eta alpha_q^* - i U10 a0 D10 alpha_q^* - c.c.) t / 2.
cplx phi_of(const Configuration& q, cplx alpha_q, const CavityParams& params,
            const ModeFunctions& modes, std::int64_t illuminated, double t);

/// Conditional light-matter state sum_q c_q |q>|alpha_q>, with
/// c_q = c_q^0 alpha_q^m exp(Phi_q(t)) / F(t).
///
/// The amplitudes are kept as the complex exponent `gamma_log` on top of c_q^0 so that
/// long histories neither underflow nor overflow.
class ConditionalSuperposition {
public:
    ConditionalSuperposition(ConfigurationBasis basis, std::vector<cplx> initial,
                             const CavityParams& params, const ModeFunctions& modes,
                             std::int64_t illuminated);

    /// Explicit amplitude/light pairs, bypassing the cavity model. Used for the two-branch
    /// states; evolve_no_count then uses only the -|alpha|^2 kappa t part of Phi.
    static ConditionalSuperposition from_branches(ConfigurationBasis basis,
                                                  std::vector<cplx> amplitudes,
                                                  std::vector<cplx> alphas, double kappa = 1.0);

    const ConfigurationBasis& basis() const { return basis_; }
    const std::vector<cplx>& alpha() const { return alpha_; }
    const std::vector<cplx>& gamma_log() const { return gamma_log_; }
    std::int64_t count() const { return m_; }
    double time() const { return t_; }
    std::int64_t illuminated() const { return illuminated_; }

    /// Normalized c_q.
    std::vector<cplx> amplitudes() const;

    /// c_q <- c_q alpha_q. Throws ContradictionError if the state cannot scatter.
    void apply_jump();
    /// c_q <- c_q exp(Phi_q(dt)).
    void evolve_no_count(double dt);

    /// sum_q |c_q|^2 |alpha_q|^2.
    double photon_expectation_full() const;

    /// Marginal over the measured variable of `mode`.
    AtomNumberDistribution reduce_to_z(DiffractionMode mode) const;

    /// rho_{qq'} = c_q c_q'^* <alpha_q'|alpha_q> after tracing out the light.
    Eigen::MatrixXcd atomic_density_matrix() const;

private:
    ConditionalSuperposition() = default;
    void normalize();

    ConfigurationBasis basis_{std::vector<Configuration>{}};
    std::vector<cplx> log_c0_;
    std::vector<cplx> alpha_;
    std::vector<cplx> phi_rate_;  // Phi_q(t) / t
    std::vector<cplx> gamma_log_;
    std::int64_t illuminated_ = 0;
    std::int64_t m_ = 0;
    double t_ = 0.0;
};

/// Measured variable of configuration q: atoms in the first K sites (maximum) or odd-site
/// minus even-site atoms (minimum).
std::int64_t measured_z(const Configuration& q, DiffractionMode mode, std::int64_t illuminated);

/// Jump-loop adapter that steps the full engine in dimensionless time, t = tau / tau_rate.
/// Largest basis whose density matrix is attached to full-engine trajectory records.
constexpr std::size_t kDensityMatrixMaxBasis = 64;

class FullEngine {
public:
    FullEngine(ConditionalSuperposition state, double kappa, double tau_rate, DiffractionMode mode);

    const ConditionalSuperposition& state() const { return state_; }
    std::int64_t count() const { return state_.count(); }
    double tau() const { return tau_; }
    double photon_expectation() const { return state_.photon_expectation_full(); }
    /// 2 kappa <a^dag a> dt.
    double jump_probability(double dtau) const;
    bool step(double dtau, double eps);
    AtomNumberDistribution distribution() const { return state_.reduce_to_z(mode_); }

private:
    ConditionalSuperposition state_;
    double kappa_;
    double tau_rate_;
    DiffractionMode mode_;
    double tau_ = 0.0;
};

}  // namespace qtraj
