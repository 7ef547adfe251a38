#pragma once

#include "qtraj/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace qtraj {

/// Discrete distribution over the measured variable z, stored as log-weights.
///
/// Support is strictly increasing. After `normalize()` the weights sum to one; a weight
/// of exactly zero is represented by -inf.
class AtomNumberDistribution {
public:
    AtomNumberDistribution() = default;
    AtomNumberDistribution(DiffractionMode mode, std::vector<std::int64_t> support,
                           std::vector<double> log_weights);

    DiffractionMode mode() const { return mode_; }
    const std::vector<std::int64_t>& support() const { return support_; }
    const std::vector<double>& log_weights() const { return log_weights_; }
    std::vector<double>& mutable_log_weights() { return log_weights_; }
    std::size_t size() const { return support_.size(); }
    bool empty() const { return support_.empty(); }

    /// Shifts log-weights so that they sum to one. Returns the log of the removed
    /// normalization. Throws ContradictionError if every weight is zero.
    double normalize();

    double probability(std::size_t index) const;
    /// Probability at value z, zero if z is not in the support.
    double probability_of(std::int64_t z) const;
    std::vector<double> probabilities() const;

    /// Drops entries whose log-weight sits more than `window` below the maximum.
    void prune(double window);

    /// Index of the largest weight among entries with z > 0; size() if none.
    std::size_t argmax_positive() const;

    void write_csv(std::ostream& out) const;

private:
    DiffractionMode mode_ = DiffractionMode::maximum;
    std::vector<std::int64_t> support_;
    std::vector<double> log_weights_;
};

struct GaussianSpec {
    double z0 = 0.0;
    double sigma = 1.0;

    double variance() const { return sigma * sigma; }
};

/// Superfluid odd-site binomial mapped to z = 2 z_odd - N; requires even M with Q = M/2.
AtomNumberDistribution binomial_minimum(const LatticeGeometry& geom);

/// Superfluid binomial for the atom number in the K illuminated sites.
AtomNumberDistribution binomial_maximum(const LatticeGeometry& geom);

/// Initial superfluid distribution for the given mode.
AtomNumberDistribution superfluid_distribution(DiffractionMode mode, const LatticeGeometry& geom);

/// Gaussian limit of the superfluid distribution. Rejects N below `min_atoms` and the
/// degenerate K = M maximum-mode case.
GaussianSpec gaussian_of(DiffractionMode mode, const LatticeGeometry& geom,
                         std::int64_t min_atoms = 50);

/// Gaussian weights sampled on the same integer support the binomial uses (step 2 with
/// the parity of N in minimum mode, 0..N in maximum mode).
AtomNumberDistribution discretized_gaussian(DiffractionMode mode, const LatticeGeometry& geom,
                                            const GaussianSpec& spec);

/// sum_z z^order p(z) for a normalized distribution.
double moment(const AtomNumberDistribution& dist, int order);

/// Total variation distance over the union of supports.
double total_variation(const AtomNumberDistribution& a, const AtomNumberDistribution& b);

}  // namespace qtraj
