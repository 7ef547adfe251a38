#pragma once

#include "qtraj/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace qtraj {

/// Two-branch atom-light superposition
///   (e^{i gamma} |z1>|alpha e^{i phi}> + e^{-i gamma} |z2>|alpha e^{-i phi}>) / sqrt(2).
struct CatState {
    std::int64_t z1 = 0;
    std::int64_t z2 = 0;
    double alpha_abs = 0.0;
    double phi = 0.0;
    double gamma = 0.0;

    cplx alpha1() const { return std::polar(alpha_abs, phi); }
    cplx alpha2() const { return std::polar(alpha_abs, -phi); }
};

/// <alpha e^{i phi} | alpha e^{-i phi}> = exp(|alpha|^2 (e^{-2 i phi} - 1)).
cplx coherent_overlap_factor(double alpha_abs, double phi);

/// Reduced atomic state over {|z1>, |z2>} after tracing out the light.
Eigen::Matrix2cd cat_density_matrix(const CatState& cat);

/// Tr(rho^2) = (1 + exp(-4 |alpha|^2 sin^2 phi)) / 2.
double purity(const CatState& cat);

/// |alpha| |sin phi| > 1/4, with phi taken mod pi first.
bool distinguishability_ok(const CatState& cat);

/// Tr(rho^2) for a Hermitian unit-trace matrix; rejects anything else (tolerance 1e-9).
double purity_general(const Eigen::MatrixXcd& rho);

/// Rows of the purity sweep: |alpha|, phi, |alpha| sin phi, purity.
struct PuritySweepRow {
    double alpha_abs;
    double phi;
    double distinguishability;
    double purity;
};

/// Sweep over |alpha| in [0, alpha_max] and phi in [0, pi/2], plus the row at
/// |alpha| sin phi = 1/4 (phi = pi/2).
std::vector<PuritySweepRow> purity_sweep(double alpha_max, int alpha_steps, int phi_steps);
void write_purity_sweep_csv(std::ostream& out, const std::vector<PuritySweepRow>& rows);

}  // namespace qtraj
