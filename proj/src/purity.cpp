#include "qtraj/purity.hpp"

#include "qtraj/errors.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "qtraj/csv.hpp"

namespace qtraj {

cplx coherent_overlap_factor(double alpha_abs, double phi) {
    if (!(alpha_abs >= 0.0)) throw ValidationError("coherent overlap: |alpha| must be >= 0");
    const double n = alpha_abs * alpha_abs;
    return std::exp(n * (std::polar(1.0, -2.0 * phi) - 1.0));
}

Eigen::Matrix2cd cat_density_matrix(const CatState& cat) {
    // rho_12 carries <alpha2|alpha1>, the conjugate of coherent_overlap_factor
    const cplx coherence = std::conj(coherent_overlap_factor(cat.alpha_abs, cat.phi)) *
                           std::polar(1.0, 2.0 * cat.gamma);
    Eigen::Matrix2cd rho;
    rho << 0.5, 0.5 * coherence, 0.5 * std::conj(coherence), 0.5;
    return rho;
}

double purity(const CatState& cat) {
    const double s = std::sin(cat.phi);
    return 0.5 * (1.0 + std::exp(-4.0 * cat.alpha_abs * cat.alpha_abs * s * s));
}

bool distinguishability_ok(const CatState& cat) {
    const double phi = std::fmod(cat.phi, std::numbers::pi);
    return cat.alpha_abs * std::abs(std::sin(phi)) > 0.25;
}

double purity_general(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols() || rho.rows() == 0)
        throw ValidationError("purity: density matrix must be square and non-empty");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
        throw ValidationError("purity: density matrix is not Hermitian");
    if (std::abs(rho.trace() - cplx{1.0, 0.0}) > 1e-9)
        throw ValidationError("purity: density matrix trace differs from 1");
    // Tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho
    return rho.cwiseAbs2().sum();
}

std::vector<PuritySweepRow> purity_sweep(double alpha_max, int alpha_steps, int phi_steps) {
    if (!(alpha_max >= 0.0) || alpha_steps < 1 || phi_steps < 1)
        throw ValidationError("purity sweep: need alpha_max >= 0 and at least one step");
    std::vector<PuritySweepRow> rows;
    const double half_pi = 0.5 * std::numbers::pi;
    for (int i = 0; i <= alpha_steps; ++i) {
        const double a = alpha_max * i / alpha_steps;
        for (int j = 0; j <= phi_steps; ++j) {
            const double phi = half_pi * j / phi_steps;
            const CatState cat{0, 1, a, phi, 0.0};
            rows.push_back({a, phi, a * std::abs(std::sin(phi)), purity(cat)});
        }
    }
    const CatState threshold{0, 1, 0.25, half_pi, 0.0};
    rows.push_back({0.25, half_pi, 0.25, purity(threshold)});
    return rows;
}

void write_purity_sweep_csv(std::ostream& out, const std::vector<PuritySweepRow>& rows) {
    out << "alpha_abs,phi,alpha_sin_phi,purity\n";
    for (const auto& r : rows) {
        out << format_double(r.alpha_abs) << ',' << format_double(r.phi) << ','
            << format_double(r.distinguishability) << ',' << format_double(r.purity) << '\n';
    }
}

}  // namespace qtraj
