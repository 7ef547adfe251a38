#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qtraj {

using cplx = std::complex<double>;

/// Which scattering geometry the detector sees.
///  - maximum: all illuminated sites scatter in phase; z is the atom number in the K
///    illuminated sites.
///  - minimum: neighbouring sites scatter with opposite sign; z is the odd minus even
///    site atom number over the whole lattice (K = M).
enum class DiffractionMode { minimum, maximum };

const char* to_string(DiffractionMode mode);
DiffractionMode parse_mode(const std::string& text);

struct LatticeGeometry {
    std::int64_t atoms = 1;          // N
    std::int64_t sites = 1;          // M
    std::int64_t illuminated = 1;    // K
    std::int64_t odd_sites = 0;      // Q, only meaningful in minimum mode

    /// Throws ValidationError on a violated invariant. Minimum mode additionally
    /// requires K = M.
    void validate(DiffractionMode mode) const;

    /// Geometry with Q = M/2 and K = M, the only minimum-mode lattice we model.
    static LatticeGeometry minimum(std::int64_t atoms, std::int64_t sites);
    static LatticeGeometry maximum(std::int64_t atoms, std::int64_t sites,
                                   std::int64_t illuminated);

    double illuminated_fraction() const {
        return static_cast<double>(illuminated) / static_cast<double>(sites);
    }
};

/// Cavity and pump parameters. Frequencies share one unit; `in_kappa_units` rescales
/// so that kappa = 1, which is how the runner stores them. The defaults are
/// illustrative placeholders, not values from an experiment.
struct CavityParams {
    double g0 = 1.0;        // probe coupling
    double g1 = 1.0;        // cavity coupling
    double delta_a = -10.0; // cavity-atom detuning
    double delta_p = 0.0;   // probe-cavity detuning
    double kappa = 1.0;     // cavity decay rate
    cplx eta = 0.0;         // pump through the mirror
    cplx a0 = 0.1;          // transverse probe amplitude
    /// When false, U11 is forced to zero (no dispersive cavity shift).
    bool dispersive_shift = true;

    void validate() const;

    double U(int l, int m) const;
    double U10() const { return U(1, 0); }
    double U11() const { return U(1, 1); }

    CavityParams in_kappa_units() const;
};

struct ModeFunctions {
    std::vector<cplx> u0;
    std::vector<cplx> u1;

    std::size_t sites() const { return u0.size(); }

    /// u0 = u1 = 1 on every site, so u0* u1 = 1.
    static ModeFunctions maximum(std::int64_t sites);
    /// u0 = 1, u1(r_j) = (-1)^j for j = 1..M.
    static ModeFunctions minimum(std::int64_t sites);
};

struct ScatteringScales {
    cplx C;
    double tau_rate = 0.0;  // dtau/dt = 2 |C|^2 kappa

    static ScatteringScales from(const CavityParams& params);
};

/// Scattering coefficient C = i U10 a0 / (i delta_p - kappa).
cplx derive_C(const CavityParams& params);

/// D^q_{lm} = sum over the first K sites of u_l^*(r_j) u_m(r_j) q_j.
cplx coupling_D(std::span<const std::int64_t> config, const ModeFunctions& modes, int l,
                int m, std::int64_t illuminated);

/// Dimensionless time tau = 2 |C|^2 kappa t.
double tau_of_t(double t, const ScatteringScales& scales);

}  // namespace qtraj
