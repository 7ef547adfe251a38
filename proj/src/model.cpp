#include "qtraj/model.hpp"

#include "qtraj/errors.hpp"

#include <cmath>
#include <string>

namespace qtraj {

const char* to_string(DiffractionMode mode) {
    return mode == DiffractionMode::minimum ? "minimum" : "maximum";
}

DiffractionMode parse_mode(const std::string& text) {
    if (text == "minimum" || text == "min") return DiffractionMode::minimum;
    if (text == "maximum" || text == "max") return DiffractionMode::maximum;
    throw ValidationError("unknown diffraction mode '" + text + "' (expected minimum|maximum)");
}

void LatticeGeometry::validate(DiffractionMode mode) const {
    if (atoms < 1) throw ValidationError("geometry: N must be >= 1");
    if (sites < 1) throw ValidationError("geometry: M must be >= 1");
    if (illuminated < 1 || illuminated > sites)
        throw ValidationError("geometry: K must satisfy 1 <= K <= M");
    if (odd_sites < 0 || odd_sites > sites)
        throw ValidationError("geometry: Q must satisfy 0 <= Q <= M");
    if (mode == DiffractionMode::minimum) {
        if (illuminated != sites)
            throw ValidationError("geometry: minimum mode requires K = M");
        if (sites % 2 != 0)
            throw ValidationError("geometry: minimum mode requires an even number of sites");
        if (2 * odd_sites != sites)
            throw ValidationError("geometry: minimum mode requires Q = M/2");
    }
}

LatticeGeometry LatticeGeometry::minimum(std::int64_t atoms, std::int64_t sites) {
    return {atoms, sites, sites, sites / 2};
}

LatticeGeometry LatticeGeometry::maximum(std::int64_t atoms, std::int64_t sites,
                                         std::int64_t illuminated) {
    return {atoms, sites, illuminated, sites / 2};
}

void CavityParams::validate() const {
    if (!(kappa > 0.0)) throw ValidationError("cavity: kappa must be > 0");
    if (delta_a == 0.0) throw ValidationError("cavity: delta_a = 0 makes U_lm divergent");
    for (double v : {g0, g1, delta_a, delta_p, kappa, eta.real(), eta.imag(), a0.real(),
                     a0.imag()}) {
        if (!std::isfinite(v)) throw ValidationError("cavity: parameters must be finite");
    }
}

double CavityParams::U(int l, int m) const {
    if (l == 1 && m == 1 && !dispersive_shift) return 0.0;
    const double gl = l == 0 ? g0 : g1;
    const double gm = m == 0 ? g0 : g1;
    return gl * gm / delta_a;
}

CavityParams CavityParams::in_kappa_units() const {
    validate();
    CavityParams out = *this;
    out.g0 = g0 / kappa;
    out.g1 = g1 / kappa;
    out.delta_a = delta_a / kappa;
    out.delta_p = delta_p / kappa;
    out.eta = eta / kappa;
    out.kappa = 1.0;
    return out;
}

ModeFunctions ModeFunctions::maximum(std::int64_t sites) {
    if (sites < 1) throw ValidationError("mode functions: need at least one site");
    ModeFunctions modes;
    modes.u0.assign(static_cast<std::size_t>(sites), cplx{1.0, 0.0});
    modes.u1.assign(static_cast<std::size_t>(sites), cplx{1.0, 0.0});
    return modes;
}

ModeFunctions ModeFunctions::minimum(std::int64_t sites) {
    if (sites < 1) throw ValidationError("mode functions: need at least one site");
    ModeFunctions modes;
    modes.u0.assign(static_cast<std::size_t>(sites), cplx{1.0, 0.0});
    modes.u1.resize(static_cast<std::size_t>(sites));
    for (std::size_t j = 0; j < modes.u1.size(); ++j) {
        // site index j+1 is odd when j is even
        modes.u1[j] = (j % 2 == 0) ? cplx{-1.0, 0.0} : cplx{1.0, 0.0};
    }
    return modes;
}

ScatteringScales ScatteringScales::from(const CavityParams& params) {
    ScatteringScales s;
    s.C = derive_C(params);
    s.tau_rate = 2.0 * std::norm(s.C) * params.kappa;
    return s;
}

cplx derive_C(const CavityParams& params) {
    params.validate();
    const cplx i{0.0, 1.0};
    return i * params.U10() * params.a0 / (i * params.delta_p - params.kappa);
}

cplx coupling_D(std::span<const std::int64_t> config, const ModeFunctions& modes, int l,
                int m, std::int64_t illuminated) {
    if (modes.u0.size() != modes.u1.size())
        throw ValidationError("coupling_D: u0 and u1 lengths differ");
    if (config.size() != modes.sites())
        throw ValidationError("coupling_D: configuration length does not match mode functions");
    if (illuminated < 0 || static_cast<std::size_t>(illuminated) > config.size())
        throw ValidationError("coupling_D: K exceeds the number of sites");
    const auto& ul = l == 0 ? modes.u0 : modes.u1;
    const auto& um = m == 0 ? modes.u0 : modes.u1;
    cplx sum = 0.0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(illuminated); ++j) {
        sum += std::conj(ul[j]) * um[j] * static_cast<double>(config[j]);
    }
    return sum;
}

double tau_of_t(double t, const ScatteringScales& scales) {
    if (t < 0.0) throw ValidationError("tau_of_t: negative time");
    return scales.tau_rate * t;
}

}  // namespace qtraj
