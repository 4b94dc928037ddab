#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "optocav/model.hpp"
#include "optocav/residues.hpp"

namespace optocav {

/// Closed forms in the coupling g and the bare frequencies. Generic in the
/// scalar so the same expressions serve double evaluation and exact
/// comparison against the residue engine. Diagram values are i times the
/// returned real coefficient where noted.
namespace closed_form {

template <typename T>
T sigma_pair(const T& E, const T& wc, const T& g) {
    return -(g * g / T(2)) / (T(2) * wc - E);
}

template <typename T>
T sigma_four(const T& E, const T& wc, const T& g) {
    return -(g * g) / (T(2) * wc + E);
}

template <typename T>
T pi_om(const T& wm, const T& g) {
    return -(g * g) / wm;
}

template <typename T>
T pi_dce(const T& wc, const T& wm, const T& g) {
    return -(T(3) * g * g / T(2)) / (T(2) * wc + wm);
}

template <typename T>
T delta_omega_m(const T& wc, const T& wm, const T& g) {
    return sigma_pair(wm, wc, g) + sigma_four(wm, wc, g);
}

template <typename T>
T delta_omega_c(const T& wc, const T& wm, const T& g) {
    return pi_om(wm, g) + pi_dce(wc, wm, g);
}

template <typename T>
T vacuum_shift(const T& wc, const T& wm, const T& g) {
    return -(g * g / T(2)) / (T(2) * wc + wm);
}

/// Z_b^{-1} with the relative minus sign as printed.
template <typename T>
T z_phonon_inverse(const T& wc, const T& wm, const T& g) {
    const T lo = T(2) * wc - wm;
    const T hi = T(2) * wc + wm;
    return T(1) + g * g * (T(1) / (T(2) * lo * lo) - T(1) / (hi * hi));
}

template <typename T>
T z_photon_inverse(const T& wc, const T& wm, const T& g) {
    const T hi = T(2) * wc + wm;
    return T(1) - T(3) * g * g / (hi * hi);
}

/// Second-order overlap^2 of |0,1> and |1,0> from the explicit state sum.
template <typename T>
T z_phonon_sum(const T& wc, const T& wm, const T& g) {
    const T lo = T(2) * wc - wm;
    const T hi = T(2) * wc + wm;
    return T(1) - g * g * (T(1) / (T(2) * lo * lo) + T(1) / (hi * hi));
}

template <typename T>
T z_photon_sum(const T& wc, const T& wm, const T& g) {
    const T hi = T(2) * wc + wm;
    return T(1) - g * g * (T(1) / (wm * wm) + T(3) / (T(2) * hi * hi));
}

// Vertex functions; the diagram value is i times these.

template <typename T>
T gamma_dce(const T& E1, const T& wc, const T& wm, const T& g) {
    return -(g * g * g / T(4)) / ((E1 - wc - wm) * (wm - T(2) * E1));
}

template <typename T>
T gamma_opto(const T& E1, const T& wc, const T& wm, const T& g) {
    return (g * g * g / T(8)) * (T(1) / ((E1 - wc - wm) * (T(2) * E1 - wm)) +
                                 T(1) / ((wc + E1) * (wm - T(2) * E1)));
}

template <typename T>
T gamma_x(const T& E1, const T& E2, const T& wc, const T& wm, const T& g) {
    return (g * g * g / T(4)) / ((E1 - wc - wm) * (E1 + E2 - T(2) * wc));
}

} // namespace closed_form

struct FormulaResult {
    complex value;
    std::string formula_id;
    std::map<std::string, double> inputs;
    double pole_distance = 0;  // smallest |denominator| met
};

inline constexpr double default_pole_guard = 1e-9;

struct SelfEnergy {
    double two_particle = 0;   // photon-pair loop
    double four_particle = 0;  // two photons and two phonons
};

/// Phonon self-energy pair at energy E; zero in rotating-wave mode.
SelfEnergy phonon_self_energy(double E, const ModelParams& params,
                              double guard = default_pole_guard);
FormulaResult delta_omega_m(const ModelParams& params, double guard = default_pole_guard);

struct PhotonSelfEnergy {
    double om = 0;
    double dce = 0;
};

/// Photon self-energy pair at E = omega_c.
PhotonSelfEnergy photon_self_energy(const ModelParams& params, double guard = default_pole_guard);
FormulaResult delta_omega_c(const ModelParams& params, double guard = default_pole_guard);

FormulaResult vacuum_energy_shift(const ModelParams& params, double guard = default_pole_guard);

/// Z^{-1} exactly as printed.
FormulaResult z_factor_phonon_paper(const ModelParams& params, double guard = default_pole_guard);
FormulaResult z_factor_photon_paper(const ModelParams& params, double guard = default_pole_guard);

/// 1 - sum_k |<k|V|n>|^2 / (E_k - E_n)^2 over the truncated basis.
double z_factor_pt_oracle(const ModelParams& params, const Occupation& bare, const BasisSpec& cutoffs,
                          double guard = default_pole_guard);

enum class VertexKind { dce, opto, x };

FormulaResult vertex_gamma(VertexKind kind, double E1, double E2, const ModelParams& params,
                           double guard = default_pole_guard);

struct VertexEntry {
    std::string vertex;  // "om" or "dce"
    Occupation from;
    Occupation to;
    double amplitude = 0;       // <to|V|from>
    double squared_over_g2 = 0;
};

/// Interaction matrix elements for the elementary single-mode vertices.
std::vector<VertexEntry> vertex_prefactors(const BasisPtr& basis, const ModelParams& params);

/// <f| V (G V)^{order-1} |i> with G = 1/(E_i - H0). Intermediates that cannot
/// reach `final` in the remaining steps are skipped; reachable on-shell ones
/// raise a degenerate error.
double tree_amplitude(const ModelParams& params, const Occupation& initial, const Occupation& final,
                      int order, const BasisSpec& cutoffs, double guard = default_pole_guard);

struct AmplitudeScaling {
    int k = 0;
    double omega_m = 0;
    std::vector<double> g_values;
    std::vector<double> amplitudes;
    double slope = 0;
    /// |A| / |g|^k against 1/2^(k-1).
    double prefactor_ratio = 0;
};

/// k b -> 2 a amplitudes on the tuned family k omega_m = 2 omega_c.
AmplitudeScaling amplitude_scaling_fit(int k, double omega_c, const std::vector<double>& g_values,
                                       const BasisSpec& cutoffs);

struct Width {
    double gamma = 0;
    double lifetime = 0;  // infinity when gamma = 0
    bool decaying = false;
};

/// Golden-rule width 2 pi |<2,0|V|0,1>|^2 rho(omega_m) with |M|^2 = g^2/2.
Width golden_rule_width(const ModelParams& params, double density_of_states);

struct PhotonPhotonFit {
    std::vector<double> scales;        // s, couplings are s * g_ij
    std::vector<double> interaction;   // E11 - E10 - E01 + E00
    double c2 = 0;
    double c4 = 0;                     // quartic coefficient in s
    double c6 = 0;
    double relative_residual = 0;
    bool fit_ok = false;
};

/// Two-photon interaction energy from exact diagonalization of a two-mode
/// model, fitted to c2 s^2 + c4 s^4 + c6 s^6. The sweep uses
/// s = t / max|g_ij| for t in [t_lo, t_hi].
PhotonPhotonFit photon_photon_oracle(const ModelParams& two_mode, const BasisSpec& cutoffs,
                                     double t_lo = 2e-3, double t_hi = 2e-2, std::size_t points = 8,
                                     double residual_tolerance = 1e-6);

// Diagram integrands for the residue engine.

struct ExactParams {
    Rational omega_c{1};
    Rational omega_m{0};
    Rational g{0};
    Rational E1{0};
    Rational E2{0};
};

enum class Diagram {
    phonon_pair,        // -i Sigma at omega_m, photon-pair loop
    phonon_four,        // -i Sigma at omega_m, four intermediate particles
    photon_om,          // -i Pi_om at omega_c
    photon_dce,         // -i Pi_dce at omega_c
    vertex_dce,
    vertex_opto,
    vertex_x,
    vacuum,             // -i Lambda
};

std::vector<Diagram> all_diagrams();
std::string diagram_id(Diagram d);

residues::RationalIntegrand diagram_integrand(Diagram d, const ExactParams& p);

/// The closed form the integral is claimed to equal.
ComplexRational diagram_closed_form(Diagram d, const ExactParams& p);

} // namespace optocav
