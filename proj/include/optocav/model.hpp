#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optocav/fockspace.hpp"

namespace optocav {

/// Mirror mass, spring constant and mode numbers, when the model was
/// derived from mechanical inputs rather than given as frequencies.
struct MechanicalInputs {
    double mass = 0;
    double spring_constant = 0;
    std::vector<int> mode_numbers;
};

/// Physical inputs in hbar = c = 1 units.
///
/// `g` is the single-mode coupling used by the single-mode Hamiltonian.
/// `couplings` is the symmetric pairwise matrix g_ij used whenever more than
/// one photon mode is present. For a single mode derived from mechanical
/// inputs g_nn = -g/2; the two are kept separate and never reconciled.
struct ModelParams {
    std::vector<double> photon_frequencies;
    double omega_m = 0;
    double g = 0;
    Matrix<double> couplings;
    double cavity_length = 1.0;
    double omega_ref = 1.0;
    std::optional<MechanicalInputs> mechanics;
    bool rotating_wave = false;

    double omega_c() const { return photon_frequencies.front(); }
    std::size_t photon_modes() const { return photon_frequencies.size(); }

    ModelParams with_g(double coupling) const;
    /// Multiplies g and every g_ij by `factor`.
    ModelParams with_coupling_scale(double factor) const;
    ModelParams with_rotating_wave(bool enabled) const;

    /// Empty unless omega_c or omega_m fall below ratio * |g|.
    std::vector<std::string> warnings(double ratio = 10.0) const;
};

ModelParams derive_params(double mass, double spring_constant, double cavity_length,
                          std::vector<int> mode_numbers);

/// Direct-frequency constructor; omega_ref defaults to omega_c.
ModelParams from_frequencies(double omega_c, double omega_m, double g, double cavity_length = 1.0);

ModelParams from_frequencies(std::vector<double> photon_frequencies, double omega_m,
                             Matrix<double> couplings, double cavity_length = 1.0);

/// g_ij = (1/2)^{3/2} (-1)^{n_i+n_j} sqrt(omega_i omega_j / omega_m) / (L sqrt(m)).
Matrix<double> pairwise_couplings(const std::vector<int>& mode_numbers,
                                  const std::vector<double>& frequencies, double omega_m,
                                  double mass, double cavity_length);

double bare_energy(const ModelParams& params, const Occupation& occupation);

struct InteractionParts {
    RealOperator om;
    RealOperator dce;
    RealOperator total;
};

RealOperator free_hamiltonian(const BasisPtr& basis, const ModelParams& params);

/// Normal-ordered interaction split into the photon-number conserving part
/// and the pair-creation part.
InteractionParts split_interaction(const BasisPtr& basis, const ModelParams& params);

/// H0 + V_om + V_dce (V_dce dropped in rotating-wave mode).
RealOperator build_hamiltonian(const BasisPtr& basis, const ModelParams& params);

/// F = (omega/2L)(a + a^dagger)^2. With `normal_ordered` the a a^dagger term
/// is replaced by a^dagger a, removing the vacuum expectation.
RealOperator radiation_pressure_operator(const BasisPtr& basis, const ModelParams& params,
                                         bool normal_ordered,
                                         std::optional<std::size_t> photon_mode = std::nullopt);

/// a + a^dagger on one photon mode.
RealOperator quadrature_operator(const BasisPtr& basis, std::size_t photon_mode = 0);

} // namespace optocav
