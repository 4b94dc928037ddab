#include "optocav/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace optocav {

namespace {

void check_positive(double value, const char* name) {
    require(std::isfinite(value) && value > 0,
            std::string(name) + " must be positive and finite");
}

void check_basis(const FockBasis& basis, const ModelParams& params) {
    require(basis.photon_mode_count() == params.photon_modes(),
            "basis has " + std::to_string(basis.photon_mode_count()) + " photon modes, model has " +
                std::to_string(params.photon_modes()));
}

LadderStep lo(ModeId m) { return {m, Ladder::lowering}; }
LadderStep up(ModeId m) { return {m, Ladder::raising}; }

} // namespace

ModelParams ModelParams::with_g(double coupling) const {
    ModelParams out = *this;
    if (g != 0.0 && out.couplings.size() > 0)
        out.couplings *= coupling / g;
    else if (photon_modes() == 1)
        out.couplings = Matrix<double>::Constant(1, 1, coupling);
    out.g = coupling;
    return out;
}

ModelParams ModelParams::with_coupling_scale(double factor) const {
    ModelParams out = *this;
    out.g *= factor;
    out.couplings *= factor;
    return out;
}

ModelParams ModelParams::with_rotating_wave(bool enabled) const {
    ModelParams out = *this;
    out.rotating_wave = enabled;
    return out;
}

std::vector<std::string> ModelParams::warnings(double ratio) const {
    std::vector<std::string> out;
    double strongest = std::abs(g);
    if (couplings.size() > 0)
        strongest = std::max(strongest, couplings.cwiseAbs().maxCoeff());
    const double lowest_photon =
        *std::min_element(photon_frequencies.begin(), photon_frequencies.end());
    if (lowest_photon < ratio * strongest) {
        std::ostringstream os;
        os << "weak coupling violated: omega_c=" << lowest_photon << " < " << ratio << "*|g|";
        out.push_back(os.str());
    }
    if (omega_m < ratio * strongest) {
        std::ostringstream os;
        os << "weak coupling violated: omega_m=" << omega_m << " < " << ratio << "*|g|";
        out.push_back(os.str());
    }
    return out;
}

Matrix<double> pairwise_couplings(const std::vector<int>& mode_numbers,
                                  const std::vector<double>& frequencies, double omega_m,
                                  double mass, double cavity_length) {
    const auto n = static_cast<Eigen::Index>(mode_numbers.size());
    Matrix<double> gij(n, n);
    const double prefactor = std::pow(0.5, 1.5) / (cavity_length * std::sqrt(mass));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double sign = (mode_numbers[i] + mode_numbers[j]) % 2 == 0 ? 1.0 : -1.0;
            gij(i, j) = sign * prefactor * std::sqrt(frequencies[i] * frequencies[j] / omega_m);
        }
    return gij;
}

ModelParams derive_params(double mass, double spring_constant, double cavity_length,
                          std::vector<int> mode_numbers) {
    check_positive(mass, "mass");
    check_positive(spring_constant, "spring_constant");
    check_positive(cavity_length, "cavity_length");
    require(!mode_numbers.empty(), "at least one mode number required");
    for (int n : mode_numbers)
        require(n >= 1, "mode numbers must be >= 1");
    std::sort(mode_numbers.begin(), mode_numbers.end());
    require(std::adjacent_find(mode_numbers.begin(), mode_numbers.end()) == mode_numbers.end(),
            "mode numbers must be distinct");

    ModelParams p;
    for (int n : mode_numbers)
        p.photon_frequencies.push_back(n * std::numbers::pi / cavity_length);
    p.omega_m = std::sqrt(spring_constant / mass);
    p.cavity_length = cavity_length;
    p.g = -std::sqrt(1.0 / (2.0 * mass * p.omega_m)) * p.omega_c() / cavity_length;
    p.couplings = pairwise_couplings(mode_numbers, p.photon_frequencies, p.omega_m, mass,
                                     cavity_length);
    p.omega_ref = p.omega_c();
    p.mechanics = MechanicalInputs{mass, spring_constant, mode_numbers};
    return p;
}

ModelParams from_frequencies(double omega_c, double omega_m, double g, double cavity_length) {
    check_positive(omega_c, "omega_c");
    check_positive(omega_m, "omega_m");
    check_positive(cavity_length, "cavity_length");
    require(std::isfinite(g), "g must be finite");
    ModelParams p;
    p.photon_frequencies = {omega_c};
    p.omega_m = omega_m;
    p.g = g;
    p.couplings = Matrix<double>::Constant(1, 1, g);
    p.cavity_length = cavity_length;
    p.omega_ref = omega_c;
    return p;
}

ModelParams from_frequencies(std::vector<double> photon_frequencies, double omega_m,
                             Matrix<double> couplings, double cavity_length) {
    require(!photon_frequencies.empty(), "at least one photon frequency required");
    for (double w : photon_frequencies)
        check_positive(w, "photon frequency");
    require(std::is_sorted(photon_frequencies.begin(), photon_frequencies.end()),
            "photon frequencies must be ascending");
    check_positive(omega_m, "omega_m");
    check_positive(cavity_length, "cavity_length");
    const auto n = static_cast<Eigen::Index>(photon_frequencies.size());
    require(couplings.rows() == n && couplings.cols() == n, "coupling matrix shape mismatch");
    require((couplings - couplings.transpose()).cwiseAbs().maxCoeff() == 0.0,
            "coupling matrix must be symmetric");
    ModelParams p;
    p.photon_frequencies = std::move(photon_frequencies);
    p.omega_m = omega_m;
    p.g = couplings(0, 0);
    p.couplings = std::move(couplings);
    p.cavity_length = cavity_length;
    p.omega_ref = p.omega_c();
    return p;
}

double bare_energy(const ModelParams& params, const Occupation& occupation) {
    require(occupation.size() == params.photon_modes() + 1, "occupation length mismatch");
    double e = 0;
    for (std::size_t i = 0; i < params.photon_modes(); ++i)
        e += occupation[i] * params.photon_frequencies[i];
    return e + occupation.back() * params.omega_m;
}

RealOperator free_hamiltonian(const BasisPtr& basis, const ModelParams& params) {
    check_basis(*basis, params);
    auto h = zero_operator<double>(basis);
    for (std::size_t i = 0; i < basis->dimension(); ++i)
        h.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            bare_energy(params, basis->states()[i]);
    return h;
}

InteractionParts split_interaction(const BasisPtr& basis, const ModelParams& params) {
    check_basis(*basis, params);
    InteractionParts parts{zero_operator<double>(basis), zero_operator<double>(basis),
                           zero_operator<double>(basis)};
    const ModeId b = basis->phonon();

    if (params.photon_modes() == 1) {
        // g a+a (b + b+) + g/2 (a^2 + a+^2)(b + b+)
        const ModeId a = basis->photon(0);
        const double g = params.g;
        for (LadderStep phonon : {lo(b), up(b)}) {
            add_monomial(parts.om, g, {up(a), lo(a), phonon});
            add_monomial(parts.dce, g / 2, {lo(a), lo(a), phonon});
            add_monomial(parts.dce, g / 2, {up(a), up(a), phonon});
        }
    } else {
        // sum_ij g_ij (b + b+) a_i+ a_j + g_ij/2 (b + b+)(a_i a_j + a_i+ a_j+)
        for (std::size_t i = 0; i < params.photon_modes(); ++i)
            for (std::size_t j = 0; j < params.photon_modes(); ++j) {
                const double gij = params.couplings(static_cast<Eigen::Index>(i),
                                                    static_cast<Eigen::Index>(j));
                const ModeId ai = basis->photon(i);
                const ModeId aj = basis->photon(j);
                for (LadderStep phonon : {lo(b), up(b)}) {
                    add_monomial(parts.om, gij, {phonon, up(ai), lo(aj)});
                    add_monomial(parts.dce, gij / 2, {phonon, lo(ai), lo(aj)});
                    add_monomial(parts.dce, gij / 2, {phonon, up(ai), up(aj)});
                }
            }
    }
    parts.total.entries = parts.om.entries + parts.dce.entries;
    return parts;
}

RealOperator build_hamiltonian(const BasisPtr& basis, const ModelParams& params) {
    auto h = free_hamiltonian(basis, params);
    const auto v = split_interaction(basis, params);
    h.entries += v.om.entries;
    if (!params.rotating_wave)
        h.entries += v.dce.entries;
    return h;
}

RealOperator radiation_pressure_operator(const BasisPtr& basis, const ModelParams& params,
                                         bool normal_ordered,
                                         std::optional<std::size_t> photon_mode) {
    check_basis(*basis, params);
    if (!photon_mode) {
        require(params.photon_modes() == 1,
                "radiation pressure on a multi-mode basis needs an explicit photon mode");
        photon_mode = 0;
    }
    const ModeId a = basis->photon(*photon_mode);
    const double scale = params.photon_frequencies[*photon_mode] / (2.0 * params.cavity_length);
    auto f = zero_operator<double>(basis);
    add_monomial(f, scale, {lo(a), lo(a)});
    add_monomial(f, scale, {up(a), up(a)});
    add_monomial(f, scale, {up(a), lo(a)});
    if (normal_ordered)
        add_monomial(f, scale, {up(a), lo(a)});
    else
        add_monomial(f, scale, {lo(a), up(a)});
    return f;
}

RealOperator quadrature_operator(const BasisPtr& basis, std::size_t photon_mode) {
    const ModeId a = basis->photon(photon_mode);
    auto x = zero_operator<double>(basis);
    add_monomial(x, 1.0, {lo(a)});
    add_monomial(x, 1.0, {up(a)});
    return x;
}

} // namespace optocav
