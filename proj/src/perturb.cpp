#include "optocav/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "optocav/spectra.hpp"

namespace optocav {

namespace {

using residues::LinearForm;
using residues::RationalIntegrand;

class PoleGuard {
public:
    PoleGuard(std::string where, const ModelParams& params, double relative)
        : where_(std::move(where)), limit_(relative * std::abs(params.omega_ref)) {}

    double operator()(double denominator) {
        if (!(std::abs(denominator) > limit_))
            throw PoleError(where_, denominator);
        closest_ = std::min(closest_, std::abs(denominator));
        return denominator;
    }

    double closest() const { return closest_; }

private:
    std::string where_;
    double limit_;
    double closest_ = std::numeric_limits<double>::infinity();
};

FormulaResult make_result(double real, std::string id, const ModelParams& p, const PoleGuard& guard,
                          bool imaginary = false) {
    FormulaResult r;
    r.value = imaginary ? complex(0, real) : complex(real, 0);
    r.formula_id = std::move(id);
    r.inputs = {{"omega_c", p.omega_c()}, {"omega_m", p.omega_m}, {"g", p.g}};
    r.pole_distance = guard.closest();
    return r;
}

void require_single_mode(const ModelParams& p, const char* what) {
    require(p.photon_modes() == 1, std::string(what) + " needs a single photon mode");
}

RealOperator interaction(const BasisPtr& basis, const ModelParams& params) {
    auto v = build_hamiltonian(basis, params);
    v.entries -= free_hamiltonian(basis, params).entries;
    return v;
}

// Steps needed to reach `target` through nonzero matrix elements of v.
std::vector<int> distance_to(const RealOperator& v, std::size_t target) {
    const auto n = v.entries.rows();
    std::vector<int> dist(static_cast<std::size_t>(n), std::numeric_limits<int>::max());
    std::deque<Eigen::Index> queue{static_cast<Eigen::Index>(target)};
    dist[target] = 0;
    while (!queue.empty()) {
        const auto j = queue.front();
        queue.pop_front();
        for (Eigen::Index i = 0; i < n; ++i)
            if (v.entries(i, j) != 0.0 && dist[static_cast<std::size_t>(i)] == std::numeric_limits<int>::max()) {
                dist[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(j)] + 1;
                queue.push_back(i);
            }
    }
    return dist;
}

} // namespace

SelfEnergy phonon_self_energy(double E, const ModelParams& params, double guard) {
    require_single_mode(params, "phonon_self_energy");
    if (params.rotating_wave)
        return {};
    PoleGuard check("phonon self-energy", params, guard);
    const double wc = params.omega_c();
    check(2 * wc - E);
    check(2 * wc + E);
    return {closed_form::sigma_pair(E, wc, params.g), closed_form::sigma_four(E, wc, params.g)};
}

FormulaResult delta_omega_m(const ModelParams& params, double guard) {
    require_single_mode(params, "delta_omega_m");
    PoleGuard check("eq10", params, guard);
    const double wc = params.omega_c();
    check(2 * wc - params.omega_m);
    check(2 * wc + params.omega_m);
    const auto s = phonon_self_energy(params.omega_m, params, guard);
    return make_result(s.two_particle + s.four_particle, "eq10", params, check);
}

PhotonSelfEnergy photon_self_energy(const ModelParams& params, double guard) {
    require_single_mode(params, "photon_self_energy");
    PoleGuard check("photon self-energy", params, guard);
    const double wc = params.omega_c();
    check(params.omega_m);
    check(2 * wc + params.omega_m);
    PhotonSelfEnergy out{closed_form::pi_om(params.omega_m, params.g), 0.0};
    if (!params.rotating_wave)
        out.dce = closed_form::pi_dce(wc, params.omega_m, params.g);
    return out;
}

FormulaResult delta_omega_c(const ModelParams& params, double guard) {
    PoleGuard check("eq16", params, guard);
    check(params.omega_m);
    check(2 * params.omega_c() + params.omega_m);
    const auto pi = photon_self_energy(params, guard);
    return make_result(pi.om + pi.dce, "eq16", params, check);
}

FormulaResult vacuum_energy_shift(const ModelParams& params, double guard) {
    require_single_mode(params, "vacuum_energy_shift");
    PoleGuard check("eq21", params, guard);
    check(2 * params.omega_c() + params.omega_m);
    const double shift =
        params.rotating_wave ? 0.0 : closed_form::vacuum_shift(params.omega_c(), params.omega_m, params.g);
    return make_result(shift, "eq21", params, check);
}

FormulaResult z_factor_phonon_paper(const ModelParams& params, double guard) {
    require_single_mode(params, "z_factor_phonon_paper");
    PoleGuard check("eq13", params, guard);
    check(2 * params.omega_c() - params.omega_m);
    check(2 * params.omega_c() + params.omega_m);
    const double z = params.rotating_wave
                         ? 1.0
                         : closed_form::z_phonon_inverse(params.omega_c(), params.omega_m, params.g);
    return make_result(z, "eq13", params, check);
}

FormulaResult z_factor_photon_paper(const ModelParams& params, double guard) {
    require_single_mode(params, "z_factor_photon_paper");
    PoleGuard check("eq17", params, guard);
    check(2 * params.omega_c() + params.omega_m);
    const double z = params.rotating_wave
                         ? 1.0
                         : closed_form::z_photon_inverse(params.omega_c(), params.omega_m, params.g);
    return make_result(z, "eq17", params, check);
}

double z_factor_pt_oracle(const ModelParams& params, const Occupation& bare, const BasisSpec& cutoffs,
                          double guard) {
    const auto basis = build_basis(cutoffs);
    const auto v = interaction(basis, params);
    const auto n = static_cast<Eigen::Index>(basis->index_of(bare));
    const double e_n = bare_energy(params, bare);
    const double limit = guard * std::abs(params.omega_ref);

    double leak = 0;
    for (Eigen::Index k = 0; k < v.entries.rows(); ++k) {
        const double vkn = v.entries(k, n);
        if (k == n || vkn == 0.0)
            continue;
        const double gap = bare_energy(params, basis->state(static_cast<std::size_t>(k))) - e_n;
        if (std::abs(gap) <= limit)
            fail(ErrorKind::degenerate, "z_factor_pt_oracle: " + label(bare) + " is degenerate with " +
                                            label(basis->state(static_cast<std::size_t>(k))));
        leak += vkn * vkn / (gap * gap);
    }
    return 1.0 - leak;
}

FormulaResult vertex_gamma(VertexKind kind, double E1, double E2, const ModelParams& params,
                           double guard) {
    require_single_mode(params, "vertex_gamma");
    const double wc = params.omega_c();
    const double wm = params.omega_m;
    const double g = params.g;
    switch (kind) {
    case VertexKind::dce: {
        PoleGuard check("eq18-dce", params, guard);
        check(E1 - wc - wm);
        check(wm - 2 * E1);
        auto r = make_result(closed_form::gamma_dce(E1, wc, wm, g), "eq18-dce", params, check, true);
        r.inputs["E1"] = E1;
        return r;
    }
    case VertexKind::opto: {
        PoleGuard check("eq18-opto", params, guard);
        check(E1 - wc - wm);
        check(2 * E1 - wm);
        check(wc + E1);
        auto r = make_result(closed_form::gamma_opto(E1, wc, wm, g), "eq18-opto", params, check, true);
        r.inputs["E1"] = E1;
        return r;
    }
    case VertexKind::x: {
        PoleGuard check("eq19", params, guard);
        check(E1 - wc - wm);
        check(E1 + E2 - 2 * wc);
        auto r = make_result(closed_form::gamma_x(E1, E2, wc, wm, g), "eq19", params, check, true);
        r.inputs["E1"] = E1;
        r.inputs["E2"] = E2;
        return r;
    }
    }
    fail(ErrorKind::validation, "vertex_gamma: unknown vertex kind");
}

std::vector<VertexEntry> vertex_prefactors(const BasisPtr& basis, const ModelParams& params) {
    require_single_mode(params, "vertex_prefactors");
    const auto v = split_interaction(basis, params);
    struct Spec {
        const char* vertex;
        Occupation from, to;
    };
    const std::vector<Spec> table = {
        {"om", {1, 0}, {1, 1}},
        {"om", {1, 1}, {1, 0}},
        {"dce", {0, 0}, {2, 1}},
        {"dce", {0, 1}, {2, 0}},
        {"dce", {2, 0}, {0, 1}},
    };
    std::vector<VertexEntry> out;
    for (const auto& s : table) {
        const auto& part = std::string(s.vertex) == "om" ? v.om : v.dce;
        const double amp = part.entries(static_cast<Eigen::Index>(basis->index_of(s.to)),
                                        static_cast<Eigen::Index>(basis->index_of(s.from)));
        const double ratio = params.g != 0.0 ? amp * amp / (params.g * params.g) : 0.0;
        out.push_back({s.vertex, s.from, s.to, amp, ratio});
    }
    return out;
}

double tree_amplitude(const ModelParams& params, const Occupation& initial, const Occupation& final,
                      int order, const BasisSpec& cutoffs, double guard) {
    require(order >= 1, "tree_amplitude: order must be >= 1");
    const auto basis = build_basis(cutoffs);
    const auto v = interaction(basis, params);
    const auto target = basis->index_of(final);
    const auto dist = distance_to(v, target);
    const double e_i = bare_energy(params, initial);
    const double limit = guard * std::abs(params.omega_ref);

    Vector<double> psi = Vector<double>::Zero(v.entries.rows());
    psi(static_cast<Eigen::Index>(basis->index_of(initial))) = 1.0;
    for (int step = 1; step <= order; ++step) {
        psi = v.entries * psi;
        if (step == order)
            break;
        for (Eigen::Index n = 0; n < psi.size(); ++n) {
            const auto idx = static_cast<std::size_t>(n);
            if (psi(n) == 0.0)
                continue;
            if (dist[idx] > order - step) {
                psi(n) = 0.0;
                continue;
            }
            const double denom = e_i - bare_energy(params, basis->state(idx));
            if (std::abs(denom) <= limit)
                fail(ErrorKind::degenerate, "tree_amplitude: on-shell intermediate " +
                                                label(basis->state(idx)));
            psi(n) /= denom;
        }
    }
    return psi(static_cast<Eigen::Index>(target));
}

AmplitudeScaling amplitude_scaling_fit(int k, double omega_c, const std::vector<double>& g_values,
                                       const BasisSpec& cutoffs) {
    require(k >= 1, "amplitude_scaling_fit: k must be >= 1");
    require(g_values.size() >= 2, "amplitude_scaling_fit: need >= 2 coupling values");
    AmplitudeScaling out;
    out.k = k;
    out.omega_m = 2.0 * omega_c / k;
    out.g_values = g_values;
    for (double g : g_values) {
        const auto p = from_frequencies(omega_c, out.omega_m, g);
        out.amplitudes.push_back(tree_amplitude(p, {0, k}, {2, 0}, k, cutoffs));
    }
    out.slope = loglog_slope(out.g_values, out.amplitudes);
    const double g0 = std::abs(g_values.front());
    out.prefactor_ratio =
        std::abs(out.amplitudes.front()) / std::pow(g0, k) * std::pow(2.0, k - 1);
    return out;
}

Width golden_rule_width(const ModelParams& params, double density_of_states) {
    require(std::isfinite(density_of_states) && density_of_states > 0,
            "golden_rule_width: density of states must be positive");
    const double matrix_element_sq = 0.5 * params.g * params.g;
    Width w;
    w.gamma = 2.0 * std::numbers::pi * density_of_states * matrix_element_sq;
    w.decaying = w.gamma > 0;
    w.lifetime = w.decaying ? 1.0 / w.gamma : std::numeric_limits<double>::infinity();
    return w;
}

PhotonPhotonFit photon_photon_oracle(const ModelParams& two_mode, const BasisSpec& cutoffs,
                                     double t_lo, double t_hi, std::size_t points,
                                     double residual_tolerance) {
    require(two_mode.photon_modes() == 2, "photon_photon_oracle: needs two photon modes");
    require(cutoffs.photon_cutoffs.size() == 2, "photon_photon_oracle: needs two photon cutoffs");
    require(points >= 4, "photon_photon_oracle: need >= 4 sweep points");
    const double strongest = two_mode.couplings.cwiseAbs().maxCoeff();

    PhotonPhotonFit fit;
    if (strongest == 0.0) {
        fit.fit_ok = true;
        return fit;
    }

    const auto basis = build_basis(cutoffs);
    const std::vector<Occupation> labels = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    for (double t : log_grid(t_lo, t_hi, points)) {
        const double s = t / strongest;
        const auto p = two_mode.with_coupling_scale(s);
        const auto system = eigensystem(build_hamiltonian(basis, p));
        double e[4];
        for (std::size_t i = 0; i < labels.size(); ++i)
            e[i] = track_dressed_state(system, labels[i]).energy;
        fit.scales.push_back(s);
        fit.interaction.push_back(e[3] - e[1] - e[2] + e[0]);
    }
    const auto poly = fit_even_polynomial(fit.scales, fit.interaction, 3);
    fit.c2 = poly.coefficients[0];
    fit.c4 = poly.coefficients[1];
    fit.c6 = poly.coefficients[2];
    fit.relative_residual = poly.relative_residual;
    fit.fit_ok = poly.relative_residual <= residual_tolerance;
    return fit;
}

std::vector<Diagram> all_diagrams() {
    return {Diagram::phonon_pair, Diagram::phonon_four, Diagram::photon_om, Diagram::photon_dce,
            Diagram::vertex_dce,  Diagram::vertex_opto, Diagram::vertex_x,  Diagram::vacuum};
}

std::string diagram_id(Diagram d) {
    switch (d) {
    case Diagram::phonon_pair: return "eq8";
    case Diagram::phonon_four: return "eq9";
    case Diagram::photon_om: return "eq15a";
    case Diagram::photon_dce: return "eq15b";
    case Diagram::vertex_dce: return "eq18a";
    case Diagram::vertex_opto: return "eq18b";
    case Diagram::vertex_x: return "eq19";
    case Diagram::vacuum: return "eq20";
    }
    return "unknown";
}

RationalIntegrand diagram_integrand(Diagram d, const ExactParams& p) {
    const Rational& wc = p.omega_c;
    const Rational& wm = p.omega_m;
    const Rational g2 = p.g * p.g;
    const Rational g3 = g2 * p.g;
    const ComplexRational i = ComplexRational::i();

    auto chain = [](std::vector<std::string> names, const std::vector<Rational>& omegas,
                    const Rational& total, const Rational& prefactor) {
        RationalIntegrand I(std::move(names));
        LinearForm sum(I.variable_count());
        for (std::size_t k = 0; k < omegas.size(); ++k) {
            const auto e = LinearForm::variable(I.variable_count(), k);
            I.propagator(e, omegas[k]);
            sum += e;
        }
        I.delta(sum - total);
        I.scale(ComplexRational(prefactor));
        return I;
    };

    switch (d) {
    case Diagram::phonon_pair:
        return chain({"E1", "E2"}, {wc, wc}, wm, -g2 / 2);
    case Diagram::phonon_four:
        // The fourth line carries omega_b, read as omega_m.
        return chain({"E1", "E2", "E3", "E4"}, {wc, wc, wm, wm}, wm, -g2);
    case Diagram::photon_om:
        return chain({"E1", "E2"}, {wc, wm}, wc, -g2);
    case Diagram::photon_dce:
        return chain({"E1", "E2", "E3", "E4"}, {wc, wc, wc, wm}, wc, -Rational(3) * g2 / 2);
    case Diagram::vacuum:
        return chain({"E1", "E2", "E3"}, {wc, wc, wm}, Rational(0), -g2 / 2);
    case Diagram::vertex_dce:
    case Diagram::vertex_opto: {
        RationalIntegrand I({"E"});
        const auto E = I.var("E");
        I.propagator(E, wm);
        I.propagator(p.E1 - E, wc);
        I.propagator(wm + E - p.E1, wc);
        const Rational pre = d == Diagram::vertex_dce ? g3 / 4 : -g3 / 8;
        I.scale(i * ComplexRational(pre));
        return I;
    }
    case Diagram::vertex_x: {
        RationalIntegrand I({"E"});
        const auto E = I.var("E");
        I.propagator(E, wm);
        I.propagator(p.E1 + E, wc);
        I.propagator(p.E2 - E, wc);
        I.scale(i * ComplexRational(g3 / 4));
        return I;
    }
    }
    fail(ErrorKind::validation, "diagram_integrand: unknown diagram");
}

ComplexRational diagram_closed_form(Diagram d, const ExactParams& p) {
    namespace cf = closed_form;
    const Rational& wc = p.omega_c;
    const Rational& wm = p.omega_m;
    const Rational& g = p.g;
    const ComplexRational minus_i = -ComplexRational::i();
    const ComplexRational i = ComplexRational::i();
    switch (d) {
    case Diagram::phonon_pair: return minus_i * cf::sigma_pair(wm, wc, g);
    case Diagram::phonon_four: return minus_i * cf::sigma_four(wm, wc, g);
    case Diagram::photon_om: return minus_i * cf::pi_om(wm, g);
    case Diagram::photon_dce: return minus_i * cf::pi_dce(wc, wm, g);
    case Diagram::vacuum: return minus_i * cf::vacuum_shift(wc, wm, g);
    case Diagram::vertex_dce: return i * cf::gamma_dce(p.E1, wc, wm, g);
    case Diagram::vertex_opto: return i * cf::gamma_opto(p.E1, wc, wm, g);
    case Diagram::vertex_x: return i * cf::gamma_x(p.E1, p.E2, wc, wm, g);
    }
    fail(ErrorKind::validation, "diagram_closed_form: unknown diagram");
}

} // namespace optocav
