#include "optocav/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <thread>

#include "CLI11.hpp"

#include "optocav/report.hpp"

namespace optocav::cli {

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::validation:
    case ErrorKind::capacity:
    case ErrorKind::io:
        return validation_error;
    case ErrorKind::pole:
    case ErrorKind::singularity:
    case ErrorKind::strong_mixing:
    case ErrorKind::degenerate:
        return physics_error;
    case ErrorKind::convergence:
        return convergence_error;
    }
    return validation_error;
}

namespace {

struct RunConfig {
    std::string subcommand;

    std::optional<std::string> omega_c, omega_m, g;
    std::optional<std::string> mass, spring_constant;
    std::vector<int> modes;
    std::string length = "1";

    int cutoff_photon = 30;
    int cutoff_phonon = 30;
    std::string g_sweep = "1e-3:1e-2:6";
    bool rotating_wave = false;
    bool normal_ordered_force = false;
    std::string out;
    std::string format = "json";

    std::optional<std::string> e1, e2;
    int k = 2;
    std::string rho = "0.3183098861837907";  // 1/pi
    std::size_t points = 0;
    double periods = 4;
    std::string sweep;
    std::string quantity = "delta_omega_m";
    unsigned threads = 0;
};

struct Quantity {
    std::string text;
    double value = 0;
    Rational exact{0};
};

Quantity quantity(const std::string& text, const char* name) {
    try {
        Quantity q{text, 0, parse_rational(text)};
        q.value = to_double(q.exact);
        require(std::isfinite(q.value), std::string(name) + " is not finite");
        return q;
    } catch (const Error& e) {
        fail(ErrorKind::validation, std::string(name) + ": " + e.what());
    }
}

struct GridSpec {
    double start = 0;
    double stop = 0;
    std::size_t count = 0;
};

GridSpec parse_grid(const std::string& text, const char* name) {
    std::vector<std::string> parts;
    std::size_t from = 0;
    for (std::size_t pos; (pos = text.find(':', from)) != std::string::npos; from = pos + 1)
        parts.push_back(text.substr(from, pos - from));
    parts.push_back(text.substr(from));
    require(parts.size() == 3, std::string(name) + " must be START:STOP:N");
    const auto n = quantity(parts[2], name);
    require(n.exact >= 0 && boost::multiprecision::denominator(n.exact) == 1 && n.value <= 100000,
            std::string(name) + ": N must be a non-negative integer");
    return {quantity(parts[0], name).value, quantity(parts[1], name).value,
            static_cast<std::size_t>(n.value)};
}

struct Resolved {
    ModelParams params;
    BasisSpec cutoffs;
    ExactParams exact;
    std::vector<double> g_sweep;
    Quantity rho;
    std::optional<Quantity> e1, e2;
    std::string source;
    std::string sweep_key;
    GridSpec sweep_grid;
};

const std::vector<std::string> sweep_quantities = {
    "delta_omega_m", "delta_omega_c", "delta_e_g",     "z_b_paper",    "z_a_paper",
    "gamma_golden",  "ground_shift",  "phonon_shift", "photon_shift",
};

Resolved resolve(const RunConfig& c) {
    Resolved r;
    const bool direct = c.omega_c || c.omega_m || c.g;
    const bool mechanical = c.mass || c.spring_constant || !c.modes.empty();
    require(direct != mechanical,
            direct ? "give either direct frequencies or mass/spring/modes, not both"
                   : "no parameter source: give --omega-c/--omega-m/--g or --mass/--spring-constant/--modes");
    const auto length = quantity(c.length, "length");

    if (direct) {
        require(c.omega_c && c.omega_m && c.g, "direct parameters need --omega-c, --omega-m and --g");
        const auto wc = quantity(*c.omega_c, "omega_c");
        const auto wm = quantity(*c.omega_m, "omega_m");
        const auto g = quantity(*c.g, "g");
        r.params = from_frequencies(wc.value, wm.value, g.value, length.value);
        r.exact.omega_c = wc.exact;
        r.exact.omega_m = wm.exact;
        r.exact.g = g.exact;
        r.source = "frequencies";
    } else {
        require(c.mass && c.spring_constant && !c.modes.empty(),
                "mechanical parameters need --mass, --spring-constant and --modes");
        r.params = derive_params(quantity(*c.mass, "mass").value,
                                 quantity(*c.spring_constant, "spring_constant").value, length.value, c.modes);
        r.exact.omega_c = exact_rational(r.params.omega_c());
        r.exact.omega_m = exact_rational(r.params.omega_m);
        r.exact.g = exact_rational(r.params.g);
        r.source = "mechanical";
    }
    r.params.rotating_wave = c.rotating_wave;

    require(c.cutoff_photon >= 1 && c.cutoff_phonon >= 1, "cutoffs must be >= 1");
    r.cutoffs.photon_cutoffs.assign(r.params.photon_modes(), c.cutoff_photon);
    r.cutoffs.phonon_cutoff = c.cutoff_phonon;

    const auto grid = parse_grid(c.g_sweep, "g_sweep");
    require(grid.count >= 4 && grid.start > 0 && grid.stop > grid.start,
            "g_sweep needs 0 < START < STOP and N >= 4");
    const double sign = r.params.g < 0 ? -1.0 : 1.0;
    for (double g : log_grid(grid.start, grid.stop, grid.count))
        r.g_sweep.push_back(sign * g);

    r.rho = quantity(c.rho, "rho");
    if (c.e1)
        r.e1 = quantity(*c.e1, "e1");
    if (c.e2)
        r.e2 = quantity(*c.e2, "e2");
    require(c.format == "json" || c.format == "csv", "format must be json or csv");
    require(c.k >= 1 && c.k <= 8, "k must lie in 1..8");
    require(c.periods > 0, "periods must be positive");

    if (c.subcommand == "sweep") {
        const auto eq = c.sweep.find('=');
        require(eq != std::string::npos, "--sweep must be KEY=START:STOP:N");
        r.sweep_key = c.sweep.substr(0, eq);
        require(r.sweep_key == "omega_c" || r.sweep_key == "omega_m" || r.sweep_key == "g" ||
                    r.sweep_key == "length",
                "sweep key must be omega_c, omega_m, g or length");
        r.sweep_grid = parse_grid(c.sweep.substr(eq + 1), "sweep");
        require(std::find(sweep_quantities.begin(), sweep_quantities.end(), c.quantity) !=
                    sweep_quantities.end(),
                "unknown sweep quantity " + c.quantity);
        require(direct || r.sweep_key == "length", "sweeping frequencies needs direct parameters");
    }
    return r;
}

Json config_json(const RunConfig& c, const Resolved& r) {
    Json j{{"subcommand", c.subcommand}, {"params_source", r.source}};
    if (r.source == "frequencies") {
        j["omega_c"] = *c.omega_c;
        j["omega_m"] = *c.omega_m;
        j["g"] = *c.g;
    } else {
        j["mass"] = *c.mass;
        j["spring_constant"] = *c.spring_constant;
        j["modes"] = c.modes;
    }
    j["length"] = c.length;
    j["cutoffs"] = to_json(r.cutoffs);
    j["g_sweep"] = c.g_sweep;
    j["rotating_wave"] = c.rotating_wave;
    j["normal_ordered_force"] = c.normal_ordered_force;
    j["format"] = c.format;
    if (c.subcommand == "vertex") {
        j["e1"] = c.e1 ? Json(*c.e1) : Json(nullptr);
        j["e2"] = c.e2 ? Json(*c.e2) : Json(nullptr);
    } else if (c.subcommand == "amplitude") {
        j["k"] = c.k;
    } else if (c.subcommand == "decay") {
        j["rho"] = c.rho;
        j["points"] = c.points;
        j["periods"] = c.periods;
    } else if (c.subcommand == "corr") {
        j["points"] = c.points;
    } else if (c.subcommand == "sweep") {
        j["sweep"] = c.sweep;
        j["quantity"] = c.quantity;
        j["rho"] = c.rho;
    }
    return j;
}

std::vector<std::pair<int, int>> default_ladder(const BasisSpec& c) {
    const int p = c.photon_cutoffs.front();
    const int m = c.phonon_cutoff;
    return {{std::max(2, p / 3), std::max(2, m / 3)},
            {std::max(2, 2 * p / 3), std::max(2, 2 * m / 3)},
            {p, m}};
}

void require_single_mode(const ModelParams& p, const std::string& what) {
    require(p.photon_modes() == 1, what + " needs a single photon mode");
}

// --- subcommands ----------------------------------------------------------

void cmd_params(const Resolved&, Report&) {}

void cmd_shifts(const Resolved& r, Report& report) {
    require_single_mode(r.params, "shifts");
    const auto& p = r.params;
    // closed forms first, so a resonance reports the offending pole
    delta_omega_m(p);
    delta_omega_c(p);
    vacuum_energy_shift(p);
    const auto sr = build_spectral_report(p, r.cutoffs, r.g_sweep, default_ladder(r.cutoffs));
    report.add_section("spectral", to_json(sr));

    const Json cut = to_json(r.cutoffs);
    auto add_shift = [&](const char* id, const Occupation& l) {
        const auto& s = sr.shifts.at(label(l));
        auto row = compare_relative(id, s.formula, s.oracle, 1e-3);
        row.extra = Json{{"label", label(l)}, {"cutoffs", cut}};
        report.add(std::move(row));
    };
    add_shift("eq10", {0, 1});
    add_shift("eq16", {1, 0});
    add_shift("eq21", {0, 0});

    // Gaps include the ground-state shift; recorded next to the level shifts.
    const double e0 = sr.dressed_energies.at(label({0, 0}));
    const double eg = sr.shifts.at(label({0, 0})).formula;
    auto gap = report_only("gap-phonon", sr.shifts.at(label({0, 1})).formula - eg,
                           sr.dressed_energies.at(label({0, 1})) - e0 - p.omega_m);
    gap.extra = Json{{"note", "dressed gap |0,1>-|0,0> minus omega_m against delta_omega_m - delta_E_g"}};
    report.add(std::move(gap));
    auto gap_c = report_only("gap-photon", sr.shifts.at(label({1, 0})).formula - eg,
                             sr.dressed_energies.at(label({1, 0})) - e0 - p.omega_c());
    gap_c.extra = Json{{"note", "dressed gap |1,0>-|0,0> minus omega_c against delta_omega_c - delta_E_g"}};
    report.add(std::move(gap_c));

    for (const auto& c : sr.convergence)
        report.add_convergence(to_json(c));
    for (const auto& f : sr.fits)
        if (!f.fit_ok)
            report.warnings.push_back("level-shift fit for " + label(f.label) + " has relative residual " +
                                      std::to_string(f.relative_residual));
}

void cmd_zfactors(const Resolved& r, Report& report) {
    require_single_mode(r.params, "zfactors");
    const auto& p = r.params;
    const auto basis = build_basis(r.cutoffs);
    const auto system = eigensystem(build_hamiltonian(basis, p));
    const Json cut = to_json(r.cutoffs);
    const bool small = std::abs(p.g) <= 1e-3;

    struct Case {
        const char* id;
        Occupation label;
        FormulaResult paper;
        const char* note;
    };
    const Case cases[] = {
        {"eq13", {0, 1}, z_factor_phonon_paper(p),
         "printed Z_b has opposite relative sign between its two terms compared with the state sum"},
        {"eq17", {1, 0}, z_factor_photon_paper(p),
         "printed Z_a has no 1/omega_m^2 term although the photon-number conserving vertex contributes one"},
    };
    for (const auto& c : cases) {
        const double overlap = track_dressed_state(system, c.label).overlap_sq;
        const double sum = z_factor_pt_oracle(p, c.label, r.cutoffs);
        // Second order only: the 1e-6 agreement holds for |g| <= 1e-3.
        const std::string id = std::string("z-") + label(c.label) + "-state-sum";
        auto row = small ? compare_relative(id, sum, overlap, 1e-6) : report_only(id, sum, overlap);
        row.extra = Json{{"label", label(c.label)}, {"cutoffs", cut}};
        if (!small)
            row.extra["note"] = "not asserted: higher orders exceed the 1e-6 budget for |g| > 1e-3";
        report.add(std::move(row));

        const double paper_z = 1.0 / c.paper.value.real();
        auto paper = report_only(c.id, paper_z, overlap);
        paper.extra = Json{{"label", label(c.label)}, {"z_inverse", c.paper.value.real()}, {"cutoffs", cut}};
        report.add(std::move(paper));
        report.add_paper_delta(c.id, paper_z, overlap, c.note);
    }
}

void cmd_vertex(const Resolved& r, Report& report) {
    require_single_mode(r.params, "vertex");
    const auto& p = r.params;
    const Quantity e1 = r.e1.value_or(Quantity{"omega_c", p.omega_c(), r.exact.omega_c});
    const Quantity e2 =
        r.e2.value_or(Quantity{"omega_c/2", p.omega_c() / 2, r.exact.omega_c / 2});
    ExactParams exact = r.exact;
    exact.E1 = e1.exact;
    exact.E2 = e2.exact;

    const std::pair<VertexKind, Diagram> kinds[] = {{VertexKind::dce, Diagram::vertex_dce},
                                                    {VertexKind::opto, Diagram::vertex_opto},
                                                    {VertexKind::x, Diagram::vertex_x}};
    Json formulas = Json::array();
    for (const auto& [kind, diagram] : kinds) {
        const auto f = vertex_gamma(kind, e1.value, e2.value, p);
        formulas.push_back(to_json(f));
        const auto engine = residues::evaluate(diagram_integrand(diagram, exact)).value;
        const auto closed = diagram_closed_form(diagram, exact);
        auto row = compare_relative(f.formula_id, f.value.imag(), to_double(engine.im), 1e-12);
        row.formula_value = to_json(f.value);
        row.oracle_value = to_json(complex(to_double(engine.re), to_double(engine.im)));
        row.extra = Json{{"oracle", "residue evaluation of the defining integrand"},
                         {"exact_formula", to_string(closed)},
                         {"exact_oracle", to_string(engine)},
                         {"exact_equal", engine == closed}};
        if (!(engine == closed))
            row.status = Status::fail;
        report.add(std::move(row));
    }
    report.add_section("vertex_formulas", std::move(formulas));
}

void cmd_loops(const Resolved& r, Report& report) {
    require_single_mode(r.params, "loops");
    const Diagram loops[] = {Diagram::phonon_pair, Diagram::phonon_four, Diagram::photon_om,
                             Diagram::photon_dce, Diagram::vacuum};
    for (Diagram d : loops) {
        const auto integrand = diagram_integrand(d, r.exact);
        const auto engine = residues::evaluate(integrand).value;
        const auto closed = diagram_closed_form(d, r.exact);
        const double formula = to_double(closed.im);
        const double oracle = to_double(engine.im);
        ResultRow row{diagram_id(d),
                      to_json(complex(to_double(closed.re), formula)),
                      to_json(complex(to_double(engine.re), oracle)),
                      std::abs(oracle - formula) + std::abs(to_double(engine.re - closed.re)),
                      Json{{"exact", true}},
                      engine == closed ? Status::pass : Status::fail};
        row.extra = Json{{"exact_formula", to_string(closed)},
                         {"exact_oracle", to_string(engine)},
                         {"integrand", residues::dump(integrand)}};
        report.add(std::move(row));
    }
    for (int n = 1; n <= 5; ++n) {
        const Rational energy = Rational(7) * r.exact.omega_c + r.exact.omega_m;
        const auto value = residues::multiparticle_propagator(n, energy, r.exact.omega_c);
        const ComplexRational expected = ComplexRational::i() / ComplexRational(energy - Rational(n) * r.exact.omega_c);
        ResultRow row{"propagator-n" + std::to_string(n),
                      to_json(complex(to_double(expected.re), to_double(expected.im))),
                      to_json(complex(to_double(value.re), to_double(value.im))),
                      to_double(value.im - expected.im),
                      Json{{"exact", true}},
                      value == expected ? Status::pass : Status::fail};
        row.extra = Json{{"energy", to_string(energy)}, {"exact_oracle", to_string(value)}};
        report.add(std::move(row));
    }
}

void cmd_amplitude(const Resolved& r, const RunConfig& c, Report& report) {
    const auto& p = r.params;
    require_single_mode(p, "amplitude");
    std::vector<double> gs;
    for (double g : r.g_sweep)
        gs.push_back(std::abs(g));
    const auto fit = amplitude_scaling_fit(c.k, p.omega_c(), gs, r.cutoffs);

    auto row = compare_relative("eq25", c.k, fit.slope, 0.02);
    row.extra = Json{{"k", c.k},
                     {"omega_m", fit.omega_m},
                     {"g_values", fit.g_values},
                     {"amplitudes", fit.amplitudes},
                     {"prefactor_ratio", fit.prefactor_ratio},
                     {"note", "prefactor_ratio is |A|/|g|^k times 2^(k-1); 1 would match the printed trend"}};
    report.add(std::move(row));

    if (c.k == 1) {
        const auto basis = build_basis(r.cutoffs);
        const auto pk = from_frequencies(p.omega_c(), fit.omega_m, gs.front());
        const auto table = vertex_prefactors(basis, pk);
        const auto it = std::find_if(table.begin(), table.end(), [](const VertexEntry& e) {
            return e.from == Occupation{0, 1} && e.to == Occupation{2, 0};
        });
        report.add(compare_relative("k1-vertex", it->amplitude, fit.amplitudes.front(), 1e-12));
    }
}

void cmd_decay(const Resolved& r, const RunConfig& c, Report& report) {
    const auto& p = r.params;
    require_single_mode(p, "decay");
    const auto width = golden_rule_width(p, r.rho.value);
    auto row = compare_relative("gamma-golden", std::numbers::pi * r.rho.value * p.g * p.g, width.gamma, 1e-12);
    row.extra = Json{{"rho", r.rho.text},
                     {"lifetime", width.decaying ? Json(width.lifetime) : Json(nullptr)},
                     {"decaying", width.decaying}};
    report.add(std::move(row));

    const double split = std::sqrt(2.0) * std::abs(p.g);
    const double detuning = p.omega_m - 2 * p.omega_c();
    const bool resonant = std::abs(detuning) <= 1e-9 * std::abs(p.omega_ref);
    const double slowest = std::sqrt(detuning * detuning + split * split);
    require(slowest > 0, "decay: no conversion dynamics at g = 0 and exact resonance");
    const auto times = default_grid(slowest, c.points ? c.points : 400, c.periods);

    const auto basis = build_basis(r.cutoffs);
    const EvolutionPlan plan(build_hamiltonian(basis, p));
    const auto series = population_series(plan, {0, 1}, {2, 0}, times);

    Series amp{"survival_amplitude", "t", times, {}};
    const ComplexVector psi0 = basis_vector<complex>(*basis, {0, 1});
    const auto i = static_cast<Eigen::Index>(basis->index_of({0, 1}));
    for (double t : times)
        amp.y.push_back(plan.evolve(psi0, t)(i));
    report.add_series(std::move(amp));

    const double max_conversion = *std::max_element(series.conversion.begin(), series.conversion.end());
    const double two_level = split * split / (detuning * detuning + split * split);
    auto conv = report_only("max-conversion", two_level, max_conversion);
    conv.extra = Json{{"detuning", detuning}};
    report.add(std::move(conv));

    if (resonant && p.g != 0.0) {
        const auto fit = fit_rabi(plan, p, series);
        auto rabi = compare_absolute("rabi-frequency", fit.expected, fit.angular_frequency, 1e-4);
        rabi.extra = Json{{"first_minimum", fit.first_minimum}, {"minimum_value", fit.minimum_value}};
        report.add(std::move(rabi));
    } else {
        report.warnings.push_back("off resonance: Rabi frequency fit skipped");
    }
}

void cmd_corr(const Resolved& r, const RunConfig& c, Report& report) {
    const auto& p = r.params;
    require_single_mode(p, "corr");
    const bool free = p.g == 0.0;
    const double scale = p.omega_c() / (2 * p.cavity_length);
    for (bool normal : {false, true}) {
        const std::string tag = normal ? "normal-ordered" : "symmetric";
        const auto ff = force_force_correlation(p, r.cutoffs, normal, c.points ? c.points : 64);
        auto freq = free ? compare_absolute("corr-frequency-" + tag, 2 * p.omega_c(), ff.angular_frequency, 1e-6)
                         : report_only("corr-frequency-" + tag, 2 * p.omega_c(), ff.angular_frequency);
        report.add(std::move(freq));
        auto coef = free ? compare_relative("corr-coefficient-" + tag, ff.wick_coefficient, ff.coefficient, 1e-8)
                         : report_only("corr-coefficient-" + tag, ff.wick_coefficient, ff.coefficient);
        report.add(std::move(coef));
        auto paper = report_only("eq27-" + tag, ff.paper_coefficient, ff.coefficient);
        paper.extra = Json{{"ratio", ff.paper_ratio}};
        report.add(std::move(paper));
        report.add_paper_delta("eq27-" + tag, ff.paper_coefficient, ff.coefficient,
                               "printed coefficient omega_c^2/4L^2 is half the Wick value 2(omega_c/2L)^2");
        report.add_series({"connected_ff_" + tag, "delay", ff.delays, ff.connected});

        const auto k = force_cumulants(p, r.cutoffs, normal);
        auto var = free ? compare_relative("force-variance-" + tag, 2 * scale * scale, k.variance, 1e-8)
                        : report_only("force-variance-" + tag, 2 * scale * scale, k.variance);
        report.add(std::move(var));
        auto third = free ? compare_relative("force-third-" + tag, 8 * scale * scale * scale, k.third, 1e-8)
                          : report_only("force-third-" + tag, 8 * scale * scale * scale, k.third);
        report.add(std::move(third));
        auto kurt = report_only("force-excess-kurtosis-" + tag, 12.0, k.excess_kurtosis);
        kurt.extra = Json{{"mean", k.mean}, {"fourth_cumulant", k.fourth}};
        report.add(std::move(kurt));
    }
    const auto basis = build_basis(r.cutoffs);
    const EvolutionPlan plan(build_hamiltonian(basis, p));
    const auto q = operator_cumulants(quadrature_operator(basis), dressed_ground_state(plan));
    report.add(free ? compare_absolute("quadrature-third", 0.0, q.third, 1e-8)
                    : report_only("quadrature-third", 0.0, q.third));
    report.add(free ? compare_absolute("quadrature-fourth", 0.0, q.fourth, 1e-8)
                    : report_only("quadrature-fourth", 0.0, q.fourth));
}

double sweep_point(const std::string& what, const ModelParams& p, const BasisSpec& cutoffs, double rho) {
    if (what == "delta_omega_m")
        return delta_omega_m(p).value.real();
    if (what == "delta_omega_c")
        return delta_omega_c(p).value.real();
    if (what == "delta_e_g")
        return vacuum_energy_shift(p).value.real();
    if (what == "z_b_paper")
        return 1.0 / z_factor_phonon_paper(p).value.real();
    if (what == "z_a_paper")
        return 1.0 / z_factor_photon_paper(p).value.real();
    if (what == "gamma_golden")
        return golden_rule_width(p, rho).gamma;
    const Occupation l = what == "ground_shift" ? Occupation{0, 0}
                         : what == "phonon_shift" ? Occupation{0, 1}
                                                  : Occupation{1, 0};
    const auto system = eigensystem(build_hamiltonian(build_basis(cutoffs), p));
    return track_dressed_state(system, l).energy - bare_energy(p, l);
}

void cmd_sweep(const Resolved& r, const RunConfig& c, Report& report) {
    const auto& grid = r.sweep_grid;
    std::vector<double> xs(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i)
        xs[i] = grid.count == 1 ? grid.start
                                : grid.start + (grid.stop - grid.start) * static_cast<double>(i) /
                                                   static_cast<double>(grid.count - 1);

    std::vector<double> ys(grid.count, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::optional<Error>> errors(grid.count);
    auto point = [&](std::size_t i) {
        try {
            ModelParams p = r.params;
            const double x = xs[i];
            if (r.sweep_key == "omega_c")
                p = from_frequencies(x, p.omega_m, p.g, p.cavity_length);
            else if (r.sweep_key == "omega_m")
                p = from_frequencies(p.omega_c(), x, p.g, p.cavity_length);
            else if (r.sweep_key == "g")
                p = p.with_g(x);
            else {
                require(x > 0, "length must be positive");
                p.cavity_length = x;
            }
            p.rotating_wave = r.params.rotating_wave;
            ys[i] = sweep_point(c.quantity, p, r.cutoffs, r.rho.value);
        } catch (const Error& e) {
            errors[i] = e;
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(c.threads ? c.threads : hw, std::max<std::size_t>(1, grid.count));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < grid.count;)
                point(i);
        });
    for (auto& t : pool)
        t.join();

    if (grid.count > 0) {
        Series s{c.quantity, r.sweep_key, xs, {}};
        for (double y : ys)
            s.y.emplace_back(y, 0.0);
        report.add_series(std::move(s));
    }
    for (std::size_t i = 0; i < grid.count; ++i)
        if (errors[i]) {
            report.add_error(*errors[i]);
            report.warnings.push_back("sweep point " + std::to_string(xs[i]) + " failed");
        }
}

void dispatch(const RunConfig& c, const Resolved& r, Report& report) {
    const std::string& s = c.subcommand;
    if (s == "params")
        cmd_params(r, report);
    else if (s == "shifts")
        cmd_shifts(r, report);
    else if (s == "zfactors")
        cmd_zfactors(r, report);
    else if (s == "vertex")
        cmd_vertex(r, report);
    else if (s == "loops")
        cmd_loops(r, report);
    else if (s == "amplitude")
        cmd_amplitude(r, c, report);
    else if (s == "decay")
        cmd_decay(r, c, report);
    else if (s == "corr")
        cmd_corr(r, c, report);
    else if (s == "sweep")
        cmd_sweep(r, c, report);
    else
        fail(ErrorKind::validation, "unknown subcommand " + s);
}

std::string render(const RunConfig& c, const Report& report) {
    if (c.format == "json")
        return report.dump();
    require(!report.series().empty() || c.subcommand == "sweep",
            "csv output needs a subcommand that produces series");
    std::string out;
    for (const auto& s : report.series()) {
        Json header{{"series", s.name}, {"config", report.config}, {"derived_params", report.derived_params},
                    {"version", std::string(version_string)}};
        out += series_csv(header, s);
    }
    return out;
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
    if (c.out.empty())
        out << text;
    else
        write_atomic(c.out, text);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Perturbative and exact analysis of a single-mode optomechanical cavity", "optocav"};
    app.set_config("--config", "", "INI/TOML config; sections per subcommand");
    app.require_subcommand(1);

    app.add_option("--omega-c,--omega_c", c.omega_c, "cavity frequency");
    app.add_option("--omega-m,--omega_m", c.omega_m, "mirror frequency");
    app.add_option("--g", c.g, "single-mode coupling");
    app.add_option("--mass", c.mass, "mirror mass");
    app.add_option("--spring-constant,--spring_constant", c.spring_constant, "spring constant");
    app.add_option("--modes", c.modes, "cavity mode numbers")->delimiter(',');
    app.add_option("--length", c.length, "cavity length")->capture_default_str();
    app.add_option("--cutoff-photon,--cutoff_photon", c.cutoff_photon)->capture_default_str();
    app.add_option("--cutoff-phonon,--cutoff_phonon", c.cutoff_phonon)->capture_default_str();
    app.add_option("--g-sweep,--g_sweep", c.g_sweep, "oracle coupling grid START:STOP:N (log spaced)")
        ->capture_default_str();
    app.add_flag("--rotating-wave,--rotating_wave", c.rotating_wave, "drop pair-creation terms");
    app.add_flag("--normal-ordered-force,--normal_ordered_force", c.normal_ordered_force);
    app.add_option("--out", c.out, "output path (stdout when absent)");
    app.add_option("--format", c.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    auto sub = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };
    sub("params", "echo derived parameters");
    sub("shifts", "level shifts: closed forms against exact diagonalization");
    sub("zfactors", "field-strength factors against overlaps");
    auto* vertex = sub("vertex", "vertex functions against residue evaluation");
    vertex->add_option("--e1", c.e1, "outgoing energy E1 (default omega_c)");
    vertex->add_option("--e2", c.e2, "second outgoing energy E2 (default omega_c/2)");
    sub("loops", "residue evaluation of self-energy and vacuum loops");
    auto* amplitude = sub("amplitude", "tree amplitudes k b -> 2 a and their scaling");
    amplitude->add_option("--k", c.k, "phonon number k")->capture_default_str();
    auto* decay = sub("decay", "golden-rule width and resonant conversion");
    decay->add_option("--rho", c.rho, "final-state density of states")->capture_default_str();
    decay->add_option("--points", c.points, "time samples (default 400)");
    decay->add_option("--periods", c.periods, "Rabi periods covered")->capture_default_str();
    auto* corr = sub("corr", "force-force correlation and force cumulants");
    corr->add_option("--points", c.points, "delay samples (default 64)");
    auto* sweep = sub("sweep", "scalar quantity against a swept parameter");
    sweep->add_option("--sweep", c.sweep, "KEY=START:STOP:N")->required();
    sweep->add_option("--quantity", c.quantity)->check(CLI::IsMember(sweep_quantities))->capture_default_str();
    sweep->add_option("--threads", c.threads, "worker threads (default: hardware)");
    sweep->add_option("--rho", c.rho)->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return validation_error;
    }
    c.subcommand = app.get_subcommands().front()->get_name();

    Report report;
    int code = ok;
    try {
        const Resolved r = resolve(c);
        report.config = config_json(c, r);
        report.derived_params = to_json(r.params);
        report.warnings = r.params.warnings();
        dispatch(c, r, report);
    } catch (const Error& e) {
        report.add_error(e);
        err << "optocav: " << to_string(e.kind()) << ": " << e.what() << "\n";
        code = exit_code(e.kind());
    }

    try {
        if (code == ok)
            emit(c, render(c, report), out);
        else
            emit(c, report.dump(), out);
    } catch (const Error& e) {
        err << "optocav: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return code == ok ? exit_code(e.kind()) : code;
    }
    return code;
}

} // namespace optocav::cli
