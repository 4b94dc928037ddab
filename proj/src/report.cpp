#include "optocav/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace optocav {

namespace {

Json number(double x) {
    if (!std::isfinite(x))
        return nullptr;
    return x;
}

} // namespace

Json to_json(const complex& z) { return Json{{"re", number(z.real())}, {"im", number(z.imag())}}; }

Json to_json(const ModelParams& p) {
    Json couplings = Json::array();
    for (Eigen::Index i = 0; i < p.couplings.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < p.couplings.cols(); ++j)
            row.push_back(p.couplings(i, j));
        couplings.push_back(std::move(row));
    }
    Json out{{"omega_c", p.omega_c()},
             {"photon_frequencies", p.photon_frequencies},
             {"omega_m", p.omega_m},
             {"g", p.g},
             {"g_ij", std::move(couplings)},
             {"cavity_length", p.cavity_length},
             {"omega_ref", p.omega_ref},
             {"rotating_wave", p.rotating_wave}};
    if (p.mechanics)
        out["mechanics"] = Json{{"mass", p.mechanics->mass},
                                {"spring_constant", p.mechanics->spring_constant},
                                {"mode_numbers", p.mechanics->mode_numbers}};
    return out;
}

Json to_json(const BasisSpec& c) {
    return Json{{"photon", c.photon_cutoffs}, {"phonon", c.phonon_cutoff}};
}

Json to_json(const FormulaResult& r) {
    Json inputs = Json::object();
    for (const auto& [k, v] : r.inputs)
        inputs[k] = v;
    return Json{{"formula_id", r.formula_id},
                {"value", to_json(r.value)},
                {"inputs", std::move(inputs)},
                {"pole_distance", number(r.pole_distance)}};
}

Json to_json(const ShiftFit& f) {
    return Json{{"label", label(f.label)},
                {"cutoffs", to_json(f.cutoffs)},
                {"g_values", f.g_values},
                {"shifts", f.shifts},
                {"c2", f.c2},
                {"c4", f.c4},
                {"relative_residual", f.relative_residual},
                {"fit_ok", f.fit_ok}};
}

Json to_json(const ConvergenceSeries& s) {
    Json rungs = Json::array();
    for (const auto& r : s.rungs)
        rungs.push_back(Json{{"photon", r.photon_cutoff}, {"phonon", r.phonon_cutoff}, {"value", r.value}});
    return Json{{"label", label(s.label)},
                {"rungs", std::move(rungs)},
                {"deltas", s.deltas},
                {"last_delta", s.last_delta},
                {"monotone", s.monotone}};
}

Json to_json(const SpectralReport& r) {
    Json energies = Json::object();
    for (const auto& [k, v] : r.dressed_energies)
        energies[k] = v;
    Json shifts = Json::object();
    for (const auto& [k, v] : r.shifts)
        shifts[k] = Json{{"oracle", v.oracle}, {"formula", v.formula}, {"delta", v.delta}};
    Json z = Json::object();
    for (const auto& [k, v] : r.z_factors)
        z[k] = Json{{"overlap_sq", v.overlap_sq}, {"paper", v.paper}};
    Json convergence = Json::array();
    for (const auto& c : r.convergence)
        convergence.push_back(to_json(c));
    Json fits = Json::array();
    for (const auto& f : r.fits)
        fits.push_back(to_json(f));
    return Json{{"cutoffs", to_json(r.cutoffs)},
                {"dressed_energies", std::move(energies)},
                {"shifts", std::move(shifts)},
                {"z_factors", std::move(z)},
                {"convergence", std::move(convergence)},
                {"fits", std::move(fits)}};
}

std::string_view to_string(Status s) {
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::reported: return "reported";
    }
    return "unknown";
}

ResultRow compare_relative(std::string id, double formula, double oracle, double tolerance) {
    const double delta = std::abs(oracle - formula);
    const bool ok = delta <= tolerance * std::abs(formula);
    return {std::move(id), number(formula), number(oracle), number(delta),
            Json{{"relative", tolerance}}, ok ? Status::pass : Status::fail};
}

ResultRow compare_absolute(std::string id, double formula, double oracle, double tolerance) {
    const double delta = std::abs(oracle - formula);
    return {std::move(id), number(formula), number(oracle), number(delta),
            Json{{"absolute", tolerance}}, delta <= tolerance ? Status::pass : Status::fail};
}

ResultRow report_only(std::string id, double formula, double oracle) {
    return {std::move(id), number(formula), number(oracle), number(std::abs(oracle - formula)), nullptr,
            Status::reported};
}

void Report::add(ResultRow row) {
    if (row.status == Status::fail)
        paper_deltas_.push_back(Json{{"id", row.id},
                                     {"formula_value", row.formula_value},
                                     {"oracle_value", row.oracle_value},
                                     {"delta", row.delta},
                                     {"note", "formula and oracle disagree beyond tolerance"}});
    results_.push_back(std::move(row));
}

void Report::add_paper_delta(const std::string& id, double paper, double oracle, const std::string& note) {
    paper_deltas_.push_back(Json{{"id", id},
                                 {"formula_value", number(paper)},
                                 {"oracle_value", number(oracle)},
                                 {"delta", number(std::abs(oracle - paper))},
                                 {"note", note}});
}

void Report::add_error(const Error& e) {
    errors_.push_back(Json{{"kind", std::string(optocav::to_string(e.kind()))}, {"message", e.what()}});
}

Json Report::to_json() const {
    Json results = Json::array();
    for (const auto& r : results_) {
        Json row{{"id", r.id},
                 {"formula_value", r.formula_value},
                 {"oracle_value", r.oracle_value},
                 {"delta", r.delta},
                 {"tolerance", r.tolerance},
                 {"status", std::string(optocav::to_string(r.status))}};
        for (const auto& [k, v] : r.extra.items())
            row[k] = v;
        results.push_back(std::move(row));
    }
    Json series = Json::array();
    for (const auto& s : series_) {
        Json re = Json::array(), im = Json::array();
        for (const auto& z : s.y) {
            re.push_back(number(z.real()));
            im.push_back(number(z.imag()));
        }
        series.push_back(Json{{"name", s.name}, {"abscissa", s.abscissa}, {"x", s.x}, {"re", re}, {"im", im}});
    }
    Json out{{"config", config},
             {"derived_params", derived_params},
             {"results", std::move(results)},
             {"warnings", warnings},
             {"version", std::string(version_string)},
             {"series", std::move(series)},
             {"convergence", convergence_},
             {"paper_deltas", paper_deltas_},
             {"errors", errors_}};
    for (const auto& [k, v] : sections_.items())
        out[k] = v;
    return out;
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

std::string series_csv(const Json& header, const Series& s) {
    std::ostringstream os;
    os.precision(17);
    os << "# " << header.dump() << "\n";
    os << s.abscissa << ",re,im\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
        os << s.x[i] << "," << s.y[i].real() << "," << s.y[i].imag() << "\n";
    return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target = fs::absolute(path);
    const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            fail(ErrorKind::io, "cannot open " + tmp.string() + " for writing");
        os << contents;
        os.flush();
        if (!os)
            fail(ErrorKind::io, "write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        fail(ErrorKind::io, "cannot rename onto " + target.string() + ": " + ec.message());
    }
}

SpectralReport build_spectral_report(const ModelParams& params, const BasisSpec& cutoffs,
                                     const std::vector<double>& g_sweep,
                                     const std::vector<std::pair<int, int>>& ladder) {
    require(params.photon_modes() == 1, "spectral report needs a single photon mode");
    SpectralReport out{params, cutoffs, {}, {}, {}, {}, {}};
    const Occupation ground{0, 0}, phonon{0, 1}, photon{1, 0};

    const auto basis = build_basis(cutoffs);
    const auto system = eigensystem(build_hamiltonian(basis, params));
    const auto g0 = track_dressed_state(system, ground);
    const auto b1 = track_dressed_state(system, phonon);
    const auto a1 = track_dressed_state(system, photon);
    out.dressed_energies[label(ground)] = g0.energy;
    out.dressed_energies[label(phonon)] = b1.energy;
    out.dressed_energies[label(photon)] = a1.energy;

    out.fits = level_shift_oracle(params, {ground, phonon, photon}, g_sweep, cutoffs);
    const double g2 = params.g * params.g;
    const double formulas[3] = {vacuum_energy_shift(params).value.real(), delta_omega_m(params).value.real(),
                                delta_omega_c(params).value.real()};
    for (std::size_t i = 0; i < out.fits.size(); ++i) {
        const double oracle = out.fits[i].c2 * g2;
        out.shifts[label(out.fits[i].label)] = {oracle, formulas[i], std::abs(oracle - formulas[i])};
    }

    out.z_factors[label(phonon)] = {b1.overlap_sq, 1.0 / z_factor_phonon_paper(params).value.real()};
    out.z_factors[label(photon)] = {a1.overlap_sq, 1.0 / z_factor_photon_paper(params).value.real()};
    out.convergence.push_back(cutoff_convergence(params, ground, ladder));
    return out;
}

} // namespace optocav
