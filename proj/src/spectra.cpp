#include "optocav/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace optocav {

DressedState track_dressed_state(const Eigensystem<double>& system, const Occupation& bare,
                                 double threshold) {
    const auto row = static_cast<Eigen::Index>(system.basis->index_of(bare));
    const Vector<double> weights = system.vectors.row(row).cwiseAbs2().transpose();

    Eigen::Index best = 0;
    weights.maxCoeff(&best);
    double runner_up = 0;
    for (Eigen::Index i = 0; i < weights.size(); ++i)
        if (i != best)
            runner_up = std::max(runner_up, weights(i));

    DressedState out{bare, static_cast<std::size_t>(best), system.values(best), weights(best),
                     runner_up};
    if (out.overlap_sq <= threshold || runner_up > 0.5 * out.overlap_sq)
        fail(ErrorKind::strong_mixing,
             "resonance/strong-mixing: " + label(bare) + " has overlap^2 " +
                 std::to_string(out.overlap_sq) + " (runner-up " + std::to_string(runner_up) +
                 ")");
    return out;
}

EvenPolynomialFit fit_even_polynomial(const std::vector<double>& x, const std::vector<double>& y,
                                      int orders) {
    require(x.size() == y.size(), "fit: length mismatch");
    require(orders >= 1 && x.size() >= static_cast<std::size_t>(orders),
            "fit: not enough points for the requested order");
    const auto n = static_cast<Eigen::Index>(x.size());
    const double scale = *std::max_element(x.begin(), x.end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
    require(scale != 0.0, "fit: all abscissae are zero");

    // y/x^2 = c2 + c4 x^2 + ... in the scaled variable u = (x/scale)^2.
    Matrix<double> design(n, orders);
    Vector<double> rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        require(x[i] != 0.0, "fit: zero abscissa");
        const double u = (x[i] / scale) * (x[i] / scale);
        double p = 1;
        for (int k = 0; k < orders; ++k, p *= u)
            design(i, k) = p;
        rhs(i) = y[i] / (x[i] * x[i]);
    }
    const Vector<double> c = design.colPivHouseholderQr().solve(rhs);

    EvenPolynomialFit fit;
    double s2 = scale * scale;
    double unscale = 1;
    for (int k = 0; k < orders; ++k) {
        fit.coefficients.push_back(c(k) / unscale);
        unscale *= s2;
    }
    const Vector<double> model = design * c;
    double num = 0, den = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x2 = x[i] * x[i];
        num += std::pow((model(i) - rhs(i)) * x2, 2);
        den += y[i] * y[i];
    }
    fit.relative_residual = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
    return fit;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "loglog_slope: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] != 0.0 && y[i] != 0.0, "loglog_slope: zero value");
        const double lx = std::log(std::abs(x[i]));
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    require(lo > 0 && hi > lo && points >= 2, "log_grid: need 0 < lo < hi and >= 2 points");
    std::vector<double> out(points);
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = lo * std::exp(step * static_cast<double>(i));
    out.back() = hi;
    return out;
}

std::vector<ShiftFit> level_shift_oracle(const ModelParams& params,
                                         const std::vector<Occupation>& labels,
                                         const std::vector<double>& g_sweep, const BasisSpec& cutoffs,
                                         double residual_tolerance) {
    require(g_sweep.size() >= 4, "level_shift_oracle: g-sweep needs at least 4 points");
    for (double g : g_sweep) {
        require(g != 0.0, "level_shift_oracle: g-sweep must not contain 0");
        const auto w = params.with_g(g).warnings();
        require(w.empty(), "level_shift_oracle: g=" + std::to_string(g) + " outside weak coupling");
    }

    const auto basis = build_basis(cutoffs);
    std::vector<ShiftFit> fits;
    for (const auto& l : labels)
        fits.push_back(ShiftFit{l, cutoffs, g_sweep, {}, 0, 0, 0, true});

    for (double g : g_sweep) {
        const auto system = eigensystem(build_hamiltonian(basis, params.with_g(g)));
        for (auto& fit : fits) {
            const auto tracked = track_dressed_state(system, fit.label);
            fit.shifts.push_back(tracked.energy - bare_energy(params, fit.label));
        }
    }
    for (auto& fit : fits) {
        const auto poly = fit_even_polynomial(fit.g_values, fit.shifts, 2);
        fit.c2 = poly.coefficients[0];
        fit.c4 = poly.coefficients[1];
        fit.relative_residual = poly.relative_residual;
        fit.fit_ok = poly.relative_residual <= residual_tolerance;
    }
    return fits;
}

ShiftFit level_shift_oracle(const ModelParams& params, const Occupation& label,
                            const std::vector<double>& g_sweep, const BasisSpec& cutoffs,
                            double residual_tolerance) {
    return level_shift_oracle(params, std::vector<Occupation>{label}, g_sweep, cutoffs,
                              residual_tolerance)
        .front();
}

ConvergenceSeries cutoff_convergence(const ModelParams& params, const Occupation& label,
                                     const std::vector<std::pair<int, int>>& ladder,
                                     double noise_floor) {
    require(ladder.size() >= 3, "cutoff_convergence: need at least 3 rungs");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        require(ladder[i].first >= ladder[i - 1].first && ladder[i].second >= ladder[i - 1].second,
                "cutoff_convergence: cutoffs must ascend");

    ConvergenceSeries series{label, {}, {}, 0, true};
    for (auto [photon, phonon] : ladder) {
        BasisSpec spec{std::vector<int>(params.photon_modes(), photon), phonon};
        const auto basis = build_basis(spec);
        const auto system = eigensystem(build_hamiltonian(basis, params));
        series.rungs.push_back({photon, phonon, track_dressed_state(system, label).energy});
    }
    for (std::size_t i = 1; i < series.rungs.size(); ++i)
        series.deltas.push_back(std::abs(series.rungs[i].value - series.rungs[i - 1].value));
    series.last_delta = series.deltas.back();
    for (std::size_t i = 1; i < series.deltas.size(); ++i)
        if (series.deltas[i] > series.deltas[i - 1] && series.deltas[i] > noise_floor)
            series.monotone = false;
    return series;
}

Transition transition_frequency(const ModelParams& params, const Occupation& upper,
                                const Occupation& lower, const BasisSpec& cutoffs) {
    const auto basis = build_basis(cutoffs);
    const auto system = eigensystem(build_hamiltonian(basis, params));
    const auto hi = track_dressed_state(system, upper);
    const auto lo = track_dressed_state(system, lower);
    Transition t{upper, lower, cutoffs};
    t.gap = hi.energy - lo.energy;
    t.bare_gap = bare_energy(params, upper) - bare_energy(params, lower);
    t.upper_shift = hi.energy - bare_energy(params, upper);
    t.lower_shift = lo.energy - bare_energy(params, lower);
    return t;
}

} // namespace optocav
