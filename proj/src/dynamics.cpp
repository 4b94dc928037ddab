#include "optocav/dynamics.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

namespace optocav {

EvolutionPlan::EvolutionPlan(const RealOperator& hamiltonian) : system_(eigensystem(hamiltonian)) {}

ComplexVector EvolutionPlan::evolve(const ComplexVector& state, double t) const {
    require(state.size() == system_.values.size(), "evolve: state dimension mismatch");
    ComplexVector coeffs = system_.vectors.transpose() * state;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
        coeffs(k) *= std::exp(complex(0, -system_.values(k) * t));
    return system_.vectors * coeffs;
}

ComplexVector evolve(const EvolutionPlan& plan, const ComplexVector& state, double t) {
    require(std::abs(state.norm() - 1.0) < 1e-10, "evolve: input state is not normalized");
    return plan.evolve(state, t);
}

std::vector<double> uniform_grid(double t_end, std::size_t points) {
    require(points >= 2 && t_end > 0, "uniform_grid: need t_end > 0 and >= 2 points");
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = t_end * static_cast<double>(i) / static_cast<double>(points - 1);
    return out;
}

std::vector<double> default_grid(double omega, std::size_t points, double periods) {
    require(omega > 0, "default_grid: frequency must be positive");
    return uniform_grid(periods * 2 * std::numbers::pi / omega, points);
}

PopulationSeries population_series(const EvolutionPlan& plan, const Occupation& initial,
                                   const Occupation& target, const std::vector<double>& times) {
    const auto& basis = *plan.basis();
    const auto i = static_cast<Eigen::Index>(basis.index_of(initial));
    const auto f = static_cast<Eigen::Index>(basis.index_of(target));
    const ComplexVector psi0 = basis_vector<complex>(*plan.basis(), initial);

    PopulationSeries out;
    out.times = times;
    for (double t : times) {
        const ComplexVector psi = plan.evolve(psi0, t);
        out.survival.push_back(std::norm(psi(i)));
        out.conversion.push_back(std::norm(psi(f)));
    }
    return out;
}

PopulationSeries survival_probability(const ModelParams& params, const BasisSpec& cutoffs,
                                      const std::vector<double>& times) {
    require(params.photon_modes() == 1, "survival_probability: single photon mode only");
    const auto basis = build_basis(cutoffs);
    const EvolutionPlan plan(build_hamiltonian(basis, params));
    return population_series(plan, {0, 1}, {2, 0}, times);
}

RabiFit fit_rabi(const EvolutionPlan& plan, const ModelParams& params, const PopulationSeries& series) {
    const auto& s = series.survival;
    const auto& t = series.times;
    std::size_t at = 0;
    for (std::size_t k = 1; k + 1 < s.size(); ++k)
        if (s[k] < 0.5 && s[k] <= s[k - 1] && s[k] < s[k + 1]) {
            at = k;
            break;
        }
    if (at == 0)
        fail(ErrorKind::convergence, "fit_rabi: no survival minimum below 1/2 on the grid");

    const ComplexVector psi0 = basis_vector<complex>(*plan.basis(), {0, 1});
    const auto i = static_cast<Eigen::Index>(plan.basis()->index_of({0, 1}));
    auto survival = [&](double time) { return std::norm(plan.evolve(psi0, time)(i)); };
    const auto [tmin, pmin] = boost::math::tools::brent_find_minima(survival, t[at - 1], t[at + 1], 50);

    RabiFit fit;
    fit.first_minimum = tmin;
    fit.minimum_value = pmin;
    fit.angular_frequency = std::numbers::pi / tmin;
    fit.expected = std::sqrt(2.0) * std::abs(params.g);
    return fit;
}

CorrelationResult time_ordered_correlation(const EvolutionPlan& plan, const RealOperator& A,
                                           const RealOperator& B, double t1, double t2,
                                           const ComplexVector& state) {
    const bool a_later = t1 >= t2;
    const RealOperator& later = a_later ? A : B;
    const RealOperator& earlier = a_later ? B : A;
    const double t_late = a_later ? t1 : t2;
    const double t_early = a_later ? t2 : t1;

    const ComplexVector bra = plan.evolve(state, t_late);
    const ComplexVector ket = plan.evolve(earlier.entries * plan.evolve(state, t_early), t_late - t_early);
    CorrelationResult r;
    r.t1 = t1;
    r.t2 = t2;
    r.value = bra.dot(later.entries * ket);

    const ComplexVector s1 = plan.evolve(state, t1);
    const ComplexVector s2 = plan.evolve(state, t2);
    const complex mean_a = s1.dot(A.entries * s1);
    const complex mean_b = s2.dot(B.entries * s2);
    r.connected_value = r.value - mean_a * mean_b;
    return r;
}

ComplexVector dressed_ground_state(const EvolutionPlan& plan) {
    const auto& basis = *plan.basis();
    const Occupation vacuum(basis.mode_count(), 0);
    const auto tracked = track_dressed_state(plan.system(), vacuum);
    return plan.system().vectors.col(static_cast<Eigen::Index>(tracked.eigen_index)).cast<complex>();
}

double phase_slope(const std::vector<double>& x, const std::vector<complex>& z) {
    require(x.size() == z.size() && x.size() >= 2, "phase_slope: need >= 2 samples");
    std::vector<double> phase(z.size());
    phase[0] = std::arg(z[0]);
    for (std::size_t k = 1; k < z.size(); ++k)
        phase[k] = phase[k - 1] + std::arg(z[k] / z[k - 1]);

    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += phase[k];
        sxx += x[k] * x[k];
        sxy += x[k] * phase[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ForceCorrelation force_force_correlation(const ModelParams& params, const BasisSpec& cutoffs,
                                         bool normal_ordered, std::size_t points, double t_offset) {
    require(points >= 2, "force_force_correlation: need >= 2 delays");
    const auto basis = build_basis(cutoffs);
    const EvolutionPlan plan(build_hamiltonian(basis, params));
    const ComplexVector ground = dressed_ground_state(plan);
    const auto force = radiation_pressure_operator(basis, params, normal_ordered);

    const double wc = params.omega_c();
    const double scale = wc / (2.0 * params.cavity_length);
    const double period = 2 * std::numbers::pi / wc;

    ForceCorrelation out;
    out.normal_ordered = normal_ordered;
    double magnitude = 0;
    for (std::size_t k = 0; k < points; ++k) {
        const double delay = period * static_cast<double>(k + 1) / static_cast<double>(points + 1);
        const auto c = time_ordered_correlation(plan, force, force, t_offset + delay, t_offset, ground);
        out.delays.push_back(delay);
        out.connected.push_back(c.connected_value);
        magnitude += std::abs(c.connected_value);
    }
    out.angular_frequency = -phase_slope(out.delays, out.connected);
    out.coefficient = magnitude / static_cast<double>(points);
    out.wick_coefficient = 2 * scale * scale;
    out.paper_coefficient = wc * wc / (4 * params.cavity_length * params.cavity_length);
    out.paper_ratio = out.coefficient / out.paper_coefficient;
    return out;
}

Cumulants operator_cumulants(const RealOperator& op, const ComplexVector& state) {
    double m[5] = {1, 0, 0, 0, 0};
    ComplexVector phi = state;
    for (int n = 1; n <= 4; ++n) {
        phi = op.entries * phi;
        m[n] = state.dot(phi).real();
    }
    const double mu = m[1];
    Cumulants c;
    c.mean = mu;
    c.variance = m[2] - mu * mu;
    c.third = m[3] - 3 * mu * m[2] + 2 * mu * mu * mu;
    const double central4 = m[4] - 4 * mu * m[3] + 6 * mu * mu * m[2] - 3 * mu * mu * mu * mu;
    c.fourth = central4 - 3 * c.variance * c.variance;
    c.excess_kurtosis = c.variance > 0 ? c.fourth / (c.variance * c.variance) : 0.0;
    return c;
}

Cumulants force_cumulants(const ModelParams& params, const BasisSpec& cutoffs, bool normal_ordered) {
    const auto basis = build_basis(cutoffs);
    const EvolutionPlan plan(build_hamiltonian(basis, params));
    return operator_cumulants(radiation_pressure_operator(basis, params, normal_ordered),
                              dressed_ground_state(plan));
}

} // namespace optocav
