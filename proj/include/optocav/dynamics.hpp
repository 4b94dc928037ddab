#pragma once

#include <vector>

#include "optocav/spectra.hpp"

namespace optocav {

using ComplexVector = Vector<complex>;

/// exp(-iHt) through a cached eigendecomposition of a real Hamiltonian.
class EvolutionPlan {
public:
    explicit EvolutionPlan(const RealOperator& hamiltonian);

    const Eigensystem<double>& system() const { return system_; }
    const BasisPtr& basis() const { return system_.basis; }

    ComplexVector evolve(const ComplexVector& state, double t) const;

private:
    Eigensystem<double> system_;
};

/// Evolves a normalized state; rejects non-normalized input.
ComplexVector evolve(const EvolutionPlan& plan, const ComplexVector& state, double t);

std::vector<double> uniform_grid(double t_end, std::size_t points);

/// Default grid: `points` samples over `periods` free periods 2 pi / omega.
std::vector<double> default_grid(double omega, std::size_t points = 400, double periods = 4);

struct PopulationSeries {
    std::vector<double> times;
    std::vector<double> survival;    // |<initial|U(t)|initial>|^2
    std::vector<double> conversion;  // |<target|U(t)|initial>|^2
};

PopulationSeries population_series(const EvolutionPlan& plan, const Occupation& initial,
                                   const Occupation& target, const std::vector<double>& times);

/// Survival of |0,1> with conversion into |2,0>.
PopulationSeries survival_probability(const ModelParams& params, const BasisSpec& cutoffs,
                                      const std::vector<double>& times);

struct RabiFit {
    double first_minimum = 0;      // time of the first survival minimum
    double minimum_value = 0;
    double angular_frequency = 0;  // pi / first_minimum
    double expected = 0;           // sqrt(2) |g|
};

/// Locates the first survival minimum on the grid, then refines it by
/// Brent minimization on the exact evolution.
RabiFit fit_rabi(const EvolutionPlan& plan, const ModelParams& params, const PopulationSeries& series);

struct CorrelationResult {
    double t1 = 0;
    double t2 = 0;
    complex value;
    complex connected_value;
    bool time_ordered = true;
};

/// <psi|T A(t1) B(t2)|psi> in the Heisenberg picture of the plan's H.
CorrelationResult time_ordered_correlation(const EvolutionPlan& plan, const RealOperator& A,
                                           const RealOperator& B, double t1, double t2,
                                           const ComplexVector& state);

/// Ground state of the plan: the tracked dressed vacuum.
ComplexVector dressed_ground_state(const EvolutionPlan& plan);

struct ForceCorrelation {
    bool normal_ordered = false;
    std::vector<double> delays;
    std::vector<complex> connected;
    double angular_frequency = 0;   // minus the fitted phase slope
    double coefficient = 0;         // mean |connected|
    double wick_coefficient = 0;    // 2 (omega_c / 2L)^2
    double paper_coefficient = 0;   // omega_c^2 / 4L^2
    double paper_ratio = 0;         // coefficient / paper_coefficient
};

/// Connected <T F(t + delay) F(t)> over delays in (0, 2 pi / omega_c).
ForceCorrelation force_force_correlation(const ModelParams& params, const BasisSpec& cutoffs,
                                         bool normal_ordered, std::size_t points = 64,
                                         double t_offset = 0);

/// Unwrapped phase slope of a complex series against its abscissa.
double phase_slope(const std::vector<double>& x, const std::vector<complex>& z);

struct Cumulants {
    double mean = 0;
    double variance = 0;
    double third = 0;   // third central moment = kappa_3
    double fourth = 0;  // kappa_4
    double excess_kurtosis = 0;
};

/// Cumulants of a Hermitian operator in a state, from moments <X^n>.
Cumulants operator_cumulants(const RealOperator& op, const ComplexVector& state);

Cumulants force_cumulants(const ModelParams& params, const BasisSpec& cutoffs, bool normal_ordered);

} // namespace optocav
