#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "optocav/model.hpp"

namespace optocav {

template <typename Scalar>
struct Eigensystem {
    BasisPtr basis;
    Vector<double> values;   // ascending
    Matrix<Scalar> vectors;  // orthonormal columns
};

template <typename Scalar>
Eigensystem<Scalar> eigensystem(const OperatorMatrix<Scalar>& h) {
    if (!is_hermitian(h.entries))
        fail(ErrorKind::validation, "eigensystem: operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(h.entries);
    if (solver.info() != Eigen::Success)
        fail(ErrorKind::convergence, "eigensystem: eigensolver did not converge");
    return {h.basis, solver.eigenvalues(), solver.eigenvectors()};
}

/// Dressed eigenpair identified with a bare occupation state.
struct DressedState {
    Occupation bare;
    std::size_t eigen_index = 0;
    double energy = 0;
    double overlap_sq = 0;          // oracle Z-factor
    double runner_up_overlap_sq = 0;
};

/// Max-overlap tracking. Fails with strong_mixing when the best overlap^2 is
/// not above `threshold`, or when a second eigenvector carries more than half
/// of the best one's weight (a resonant pair).
DressedState track_dressed_state(const Eigensystem<double>& system, const Occupation& bare,
                                 double threshold = 0.5);

/// y ~ sum_k c_k x^(2k) for k = 1..orders, fitted as y/x^2 by least squares.
struct EvenPolynomialFit {
    std::vector<double> coefficients;  // c2, c4, ...
    double relative_residual = 0;
};

EvenPolynomialFit fit_even_polynomial(const std::vector<double>& x, const std::vector<double>& y,
                                      int orders);

/// Least-squares slope of log|y| against log|x|.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> log_grid(double lo, double hi, std::size_t points);

struct ShiftFit {
    Occupation label;
    BasisSpec cutoffs;
    std::vector<double> g_values;
    std::vector<double> shifts;    // tracked energy minus bare energy
    double c2 = 0;
    double c4 = 0;
    double relative_residual = 0;
    bool fit_ok = true;
};

/// Fits level shifts from exact diagonalization over a g-sweep to
/// c2 g^2 + c4 g^4. One eigensolve per g value serves every label.
std::vector<ShiftFit> level_shift_oracle(const ModelParams& params,
                                         const std::vector<Occupation>& labels,
                                         const std::vector<double>& g_sweep, const BasisSpec& cutoffs,
                                         double residual_tolerance = 1e-6);

ShiftFit level_shift_oracle(const ModelParams& params, const Occupation& label,
                            const std::vector<double>& g_sweep, const BasisSpec& cutoffs,
                            double residual_tolerance = 1e-6);

struct CutoffRung {
    int photon_cutoff = 0;
    int phonon_cutoff = 0;
    double value = 0;
};

struct ConvergenceSeries {
    Occupation label;
    std::vector<CutoffRung> rungs;
    std::vector<double> deltas;  // |value[i+1] - value[i]|
    double last_delta = 0;
    /// Deltas shrink monotonically, or are already below the noise floor.
    bool monotone = true;
};

/// Tracked dressed energy of `label` for each (photon, phonon) cutoff pair.
/// Every photon mode uses the same photon cutoff.
ConvergenceSeries cutoff_convergence(const ModelParams& params, const Occupation& label,
                                     const std::vector<std::pair<int, int>>& ladder,
                                     double noise_floor = 1e-12);

struct Transition {
    Occupation upper;
    Occupation lower;
    BasisSpec cutoffs;
    double gap = 0;
    double bare_gap = 0;
    double upper_shift = 0;
    double lower_shift = 0;
};

/// Dressed gap between two tracked states. gap - bare_gap equals the
/// difference of level shifts, so transitions out of the ground state
/// include -delta E_g.
Transition transition_frequency(const ModelParams& params, const Occupation& upper,
                                const Occupation& lower, const BasisSpec& cutoffs);

struct ShiftEntry {
    double oracle = 0;
    double formula = 0;
    double delta = 0;
};

struct ZEntry {
    double overlap_sq = 0;
    double paper = 0;
};

struct SpectralReport {
    ModelParams params;
    BasisSpec cutoffs;
    std::map<std::string, double> dressed_energies;
    std::map<std::string, ShiftEntry> shifts;
    std::map<std::string, ZEntry> z_factors;
    std::vector<ConvergenceSeries> convergence;
    std::vector<ShiftFit> fits;
};

} // namespace optocav
