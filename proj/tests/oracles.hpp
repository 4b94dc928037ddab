#pragma once

// Independent reference values: hand-summed perturbation series, two-level
// models and Wick contractions. None of these call the library formulas.

#include <cmath>

namespace oracle {

/// Second-order overlap deficit of |0,1>, summed over |2,0> and |2,2>.
inline double phonon_overlap(double wc, double wm, double g) {
    const double to_20 = g / std::sqrt(2.0);     // <2,0|V|0,1>
    const double to_22 = (g / 2) * std::sqrt(2.0) * std::sqrt(2.0);
    const double d20 = wm - 2 * wc;
    const double d22 = wm - (2 * wc + 2 * wm);
    return 1 - to_20 * to_20 / (d20 * d20) - to_22 * to_22 / (d22 * d22);
}

/// Same for |1,0>, summed over |1,1> and |3,1>.
inline double photon_overlap(double wc, double wm, double g) {
    const double to_11 = g;
    const double to_31 = (g / 2) * std::sqrt(2.0) * std::sqrt(3.0);
    const double d11 = wc - (wc + wm);
    const double d31 = wc - (3 * wc + wm);
    return 1 - to_11 * to_11 / (d11 * d11) - to_31 * to_31 / (d31 * d31);
}

/// Second-order shifts from the same intermediate states.
inline double ground_shift(double wc, double wm, double g) {
    const double to_21 = (g / 2) * std::sqrt(2.0);  // <2,1|V|0,0>
    return to_21 * to_21 / (0 - (2 * wc + wm));
}

inline double phonon_shift(double wc, double wm, double g) {
    const double to_20 = g / std::sqrt(2.0);
    const double to_22 = g;
    return to_20 * to_20 / (wm - 2 * wc) + to_22 * to_22 / (wm - (2 * wc + 2 * wm));
}

inline double photon_shift(double wc, double wm, double g) {
    // |1,1>, and |3,1> from (g/2)(a+)^2 b+; the a^2 b+ channel is closed.
    const double to_11 = g;
    const double to_31 = (g / 2) * std::sqrt(6.0);
    return to_11 * to_11 / (wc - (wc + wm)) + to_31 * to_31 / (wc - (3 * wc + wm));
}

/// Splitting of the degenerate pair |0,1>, |2,0> at wm = 2 wc.
inline double rabi_frequency(double g) { return 2 * std::abs(g) / std::sqrt(2.0); }

/// <0|a a a+ a+|0> = 2 times the squared force scale.
inline double wick_force_coefficient(double wc, double length) {
    const double s = wc / (2 * length);
    return 2 * s * s;
}

/// Central moments of s (x^2 - 1) and s x^2 with x a unit-variance Gaussian.
inline double force_variance(double wc, double length) { return wick_force_coefficient(wc, length); }
inline double force_third(double wc, double length) {
    const double s = wc / (2 * length);
    return 8 * s * s * s;
}

} // namespace oracle
