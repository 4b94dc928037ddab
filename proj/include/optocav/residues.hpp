#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "optocav/error.hpp"
#include "optocav/rational.hpp"

/// Exact evaluation of loop-energy integrals built from retarded poles.
///
/// An integrand is
///
///     prod_v (dE_v / 2pi)  prod_k [2pi delta(c_k . E)]  sum_t  c_t prod_f 1/(D_f + i s_f 0+)
///
/// with every D_f linear in the loop energies. The i epsilon is never a
/// number: s_f in {+1, -1, 0} only decides which half-plane a pole lives in.
/// Integration closes the contour and sums residues exactly.
namespace optocav::residues {

class LinearForm {
public:
    LinearForm() = default;
    explicit LinearForm(std::size_t variables, Rational constant = Rational(0));

    static LinearForm variable(std::size_t variables, std::size_t index,
                               Rational coefficient = Rational(1));

    std::size_t size() const { return coefficients_.size(); }
    const Rational& coefficient(std::size_t index) const { return coefficients_.at(index); }
    const Rational& constant() const { return constant_; }
    bool is_constant() const;
    bool depends_on(std::size_t index) const { return coefficients_.at(index) != 0; }

    /// Replaces variable `index` by `replacement` (which must not contain it).
    LinearForm substitute(std::size_t index, const LinearForm& replacement) const;

    LinearForm& operator+=(const LinearForm& o);
    LinearForm& operator-=(const LinearForm& o);
    LinearForm& operator+=(const Rational& c);
    LinearForm& operator-=(const Rational& c);
    LinearForm& operator*=(const Rational& c);

    friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
    friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
    friend LinearForm operator+(LinearForm a, const Rational& c) { return a += c; }
    friend LinearForm operator-(LinearForm a, const Rational& c) { return a -= c; }
    friend LinearForm operator+(const Rational& c, LinearForm a) { return a += c; }
    friend LinearForm operator-(const Rational& c, LinearForm a) {
        a *= Rational(-1);
        return a += c;
    }
    friend LinearForm operator*(const Rational& c, LinearForm a) { return a *= c; }
    friend LinearForm operator-(LinearForm a) { return a *= Rational(-1); }
    friend bool operator==(const LinearForm&, const LinearForm&) = default;

    std::string format(const std::vector<std::string>& names) const;

private:
    std::vector<Rational> coefficients_;
    Rational constant_{0};
};

/// 1/(denominator + i * orientation * 0+).
struct PoleFactor {
    LinearForm denominator;
    int orientation = 1;

    /// The retarded pole 1/(energy - omega + i0); the numerator i of a
    /// propagator is carried by the term coefficient.
    static PoleFactor retarded(LinearForm energy, const Rational& omega) {
        energy -= omega;
        return {std::move(energy), 1};
    }
};

struct Term {
    ComplexRational coefficient{Rational(1)};
    std::vector<PoleFactor> factors;
};

/// 2pi delta(argument) when `two_pi` is set, plain delta(argument) otherwise.
struct DeltaConstraint {
    LinearForm argument;
    bool two_pi = true;
};

struct ExactValue {
    ComplexRational value;
    int two_pi_power = 0;  // value * (2pi)^two_pi_power
};

enum class Closure { lower, upper };

class RationalIntegrand {
public:
    explicit RationalIntegrand(std::vector<std::string> variable_names);

    std::size_t variable_count() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    std::size_t index(std::string_view name) const;

    /// The linear form of a single variable, for building factors.
    LinearForm var(std::string_view name) const;
    LinearForm constant(const Rational& c) const { return LinearForm(variable_count(), c); }

    RationalIntegrand& scale(const ComplexRational& c);
    /// Multiplies by the propagator i/(energy - omega + i0).
    RationalIntegrand& propagator(const LinearForm& energy, const Rational& omega);
    RationalIntegrand& factor(PoleFactor f);
    RationalIntegrand& delta(LinearForm argument, bool two_pi = true);

    const std::vector<std::size_t>& loop_variables() const { return loop_; }
    const std::vector<DeltaConstraint>& deltas() const { return deltas_; }
    const std::vector<Term>& terms() const { return terms_; }
    int two_pi_power() const { return two_pi_power_; }

private:
    friend RationalIntegrand resolve_deltas(RationalIntegrand, const std::vector<std::size_t>&);
    friend RationalIntegrand integrate_loop(const RationalIntegrand&, std::size_t, Closure);
    friend RationalIntegrand operator*(const ComplexRational&, RationalIntegrand);

    std::vector<std::string> names_;
    std::vector<std::size_t> loop_;
    std::vector<DeltaConstraint> deltas_;
    std::vector<Term> terms_;
    int two_pi_power_ = 0;
};

RationalIntegrand operator*(const ComplexRational& c, RationalIntegrand integrand);

/// Eliminates one variable per delta constraint, in order. The eliminated
/// variable is the first entry of `preferred` the delta depends on, else the
/// last loop variable it depends on. Each 2pi delta cancels the 1/2pi of the
/// variable it consumes; a coefficient c contributes 1/|c|.
RationalIntegrand resolve_deltas(RationalIntegrand integrand,
                                 const std::vector<std::size_t>& preferred = {});

/// Integrates one loop variable by residues. All deltas must be resolved.
RationalIntegrand integrate_loop(const RationalIntegrand& integrand, std::size_t variable,
                                 Closure closure = Closure::lower);

/// Resolves deltas and integrates the remaining loop variables in `order`
/// (declaration order when empty).
ExactValue evaluate(const RationalIntegrand& integrand, const std::vector<std::size_t>& order = {},
                    Closure closure = Closure::lower);

/// n-fold convolution of i/(E_k - omega + i0) under 2pi delta(sum E_k - energy).
ComplexRational multiparticle_propagator(int particles, const Rational& energy,
                                         const Rational& omega);

/// Canonical text form: sorted factors and terms, rationals as p/q.
std::string dump(const RationalIntegrand& integrand);

} // namespace optocav::residues
