#include "optocav/residues.hpp"

#include <algorithm>
#include <optional>

namespace optocav::residues {

namespace {

int sign(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

Rational magnitude(const Rational& r) { return r < 0 ? Rational(-r) : r; }

std::string format_factor(const PoleFactor& f, const std::vector<std::string>& names) {
    std::string body = f.denominator.format(names);
    if (f.orientation > 0)
        body += " + i0";
    else if (f.orientation < 0)
        body += " - i0";
    return "1/(" + body + ")";
}

// Folds constant factors into the coefficient.
void fold_constants(Term& term, const std::vector<std::string>& names) {
    auto keep = term.factors.begin();
    for (auto& f : term.factors) {
        if (!f.denominator.is_constant()) {
            if (&*keep != &f)
                *keep = std::move(f);
            ++keep;
            continue;
        }
        const Rational& c = f.denominator.constant();
        if (c == 0) {
            if (f.orientation != 0)
                fail(ErrorKind::singularity, "pinch singularity: " + format_factor(f, names));
            fail(ErrorKind::singularity, "double pole: " + format_factor(f, names));
        }
        term.coefficient *= ComplexRational(Rational(1) / c);
    }
    term.factors.erase(keep, term.factors.end());
}

} // namespace

LinearForm::LinearForm(std::size_t variables, Rational constant)
    : coefficients_(variables, Rational(0)), constant_(std::move(constant)) {}

LinearForm LinearForm::variable(std::size_t variables, std::size_t index, Rational coefficient) {
    LinearForm out(variables);
    out.coefficients_.at(index) = std::move(coefficient);
    return out;
}

bool LinearForm::is_constant() const {
    return std::all_of(coefficients_.begin(), coefficients_.end(),
                       [](const Rational& c) { return c == 0; });
}

LinearForm LinearForm::substitute(std::size_t index, const LinearForm& replacement) const {
    require(!replacement.depends_on(index), "substitute: replacement contains the variable");
    LinearForm out = *this;
    const Rational c = out.coefficients_.at(index);
    out.coefficients_[index] = 0;
    return out += c * replacement;
}

LinearForm& LinearForm::operator+=(const LinearForm& o) {
    require(o.size() == size(), "linear forms over different variables");
    for (std::size_t i = 0; i < size(); ++i)
        coefficients_[i] += o.coefficients_[i];
    constant_ += o.constant_;
    return *this;
}

LinearForm& LinearForm::operator-=(const LinearForm& o) { return *this += Rational(-1) * o; }

LinearForm& LinearForm::operator+=(const Rational& c) {
    constant_ += c;
    return *this;
}

LinearForm& LinearForm::operator-=(const Rational& c) {
    constant_ -= c;
    return *this;
}

LinearForm& LinearForm::operator*=(const Rational& c) {
    for (auto& x : coefficients_)
        x *= c;
    constant_ *= c;
    return *this;
}

std::string LinearForm::format(const std::vector<std::string>& names) const {
    std::string out;
    auto append = [&](const Rational& c, const std::string& symbol) {
        if (c == 0)
            return;
        const Rational m = magnitude(c);
        std::string body = symbol.empty() ? to_string(m)
                           : m == 1       ? symbol
                                          : to_string(m) + "*" + symbol;
        if (out.empty())
            out = (c < 0 ? "-" : "") + body;
        else
            out += (c < 0 ? " - " : " + ") + body;
    };
    for (std::size_t i = 0; i < size(); ++i)
        append(coefficients_[i], names.at(i));
    append(constant_, "");
    return out.empty() ? "0" : out;
}

RationalIntegrand::RationalIntegrand(std::vector<std::string> variable_names)
    : names_(std::move(variable_names)), terms_{Term{}} {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        require(std::count(names_.begin(), names_.end(), names_[i]) == 1,
                "duplicate loop variable " + names_[i]);
        loop_.push_back(i);
    }
}

std::size_t RationalIntegrand::index(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    require(it != names_.end(), "unknown loop variable " + std::string(name));
    return static_cast<std::size_t>(it - names_.begin());
}

LinearForm RationalIntegrand::var(std::string_view name) const {
    return LinearForm::variable(variable_count(), index(name));
}

RationalIntegrand& RationalIntegrand::scale(const ComplexRational& c) {
    for (auto& t : terms_)
        t.coefficient *= c;
    return *this;
}

RationalIntegrand& RationalIntegrand::propagator(const LinearForm& energy, const Rational& omega) {
    scale(ComplexRational::i());
    return factor(PoleFactor::retarded(energy, omega));
}

RationalIntegrand& RationalIntegrand::factor(PoleFactor f) {
    require(f.denominator.size() == variable_count(), "factor over different variables");
    require(f.orientation >= -1 && f.orientation <= 1, "orientation must be -1, 0 or +1");
    for (auto& t : terms_) {
        t.factors.push_back(f);
        fold_constants(t, names_);
    }
    return *this;
}

RationalIntegrand& RationalIntegrand::delta(LinearForm argument, bool two_pi) {
    require(argument.size() == variable_count(), "delta over different variables");
    deltas_.push_back({std::move(argument), two_pi});
    return *this;
}

RationalIntegrand operator*(const ComplexRational& c, RationalIntegrand integrand) {
    integrand.scale(c);
    return integrand;
}

RationalIntegrand resolve_deltas(RationalIntegrand in, const std::vector<std::size_t>& preferred) {
    auto pending = std::move(in.deltas_);
    in.deltas_.clear();

    for (std::size_t k = 0; k < pending.size(); ++k) {
        const LinearForm& arg = pending[k].argument;
        const auto loops = in.loop_;
        auto active = [&](std::size_t v) {
            return std::find(loops.begin(), loops.end(), v) != loops.end() && arg.depends_on(v);
        };

        std::optional<std::size_t> pivot;
        for (std::size_t v : preferred)
            if (active(v)) {
                pivot = v;
                break;
            }
        if (!pivot)
            for (auto it = loops.rbegin(); it != loops.rend(); ++it)
                if (active(*it)) {
                    pivot = *it;
                    break;
                }
        if (!pivot) {
            if (arg.constant() == 0)
                fail(ErrorKind::validation, "redundant delta constraint: delta(" +
                                                arg.format(in.names_) + ")");
            fail(ErrorKind::validation, "inconsistent delta constraint: delta(" +
                                            arg.format(in.names_) + ")");
        }

        // arg = c v + rest = 0  =>  v = -rest / c
        const std::size_t v = *pivot;
        const Rational c = arg.coefficient(v);
        LinearForm rest = arg;
        rest = rest.substitute(v, LinearForm(in.variable_count()));
        const LinearForm replacement = (Rational(-1) / c) * rest;

        for (std::size_t j = k + 1; j < pending.size(); ++j)
            pending[j].argument = pending[j].argument.substitute(v, replacement);
        for (auto& t : in.terms_) {
            for (auto& f : t.factors)
                f.denominator = f.denominator.substitute(v, replacement);
            t.coefficient *= ComplexRational(Rational(1) / magnitude(c));
            fold_constants(t, in.names_);
        }
        if (!pending[k].two_pi)
            --in.two_pi_power_;
        in.loop_.erase(std::find(in.loop_.begin(), in.loop_.end(), v));
    }
    return in;
}

RationalIntegrand integrate_loop(const RationalIntegrand& in, std::size_t variable,
                                 Closure closure) {
    require(in.deltas_.empty(), "integrate_loop: resolve delta constraints first");
    require(std::find(in.loop_.begin(), in.loop_.end(), variable) != in.loop_.end(),
            "integrate_loop: " + (variable < in.names_.size() ? in.names_[variable] : "?") +
                " is not an active loop variable");
    const std::string& name = in.names_[variable];

    RationalIntegrand out = in;
    out.terms_.clear();
    out.loop_.erase(std::find(out.loop_.begin(), out.loop_.end(), variable));

    const int wanted = closure == Closure::lower ? 1 : -1;
    const ComplexRational contour =
        closure == Closure::lower ? -ComplexRational::i() : ComplexRational::i();

    for (const Term& term : in.terms_) {
        std::vector<PoleFactor> fixed;
        std::vector<PoleFactor> moving;
        for (const auto& f : term.factors)
            (f.denominator.depends_on(variable) ? moving : fixed).push_back(f);

        if (moving.size() < 2)
            fail(ErrorKind::validation, "non-convergent integral over " + name +
                                            ": integrand falls off slower than 1/" + name + "^2");

        // Pole of a E + b + i s 0 sits at Im E = -s/a, i.e. below the axis when s a > 0.
        bool any_lower = false;
        bool any_upper = false;
        for (const auto& f : moving) {
            if (f.orientation == 0)
                fail(ErrorKind::singularity, "ambiguous contour: pole on the real " + name +
                                                 " axis in " + format_factor(f, in.names_));
            const int side = f.orientation * sign(f.denominator.coefficient(variable));
            (side > 0 ? any_lower : any_upper) = true;
        }
        if (!any_lower || !any_upper)
            continue;

        for (std::size_t k = 0; k < moving.size(); ++k) {
            const PoleFactor& pole = moving[k];
            const Rational& ak = pole.denominator.coefficient(variable);
            if (pole.orientation * sign(ak) != wanted)
                continue;

            Term residue = {term.coefficient * contour * ComplexRational(Rational(1) / ak), fixed};
            for (std::size_t j = 0; j < moving.size(); ++j) {
                if (j == k)
                    continue;
                const PoleFactor& other = moving[j];
                const Rational ratio = other.denominator.coefficient(variable) / ak;
                PoleFactor reduced{other.denominator - ratio * pole.denominator,
                                   sign(Rational(other.orientation) - ratio * pole.orientation)};
                if (reduced.denominator.is_constant() && reduced.denominator.constant() == 0) {
                    LinearForm at = pole.denominator.substitute(variable, LinearForm(in.variable_count()));
                    at *= Rational(-1) / ak;
                    const std::string where = name + " = " + at.format(in.names_);
                    fail(ErrorKind::singularity,
                         (reduced.orientation != 0 ? "pinch singularity at " : "double pole at ") +
                             where);
                }
                residue.factors.push_back(std::move(reduced));
            }
            fold_constants(residue, in.names_);
            out.terms_.push_back(std::move(residue));
        }
    }
    return out;
}

ExactValue evaluate(const RationalIntegrand& integrand, const std::vector<std::size_t>& order,
                    Closure closure) {
    RationalIntegrand current = resolve_deltas(integrand);
    std::vector<std::size_t> sequence = order;
    if (sequence.empty())
        sequence = current.loop_variables();
    for (std::size_t v : sequence)
        current = integrate_loop(current, v, closure);
    require(current.loop_variables().empty(), "evaluate: order leaves loop variables unintegrated");

    ExactValue out{ComplexRational{}, current.two_pi_power()};
    for (const auto& t : current.terms()) {
        require(t.factors.empty(), "evaluate: factor left after integration");
        out.value += t.coefficient;
    }
    return out;
}

ComplexRational multiparticle_propagator(int particles, const Rational& energy,
                                         const Rational& omega) {
    require(particles >= 1, "multiparticle_propagator: need at least one particle");
    std::vector<std::string> names;
    for (int k = 1; k <= particles; ++k)
        names.push_back("E" + std::to_string(k));
    RationalIntegrand integrand(names);
    LinearForm total(integrand.variable_count());
    for (const auto& n : names) {
        integrand.propagator(integrand.var(n), omega);
        total += integrand.var(n);
    }
    integrand.delta(total - energy);
    return evaluate(integrand).value;
}

std::string dump(const RationalIntegrand& integrand) {
    const auto& names = integrand.names();
    std::string out = "measure:";
    for (std::size_t v : integrand.loop_variables())
        out += " d" + names[v] + "/2pi";
    out += "\n";
    for (const auto& d : integrand.deltas())
        out += std::string(d.two_pi ? "2pi*delta(" : "delta(") + d.argument.format(names) + ")\n";
    if (integrand.two_pi_power() != 0)
        out += "(2pi)^" + std::to_string(integrand.two_pi_power()) + "\n";

    std::vector<std::string> lines;
    for (const auto& t : integrand.terms()) {
        std::vector<std::string> factors;
        for (const auto& f : t.factors)
            factors.push_back(format_factor(f, names));
        std::sort(factors.begin(), factors.end());
        std::string line = "(" + to_string(t.coefficient) + ")";
        for (const auto& f : factors)
            line += " * " + f;
        lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines)
        out += "  " + l + "\n";
    return out;
}

} // namespace optocav::residues
