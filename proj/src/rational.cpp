#include "optocav/rational.hpp"

#include <cmath>

#include "optocav/error.hpp"

namespace optocav {

std::string to_string(const Rational& r) {
    const auto num = boost::multiprecision::numerator(r);
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1)
        return num.str();
    return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational exact_rational(double x) {
    require(std::isfinite(x), "exact_rational: value must be finite");
    int exponent = 0;
    const double mantissa = std::frexp(x, &exponent);
    // 53 bits of mantissa fit a 64-bit integer exactly.
    const auto bits = static_cast<long long>(std::ldexp(mantissa, 53));
    exponent -= 53;
    Rational out(bits);
    const boost::multiprecision::cpp_int two = 2;
    if (exponent >= 0)
        out *= Rational(boost::multiprecision::pow(two, static_cast<unsigned>(exponent)));
    else
        out /= Rational(boost::multiprecision::pow(two, static_cast<unsigned>(-exponent)));
    return out;
}

Rational make_rational(long long num, long long den) {
    require(den != 0, "make_rational: zero denominator");
    return Rational(num) / Rational(den);
}

namespace {

Rational parse_decimal(std::string_view text, std::string_view whole) {
    using boost::multiprecision::cpp_int;
    auto bad = [&]() -> Rational { fail(ErrorKind::validation, "not a number: '" + std::string(whole) + "'"); };
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-'))
        negative = text[pos++] == '-';

    cpp_int digits = 0;
    int scale = 0;
    bool any = false;
    bool fraction = false;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (c == '.' && !fraction) {
            fraction = true;
        } else if (c >= '0' && c <= '9') {
            digits = digits * 10 + (c - '0');
            any = true;
            if (fraction)
                --scale;
        } else {
            break;
        }
    }
    if (!any)
        return bad();
    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E')
            return bad();
        const std::string exponent(text.substr(pos + 1));
        if (exponent.empty() || exponent.find_first_not_of("+-0123456789") != std::string::npos)
            return bad();
        std::size_t used = 0;
        const int e = std::stoi(exponent, &used);
        if (used != exponent.size() || e > 4000 || e < -4000)
            return bad();
        scale += e;
    }
    Rational out(digits);
    const cpp_int ten = 10;
    if (scale > 0)
        out *= Rational(boost::multiprecision::pow(ten, static_cast<unsigned>(scale)));
    else if (scale < 0)
        out /= Rational(boost::multiprecision::pow(ten, static_cast<unsigned>(-scale)));
    return negative ? Rational(-out) : out;
}

} // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && text.front() == ' ')
        text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ')
        text.remove_suffix(1);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return parse_decimal(text, text);
    const Rational den = parse_decimal(text.substr(slash + 1), text);
    if (den == 0)
        fail(ErrorKind::validation, "zero denominator in '" + std::string(text) + "'");
    return parse_decimal(text.substr(0, slash), text) / den;
}

ComplexRational& ComplexRational::operator/=(const ComplexRational& o) {
    const Rational norm = o.re * o.re + o.im * o.im;
    if (norm == 0)
        fail(ErrorKind::singularity, "complex rational division by zero");
    *this *= o.conj();
    re /= norm;
    im /= norm;
    return *this;
}

std::string to_string(const ComplexRational& z) {
    if (z.im == 0)
        return to_string(z.re);
    const std::string imag = to_string(abs(z.im)) + " i";
    if (z.re == 0)
        return (z.im < 0 ? "-" : "") + imag;
    return to_string(z.re) + (z.im < 0 ? " - " : " + ") + imag;
}

} // namespace optocav
