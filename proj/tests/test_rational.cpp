#include "doctest.h"

#include "generators.hpp"
#include "optocav/error.hpp"
#include "optocav/rational.hpp"

using namespace optocav;

TEST_CASE("parse_rational reads decimals, exponents and fractions exactly") {
    CHECK(parse_rational("0.3") == make_rational(3, 10));
    CHECK(parse_rational("-1e-2") == make_rational(-1, 100));
    CHECK(parse_rational("3/7") == make_rational(3, 7));
    CHECK(parse_rational(" 2.5E1 ") == Rational(25));
    CHECK(parse_rational("1.5/0.5") == Rational(3));
}

TEST_CASE("parse_rational rejects garbage") {
    for (const char* bad : {"", "abc", "1e", "1..2", "1/0", "--1", "0x10"})
        CHECK_THROWS_AS(parse_rational(bad), Error);
}

TEST_CASE("exact_rational round-trips doubles") {
    gen::Source src(11);
    for (int i = 0; i < 200; ++i) {
        const double x = src.uniform(-1e3, 1e3) * std::pow(10.0, src.integer(-12, 6));
        CHECK(to_double(exact_rational(x)) == x);
    }
    CHECK(exact_rational(0.5) == make_rational(1, 2));
    CHECK(exact_rational(0.0) == Rational(0));
}

TEST_CASE("complex rational field axioms on random samples") {
    gen::Source src(12);
    for (int i = 0; i < 100; ++i) {
        const ComplexRational a{src.rational(-3, 3), src.rational(-3, 3)};
        const ComplexRational b{src.rational(-3, 3), src.rational(-3, 3)};
        const ComplexRational c{src.rational(-3, 3), src.rational(-3, 3)};
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a * b == b * a);
        if (!b.is_zero())
            CHECK((a / b) * b == a);
    }
    CHECK(ComplexRational::i() * ComplexRational::i() == ComplexRational(Rational(-1)));
    CHECK_THROWS_AS(ComplexRational(Rational(1)) / ComplexRational{}, Error);
}

TEST_CASE("string forms") {
    CHECK(to_string(make_rational(-6, 4)) == "-3/2");
    CHECK(to_string(ComplexRational{Rational(0), make_rational(1, 3)}) == "1/3 i");
    CHECK(to_string(ComplexRational{Rational(1), Rational(-2)}) == "1 - 2 i");
    CHECK(to_string(ComplexRational{Rational(0), Rational(-1)}) == "-1 i");
}
