#include "doctest.h"

#include <limits>
#include <numbers>

#include "generators.hpp"
#include "oracles.hpp"
#include "optocav/perturb.hpp"
#include "optocav/spectra.hpp"

using namespace optocav;

namespace {

const ModelParams P0 = from_frequencies(1.0, 0.3, 0.01);

double im(const FormulaResult& r) { return r.value.imag(); }
double re(const FormulaResult& r) { return r.value.real(); }

} // namespace

TEST_CASE("phonon self-energy and frequency shift") {
    const auto s = phonon_self_energy(0.3, P0);
    CHECK(s.two_particle == doctest::Approx(-2.94118e-5).epsilon(1e-5));
    CHECK(s.four_particle == doctest::Approx(-4.34783e-5).epsilon(1e-5));
    const auto d = delta_omega_m(P0);
    CHECK(re(d) == doctest::Approx(-7.28900e-5).epsilon(1e-5));
    CHECK(d.formula_id == "eq10");
    CHECK(d.pole_distance > default_pole_guard);

    const auto zero = phonon_self_energy(0.3, P0.with_g(0));
    CHECK(zero.two_particle == 0.0);
    CHECK(zero.four_particle == 0.0);
    CHECK_THROWS_AS(phonon_self_energy(2.0, P0), PoleError);

    const double tiny = 1e-7;
    CHECK(re(delta_omega_m(from_frequencies(1.0, tiny, 0.01))) ==
          doctest::Approx(-1e-4 * 1.5 / 2.0).epsilon(1e-6));
}

TEST_CASE("phonon shift is negative below resonance") {
    gen::Source src(61);
    for (int i = 0; i < 50; ++i) {
        const double wc = src.uniform(0.2, 3);
        const auto p = from_frequencies(wc, src.uniform(0.01, 0.99) * 2 * wc, src.uniform(-0.1, 0.1));
        CHECK(re(delta_omega_m(p)) < 0);
        CHECK(re(vacuum_energy_shift(p)) < 0);
    }
}

TEST_CASE("photon self-energy and shift") {
    const auto s = photon_self_energy(P0);
    CHECK(s.om == doctest::Approx(-3.33333e-4).epsilon(1e-5));
    CHECK(s.dce == doctest::Approx(-6.52174e-5).epsilon(1e-5));
    CHECK(re(delta_omega_c(P0)) == doctest::Approx(-3.98551e-4).epsilon(1e-5));
    const auto zero = photon_self_energy(P0.with_g(0));
    CHECK(zero.om == 0.0);
    CHECK(zero.dce == 0.0);
    CHECK(re(delta_omega_c(P0.with_rotating_wave(true))) == doctest::Approx(-1e-4 / 0.3).epsilon(1e-12));
}

TEST_CASE("rotating-wave mode removes pair-creation contributions") {
    const auto rw = P0.with_rotating_wave(true);
    CHECK(re(delta_omega_m(rw)) == 0.0);
    CHECK(re(vacuum_energy_shift(rw)) == 0.0);
    CHECK(photon_self_energy(rw).dce == 0.0);
}

TEST_CASE("vacuum shift") {
    CHECK(re(vacuum_energy_shift(P0)) == doctest::Approx(-2.17391e-5).epsilon(1e-5));
    CHECK(re(vacuum_energy_shift(P0.with_g(0))) == 0.0);
    CHECK(vacuum_energy_shift(P0).formula_id == "eq21");
}

TEST_CASE("printed Z-factors") {
    CHECK(1 - re(z_factor_phonon_paper(P0)) == doctest::Approx(1.60255e-6).epsilon(1e-5));
    CHECK(1 - re(z_factor_photon_paper(P0)) == doctest::Approx(5.67108e-5).epsilon(1e-5));
    CHECK(re(z_factor_phonon_paper(P0.with_g(0))) == 1.0);
    CHECK(re(z_factor_photon_paper(P0.with_g(0))) == 1.0);
}

TEST_CASE("perturbative overlap sum") {
    const auto cut = BasisSpec::single_mode(8, 8);
    CHECK(1 - z_factor_pt_oracle(P0, {0, 1}, cut) == doctest::Approx(3.62046e-5).epsilon(1e-5));
    CHECK(1 - z_factor_pt_oracle(P0, {1, 0}, cut) == doctest::Approx(1.13947e-3).epsilon(1e-5));
    CHECK(z_factor_pt_oracle(P0.with_g(0), {0, 1}, cut) == 1.0);

    gen::Source src(62);
    for (int i = 0; i < 20; ++i) {
        const double wc = src.uniform(0.5, 2), wm = src.uniform(0.05, 1.9) * wc, g = src.uniform(-0.05, 0.05);
        const auto p = from_frequencies(wc, wm, g);
        CHECK(z_factor_pt_oracle(p, {0, 1}, cut) == doctest::Approx(oracle::phonon_overlap(wc, wm, g)).epsilon(1e-12));
        CHECK(z_factor_pt_oracle(p, {1, 0}, cut) == doctest::Approx(oracle::photon_overlap(wc, wm, g)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(z_factor_pt_oracle(from_frequencies(1.0, 2.0, 0.01), {0, 1}, cut), Error);
}

TEST_CASE("vertex functions as printed") {
    CHECK(im(vertex_gamma(VertexKind::dce, 1.0, 0.0, P0)) == doctest::Approx(-4.90196e-7).epsilon(1e-5));
    CHECK(im(vertex_gamma(VertexKind::opto, 1.0, 0.0, P0)) == doctest::Approx(-2.81863e-7).epsilon(1e-5));
    CHECK(im(vertex_gamma(VertexKind::x, 0.5, 0.7, P0)) == doctest::Approx(3.90625e-7).epsilon(1e-5));
    CHECK(re(vertex_gamma(VertexKind::x, 0.5, 0.7, P0)) == 0.0);
    CHECK_THROWS_AS(vertex_gamma(VertexKind::dce, 1.3, 0.0, P0), PoleError);
    CHECK_THROWS_AS(vertex_gamma(VertexKind::x, 1.0, 1.0, P0), PoleError);
}

TEST_CASE("pole guard is relative to the reference frequency") {
    const auto near = from_frequencies(1.0, 2.0 - 1e-12, 0.01);
    CHECK_THROWS_AS(delta_omega_m(near), PoleError);
    try {
        delta_omega_m(near);
    } catch (const PoleError& e) {
        CHECK(std::abs(e.denominator()) < 1e-9);
    }
    CHECK_NOTHROW(delta_omega_m(from_frequencies(1.0, 2.0 - 1e-6, 0.01)));
}

TEST_CASE("elementary vertex prefactors") {
    const double g = 0.01;
    const auto table = vertex_prefactors(build_basis(BasisSpec::single_mode(4, 4)), P0);
    auto find = [&](Occupation from, Occupation to) {
        for (const auto& e : table)
            if (e.from == from && e.to == to)
                return e;
        FAIL("missing vertex");
        return VertexEntry{};
    };
    CHECK(find({1, 0}, {1, 1}).amplitude == doctest::Approx(g).epsilon(1e-14));
    CHECK(find({1, 0}, {1, 1}).vertex == "om");
    CHECK(find({0, 0}, {2, 1}).amplitude == doctest::Approx(g * std::sqrt(2.0) / 2).epsilon(1e-14));
    CHECK(find({0, 1}, {2, 0}).amplitude == doctest::Approx(g / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(find({0, 1}, {2, 0}).squared_over_g2 == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("tree amplitudes") {
    const auto cut = BasisSpec::single_mode(8, 8);
    const auto k1 = from_frequencies(1.0, 2.0, 0.01);
    CHECK(std::abs(tree_amplitude(k1, {0, 1}, {2, 0}, 1, cut)) == doctest::Approx(0.01 / std::sqrt(2.0)).epsilon(1e-14));

    for (int k = 2; k <= 4; ++k) {
        const auto p = from_frequencies(1.0, 2.0 / k, 0.01);
        const double a = tree_amplitude(p, {0, k}, {2, 0}, k, cut);
        const double b = tree_amplitude(p.with_g(0.02), {0, k}, {2, 0}, k, cut);
        CHECK(b / a == doctest::Approx(std::pow(2.0, k)).epsilon(1e-12));
    }
    const auto k2 = from_frequencies(1.0, 1.0, 0.01);
    CHECK(tree_amplitude(k2, {0, 2}, {2, 0}, 2, cut) == doctest::Approx(-2 * 1e-4 / 1.0).epsilon(1e-12));
}

TEST_CASE("amplitude scaling exponents") {
    const auto grid = log_grid(1e-3, 1e-2, 6);
    for (int k = 2; k <= 4; ++k) {
        const auto fit = amplitude_scaling_fit(k, 1.0, grid, BasisSpec::single_mode(8, 8));
        CHECK(fit.slope == doctest::Approx(k).epsilon(0.01));
        CHECK(fit.omega_m == doctest::Approx(2.0 / k));
    }
}

TEST_CASE("golden-rule width") {
    const auto w = golden_rule_width(P0, 1 / std::numbers::pi);
    CHECK(w.gamma == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(w.lifetime == doctest::Approx(1e4).epsilon(1e-14));
    CHECK(w.decaying);
    CHECK(golden_rule_width(P0, 2 / std::numbers::pi).gamma == doctest::Approx(2e-4).epsilon(1e-14));
    const auto none = golden_rule_width(P0.with_g(0), 1 / std::numbers::pi);
    CHECK(none.gamma == 0.0);
    CHECK(none.lifetime == std::numeric_limits<double>::infinity());
    CHECK_FALSE(none.decaying);
    CHECK_THROWS_AS(golden_rule_width(P0, -1.0), Error);
}

TEST_CASE("two-mode photon-photon interaction") {
    Matrix<double> gij(2, 2);
    gij << 0.01, -0.01, -0.01, 0.01;
    const auto p = from_frequencies({1.0, 2.0}, 0.3, gij);
    const BasisSpec cut{{5, 5}, 5};
    const auto fit = photon_photon_oracle(p, cut);
    CHECK(std::isfinite(fit.c4));
    CHECK(fit.fit_ok);

    const auto doubled = photon_photon_oracle(p.with_coupling_scale(2.0), cut);
    CHECK(doubled.c4 == doctest::Approx(16 * fit.c4).epsilon(1e-6));

    const auto free = photon_photon_oracle(p.with_coupling_scale(0.0), cut);
    CHECK(free.c4 == 0.0);
}
