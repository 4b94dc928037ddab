#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "generators.hpp"
#include "oracles.hpp"
#include "optocav/spectra.hpp"

using namespace optocav;

namespace {

Eigensystem<double> solve(const ModelParams& p, int photon, int phonon) {
    return eigensystem(build_hamiltonian(build_basis(BasisSpec::single_mode(photon, phonon)), p));
}

} // namespace

TEST_CASE("free spectrum and trivial tracking") {
    const auto p = from_frequencies(1.0, 0.3, 0.0);
    const auto sys = solve(p, 4, 5);
    std::vector<double> bare;
    for (const auto& s : sys.basis->states())
        bare.push_back(bare_energy(p, s));
    std::sort(bare.begin(), bare.end());
    for (std::size_t i = 0; i < bare.size(); ++i)
        CHECK(sys.values(static_cast<Eigen::Index>(i)) == doctest::Approx(bare[i]).epsilon(1e-14));
    for (const auto& s : sys.basis->states()) {
        const auto d = track_dressed_state(sys, s);
        CHECK(d.overlap_sq == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(d.energy == doctest::Approx(bare_energy(p, s)).epsilon(1e-14));
    }
}

TEST_CASE("resonant pair splits by sqrt(2)|g| and defeats tracking") {
    const double g = 1e-3;
    const auto p = from_frequencies(1.0, 2.0, g);
    const auto sys = solve(p, 6, 4);
    CHECK_THROWS_AS(track_dressed_state(sys, {0, 1}), Error);
    try {
        track_dressed_state(sys, {0, 1});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::strong_mixing);
    }

    // the two eigenvalues nearest omega_m straddle it by about g/sqrt(2)
    std::vector<double> near;
    for (Eigen::Index i = 0; i < sys.values.size(); ++i)
        if (std::abs(sys.values(i) - 2.0) < 10 * g)
            near.push_back(sys.values(i));
    REQUIRE(near.size() == 2);
    CHECK(near[1] - near[0] == doctest::Approx(oracle::rabi_frequency(g)).epsilon(1e-3));
}

TEST_CASE("completeness sum rule on random parameters") {
    gen::Source src(41);
    for (int trial = 0; trial < 6; ++trial) {
        const auto p = from_frequencies(src.uniform(0.5, 2), src.uniform(0.1, 0.9), src.uniform(-0.05, 0.05));
        const auto sys = solve(p, 6, 6);
        const auto i = static_cast<Eigen::Index>(sys.basis->index_of({0, 1}));
        CHECK(sys.vectors.row(i).squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("eigenvalues are invariant under basis reordering") {
    const auto p = from_frequencies(1.0, 0.7, 0.1);
    const auto h = build_hamiltonian(build_basis(BasisSpec::single_mode(5, 5)), p);
    gen::Source src(42);
    std::vector<int> perm(static_cast<std::size_t>(h.entries.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), src.engine());
    Eigen::PermutationMatrix<Eigen::Dynamic> P(Eigen::Map<Eigen::VectorXi>(perm.data(), static_cast<Eigen::Index>(perm.size())));
    const RealOperator shuffled{h.basis, P * h.entries * P.transpose()};
    CHECK((eigensystem(h).values - eigensystem(shuffled).values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tracked overlaps match the hand-summed series at small g") {
    for (double wm : {0.3, 0.7, 1.5}) {
        const double g = 1e-3;
        const auto p = from_frequencies(1.0, wm, g);
        const auto sys = solve(p, 12, 12);
        const double zb = track_dressed_state(sys, {0, 1}).overlap_sq;
        const double za = track_dressed_state(sys, {1, 0}).overlap_sq;
        CHECK(std::abs(zb - oracle::phonon_overlap(1.0, wm, g)) <= 1e-6 * zb);
        CHECK(std::abs(za - oracle::photon_overlap(1.0, wm, g)) <= 1e-6 * za);
    }
    const auto p0 = from_frequencies(1.0, 0.3, 0.01);
    CHECK(1 - track_dressed_state(solve(p0, 20, 20), {0, 1}).overlap_sq ==
          doctest::Approx(3.62046e-5).epsilon(2e-3));
}

TEST_CASE("level-shift fits reproduce the hand-summed coefficients") {
    const auto grid = log_grid(1e-3, 1e-2, 6);
    for (double wm : {0.3, 0.7, 1.5}) {
        const auto p = from_frequencies(1.0, wm, 0.01);
        const auto fits = level_shift_oracle(p, {{0, 0}, {0, 1}, {1, 0}}, grid, BasisSpec::single_mode(12, 12));
        CHECK(fits[0].c2 == doctest::Approx(oracle::ground_shift(1.0, wm, 1.0)).epsilon(1e-3));
        CHECK(fits[1].c2 == doctest::Approx(oracle::phonon_shift(1.0, wm, 1.0)).epsilon(1e-3));
        CHECK(fits[2].c2 == doctest::Approx(oracle::photon_shift(1.0, wm, 1.0)).epsilon(1e-3));
        for (const auto& f : fits)
            CHECK(f.fit_ok);
    }
    const auto p0 = from_frequencies(1.0, 0.3, 0.01);
    // -1 / (2 (2 omega_c + omega_m)) at P0
    CHECK(level_shift_oracle(p0, Occupation{0, 0}, grid, BasisSpec::single_mode(10, 10)).c2 ==
          doctest::Approx(-1.0 / (2 * 2.3)).epsilon(1e-4));
}

TEST_CASE("even polynomial and slope fits recover exact data") {
    std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5}, y, z;
    for (double v : x) {
        y.push_back(2 * v * v - 3 * v * v * v * v);
        z.push_back(5 * std::pow(v, 3));
    }
    const auto fit = fit_even_polynomial(x, y, 2);
    CHECK(fit.coefficients[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.coefficients[1] == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(loglog_slope(x, z) == doctest::Approx(3.0).epsilon(1e-12));
    const auto lg = log_grid(1e-3, 1e-1, 3);
    CHECK(lg[1] == doctest::Approx(1e-2).epsilon(1e-14));
}

TEST_CASE("cutoff convergence") {
    const auto free = cutoff_convergence(from_frequencies(1.0, 0.3, 0.0), {0, 0}, {{4, 4}, {8, 8}, {12, 12}});
    for (double d : free.deltas)
        CHECK(d == 0.0);

    const auto p0 = from_frequencies(1.0, 0.3, 0.01);
    const auto series = cutoff_convergence(p0, {0, 0}, {{10, 10}, {20, 20}, {30, 30}});
    CHECK(series.monotone);
    CHECK(series.last_delta < 1e-12);

    const auto a = track_dressed_state(solve(p0, 20, 15), {0, 0}).energy;
    const auto b = track_dressed_state(solve(p0, 20, 30), {0, 0}).energy;
    CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("transition gaps") {
    const auto free = transition_frequency(from_frequencies(1.0, 0.3, 0.0), {0, 1}, {0, 0}, BasisSpec::single_mode(4, 4));
    CHECK(free.gap == doctest::Approx(0.3).epsilon(1e-15));

    const auto p0 = from_frequencies(1.0, 0.3, 0.01);
    const auto cut = BasisSpec::single_mode(12, 12);
    CHECK(transition_frequency(p0, {0, 1}, {0, 0}, cut).gap - 0.3 == doctest::Approx(-5.1151e-5).epsilon(2e-3));
    CHECK(transition_frequency(p0, {1, 0}, {0, 0}, cut).gap - 1.0 == doctest::Approx(-3.7681e-4).epsilon(2e-3));
}
