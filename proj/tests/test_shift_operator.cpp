#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wshift/spectrum.hpp"
#include "zoo.hpp"

using namespace wshift;

namespace {

double brute_norm_power(const ShiftModel& m, int k) {
    double best = 0.0;
    for (Index i = -100; i <= 100; ++i) {
        double p = 1.0;
        for (int t = 0; t < k; ++t) p *= std::abs(m.weights()(i + t));
        best = std::max(best, p);
    }
    return best;
}

ShiftModel weights_only(SequenceSpec w) { return ShiftModel(std::move(w), SequenceSpec::constant(0.0)); }

}  // namespace

TEST_CASE("norm of shift powers") {
    CHECK(norm_power(weights_only(SequenceSpec::constant(2.0)), 3) == doctest::Approx(8.0));
    const auto periodic = weights_only(SequenceSpec::periodic({1.0, 4.0}));
    CHECK(norm_power(periodic, 2) == doctest::Approx(4.0));
    CHECK(norm_power(periodic, 2) == doctest::Approx(brute_norm_power(periodic, 2)));
    const auto step = weights_only(SequenceSpec::step(1.0, 2.0));
    CHECK(norm_power(step, 4) == doctest::Approx(16.0));
    CHECK(norm_power(step, 4) == doctest::Approx(brute_norm_power(step, 4)));
}

TEST_CASE("norm_power matches brute force across the zoo") {
    for (const auto& z : testing::zoo())
        for (int k = 1; k <= 9; ++k) CHECK(norm_power(z.model, k) == doctest::Approx(brute_norm_power(z.model, k)));
}

TEST_CASE("submultiplicativity of power norms") {
    for (const auto& z : testing::zoo())
        for (int a = 1; a <= 6; ++a)
            for (int b = 1; b <= 6; ++b)
                CHECK(norm_power(z.model, a + b) <= norm_power(z.model, a) * norm_power(z.model, b) * (1 + 1e-12));
}

TEST_CASE("invertibility of the shift") {
    CHECK(weights_only(SequenceSpec::constant(1.0)).shift_invertible());
    CHECK_FALSE(weights_only(SequenceSpec::explicit_table(0, {1.0, 0.0, 1.0}, 1.0, 1.0)).shift_invertible());
    const auto step = weights_only(SequenceSpec::step(1.0, 2.0));
    CHECK(step.shift_invertible());
    CHECK(step.weight_inf() == doctest::Approx(1.0));
    CHECK(step.weight_sup() == doctest::Approx(2.0));
}

TEST_CASE("phase normalization") {
    const auto m = weights_only(SequenceSpec::constant(cplx(0.0, 1.0)));
    CHECK(normalize_phases(m).weights()(5) == cplx(1.0));
    const auto p = weights_only(SequenceSpec::periodic({std::polar(1.0, 0.4), std::polar(4.0, -2.0)}));
    const auto n = normalize_phases(p);
    CHECK(std::abs(n.weights()(0) - 1.0) <= 1e-15);
    CHECK(n.weights()(1).real() == doctest::Approx(4.0));
    CHECK(n.weights()(1).imag() == doctest::Approx(0.0));
    CHECK(n.weights().kind() == SequenceKind::periodic);
}

TEST_CASE("radii depend only on the weight moduli") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0), angle(0.0, 2 * std::numbers::pi);
    for (const auto& z : testing::zoo()) {
        std::vector<double> phases(z.model.weights().stored_count());
        for (auto& a : phases) a = angle(rng);
        const ShiftModel decorated(z.model.weights().with_phases(phases), z.model.diagonals());
        const RadiusEvaluator a(z.model, 48), b(decorated, 48), c(normalize_phases(decorated), 48);
        for (int k = 0; k < 10; ++k) {
            const cplx lambda(u(rng), u(rng));
            CHECK(b.r_plus(lambda).value == doctest::Approx(a.r_plus(lambda).value).epsilon(1e-12));
            CHECK(c.r_plus(lambda).value == doctest::Approx(a.r_plus(lambda).value).epsilon(1e-12));
            if (a.invertible()) CHECK(b.r_minus(lambda).value == doctest::Approx(a.r_minus(lambda).value).epsilon(1e-12));
        }
    }
}

TEST_CASE("rotation symmetry when the diagonal vanishes") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.5, 2.5), angle(0.0, 2 * std::numbers::pi);
    for (const auto& z : testing::zoo()) {
        if (z.model.diag_sup() != 0.0) continue;
        for (int k = 0; k < 30; ++k) {
            const cplx lambda(u(rng), u(rng));
            const auto a = membership(z.model, lambda, 64, default_eps(64));
            const auto b = membership(z.model, lambda * std::polar(1.0, angle(rng)), 64, default_eps(64));
            CHECK(a.in_spectrum == b.in_spectrum);
            CHECK(a.r_plus.value == doctest::Approx(b.r_plus.value).epsilon(1e-9));
        }
    }
}

TEST_CASE("spectral radius bounds") {
    const auto c = spectral_radius_bounds(weights_only(SequenceSpec::constant(2.0)), 64);
    CHECK(c.outer_upper == doctest::Approx(2.0));
    CHECK(c.outer_estimate == doctest::Approx(2.0));
    CHECK(c.inner_estimate == doctest::Approx(2.0));

    // Odd powers overshoot by 2^(1/k).
    const auto p15 = spectral_radius_bounds(weights_only(SequenceSpec::periodic({1.0, 4.0})), 15);
    const auto p255 = spectral_radius_bounds(weights_only(SequenceSpec::periodic({1.0, 4.0})), 255);
    CHECK(p15.outer_estimate == doctest::Approx(2.0 * std::pow(2.0, 1.0 / 15)));
    CHECK(p255.outer_estimate == doctest::Approx(2.0 * std::pow(2.0, 1.0 / 255)));
    CHECK(p255.outer_upper == doctest::Approx(2.0));

    const auto s = spectral_radius_bounds(weights_only(SequenceSpec::step(1.0, 2.0)), 64);
    CHECK(s.outer_upper == doctest::Approx(2.0));
    CHECK(s.inner_estimate == doctest::Approx(1.0));

    const ShiftModel perturbed(SequenceSpec::constant(1.0), SequenceSpec::constant(1.0));
    CHECK_THROWS_AS(spectral_radius_bounds(perturbed, 16), std::invalid_argument);
}

TEST_CASE("residue models of an n-shift") {
    const ShiftModel m(SequenceSpec::periodic({1.0, 4.0}), SequenceSpec::periodic({0.0, 1.0, 2.0}), 2);
    for (int j = 0; j < 2; ++j) {
        const auto r = m.residue_model(j);
        CHECK(r.step() == 1);
        for (Index i = -10; i <= 10; ++i) {
            CHECK(r.weights()(i) == m.weights()(j + 2 * i));
            CHECK(r.diagonals()(i) == m.diagonals()(j + 2 * i));
        }
    }
}
