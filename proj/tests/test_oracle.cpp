#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wshift/oracle.hpp"
#include "wshift/radii.hpp"
#include "zoo.hpp"

using namespace wshift;

namespace {

ShiftModel model(SequenceSpec w, SequenceSpec d, int step = 1) { return ShiftModel(std::move(w), std::move(d), step); }

double residual(const Eigen::MatrixXcd& a, cplx lambda) { return sigma_min_svd(a, lambda); }

}  // namespace

TEST_CASE("truncation layout") {
    const auto shift = truncate(model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0)), 3,
                                TruncationBoundary::zero, 0);
    Eigen::MatrixXcd nilpotent = Eigen::MatrixXcd::Zero(3, 3);
    nilpotent(1, 0) = 1.0;
    nilpotent(2, 1) = 1.0;
    CHECK(shift.entries == nilpotent);

    const auto cyclic = truncate(model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0)), 3,
                                 TruncationBoundary::circulant, 0);
    Eigen::MatrixXcd perm = nilpotent;
    perm(0, 2) = 1.0;
    CHECK(cyclic.entries == perm);

    const auto p = truncate(model(SequenceSpec::periodic({1.0, 4.0}), SequenceSpec::constant(0.0)), 4,
                            TruncationBoundary::circulant, 0);
    CHECK(p.entries(1, 0) == cplx(1.0));
    CHECK(p.entries(2, 1) == cplx(4.0));
    CHECK(p.entries(3, 2) == cplx(1.0));
    CHECK(p.entries(0, 3) == cplx(4.0));
    CHECK(p.entries.cwiseAbs().sum() == doctest::Approx(10.0));

    const auto d = truncate(model(SequenceSpec::constant(2.0), SequenceSpec::periodic({1.0, -1.0})), 4,
                            TruncationBoundary::zero, 1);
    CHECK(d.entries(0, 0) == cplx(-1.0));
    CHECK(d.entries(1, 1) == cplx(1.0));
    CHECK(d.offset == 1);
}

TEST_CASE("truncation preconditions") {
    const auto periodic = model(SequenceSpec::periodic({1.0, 4.0}), SequenceSpec::constant(0.0));
    CHECK_THROWS_AS(truncate(periodic, 5, TruncationBoundary::circulant, 0), std::invalid_argument);
    CHECK_NOTHROW(truncate(periodic, 5, TruncationBoundary::zero, 0));
    CHECK_THROWS_AS(truncate(periodic, 1, TruncationBoundary::zero, 0), std::invalid_argument);
    CHECK_THROWS_AS(truncate(model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0), 2), 8,
                             TruncationBoundary::zero, 0),
                    std::invalid_argument);
}

TEST_CASE("circulant eigenvalues of constant models") {
    const auto roots = eigenvalues(truncate(model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0)), 8,
                                            TruncationBoundary::circulant, 0));
    REQUIRE(roots.size() == 8);
    for (const cplx z : roots) {
        CHECK(std::abs(std::abs(z) - 1.0) < 1e-12);
        CHECK(std::abs(std::pow(z, 8) - 1.0) < 1e-10);
    }

    const auto m = truncate(model(SequenceSpec::constant(2.0), SequenceSpec::constant(1.0)), 16,
                            TruncationBoundary::circulant, 0);
    const auto ev = eigenvalues(m);
    REQUIRE(ev.size() == 16);
    for (int k = 0; k < 16; ++k) {
        const cplx expected = 1.0 + 2.0 * std::polar(1.0, 2 * std::numbers::pi * k / 16);
        double best = INFINITY;
        for (const cplx z : ev) best = std::min(best, std::abs(z - expected));
        CHECK(best < 1e-10);
    }
    for (const cplx z : ev) CHECK(residual(m.entries, z) < 1e-10);
    for (std::size_t i = 1; i < ev.size(); ++i)
        CHECK((ev[i - 1].real() < ev[i].real() ||
               (ev[i - 1].real() == ev[i].real() && ev[i - 1].imag() <= ev[i].imag())));
}

TEST_CASE("zero closure of a shift is nilpotent") {
    const auto m = truncate(model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0)), 32,
                            TruncationBoundary::zero, 0);
    for (const cplx z : eigenvalues(m)) CHECK(std::abs(z) < 1e-12);
    CHECK_THROWS_AS(eigenvalues(m, 16), std::invalid_argument);
}

TEST_CASE("smallest singular value") {
    const auto shift = model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0));
    const auto m = truncate(shift, 64, TruncationBoundary::zero, 0);
    CHECK(sigma_min(m.entries, 10.0) > 0.5);
    CHECK(sigma_min(m.entries, 10.0) == doctest::Approx(sigma_min_svd(m.entries, 10.0)).epsilon(1e-9));

    const auto c = truncate(shift, 64, TruncationBoundary::circulant, 0);
    CHECK(sigma_min(c.entries, std::polar(1.0, 2 * std::numbers::pi * 5 / 64)) < 1e-10);

    // Inside the unit disc the zero closure is nearly singular although the
    // truncated matrix has no eigenvalue there.
    CHECK(sigma_min(m.entries, 0.5) < 1e-12);
    CHECK(sigma_min(m.entries, 0.5) == doctest::Approx(sigma_min_svd(m.entries, 0.5)).epsilon(1e-6));

    for (const auto& z : testing::zoo()) {
        const auto t = truncate(z.model, 48, TruncationBoundary::zero, default_offset(z.model, 48));
        for (const cplx lambda : {cplx(0.3, 0.2), cplx(-1.1, 0.7), cplx(2.5, -0.4)}) {
            INFO(z.name, " ", lambda);
            const double a = sigma_min(t.entries, lambda);
            const double b = sigma_min_svd(t.entries, lambda);
            CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, b));
        }
    }
}

TEST_CASE("non-normality") {
    const auto shift = model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0));
    CHECK(non_normality(truncate(shift, 16, TruncationBoundary::zero, 0)) == doctest::Approx(std::sqrt(2.0)));
    CHECK(non_normality(truncate(shift, 16, TruncationBoundary::circulant, 0)) < 1e-12);
    CHECK(non_normality(truncate(model(SequenceSpec::step(1.0, 2.0), SequenceSpec::constant(0.0)), 16,
                                 TruncationBoundary::zero, -8)) > 0.0);
}

TEST_CASE("circulant eigenvalues lie on the radius curve") {
    for (const auto& z : testing::zoo()) {
        if (!z.periodic) continue;
        const RadiusEvaluator ev(z.model, 64);
        REQUIRE(ev.uses_closed_form());
        const auto m = truncate(z.model, 60, TruncationBoundary::circulant, 0);
        for (const cplx lambda : eigenvalues(m)) {
            INFO(z.name, " ", lambda);
            const double rp = ev.r_plus(lambda).value;
            const double rm = ev.r_minus(lambda).value;
            const double dev = std::min(std::abs(rp - 1.0), std::abs(rm - 1.0));
            INFO(dev);
            // Non-normal circulants lose a few digits in the computed eigenvalues.
            CHECK(dev < 1e-6);
        }
    }
}

TEST_CASE("circulant spectrum does not depend on the offset") {
    const auto m = model(SequenceSpec::periodic({1.0, 2.0, 0.5}), SequenceSpec::periodic({0.5, cplx(0.0, -0.5)}));
    const auto a = eigenvalues(truncate(m, 24, TruncationBoundary::circulant, 0));
    const auto b = eigenvalues(truncate(m, 24, TruncationBoundary::circulant, 7));
    REQUIRE(a.size() == b.size());
    for (const cplx z : b) {
        double best = INFINITY;
        for (const cplx y : a) best = std::min(best, std::abs(z - y));
        CHECK(best < 1e-9);
    }
}

TEST_CASE("sigma grid is identical serial and parallel") {
    const auto m = truncate(model(SequenceSpec::constant(2.0), SequenceSpec::constant(1.0)), 40,
                            TruncationBoundary::zero, 0);
    const Box box{-2, 4, -3, 3};
    const auto serial = sigma_min_grid(m, box, 12, 10, Execution::serial);
    for (const int threads : {1, 3}) {
        const auto parallel = sigma_min_grid(m, box, 12, 10, Execution::parallel, threads);
        CHECK(parallel.values == serial.values);
    }
    REQUIRE(serial.values.size() == 13 * 11);
    CHECK(serial.at(0, 0) == cplx(-2, -3));
    CHECK(serial.at(12, 10) == cplx(4, 3));
    CHECK(serial.value(3, 4) == doctest::Approx(sigma_min_svd(m.entries, serial.at(3, 4))).epsilon(1e-9));
}

TEST_CASE("comparison against the scanned region") {
    ScanParams p;
    p.nx = p.ny = 48;
    p.max_depth = 2;
    p.eps = 1e-3;

    const auto circle = model(SequenceSpec::constant(2.0), SequenceSpec::constant(1.0));
    const auto g = scan(circle, p);
    const auto b = extract_boundary(g);
    const auto r = compare(circle, g, b, OracleParams{64, std::nullopt, std::nullopt});
    CHECK(r.n_used == 64);
    CHECK(r.circulant_eigenvalues.size() == 64);
    const double cell = g.finest_diagonal() * static_cast<double>(g.scale());
    CHECK(r.delta == doctest::Approx(2 * cell));
    CHECK(r.max_eigenvalue_to_region <= 2 * cell);
    CHECK(r.max_eigenvalue_to_boundary <= 2 * cell);
    // The zero closure is lower triangular: every eigenvalue sits at d = 1, the
    // centre of the circle.
    REQUIRE_FALSE(r.zero_boundary_discrepancies.empty());
    for (const cplx z : r.zero_boundary_discrepancies) CHECK(std::abs(z - 1.0) < 1e-6);

    const auto lemniscate = model(SequenceSpec::constant(1.0), SequenceSpec::periodic({1.0, -1.0}));
    const auto gl = scan(lemniscate, p);
    const auto rl = compare(lemniscate, gl, extract_boundary(gl), OracleParams{63, std::nullopt, std::nullopt});
    CHECK(rl.n_used == 64);
    CHECK(rl.max_eigenvalue_to_boundary <= rl.delta);

    // The zero closure of the annulus collapses to 0, far from the spectrum.
    const auto annulus = model(SequenceSpec::step(1.0, 2.0), SequenceSpec::constant(0.0));
    const auto ga = scan(annulus, p);
    const auto ra = compare(annulus, ga, extract_boundary(ga), OracleParams{256, std::nullopt, std::nullopt});
    CHECK_FALSE(ra.zero_boundary_discrepancies.empty());
    for (const cplx z : ra.zero_boundary_discrepancies) CHECK(distance_to_region(ga, z) > ra.delta);
}

TEST_CASE("distances") {
    BoundaryPolyline poly;
    poly.components.push_back({true, {cplx(0, 0), cplx(1, 0), cplx(1, 1)}});
    CHECK(distance_to_polyline(poly, cplx(0.5, -2)) == doctest::Approx(2.0));
    CHECK(distance_to_polyline(poly, cplx(0, 1)) == doctest::Approx(std::sqrt(0.5)));
    CHECK(std::isinf(distance_to_polyline(BoundaryPolyline{}, 0.0)));
}
