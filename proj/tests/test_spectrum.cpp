#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wshift/inverse_series.hpp"
#include "wshift/io.hpp"
#include "wshift/spectrum.hpp"
#include "zoo.hpp"

using namespace wshift;

namespace {

ShiftModel model(SequenceSpec w, SequenceSpec d, int step = 1) { return ShiftModel(std::move(w), std::move(d), step); }

ScanParams params(int n, int depth, std::optional<double> eps = std::nullopt) {
    ScanParams p;
    p.nx = p.ny = n;
    p.max_depth = depth;
    p.eps = eps;
    return p;
}

std::size_t count(const RegionGrid& g, CellClass c) {
    std::size_t n = 0;
    for (const auto& leaf : g.leaves) n += leaf.cls == c ? 1 : 0;
    return n;
}

}  // namespace

TEST_CASE("membership examples") {
    const auto circle = model(SequenceSpec::constant(2.0), SequenceSpec::constant(1.0));
    const auto on = membership(circle, 3.0, 64, default_eps(64));
    CHECK(on.in_spectrum);
    CHECK(on.r_plus.value == doctest::Approx(1.0));
    CHECK(on.r_minus->value == doctest::Approx(1.0));

    const auto center = membership(circle, 1.0, 64, default_eps(64));
    CHECK_FALSE(center.in_spectrum);
    CHECK(std::isinf(center.r_plus.value));
    CHECK(center.r_minus->value == 0.0);
    CHECK(center.label == PointLabel::backward_resolvent);

    const auto diagonal = membership(model(SequenceSpec::constant(0.0), SequenceSpec::constant(5.0)), 5.0, 64, 0.1);
    CHECK_FALSE(diagonal.r_minus.has_value());
    CHECK(diagonal.in_spectrum);

    const auto annulus = membership(model(SequenceSpec::step(1.0, 2.0), SequenceSpec::constant(0.0)), 1.5, 64, 0.0);
    CHECK(annulus.in_spectrum);
    CHECK(annulus.margin == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-6));
}

TEST_CASE("classification thresholds") {
    const double eps = 0.25;
    CHECK(classify(0.75, 0.75, eps));
    CHECK_FALSE(classify(std::nextafter(0.75, 0.0), 2.0, eps));
    CHECK(classify(0.8, std::nullopt, eps));
    CHECK(classify(INFINITY, INFINITY, eps));
    CHECK_FALSE(classify(0.0, INFINITY, eps));
    CHECK(exact_label(0.5, 2.0) == PointLabel::forward_resolvent);
    CHECK(exact_label(2.0, 0.5) == PointLabel::backward_resolvent);
    CHECK(exact_label(1.0, 1.0) == PointLabel::spectrum);
    CHECK(exact_label(0.5, std::nullopt) == PointLabel::forward_resolvent);
    CHECK(membership_margin(0.5, 2.0, false) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("unit circle with a zero-width band has no inside cells") {
    ScanParams p = params(64, 3, 0.0);
    p.box = Box{-2, 2, -2, 2};
    const auto g = scan(model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0)), p);
    CHECK(count(g, CellClass::inside) == 0);
    CHECK(count(g, CellClass::boundary) > 0);
    const auto b = extract_boundary(g);
    REQUIRE(b.components.size() == 1);
    CHECK(b.components[0].closed);
    for (const auto& v : b.components[0].vertices) CHECK(std::abs(std::abs(v) - 1.0) <= 2 * g.finest_diagonal());
}

TEST_CASE("annulus area of step weights") {
    const auto g = scan(model(SequenceSpec::step(1.0, 2.0), SequenceSpec::constant(0.0)), params(64, 3, 1e-3));
    double area = 0.0;
    for (const auto& c : g.leaves) {
        const double a = g.cell_width(c) * g.fine_dy() * static_cast<double>(c.size);
        area += c.cls == CellClass::inside ? a : c.cls == CellClass::boundary ? 0.5 * a : 0.0;
    }
    CHECK(area == doctest::Approx(3 * std::numbers::pi).epsilon(0.05));
}

TEST_CASE("box far from the spectrum") {
    ScanParams p = params(16, 2);
    p.box = Box{10, 11, 0, 1};
    const auto g = scan(model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0)), p);
    CHECK(count(g, CellClass::outside) == g.leaves.size());
    CHECK(g.leaves.size() == 256);
    CHECK(extract_boundary(g).components.empty());
    CHECK_FALSE(g.warnings.empty());
}

TEST_CASE("default box encloses the spectrum") {
    for (const auto& z : testing::zoo()) {
        const Box b = default_box(z.model);
        CHECK(box_encloses_spectrum(z.model, b));
        const auto g = scan(z.model, params(16, 0));
        CHECK(g.warnings.empty());
        // The box perimeter clears the default band.
        const MembershipEvaluator ev(z.model, 64, default_eps(64));
        for (int i = 0; i <= 32; ++i) {
            const double t = i / 32.0;
            const double x = b.x0 + t * (b.x1 - b.x0);
            const double y = b.y0 + t * (b.y1 - b.y0);
            for (cplx lambda : {cplx(x, b.y0), cplx(x, b.y1), cplx(b.x0, y), cplx(b.x1, y)}) {
                INFO(z.name, " ", lambda);
                CHECK_FALSE(ev(lambda).in_spectrum);
            }
        }
    }
}

TEST_CASE("budget and parameter checks") {
    const auto m = model(SequenceSpec::constant(2.0), SequenceSpec::constant(1.0));
    ScanParams p = params(32, 4);
    p.cell_budget = 2000;
    CHECK_THROWS_AS(scan(m, p), BudgetExceeded);
    CHECK_THROWS_AS(scan(m, params(0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(scan(m, params(4097, 1)), std::invalid_argument);
    CHECK_THROWS_AS(scan(m, params(8, 9)), std::invalid_argument);
    ScanParams k = params(8, 1);
    k.k_max = 4;
    CHECK_THROWS_AS(scan(m, k), std::invalid_argument);
    CHECK_THROWS_AS(scan(model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0), 2), params(8, 1)),
                    std::invalid_argument);
}

TEST_CASE("refinement leaves base classes unchanged") {
    for (const auto& z : testing::zoo()) {
        const auto coarse = scan(z.model, params(24, 0));
        for (const int depth : {1, 3}) {
            const auto fine = scan(z.model, params(24, depth));
            CHECK(fine.base_classes == coarse.base_classes);
        }
    }
}

TEST_CASE("grid structure invariants") {
    for (const auto& z : testing::zoo()) {
        const auto g = scan(z.model, params(24, 3));
        double covered = 0.0;
        for (const auto& c : g.leaves) {
            covered += static_cast<double>(c.size * c.size);
            int inside = 0;
            for (const auto& p : {LatticePoint{c.x, c.y}, LatticePoint{c.x + c.size, c.y},
                                  LatticePoint{c.x, c.y + c.size}, LatticePoint{c.x + c.size, c.y + c.size}})
                inside += g.find(p)->in_spectrum ? 1 : 0;
            if (c.cls == CellClass::boundary) CHECK((inside > 0 && inside < 4));
            if (c.cls == CellClass::inside) CHECK(inside == 4);
            if (c.cls == CellClass::outside) CHECK(inside == 0);
            CHECK(c.size == (std::int64_t{1} << (g.max_depth - c.depth)));
        }
        const double total = static_cast<double>(g.nx * g.scale()) * static_cast<double>(g.ny * g.scale());
        CHECK(covered == total);
    }
}

TEST_CASE("boundary segments stay within one refined cell") {
    for (const auto& z : testing::zoo()) {
        const auto g = scan(z.model, params(32, 3));
        const auto b = extract_boundary(g);
        const double limit = g.finest_diagonal() * static_cast<double>(g.scale());
        for (const auto& c : b.components) {
            for (std::size_t k = 0; k + 1 < c.vertices.size(); ++k)
                CHECK(std::abs(c.vertices[k + 1] - c.vertices[k]) <= limit);
            if (c.closed) CHECK(std::abs(c.vertices.back() - c.vertices.front()) <= limit);
        }
    }
}

TEST_CASE("pure shifts scan to the annulus of their spectral radii") {
    for (const auto& z : testing::zoo()) {
        if (z.model.diag_sup() != 0.0) continue;
        const auto bounds = spectral_radius_bounds(z.model, 256);
        const auto g = scan(z.model, params(48, 2, 1e-3));
        for (const auto& c : g.leaves) {
            if (c.cls != CellClass::inside) continue;
            const double r = std::abs(g.cell_center(c));
            const double slack = 2 * g.cell_diagonal(c);
            CHECK(r >= bounds.inner_estimate - slack);
            CHECK(r <= bounds.outer_estimate + slack);
        }
        for (const auto& [p, s] : g.samples) {
            const double r = std::abs(g.at(p));
            if (r > bounds.inner_estimate * 1.01 && r < bounds.outer_estimate * 0.99) CHECK(s.in_spectrum);
        }
    }
}

TEST_CASE("classification is rotation invariant without a diagonal") {
    const double turn = std::numbers::pi / 7;
    for (const auto& z : testing::zoo()) {
        if (z.model.diag_sup() != 0.0) continue;
        const auto g = scan(z.model, params(32, 1));
        const MembershipEvaluator ev(z.model, g.k_max, g.eps);
        std::size_t mismatches = 0;
        for (const auto& [p, s] : g.samples) mismatches += ev(g.at(p) * std::polar(1.0, turn)).in_spectrum != s.in_spectrum;
        CHECK(mismatches == 0);
    }
}

TEST_CASE("resolvent and spectrum witnesses") {
    // The spectrum witness needs a band narrower than the margin: eps < 1 - exp(-0.1).
    std::mt19937_64 rng(31);
    for (const auto& z : testing::zoo()) {
        const MembershipEvaluator ev(z.model, 128, default_eps(128));
        const Box b = default_box(z.model);
        std::uniform_real_distribution<double> ux(b.x0, b.x1), uy(b.y0, b.y1);
        int outside = 0, inside = 0;
        for (int n = 0; n < 4000 && (outside < 20 || inside < 20); ++n) {
            const cplx lambda(ux(rng), uy(rng));
            const auto m = ev(lambda);
            if (m.margin <= 0.1) continue;
            if (!m.in_spectrum && outside < 20) {
                ++outside;
                const auto s = build_inverse(z.model, lambda, 128);
                REQUIRE(s.has_value());
                const auto w = fundamental_window(z.model.layout(), 1);
                const std::vector<Index> probes{w.first, w.last};
                CHECK(residual_identity(*s, z.model, probes) <= 1e-6);
            } else if (m.in_spectrum && inside < 20) {
                ++inside;
                CHECK_FALSE(series_admissible(ev.radii(), lambda, SeriesDirection::forward));
                CHECK_FALSE(series_admissible(ev.radii(), lambda, SeriesDirection::backward));
            }
        }
        CHECK(outside == 20);
    }
}

TEST_CASE("n-shift union") {
    const auto unit = decompose_union(model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0), 2), params(48, 3));
    const auto direct = scan(model(SequenceSpec::constant(1.0), SequenceSpec::constant(0.0)), params(48, 3));
    CHECK(unit.components == 2);
    for (const auto& c : extract_boundary(unit).components)
        for (const auto& v : c.vertices) CHECK(std::abs(std::abs(v) - 1.0) <= 2 * unit.finest_diagonal());
    CHECK(grid_to_pgm(unit) == grid_to_pgm(direct));

    const auto two = decompose_union(model(SequenceSpec::periodic({1.0, 4.0}), SequenceSpec::constant(0.0), 2),
                                     params(64, 3));
    const auto b = extract_boundary(two);
    CHECK(b.components.size() == 2);
    for (const auto& c : b.components) {
        CHECK(c.closed);
        for (const auto& v : c.vertices)
            CHECK(std::min(std::abs(std::abs(v) - 1.0), std::abs(std::abs(v) - 4.0)) <= 2 * two.finest_diagonal());
    }
}

TEST_CASE("union of a single component equals the direct scan") {
    for (const auto& z : testing::zoo()) {
        const auto a = scan(z.model, params(20, 2));
        const auto b = decompose_union(z.model, params(20, 2));
        CHECK(grid_to_csv(a) == grid_to_csv(b));
        CHECK(a.base_classes == b.base_classes);
        REQUIRE(a.leaves.size() == b.leaves.size());
        for (std::size_t k = 0; k < a.leaves.size(); ++k) CHECK(a.leaves[k].cls == b.leaves[k].cls);
    }
}

TEST_CASE("serial and parallel scans agree for every thread count") {
    for (const auto& z : testing::zoo()) {
        ScanParams p = params(32, 3);
        p.execution = Execution::serial;
        const auto reference = grid_to_csv(scan(z.model, p)) + boundary_to_json(extract_boundary(scan(z.model, p))).dump();
        for (const int threads : {1, 2, 4, 8}) {
            p.execution = Execution::parallel;
            p.threads = threads;
            const auto g = scan(z.model, p);
            CHECK(grid_to_csv(g) + boundary_to_json(extract_boundary(g)).dump() == reference);
        }
    }
}

TEST_CASE("parallel evaluation propagates exceptions") {
    const PointEvaluator bad = [](cplx z) -> std::vector<ComponentSample> {
        if (z.real() > 0.5) throw std::runtime_error("boom");
        return {ComponentSample{}};
    };
    const std::vector<cplx> pts{0.0, 1.0, 0.2};
    CHECK_THROWS_AS(evaluate_points_parallel(bad, pts, 4), std::runtime_error);
}

TEST_CASE("circle boundary is one closed curve") {
    const auto g = scan(model(SequenceSpec::constant(2.0), SequenceSpec::constant(1.0)), params(48, 3));
    const auto b = extract_boundary(g);
    REQUIRE(b.components.size() == 1);
    CHECK(b.components[0].closed);
}
