#include "wshift/spectrum.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <string>

namespace wshift {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ComponentSample to_component(const MembershipResult& m) {
    ComponentSample c;
    c.r_plus = m.r_plus.value;
    c.r_minus = m.r_minus ? m.r_minus->value : kNaN;
    c.in_spectrum = m.in_spectrum;
    c.label = m.label;
    c.margin = m.margin;
    return c;
}

bool corners_mixed(const RegionGrid& g, const std::array<LatticePoint, 4>& corners) {
    const GridSample* s[4];
    for (int k = 0; k < 4; ++k) s[k] = g.find(corners[k]);
    for (int k = 1; k < 4; ++k) {
        if (s[k]->in_spectrum != s[0]->in_spectrum) return true;
        for (std::size_t c = 0; c < s[0]->parts.size(); ++c)
            if (s[k]->parts[c].label != s[0]->parts[c].label) return true;
    }
    return false;
}

std::array<LatticePoint, 4> corners_of(std::int64_t x, std::int64_t y, std::int64_t size) {
    return {LatticePoint{x, y}, LatticePoint{x + size, y}, LatticePoint{x + size, y + size},
            LatticePoint{x, y + size}};
}

CellClass class_of(const RegionGrid& g, const std::array<LatticePoint, 4>& corners) {
    int inside = 0;
    for (const auto& p : corners) inside += g.find(p)->in_spectrum ? 1 : 0;
    if (inside == 4) return CellClass::inside;
    if (inside == 0) return CellClass::outside;
    return CellClass::boundary;
}

void add_leaves(RegionGrid& g, std::int64_t x, std::int64_t y, std::int64_t size, int depth) {
    if (size >= 2 && g.find(LatticePoint{x + size / 2, y + size / 2}) != nullptr) {
        const auto h = size / 2;
        add_leaves(g, x, y, h, depth + 1);
        add_leaves(g, x + h, y, h, depth + 1);
        add_leaves(g, x, y + h, h, depth + 1);
        add_leaves(g, x + h, y + h, h, depth + 1);
        return;
    }
    g.leaves.push_back(Cell{x, y, size, depth, class_of(g, corners_of(x, y, size))});
}

}  // namespace

bool classify(double r_plus, std::optional<double> r_minus, double eps) {
    const double threshold = 1.0 - eps;
    return r_plus >= threshold && (!r_minus || *r_minus >= threshold);
}

PointLabel exact_label(double r_plus, std::optional<double> r_minus) {
    if (!r_minus) return r_plus >= 1.0 ? PointLabel::spectrum : PointLabel::forward_resolvent;
    const double r_m = *r_minus;
    if (r_plus >= 1.0 && r_m >= 1.0) return PointLabel::spectrum;
    if (r_plus < 1.0 && r_m >= 1.0) return PointLabel::forward_resolvent;
    if (r_plus >= 1.0) return PointLabel::backward_resolvent;
    return r_plus <= r_m ? PointLabel::forward_resolvent : PointLabel::backward_resolvent;
}

double membership_margin(double r_plus, std::optional<double> r_minus, bool in_spectrum) {
    const double lp = std::abs(std::log(r_plus));
    if (!r_minus) return lp;
    const double lm = std::abs(std::log(*r_minus));
    if (in_spectrum) return std::min(lp, lm);
    return std::abs(std::log(std::min(r_plus, *r_minus)));
}

MembershipEvaluator::MembershipEvaluator(const ShiftModel& model, int k_max, double eps, RadiusOptions options)
    : radii_(model, k_max, options), eps_(eps) {
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in [0, 1)");
}

MembershipResult MembershipEvaluator::operator()(cplx lambda) const {
    MembershipResult m;
    m.lambda = lambda;
    m.r_plus = radii_.r_plus(lambda);
    std::optional<double> rm;
    if (radii_.invertible()) {
        m.r_minus = radii_.r_minus(lambda);
        rm = m.r_minus->value;
    }
    m.in_spectrum = classify(m.r_plus.value, rm, eps_);
    m.label = exact_label(m.r_plus.value, rm);
    m.margin = membership_margin(m.r_plus.value, rm, m.in_spectrum);
    return m;
}

MembershipResult membership(const ShiftModel& model, cplx lambda, int k_max, double eps) {
    return MembershipEvaluator(model, k_max, eps)(lambda);
}

Box default_box(const ShiftModel& model) {
    const auto& d = model.diagonals();
    const auto window = fundamental_window(d, 1);
    cplx center{};
    for (Index i = window.first; i <= window.last; ++i) center += d(i);
    center /= static_cast<double>(window.size());
    double spread = 0.0;
    for (Index i = window.first; i <= window.last; ++i) spread = std::max(spread, std::abs(d(i) - center));
    double half = 1.3 * (model.weight_sup() + spread);
    if (half == 0.0) half = 1.0;
    return Box{center.real() - half, center.real() + half, center.imag() - half, center.imag() + half};
}

bool box_encloses_spectrum(const ShiftModel& model, const Box& box) {
    const auto& d = model.diagonals();
    const auto window = fundamental_window(d, 1);
    auto fits = [&](cplx c) {
        double spread = 0.0;
        for (Index i = window.first; i <= window.last; ++i) spread = std::max(spread, std::abs(d(i) - c));
        const double r = model.weight_sup() + spread;
        return box.x0 <= c.real() - r && box.x1 >= c.real() + r && box.y0 <= c.imag() - r && box.y1 >= c.imag() + r;
    };
    return fits({}) || fits({0.5 * (box.x0 + box.x1), 0.5 * (box.y0 + box.y1)});
}

std::string_view to_string(CellClass c) {
    switch (c) {
        case CellClass::outside: return "outside";
        case CellClass::inside: return "inside";
        case CellClass::boundary: return "boundary";
    }
    return "unknown";
}

std::string_view to_string(PointLabel l) {
    switch (l) {
        case PointLabel::spectrum: return "spectrum";
        case PointLabel::forward_resolvent: return "forward";
        case PointLabel::backward_resolvent: return "backward";
    }
    return "unknown";
}

const ComponentSample& GridSample::representative() const {
    for (const auto& p : parts)
        if (p.in_spectrum) return p;
    std::size_t best = 0;
    for (std::size_t c = 1; c < parts.size(); ++c)
        if (parts[c].margin < parts[best].margin) best = c;
    return parts[best];
}

cplx RegionGrid::at(LatticePoint p) const {
    return {box.x0 + static_cast<double>(p.x) * fine_dx(), box.y0 + static_cast<double>(p.y) * fine_dy()};
}

cplx RegionGrid::cell_center(const Cell& c) const {
    const double half = 0.5 * static_cast<double>(c.size);
    return {box.x0 + (static_cast<double>(c.x) + half) * fine_dx(), box.y0 + (static_cast<double>(c.y) + half) * fine_dy()};
}

double RegionGrid::cell_diagonal(const Cell& c) const {
    return std::hypot(fine_dx(), fine_dy()) * static_cast<double>(c.size);
}

double RegionGrid::finest_diagonal() const { return std::hypot(fine_dx(), fine_dy()); }

const GridSample* RegionGrid::find(LatticePoint p) const {
    const auto it = samples.find(p);
    return it == samples.end() ? nullptr : &it->second;
}

void validate(const ScanParams& p) {
    if (p.nx < 1 || p.ny < 1 || p.nx > 4096 || p.ny > 4096) throw std::invalid_argument("grid resolution must be in [1, 4096]");
    if (p.max_depth < 0 || p.max_depth > 8) throw std::invalid_argument("max_depth must be in [0, 8]");
    if (p.k_max < 8) throw std::invalid_argument("k_max must be >= 8");
    if (p.eps && !(*p.eps >= 0.0 && *p.eps < 1.0)) throw std::invalid_argument("eps must lie in [0, 1)");
    if (p.box && !(p.box->x1 > p.box->x0 && p.box->y1 > p.box->y0)) throw std::invalid_argument("box must have positive extent");
}

std::vector<std::vector<ComponentSample>> evaluate_points_serial(const PointEvaluator& evaluate,
                                                                 const std::vector<cplx>& points) {
    std::vector<std::vector<ComponentSample>> out(points.size());
    for (std::size_t t = 0; t < points.size(); ++t) out[t] = evaluate(points[t]);
    return out;
}

std::vector<std::vector<ComponentSample>> evaluate_points_parallel(const PointEvaluator& evaluate,
                                                                   const std::vector<cplx>& points, int threads) {
    std::vector<std::vector<ComponentSample>> out(points.size());
    const int nt = threads > 0 ? threads : omp_get_max_threads();
    const auto n = static_cast<std::ptrdiff_t>(points.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        try {
            out[static_cast<std::size_t>(t)] = evaluate(points[static_cast<std::size_t>(t)]);
        } catch (...) {
#pragma omp critical(wshift_eval_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

RegionGrid scan_with(const PointEvaluator& evaluate, int components, const Box& box, const ScanParams& params) {
    validate(params);
    RegionGrid g;
    g.box = box;
    g.nx = params.nx;
    g.ny = params.ny;
    g.max_depth = params.max_depth;
    g.k_max = params.k_max;
    g.eps = params.eps.value_or(default_eps(params.k_max));
    g.components = components;

    auto sample_points = [&](const std::set<LatticePoint>& pts) {
        if (g.samples.size() + pts.size() > params.cell_budget)
            throw BudgetExceeded("sample budget of " + std::to_string(params.cell_budget) + " points exceeded");
        std::vector<LatticePoint> todo(pts.begin(), pts.end());
        std::vector<cplx> lambdas;
        lambdas.reserve(todo.size());
        for (const auto& p : todo) lambdas.push_back(g.at(p));
        auto results = params.execution == Execution::serial ? evaluate_points_serial(evaluate, lambdas)
                                                             : evaluate_points_parallel(evaluate, lambdas, params.threads);
        for (std::size_t t = 0; t < todo.size(); ++t) {
            GridSample s;
            s.parts = std::move(results[t]);
            s.in_spectrum = std::any_of(s.parts.begin(), s.parts.end(), [](const auto& c) { return c.in_spectrum; });
            g.samples.emplace(todo[t], std::move(s));
        }
    };

    const auto m = g.scale();
    {
        std::set<LatticePoint> base;
        for (std::int64_t iy = 0; iy <= g.ny; ++iy)
            for (std::int64_t ix = 0; ix <= g.nx; ++ix) base.insert({ix * m, iy * m});
        sample_points(base);
    }

    struct Pending {
        std::int64_t x, y, size;
    };
    std::vector<Pending> active;
    for (std::int64_t iy = 0; iy < g.ny; ++iy)
        for (std::int64_t ix = 0; ix < g.nx; ++ix)
            if (corners_mixed(g, corners_of(ix * m, iy * m, m))) active.push_back({ix * m, iy * m, m});

    for (int depth = 1; depth <= g.max_depth && !active.empty(); ++depth) {
        if (active.size() * 4 > params.cell_budget)
            throw BudgetExceeded("refinement budget of " + std::to_string(params.cell_budget) + " cells exceeded");
        std::set<LatticePoint> fresh;
        for (const auto& c : active) {
            const auto h = c.size / 2;
            for (std::int64_t dy = 0; dy <= 2; ++dy)
                for (std::int64_t dx = 0; dx <= 2; ++dx) {
                    const LatticePoint p{c.x + dx * h, c.y + dy * h};
                    if (!g.find(p)) fresh.insert(p);
                }
        }
        sample_points(fresh);
        if (depth == g.max_depth) break;
        std::vector<Pending> next;
        for (const auto& c : active) {
            const auto h = c.size / 2;
            for (const auto& [ox, oy] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
                const Pending child{c.x + ox * h, c.y + oy * h, h};
                if (corners_mixed(g, corners_of(child.x, child.y, child.size))) next.push_back(child);
            }
        }
        active = std::move(next);
    }

    rebuild_cells(g);
    return g;
}

void rebuild_cells(RegionGrid& g) {
    g.leaves.clear();
    g.base_classes.assign(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny), CellClass::outside);
    const auto m = g.scale();
    for (std::int64_t iy = 0; iy < g.ny; ++iy)
        for (std::int64_t ix = 0; ix < g.nx; ++ix) {
            g.base_classes[static_cast<std::size_t>(iy * g.nx + ix)] = class_of(g, corners_of(ix * m, iy * m, m));
            add_leaves(g, ix * m, iy * m, m, 0);
        }
    std::sort(g.leaves.begin(), g.leaves.end(), [](const Cell& a, const Cell& b) {
        return LatticePoint{a.x, a.y} < LatticePoint{b.x, b.y};
    });
}

RegionGrid scan(const ShiftModel& model, const ScanParams& params) {
    if (model.step() != 1) throw std::invalid_argument("scan: step must be 1; use decompose_union for n-shifts");
    validate(params);
    const double eps = params.eps.value_or(default_eps(params.k_max));
    const MembershipEvaluator ev(model, params.k_max, eps, params.radius_options);
    const PointEvaluator f = [&ev](cplx lambda) { return std::vector<ComponentSample>{to_component(ev(lambda))}; };
    const Box box = params.box.value_or(default_box(model));
    auto grid = scan_with(f, 1, box, params);
    if (!box_encloses_spectrum(model, box)) grid.warnings.push_back("box does not contain the a-priori spectral enclosure");
    return grid;
}

RegionGrid decompose_union(const ShiftModel& model, const ScanParams& params) {
    validate(params);
    const double eps = params.eps.value_or(default_eps(params.k_max));
    std::vector<MembershipEvaluator> parts;
    for (int j = 0; j < model.step(); ++j)
        parts.emplace_back(model.residue_model(j), params.k_max, eps, params.radius_options);
    const PointEvaluator f = [&parts](cplx lambda) {
        std::vector<ComponentSample> out;
        out.reserve(parts.size());
        for (const auto& ev : parts) out.push_back(to_component(ev(lambda)));
        return out;
    };
    const Box box = params.box.value_or(default_box(model));
    auto grid = scan_with(f, model.step(), box, params);
    if (!box_encloses_spectrum(model, box)) grid.warnings.push_back("box does not contain the a-priori spectral enclosure");
    return grid;
}

}  // namespace wshift
