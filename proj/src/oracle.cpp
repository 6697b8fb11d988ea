#include "wshift/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wshift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_rect_distance(cplx z, double x0, double x1, double y0, double y1) {
    const double dx = std::max({x0 - z.real(), 0.0, z.real() - x1});
    const double dy = std::max({y0 - z.imag(), 0.0, z.imag() - y1});
    return std::hypot(dx, dy);
}

double point_segment_distance(cplx z, cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(z - a);
    const double t = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
    return std::abs(z - (a + t * ab));
}

}  // namespace

std::string_view to_string(TruncationBoundary b) { return b == TruncationBoundary::zero ? "zero" : "circulant"; }

TruncatedMatrix truncate(const ShiftModel& model, int n, TruncationBoundary boundary, Index offset) {
    if (n < 2) throw std::invalid_argument("truncation size must be >= 2");
    if (model.step() != 1) throw std::invalid_argument("truncate: build n-shift truncations per residue submodel");
    if (boundary == TruncationBoundary::circulant) {
        const auto layout = model.layout();
        if (!layout.core && n % layout.period != 0)
            throw std::invalid_argument("circulant truncation needs N divisible by the period " +
                                        std::to_string(layout.period));
    }
    TruncatedMatrix m;
    m.boundary = boundary;
    m.offset = offset;
    m.entries = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m.entries(i, i) = model.diagonals()(offset + i);
        if (i + 1 < n) m.entries(i + 1, i) = model.weights()(offset + i);
    }
    if (boundary == TruncationBoundary::circulant) m.entries(0, n - 1) = model.weights()(offset + n - 1);
    return m;
}

Index default_offset(const ShiftModel& model, int n) {
    const auto layout = model.layout();
    if (!layout.core) return 0;
    const Index mid = (layout.core->first + layout.core->last) / 2;
    return mid - n / 2;
}

std::vector<cplx> eigenvalues(const TruncatedMatrix& m, int cap) {
    if (m.size() > cap) throw std::invalid_argument("matrix exceeds the dense eigenvalue cap");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver;
    solver.compute(m.entries, false);
    if (solver.info() != Eigen::Success)
        throw EigenFailure("eigenvalue iteration did not converge", static_cast<long>(solver.getMaxIterations()));
    const auto& ev = solver.eigenvalues();
    std::vector<cplx> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

double sigma_min_svd(const Eigen::MatrixXcd& a, cplx lambda) {
    Eigen::MatrixXcd shifted = a;
    shifted.diagonal().array() -= lambda;
    const Eigen::BDCSVD<Eigen::MatrixXcd> svd(shifted);
    return svd.singularValues().minCoeff();
}

double sigma_min(const Eigen::MatrixXcd& a, cplx lambda) {
    Eigen::MatrixXcd shifted = a;
    shifted.diagonal().array() -= lambda;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
    if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0) return 0.0;

    const auto n = a.rows();
    Eigen::VectorXcd v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = cplx(1.0 + 0.5 * std::cos(1.7 * static_cast<double>(k)), 0.0);
    v.normalize();

    double estimate = kInf;
    // Clustered small singular values make the iteration crawl; hand those to the SVD early.
    for (int it = 0; it < 40; ++it) {
        const Eigen::VectorXcd y = lu.adjoint().solve(v);
        const double ny = y.norm();
        if (!std::isfinite(ny)) return 0.0;
        const double next = 1.0 / ny;
        Eigen::VectorXcd z = lu.solve(y);
        const double nz = z.norm();
        if (!std::isfinite(nz) || nz == 0.0) return next;
        v = z / nz;
        if (std::abs(next - estimate) <= 1e-13 * next) return next;
        estimate = next;
    }
    return sigma_min_svd(a, lambda);
}

double non_normality(const TruncatedMatrix& m) {
    const Eigen::MatrixXcd& a = m.entries;
    return (a.adjoint() * a - a * a.adjoint()).norm();
}

cplx SigmaGrid::at(int ix, int iy) const {
    return {box.x0 + (box.x1 - box.x0) * ix / nx, box.y0 + (box.y1 - box.y0) * iy / ny};
}

SigmaGrid sigma_min_grid(const TruncatedMatrix& m, const Box& box, int nx, int ny, Execution execution, int threads) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("sigma grid needs nx, ny >= 1");
    SigmaGrid g{box, nx, ny, {}};
    const auto count = static_cast<std::ptrdiff_t>(nx + 1) * (ny + 1);
    g.values.assign(static_cast<std::size_t>(count), 0.0);
    auto one = [&](std::ptrdiff_t t) {
        const int ix = static_cast<int>(t % (nx + 1));
        const int iy = static_cast<int>(t / (nx + 1));
        g.values[static_cast<std::size_t>(t)] = sigma_min(m.entries, g.at(ix, iy));
    };
    if (execution == Execution::serial) {
        for (std::ptrdiff_t t = 0; t < count; ++t) one(t);
    } else {
        const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt)
        for (std::ptrdiff_t t = 0; t < count; ++t) one(t);
    }
    return g;
}

SigmaGrid sigma_min_grid(const ShiftModel& model, int n, TruncationBoundary boundary, const Box& box, int nx, int ny,
                         Execution execution, int threads) {
    return sigma_min_grid(truncate(model, n, boundary, default_offset(model, n)), box, nx, ny, execution, threads);
}

double distance_to_region(const RegionGrid& grid, cplx z) {
    double best = kInf;
    for (const auto& c : grid.leaves) {
        if (c.cls == CellClass::outside) continue;
        const cplx lo = grid.at({c.x, c.y});
        const cplx hi = grid.at({c.x + c.size, c.y + c.size});
        best = std::min(best, point_rect_distance(z, lo.real(), hi.real(), lo.imag(), hi.imag()));
        if (best == 0.0) break;
    }
    return best;
}

double distance_to_polyline(const BoundaryPolyline& poly, cplx z) {
    double best = kInf;
    for (const auto& comp : poly.components) {
        const auto& v = comp.vertices;
        if (v.size() == 1) best = std::min(best, std::abs(z - v[0]));
        for (std::size_t k = 0; k + 1 < v.size(); ++k) best = std::min(best, point_segment_distance(z, v[k], v[k + 1]));
        if (comp.closed && v.size() > 2) best = std::min(best, point_segment_distance(z, v.back(), v.front()));
    }
    return best;
}

CompareReport compare(const ShiftModel& model, const RegionGrid& grid, const BoundaryPolyline& boundary,
                      const OracleParams& params) {
    CompareReport r;
    const double base_diag = grid.finest_diagonal() * static_cast<double>(grid.scale());
    r.delta = params.delta.value_or(2.0 * base_diag);

    for (int j = 0; j < model.step(); ++j) {
        const ShiftModel sub = model.residue_model(j);
        int n = params.n;
        if (const auto period = sub.layout(); !period.core) n = static_cast<int>((n + period.period - 1) / period.period * period.period);
        r.n_used = n;
        const Index offset = params.offset.value_or(default_offset(sub, n));
        const auto circ = eigenvalues(truncate(sub, n, TruncationBoundary::circulant, offset));
        r.circulant_eigenvalues.insert(r.circulant_eigenvalues.end(), circ.begin(), circ.end());
        const auto zero = eigenvalues(truncate(sub, n, TruncationBoundary::zero, offset));
        r.zero_boundary_eigenvalues.insert(r.zero_boundary_eigenvalues.end(), zero.begin(), zero.end());
    }

    for (const auto& e : r.circulant_eigenvalues) {
        r.max_eigenvalue_to_region = std::max(r.max_eigenvalue_to_region, distance_to_region(grid, e));
        r.max_eigenvalue_to_boundary = std::max(r.max_eigenvalue_to_boundary, distance_to_polyline(boundary, e));
    }
    std::size_t covered = 0;
    for (const auto& c : grid.leaves) {
        if (c.cls != CellClass::inside) continue;
        ++r.inside_cells;
        const cplx center = grid.cell_center(c);
        const bool near = std::any_of(r.circulant_eigenvalues.begin(), r.circulant_eigenvalues.end(),
                                      [&](cplx e) { return std::abs(e - center) <= r.delta; });
        if (near) ++covered;
    }
    r.inside_coverage = r.inside_cells ? static_cast<double>(covered) / static_cast<double>(r.inside_cells) : 0.0;
    for (const auto& e : r.zero_boundary_eigenvalues)
        if (distance_to_region(grid, e) > r.delta) r.zero_boundary_discrepancies.push_back(e);
    return r;
}

}  // namespace wshift
