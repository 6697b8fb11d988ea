// Contour extraction on the adaptively refined lattice ("marching polygons").
//
// Each leaf cell is walked as a polygon that includes the hanging lattice
// points contributed by finer neighbours, so a crossing on a shared edge is
// computed from the same two samples on both sides and segments join up
// exactly.

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "wshift/spectrum.hpp"

namespace wshift {

namespace {

struct NodeKey {
    std::int64_t ax, ay, bx, by;
    int component;
    auto operator<=>(const NodeKey&) const = default;
};

struct Node {
    cplx position;
    std::vector<std::size_t> segments;
};

double log_or_nan(double v) { return v >= 0.0 ? std::log(v) : std::numeric_limits<double>::quiet_NaN(); }

// Field whose zero separates the two labels.
double interface_field(const ComponentSample& s, PointLabel a, PointLabel b) {
    auto has = [&](PointLabel l) { return a == l || b == l; };
    const double lp = log_or_nan(s.r_plus);
    const double lm = log_or_nan(s.r_minus);
    if (has(PointLabel::spectrum) && has(PointLabel::forward_resolvent)) return lp;
    if (has(PointLabel::spectrum) && has(PointLabel::backward_resolvent)) return lm;
    return lp - lm;
}

// A spectrum sample none of whose nearest lattice neighbours is spectrum lies on
// a thin interface; it joins the resolvent side given by the sign of the field.
PointLabel effective_label(const RegionGrid& g, LatticePoint p, int c) {
    const auto& s = g.find(p)->parts[static_cast<std::size_t>(c)];
    if (s.label != PointLabel::spectrum) return s.label;
    const std::int64_t finest = std::int64_t{1} << g.max_depth;
    for (std::int64_t d = 1; d <= finest; d *= 2) {
        bool any = false;
        for (const LatticePoint q : {LatticePoint{p.x - d, p.y}, LatticePoint{p.x + d, p.y}, LatticePoint{p.x, p.y - d},
                                     LatticePoint{p.x, p.y + d}}) {
            const GridSample* n = g.find(q);
            if (!n) continue;
            any = true;
            if (n->parts[static_cast<std::size_t>(c)].label == PointLabel::spectrum) return s.label;
        }
        if (any) break;
    }
    const double f = log_or_nan(s.r_plus) - log_or_nan(s.r_minus);
    return f > 0.0 ? PointLabel::backward_resolvent : PointLabel::forward_resolvent;
}

std::vector<LatticePoint> polygon(const RegionGrid& g, const Cell& c) {
    std::vector<LatticePoint> out;
    auto take = [&](std::int64_t x, std::int64_t y) {
        if (g.find({x, y})) out.push_back({x, y});
    };
    for (std::int64_t t = 0; t < c.size; ++t) take(c.x + t, c.y);
    for (std::int64_t t = 0; t < c.size; ++t) take(c.x + c.size, c.y + t);
    for (std::int64_t t = 0; t < c.size; ++t) take(c.x + c.size - t, c.y + c.size);
    for (std::int64_t t = 0; t < c.size; ++t) take(c.x, c.y + c.size - t);
    return out;
}

class Builder {
public:
    explicit Builder(const RegionGrid& g) : g_(g) {}

    void add_cell(const Cell& cell) {
        const auto poly = polygon(g_, cell);
        std::vector<const GridSample*> samples;
        samples.reserve(poly.size());
        for (const auto& p : poly) samples.push_back(g_.find(p));

        for (int c = 0; c < g_.components; ++c) {
            if (covered_by_other(samples, c)) continue;
            std::vector<NodeKey> crossings;
            std::vector<bool> arc_spectrum;  // label of the vertex just after each crossing
            const auto n = poly.size();
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t k1 = (k + 1) % n;
                const auto la = effective_label(g_, poly[k], c);
                const auto lb = effective_label(g_, poly[k1], c);
                if (la == lb) continue;
                crossings.push_back(edge_node(poly[k], poly[k1], c));
                arc_spectrum.push_back(lb == PointLabel::spectrum);
            }
            connect(cell, c, crossings, arc_spectrum);
        }
    }

    BoundaryPolyline finish() {
        BoundaryPolyline out;
        std::vector<bool> used(segments_.size(), false);

        auto walk = [&](const NodeKey& start, std::size_t first_seg, BoundaryPolyline::Component& comp) {
            NodeKey cur = start;
            std::size_t seg = first_seg;
            comp.vertices.push_back(nodes_.at(cur).position);
            while (true) {
                used[seg] = true;
                const auto& [a, b] = segments_[seg];
                cur = (a == cur) ? b : a;
                if (comp.closed && cur == start) break;
                comp.vertices.push_back(nodes_.at(cur).position);
                const auto& node = nodes_.at(cur);
                if (node.segments.size() != 2) break;
                const std::size_t next = node.segments[0] == seg ? node.segments[1] : node.segments[0];
                if (used[next]) break;
                seg = next;
            }
        };

        for (const auto& [key, node] : nodes_) {
            if (node.segments.size() == 2) continue;
            for (const auto s : node.segments) {
                if (used[s]) continue;
                BoundaryPolyline::Component comp;
                walk(key, s, comp);
                out.components.push_back(std::move(comp));
            }
        }
        for (const auto& [key, node] : nodes_) {
            for (const auto s : node.segments) {
                if (used[s]) continue;
                BoundaryPolyline::Component comp;
                comp.closed = true;
                walk(key, s, comp);
                out.components.push_back(std::move(comp));
            }
        }

        auto leftmost = [](const BoundaryPolyline::Component& c) {
            auto it = std::min_element(c.vertices.begin(), c.vertices.end(), [](cplx a, cplx b) {
                return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });
            return std::pair{it->real(), it->imag()};
        };
        std::stable_sort(out.components.begin(), out.components.end(),
                         [&](const auto& a, const auto& b) { return leftmost(a) < leftmost(b); });
        return out;
    }

private:
    bool covered_by_other(const std::vector<const GridSample*>& samples, int c) const {
        for (int o = 0; o < g_.components; ++o) {
            if (o == c) continue;
            const bool all = std::all_of(samples.begin(), samples.end(), [o](const GridSample* s) {
                return s->parts[static_cast<std::size_t>(o)].label == PointLabel::spectrum;
            });
            if (all) return true;
        }
        return false;
    }

    NodeKey edge_node(LatticePoint p, LatticePoint q, int c) {
        if (q < p) std::swap(p, q);
        const NodeKey key{2 * p.x, 2 * p.y, 2 * q.x, 2 * q.y, c};
        if (nodes_.count(key)) return key;
        const auto& sp = g_.find(p)->parts[static_cast<std::size_t>(c)];
        const auto& sq = g_.find(q)->parts[static_cast<std::size_t>(c)];
        const auto lp = effective_label(g_, p, c);
        const auto lq = effective_label(g_, q, c);
        const double fp = interface_field(sp, lp, lq);
        const double fq = interface_field(sq, lp, lq);
        double t = 0.5;
        if (std::isfinite(fp) && std::isfinite(fq) && fp != fq) t = std::clamp(fp / (fp - fq), 0.0, 1.0);
        const cplx a = g_.at(p);
        const cplx b = g_.at(q);
        nodes_.emplace(key, Node{a + t * (b - a), {}});
        return key;
    }

    void add_segment(const NodeKey& a, const NodeKey& b) {
        nodes_.at(a).segments.push_back(segments_.size());
        nodes_.at(b).segments.push_back(segments_.size());
        segments_.emplace_back(a, b);
    }

    void connect(const Cell& cell, int c, const std::vector<NodeKey>& x, const std::vector<bool>& arc_spectrum) {
        const auto n = x.size();
        if (n < 2) return;
        if (n % 2 == 1) {
            // Three labels meet inside the cell: join every crossing to a junction at the centroid.
            const NodeKey junction{2 * cell.x + cell.size, 2 * cell.y + cell.size, 2 * cell.x + cell.size,
                                   2 * cell.y + cell.size, c};
            cplx centroid{};
            for (const auto& k : x) centroid += nodes_.at(k).position;
            nodes_.emplace(junction, Node{centroid / static_cast<double>(n), {}});
            for (const auto& k : x) add_segment(k, junction);
            return;
        }
        // Pair consecutive crossings; prefer the pairing that encloses spectrum arcs.
        const std::size_t shift = (n > 2 && !arc_spectrum[0] && arc_spectrum[1]) ? 1 : 0;
        for (std::size_t k = 0; k < n; k += 2) add_segment(x[(k + shift) % n], x[(k + shift + 1) % n]);
    }

    const RegionGrid& g_;
    std::map<NodeKey, Node> nodes_;
    std::vector<std::pair<NodeKey, NodeKey>> segments_;
};

}  // namespace

BoundaryPolyline extract_boundary(const RegionGrid& grid) {
    Builder b(grid);
    for (const auto& cell : grid.leaves) b.add_cell(cell);
    return b.finish();
}

}  // namespace wshift
