#include "wshift/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace wshift {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Index floor_mod(Index i, Index p) {
    Index r = i % p;
    return r < 0 ? r + p : r;
}

Index floor_div(Index a, Index b) {
    Index q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Index ceil_div(Index a, Index b) { return -floor_div(-a, b); }

// Uniform double in [0, 1) from the top 53 bits; stable across standard libraries.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<cplx> materialize(const RandomSeq& r) {
    std::mt19937_64 rng(r.seed);
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(r.last - r.first + 1));
    for (Index i = r.first; i <= r.last; ++i) {
        const double modulus = r.modulus_lo + (r.modulus_hi - r.modulus_lo) * unit_uniform(rng);
        const double phase = 2.0 * std::numbers::pi * unit_uniform(rng);
        out.push_back(r.random_phase ? std::polar(modulus, phase) : cplx(modulus, 0.0));
    }
    return out;
}

}  // namespace

SequenceSpec::SequenceSpec(Payload p) : payload_(std::move(p)) {}

SequenceSpec SequenceSpec::constant(cplx value) { return SequenceSpec(ConstantSeq{value}); }

SequenceSpec SequenceSpec::periodic(std::vector<cplx> values) {
    if (values.empty()) throw std::invalid_argument("periodic sequence needs at least one value");
    return SequenceSpec(PeriodicSeq{std::move(values)});
}

SequenceSpec SequenceSpec::step(cplx left, cplx right) { return SequenceSpec(StepSeq{left, right}); }

SequenceSpec SequenceSpec::explicit_table(Index start, std::vector<cplx> values, cplx left, cplx right) {
    if (values.empty()) throw std::invalid_argument("explicit sequence needs a non-empty table");
    return SequenceSpec(ExplicitSeq{start, std::move(values), left, right});
}

SequenceSpec SequenceSpec::random(const RandomSeq& params) {
    if (params.first > params.last) throw std::invalid_argument("random sequence span is empty");
    if (!(params.modulus_lo >= 0.0) || !(params.modulus_hi >= params.modulus_lo) || !std::isfinite(params.modulus_hi))
        throw std::invalid_argument("random sequence modulus bounds must satisfy 0 <= lo <= hi < inf");
    SequenceSpec s{params};
    s.random_values_ = materialize(params);
    return s;
}

SequenceKind SequenceSpec::kind() const {
    return std::visit(overloaded{
                          [](const ConstantSeq&) { return SequenceKind::constant; },
                          [](const PeriodicSeq&) { return SequenceKind::periodic; },
                          [](const StepSeq&) { return SequenceKind::step; },
                          [](const ExplicitSeq&) { return SequenceKind::explicit_table; },
                          [](const RandomSeq&) { return SequenceKind::random; },
                      },
                      payload_);
}

cplx SequenceSpec::operator()(Index i) const {
    return std::visit(overloaded{
                          [](const ConstantSeq& c) { return c.value; },
                          [i](const PeriodicSeq& p) {
                              const auto n = static_cast<Index>(p.values.size());
                              return p.values[static_cast<std::size_t>(floor_mod(i, n))];
                          },
                          [i](const StepSeq& s) { return i < 0 ? s.left : s.right; },
                          [i](const ExplicitSeq& e) {
                              const auto end = e.start + static_cast<Index>(e.values.size());
                              if (i < e.start) return e.left;
                              if (i >= end) return e.right;
                              return e.values[static_cast<std::size_t>(i - e.start)];
                          },
                          [i, this](const RandomSeq& r) {
                              if (i < r.first) return r.left;
                              if (i > r.last) return r.right;
                              return random_values_[static_cast<std::size_t>(i - r.first)];
                          },
                      },
                      payload_);
}

SequenceLayout SequenceSpec::layout() const {
    return std::visit(overloaded{
                          [](const ConstantSeq&) { return SequenceLayout{std::nullopt, 1}; },
                          [](const PeriodicSeq& p) {
                              return SequenceLayout{std::nullopt, static_cast<Index>(p.values.size())};
                          },
                          [](const StepSeq&) { return SequenceLayout{IndexRange{-1, 0}, 1}; },
                          [](const ExplicitSeq& e) {
                              const auto last = e.start + static_cast<Index>(e.values.size()) - 1;
                              return SequenceLayout{IndexRange{e.start, last}, 1};
                          },
                          [](const RandomSeq& r) { return SequenceLayout{IndexRange{r.first, r.last}, 1}; },
                      },
                      payload_);
}

std::optional<Index> SequenceSpec::global_period() const {
    const auto l = layout();
    if (l.core) return std::nullopt;
    return l.period;
}

SequenceSpec SequenceSpec::moduli() const {
    auto abs_all = [](std::vector<cplx> v) {
        for (auto& x : v) x = std::abs(x);
        return v;
    };
    return std::visit(
        overloaded{
            [](const ConstantSeq& c) { return constant(std::abs(c.value)); },
            [&](const PeriodicSeq& p) { return periodic(abs_all(p.values)); },
            [](const StepSeq& s) { return step(std::abs(s.left), std::abs(s.right)); },
            [&](const ExplicitSeq& e) {
                return explicit_table(e.start, abs_all(e.values), std::abs(e.left), std::abs(e.right));
            },
            [&](const RandomSeq& r) {
                return explicit_table(r.first, abs_all(random_values_), std::abs(r.left), std::abs(r.right));
            },
        },
        payload_);
}

std::size_t SequenceSpec::stored_count() const {
    return std::visit(overloaded{
                          [](const ConstantSeq&) -> std::size_t { return 1; },
                          [](const PeriodicSeq& p) { return p.values.size(); },
                          [](const StepSeq&) -> std::size_t { return 2; },
                          [](const ExplicitSeq& e) { return e.values.size() + 2; },
                          [this](const RandomSeq&) { return random_values_.size() + 2; },
                      },
                      payload_);
}

SequenceSpec SequenceSpec::with_phases(std::span<const double> phases) const {
    if (phases.size() != stored_count()) throw std::invalid_argument("with_phases: one phase per stored value required");
    auto rot = [&](cplx v, std::size_t k) { return v * std::polar(1.0, phases[k]); };
    auto rot_all = [&](const std::vector<cplx>& v) {
        std::vector<cplx> out(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) out[k] = rot(v[k], k);
        return out;
    };
    return std::visit(overloaded{
                          [&](const ConstantSeq& c) { return constant(rot(c.value, 0)); },
                          [&](const PeriodicSeq& p) { return periodic(rot_all(p.values)); },
                          [&](const StepSeq& s) { return step(rot(s.left, 0), rot(s.right, 1)); },
                          [&](const ExplicitSeq& e) {
                              const auto n = e.values.size();
                              return explicit_table(e.start, rot_all(e.values), rot(e.left, n), rot(e.right, n + 1));
                          },
                          [&](const RandomSeq& r) {
                              const auto n = random_values_.size();
                              return explicit_table(r.first, rot_all(random_values_), rot(r.left, n),
                                                    rot(r.right, n + 1));
                          },
                      },
                      payload_);
}

SequenceSpec SequenceSpec::subsample(Index residue, Index step_n) const {
    if (step_n < 1 || residue < 0 || residue >= step_n)
        throw std::invalid_argument("subsample: need 0 <= residue < step");
    if (step_n == 1) return *this;

    auto from_table = [&](Index start, const std::vector<cplx>& values, cplx left, cplx right) {
        const Index last = start + static_cast<Index>(values.size()) - 1;
        const Index lo = ceil_div(start - residue, step_n);
        const Index hi = floor_div(last - residue, step_n);
        if (lo > hi) return explicit_table(lo, {right}, left, right);
        std::vector<cplx> sub;
        for (Index i = lo; i <= hi; ++i) sub.push_back(values[static_cast<std::size_t>(residue + i * step_n - start)]);
        return explicit_table(lo, std::move(sub), left, right);
    };

    return std::visit(overloaded{
                          [&](const ConstantSeq&) { return *this; },
                          [&](const PeriodicSeq& p) {
                              const auto n = static_cast<Index>(p.values.size());
                              const Index sub_period = n / std::gcd(n, step_n);
                              std::vector<cplx> sub;
                              for (Index i = 0; i < sub_period; ++i)
                                  sub.push_back(p.values[static_cast<std::size_t>(floor_mod(residue + i * step_n, n))]);
                              return periodic(std::move(sub));
                          },
                          // residue + i*step >= 0  <=>  i >= 0 for 0 <= residue < step
                          [&](const StepSeq&) { return *this; },
                          [&](const ExplicitSeq& e) { return from_table(e.start, e.values, e.left, e.right); },
                          [&](const RandomSeq& r) { return from_table(r.first, random_values_, r.left, r.right); },
                      },
                      payload_);
}

SequenceLayout combine(const SequenceLayout& a, const SequenceLayout& b) {
    SequenceLayout out;
    out.period = std::lcm(a.period, b.period);
    if (a.core && b.core) {
        out.core = IndexRange{std::min(a.core->first, b.core->first), std::max(a.core->last, b.core->last)};
    } else {
        out.core = a.core ? a.core : b.core;
    }
    return out;
}

// Windows entirely left of the core repeat with the period, so they can be
// shifted to start in [a - len - P + 1, a - len]; windows right of the core to
// [b + 1, b + P]; windows meeting the core start in [a - len + 1, b].
IndexRange fundamental_window(const SequenceLayout& layout, Index max_len) {
    if (max_len < 1) throw std::invalid_argument("fundamental_window: max_len must be >= 1");
    const Index p = layout.period;
    if (!layout.core) return IndexRange{0, p - 1};
    return IndexRange{layout.core->first - max_len - (p - 1), layout.core->last + std::max(max_len, p)};
}

IndexRange fundamental_window(const SequenceSpec& spec, Index max_len) {
    return fundamental_window(spec.layout(), max_len);
}

LogModulusPrefix::LogModulusPrefix(std::span<const cplx> values, cplx shift)
    : sums_(values.size() + 1, 0.0), zeros_(values.size() + 1, 0) {
    for (std::size_t t = 0; t < values.size(); ++t) {
        const double m = std::abs(values[t] - shift);
        const bool zero = (m == 0.0);
        sums_[t + 1] = sums_[t] + (zero ? 0.0 : std::log(m));
        zeros_[t + 1] = zeros_[t] + (zero ? 1u : 0u);
    }
}

double LogModulusPrefix::operator[](std::size_t j) const {
    return zeros_[j] ? -std::numeric_limits<double>::infinity() : sums_[j];
}

double LogModulusPrefix::window(std::size_t j, std::size_t len) const {
    return window_has_zero(j, len) ? -std::numeric_limits<double>::infinity() : window_finite(j, len);
}

std::vector<cplx> sample(const SequenceSpec& spec, IndexRange range) {
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(std::max<Index>(range.size(), 0)));
    for (Index i = range.first; i <= range.last; ++i) out.push_back(spec(i));
    return out;
}

std::vector<double> log_modulus_prefix(const SequenceSpec& spec, IndexRange range) {
    const auto values = sample(spec, range);
    const LogModulusPrefix prefix(values);
    std::vector<double> out(prefix.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = prefix[j];
    return out;
}

}  // namespace wshift
