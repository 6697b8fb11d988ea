#include "wshift/inverse_series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wshift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

cplx unit(cplx z) { return z / std::abs(z); }

double tail_estimate(const InverseSeries& s) {
    const int last = s.length();
    if (last < s.first_offset()) return 0.0;
    double tail = 0.0;
    double ratio = 0.0;
    const auto cols = s.columns();
    for (Index i = cols.first; i <= cols.last; ++i) {
        const double lm = s.polar(i, last).log_modulus;
        tail = std::max(tail, std::exp(lm));
        if (last - 1 >= s.first_offset()) {
            const double prev = s.polar(i, last - 1).log_modulus;
            if (prev != -kInf && lm != -kInf) ratio = std::max(ratio, std::exp(lm - prev));
        } else {
            ratio = kInf;
        }
    }
    if (tail == 0.0) return 0.0;
    if (ratio >= 1.0) return kInf;
    return tail / (1.0 - ratio);
}

}  // namespace

std::string_view to_string(SeriesDirection d) {
    return d == SeriesDirection::forward ? "forward" : "backward";
}

cplx PolarCoefficient::value() const {
    if (log_modulus == -kInf) return {};
    return std::exp(log_modulus) * phase;
}

InverseSeries::InverseSeries(SeriesDirection direction, cplx lambda, int length, IndexRange columns,
                             std::vector<PolarCoefficient> coeffs)
    : direction_(direction), lambda_(lambda), length_(length), columns_(columns), coeffs_(std::move(coeffs)) {
    if (length_ < 0) throw std::invalid_argument("series length must be >= 0");
    if (coeffs_.size() != static_cast<std::size_t>(columns_.size()) * static_cast<std::size_t>(length_ + 1))
        throw std::invalid_argument("coefficient table does not match the column range");
    tail_bound_ = tail_estimate(*this);
}

std::size_t InverseSeries::slot(Index column, int offset) const {
    return static_cast<std::size_t>(column - columns_.first) * static_cast<std::size_t>(length_ + 1) +
           static_cast<std::size_t>(offset);
}

const PolarCoefficient& InverseSeries::polar(Index column, int offset) const {
    if (!columns_.contains(column) || offset < 0 || offset > length_)
        throw std::out_of_range("coefficient outside the stored series");
    return coeffs_[slot(column, offset)];
}

cplx InverseSeries::coefficient(Index column, int offset) const {
    if (offset < first_offset() || offset > length_) return {};
    return polar(column, offset).value();
}

IndexRange default_series_range(const ShiftModel& model, int length) {
    const auto w = fundamental_window(model.layout(), 1);
    return IndexRange{w.first - length, w.last + length};
}

InverseSeries build_forward(const ShiftModel& model, cplx lambda, int length, IndexRange columns) {
    if (length < 0) throw std::invalid_argument("series length must be >= 0");
    const auto& w = model.weights();
    const auto& d = model.diagonals();
    const auto stride = static_cast<std::size_t>(length + 1);
    std::vector<PolarCoefficient> coeffs(static_cast<std::size_t>(columns.size()) * stride);

    for (Index i = columns.first; i <= columns.last; ++i) {
        auto* col = &coeffs[static_cast<std::size_t>(i - columns.first) * stride];
        const cplx d0 = d(i) - lambda;
        if (d0 == cplx{}) throw DenominatorZero("d_" + std::to_string(i) + " equals lambda");
        col[0] = {-std::log(std::abs(d0)), std::conj(unit(d0))};
        for (int l = 0; l < length; ++l) {
            const cplx wn = w(i + l);
            const cplx dn = d(i + l + 1) - lambda;
            if (dn == cplx{}) throw DenominatorZero("d_" + std::to_string(i + l + 1) + " equals lambda");
            PolarCoefficient next = col[l];
            if (wn == cplx{} || next.log_modulus == -kInf) {
                next.log_modulus = -kInf;
            } else {
                next.log_modulus += std::log(std::abs(wn)) - std::log(std::abs(dn));
                next.phase = unit(-next.phase * unit(wn) * std::conj(unit(dn)));
            }
            col[l + 1] = next;
        }
    }
    return InverseSeries(SeriesDirection::forward, lambda, length, columns, std::move(coeffs));
}

InverseSeries build_forward(const ShiftModel& model, cplx lambda, int length) {
    return build_forward(model, lambda, length, default_series_range(model, length));
}

InverseSeries build_backward(const ShiftModel& model, cplx lambda, int length, IndexRange columns) {
    if (length < 0) throw std::invalid_argument("series length must be >= 0");
    const auto& w = model.weights();
    const auto& d = model.diagonals();
    const auto stride = static_cast<std::size_t>(length + 1);
    std::vector<PolarCoefficient> coeffs(static_cast<std::size_t>(columns.size()) * stride,
                                         PolarCoefficient{-kInf, {1.0, 0.0}});

    for (Index i = columns.first; i <= columns.last; ++i) {
        if (length == 0) break;
        auto* col = &coeffs[static_cast<std::size_t>(i - columns.first) * stride];
        const cplx w1 = w(i - 1);
        if (w1 == cplx{}) throw WeightZero("w_" + std::to_string(i - 1) + " vanishes");
        col[1] = {-std::log(std::abs(w1)), std::conj(unit(w1))};
        // a^i_{i-k-1} = -a^i_{i-k} (d_{i-k} - lambda) / w_{i-k-1}
        for (int k = 1; k < length; ++k) {
            const cplx dn = d(i - k) - lambda;
            const cplx wn = w(i - k - 1);
            if (wn == cplx{}) throw WeightZero("w_" + std::to_string(i - k - 1) + " vanishes");
            PolarCoefficient next = col[k];
            if (dn == cplx{} || next.log_modulus == -kInf) {
                next.log_modulus = -kInf;
            } else {
                next.log_modulus += std::log(std::abs(dn)) - std::log(std::abs(wn));
                next.phase = unit(-next.phase * unit(dn) * std::conj(unit(wn)));
            }
            col[k + 1] = next;
        }
    }
    return InverseSeries(SeriesDirection::backward, lambda, length, columns, std::move(coeffs));
}

InverseSeries build_backward(const ShiftModel& model, cplx lambda, int length) {
    return build_backward(model, lambda, length, default_series_range(model, length));
}

bool series_admissible(const RadiusEvaluator& radii, cplx lambda, SeriesDirection direction) {
    if (direction == SeriesDirection::forward) return radii.r_plus(lambda).value < 1.0;
    return radii.invertible() && radii.r_minus(lambda).value < 1.0;
}

double residual_identity(const InverseSeries& series, const ShiftModel& model, std::span<const Index> probes) {
    const auto& w = model.weights();
    const auto& d = model.diagonals();
    const cplx lambda = series.lambda();
    const int len = series.length();
    const auto cols = series.columns();
    const bool fwd = series.direction() == SeriesDirection::forward;

    double worst = 0.0;
    for (const Index i : probes) {
        if (!cols.contains(i) || !cols.contains(i + 1))
            throw std::out_of_range("probe " + std::to_string(i) + " lacks coefficient support");
        // Dense scratch over rows [base, base + size).
        const Index base = fwd ? i - 1 : i - len - 2;
        const auto size = static_cast<std::size_t>(len + 4);
        std::vector<cplx> tf(size), ft(size);
        auto at = [&](std::vector<cplx>& v, Index r) -> cplx& { return v[static_cast<std::size_t>(r - base)]; };

        for (int o = series.first_offset(); o <= len; ++o) {
            const Index r = series.row(i, o);
            const cplx a = series.coefficient(i, o);
            // (T - lambda) F e_i
            at(tf, r) += (d(r) - lambda) * a;
            at(tf, r + 1) += w(r) * a;
            // F (T - lambda) e_i = w_i F e_{i+1} + (d_i - lambda) F e_i
            at(ft, series.row(i + 1, o)) += w(i) * series.coefficient(i + 1, o);
            at(ft, r) += (d(i) - lambda) * a;
        }
        at(tf, i) -= 1.0;
        at(ft, i) -= 1.0;
        double n1 = 0.0, n2 = 0.0;
        for (std::size_t t = 0; t < size; ++t) {
            n1 += std::norm(tf[t]);
            n2 += std::norm(ft[t]);
        }
        worst = std::max({worst, std::sqrt(n1), std::sqrt(n2)});
    }
    return worst;
}

double telescoping_defect(const InverseSeries& series, const ShiftModel& model) {
    const auto& w = model.weights();
    const auto& d = model.diagonals();
    const cplx lambda = series.lambda();
    const auto cols = series.columns();
    const int len = series.length();
    double worst = 0.0;
    auto account = [&](cplx t1, cplx t2) {
        const double scale = std::max(std::abs(t1), std::abs(t2));
        if (scale > 0.0) worst = std::max(worst, std::abs(t1 + t2) / scale);
    };
    for (Index i = cols.first; i <= cols.last; ++i) {
        if (series.direction() == SeriesDirection::forward) {
            if (i + 1 > cols.last) break;
            for (int l = 0; l < len; ++l)
                account(w(i) * series.coefficient(i + 1, l), (d(i) - lambda) * series.coefficient(i, l + 1));
        } else {
            for (int l = 1; l < len; ++l)
                account(w(i - l - 1) * series.coefficient(i, l + 1), (d(i - l) - lambda) * series.coefficient(i, l));
        }
    }
    return worst;
}

int length_for_rate(double rate, double target) {
    if (!(rate < 1.0)) throw std::invalid_argument("series rate must be < 1");
    if (rate <= 0.0) return 1;
    return std::max(1, static_cast<int>(std::ceil(std::log(target) / std::log(rate))));
}

std::optional<InverseSeries> build_inverse(const ShiftModel& model, cplx lambda, int k_max, double target,
                                           int max_length) {
    const RadiusEvaluator radii(model, k_max);
    const double rp = radii.r_plus(lambda).value;
    const double rm = radii.invertible() ? radii.r_minus(lambda).value : kInf;

    struct Candidate {
        SeriesDirection direction;
        double rate;
    };
    std::vector<Candidate> order{{SeriesDirection::forward, rp}, {SeriesDirection::backward, rm}};
    if (rm < rp) std::swap(order[0], order[1]);

    for (const auto& c : order) {
        if (!(c.rate < 1.0)) continue;
        const int length = std::min(length_for_rate(c.rate, target), max_length);
        try {
            return c.direction == SeriesDirection::forward ? build_forward(model, lambda, length)
                                                           : build_backward(model, lambda, length);
        } catch (const DenominatorZero&) {
        } catch (const WeightZero&) {
        }
    }
    return std::nullopt;
}

}  // namespace wshift
