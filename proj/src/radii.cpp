#include "wshift/radii.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wshift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Index kMaxClosedFormPeriod = 1 << 16;

void check_model(const ShiftModel& model, int k_max) {
    if (k_max < 8) throw std::invalid_argument("k_max must be >= 8");
    if (model.step() != 1) throw std::invalid_argument("radii are defined for 1-shifts; decompose the n-shift first");
}

// log of the window quotient num/den with the extended-real conventions.
inline double quotient(const LogModulusPrefix& num, std::size_t ns, std::size_t nlen, const LogModulusPrefix& den,
                       std::size_t ds, std::size_t dlen) {
    if (den.window_has_zero(ds, dlen)) return kInf;
    if (num.window_has_zero(ns, nlen)) return -kInf;
    return num.window_finite(ns, nlen) - den.window_finite(ds, dlen);
}

}  // namespace

std::string_view to_string(RadiusMethod m) {
    switch (m) {
        case RadiusMethod::closed_form_constant: return "closed_form_constant";
        case RadiusMethod::closed_form_periodic: return "closed_form_periodic";
        case RadiusMethod::truncated_slope: return "truncated_slope";
        case RadiusMethod::truncated_root: return "truncated_root";
        case RadiusMethod::degenerate: return "degenerate";
    }
    return "unknown";
}

RadiusEvaluator::RadiusEvaluator(const ShiftModel& model, int k_max, RadiusOptions options)
    : k_max_(k_max), invertible_(model.shift_invertible()) {
    check_model(model, k_max);
    const auto layout = model.layout();

    if (options.allow_closed_form && !layout.core && layout.period <= kMaxClosedFormPeriod) {
        closed_form_ = true;
        period_ = layout.period;
        period_weights_ = sample(model.weights(), IndexRange{0, period_ - 1});
        period_diagonals_ = sample(model.diagonals(), IndexRange{0, period_ - 1});
        for (const auto& w : period_weights_) {
            if (w == cplx{}) period_weight_zero_ = true;
            else period_log_weights_ += std::log(std::abs(w));
        }
        return;
    }

    // Denominators carry k + 1 factors, so windows up to k_max + 1 must be reached.
    const auto window = fundamental_window(layout, k_max + 1);
    starts_ = window.size();
    const IndexRange block{window.first, window.last + k_max + 1};
    weights_ = sample(model.weights(), block);
    diagonals_ = sample(model.diagonals(), block);
    weight_prefix_ = LogModulusPrefix(weights_);
}

std::vector<double> RadiusEvaluator::log_maxima(cplx lambda, bool forward, int k_lo) const {
    std::vector<double> s(static_cast<std::size_t>(k_max_) + 1, -kInf);
    const LogModulusPrefix diag(diagonals_, lambda);
    for (int k = k_lo; k <= k_max_; ++k) {
        const auto len = static_cast<std::size_t>(k);
        double best = -kInf;
        for (Index st = 0; st < starts_; ++st) {
            const auto j = static_cast<std::size_t>(st);
            // forward:  w_{j..j+k-1} / (d - lambda)_{j..j+k}
            // backward: (d - lambda)_{j+1..j+k} / w_{j..j+k}
            const double q = forward ? quotient(weight_prefix_, j, len, diag, j, len + 1)
                                     : quotient(diag, j + 1, len, weight_prefix_, j, len + 1);
            best = std::max(best, q);
            if (best == kInf) break;
        }
        s[len] = best;
    }
    return s;
}

std::vector<double> RadiusEvaluator::forward_log_maxima(cplx lambda) const {
    if (closed_form_) throw std::logic_error("forward_log_maxima: evaluator uses the closed form");
    return log_maxima(lambda, true, 1);
}

std::vector<double> RadiusEvaluator::backward_log_maxima(cplx lambda) const {
    if (closed_form_) throw std::logic_error("backward_log_maxima: evaluator uses the closed form");
    return log_maxima(lambda, false, 1);
}

// s_k ~ k log R + c for the supported families. The least-squares slope over
// the upper half of the k range is the primary estimate; s_{k_max}/k_max is
// the fallback and the disagreement witness.
RadiusEstimate RadiusEvaluator::truncated(const std::vector<double>& s) const {
    const int k_lo = k_max_ / 2;
    const double last = s[static_cast<std::size_t>(k_max_)];
    RadiusEstimate est;
    est.k_used = k_max_;
    if (last == kInf) {
        est.value = kInf;
        return est;
    }
    if (last == -kInf) {
        est.value = 0.0;
        return est;
    }
    const double root = std::exp(last / k_max_);

    bool all_finite = true;
    double sk = 0.0, sv = 0.0, skk = 0.0, skv = 0.0;
    int n = 0;
    for (int k = k_lo; k <= k_max_; ++k) {
        const double v = s[static_cast<std::size_t>(k)];
        if (!std::isfinite(v)) {
            all_finite = false;
            break;
        }
        sk += k;
        sv += v;
        skk += static_cast<double>(k) * k;
        skv += k * v;
        ++n;
    }
    if (!all_finite || n < 2) {
        est.value = root;
        est.method = RadiusMethod::truncated_root;
        est.uncertainty = kInf;
        return est;
    }
    const double slope = (n * skv - sk * sv) / (n * skk - sk * sk);
    est.value = std::exp(slope);
    est.method = RadiusMethod::truncated_slope;
    est.uncertainty = std::abs(est.value - root);
    return est;
}

RadiusEstimate RadiusEvaluator::r_plus(cplx lambda) const {
    if (!closed_form_) return truncated(log_maxima(lambda, true, k_max_ / 2));

    RadiusEstimate est;
    est.method = period_ == 1 ? RadiusMethod::closed_form_constant : RadiusMethod::closed_form_periodic;
    double log_den = 0.0;
    for (const auto& d : period_diagonals_) {
        const double m = std::abs(d - lambda);
        if (m == 0.0) {
            est.value = kInf;
            return est;
        }
        log_den += std::log(m);
    }
    if (period_weight_zero_) {
        est.value = 0.0;
        return est;
    }
    est.value = std::exp((period_log_weights_ - log_den) / static_cast<double>(period_));
    return est;
}

RadiusEstimate RadiusEvaluator::r_minus(cplx lambda) const {
    if (!invertible_) {
        RadiusEstimate est;
        est.value = kInf;
        est.method = RadiusMethod::degenerate;
        return est;
    }
    if (!closed_form_) return truncated(log_maxima(lambda, false, k_max_ / 2));

    RadiusEstimate est;
    est.method = period_ == 1 ? RadiusMethod::closed_form_constant : RadiusMethod::closed_form_periodic;
    double log_num = 0.0;
    for (const auto& d : period_diagonals_) {
        const double m = std::abs(d - lambda);
        if (m == 0.0) {
            est.value = 0.0;
            return est;
        }
        log_num += std::log(m);
    }
    est.value = std::exp((log_num - period_log_weights_) / static_cast<double>(period_));
    return est;
}

RadiusEstimate r_plus(const ShiftModel& model, cplx lambda, int k_max) {
    return RadiusEvaluator(model, k_max).r_plus(lambda);
}

RadiusEstimate r_minus(const ShiftModel& model, cplx lambda, int k_max) {
    return RadiusEvaluator(model, k_max).r_minus(lambda);
}

OriginCheck origin_check(const ShiftModel& model, int k_max, double tol) {
    const RadiusEvaluator ev(model, k_max);
    OriginCheck out{ev.r_plus({}), ev.r_minus({}), false};
    out.consistent = out.r_plus.value <= 1.0 + tol || out.r_minus.value <= 1.0 + tol;
    return out;
}

}  // namespace wshift
