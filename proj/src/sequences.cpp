#include "terraspec/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace terraspec {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error("invalid-family-param", std::string(name) + " must be positive and finite");
    }
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw Error("invalid-family-param", std::string(name) + " must be finite");
    }
}

}  // namespace

std::string_view to_string(Family f) noexcept {
    switch (f) {
        case Family::cesaro_scaled: return "cesaro_scaled";
        case Family::p_cesaro: return "p_cesaro";
        case Family::log_reciprocal: return "log_reciprocal";
        case Family::power_weight: return "power_weight";
        case Family::geometric: return "geometric";
        case Family::constant: return "constant";
        case Family::table: return "table";
        case Family::custom: return "custom";
    }
    return "custom";
}

Family family_from_string(std::string_view name) {
    for (Family f : {Family::cesaro_scaled, Family::p_cesaro, Family::log_reciprocal,
                     Family::power_weight, Family::geometric, Family::constant, Family::table,
                     Family::custom}) {
        if (to_string(f) == name) return f;
    }
    throw Error("unknown-family", std::string(name));
}

SequenceSpec::SequenceSpec(Family family, std::vector<double> params,
                           std::optional<AsymptoticClass> asym)
    : family_(family), params_(std::move(params)), asym_(asym) {}

SequenceSpec SequenceSpec::cesaro_scaled(double chi) {
    require_positive(chi, "chi");
    return {Family::cesaro_scaled, {chi}, AsymptoticClass{chi, 1.0, -1.0, 0.0}};
}

SequenceSpec SequenceSpec::p_cesaro(double p) {
    require_finite(p, "p");
    return {Family::p_cesaro, {p}, AsymptoticClass{1.0, 1.0, -p, 0.0}};
}

SequenceSpec SequenceSpec::log_reciprocal() {
    return {Family::log_reciprocal, {}, AsymptoticClass{1.0, 1.0, 0.0, -1.0}};
}

SequenceSpec SequenceSpec::power_weight(double beta) {
    require_finite(beta, "beta");
    return {Family::power_weight, {beta}, AsymptoticClass{1.0, 1.0, -beta, 0.0}};
}

SequenceSpec SequenceSpec::geometric(double rho0) {
    require_positive(rho0, "rho");
    return {Family::geometric, {rho0}, AsymptoticClass{1.0, rho0, 0.0, 0.0}};
}

SequenceSpec SequenceSpec::constant(double c) {
    require_positive(c, "c");
    return {Family::constant, {c}, AsymptoticClass{c, 1.0, 0.0, 0.0}};
}

SequenceSpec SequenceSpec::table(std::vector<double> values) {
    if (values.empty()) throw Error("invalid-family-param", "table must be non-empty");
    for (double v : values) require_positive(v, "table entry");
    return {Family::table, std::move(values), std::nullopt};
}

SequenceSpec SequenceSpec::custom(Fn fn, std::optional<AsymptoticClass> asym, std::string label) {
    if (!fn) throw Error("invalid-family-param", "custom sequence needs a callable");
    SequenceSpec spec{Family::custom, {}, asym};
    spec.fn_ = std::make_shared<const Fn>(std::move(fn));
    spec.label_ = std::move(label);
    return spec;
}

SequenceSpec SequenceSpec::make_family(Family family, std::vector<double> params) {
    auto arg = [&](std::size_t i) {
        if (params.size() <= i) {
            throw Error("invalid-family-param",
                        std::string(to_string(family)) + " is missing a parameter");
        }
        return params[i];
    };
    switch (family) {
        case Family::cesaro_scaled: return cesaro_scaled(arg(0));
        case Family::p_cesaro: return p_cesaro(arg(0));
        case Family::log_reciprocal: return log_reciprocal();
        case Family::power_weight: return power_weight(arg(0));
        case Family::geometric: return geometric(arg(0));
        case Family::constant: return constant(arg(0));
        case Family::table: return table(std::move(params));
        case Family::custom: break;
    }
    throw Error("invalid-family-param", "custom sequences need a callable");
}

std::optional<Index> SequenceSpec::max_index() const noexcept {
    if (family_ == Family::table) return static_cast<Index>(params_.size());
    return std::nullopt;
}

double SequenceSpec::eval(Index n) const {
    if (n < 1) throw Error("index-out-of-range", "sequence index must be >= 1");
    const auto x = static_cast<double>(n);
    switch (family_) {
        case Family::cesaro_scaled: return params_[0] / x;
        case Family::p_cesaro: return std::pow(x, -params_[0]);
        case Family::log_reciprocal: return 1.0 / std::log(x + 1.0);
        case Family::power_weight: return std::pow(x, -params_[0]);
        case Family::geometric: return std::pow(params_[0], x);
        case Family::constant: return params_[0];
        case Family::table:
            if (n > static_cast<Index>(params_.size())) {
                throw Error("index-out-of-range",
                            "table has " + std::to_string(params_.size()) + " entries, asked for " +
                                std::to_string(n));
            }
            return params_[static_cast<std::size_t>(n - 1)];
        case Family::custom: return (*fn_)(n);
    }
    return 0.0;
}

double SequenceSpec::log_eval(Index n) const {
    if (n < 1) throw Error("index-out-of-range", "sequence index must be >= 1");
    const auto x = static_cast<double>(n);
    switch (family_) {
        case Family::cesaro_scaled: return std::log(params_[0]) - std::log(x);
        case Family::p_cesaro: return -params_[0] * std::log(x);
        case Family::log_reciprocal: return -std::log(std::log(x + 1.0));
        case Family::power_weight: return -params_[0] * std::log(x);
        case Family::geometric: return x * std::log(params_[0]);
        case Family::constant: return std::log(params_[0]);
        case Family::table:
        case Family::custom: return std::log(eval(n));
    }
    return 0.0;
}

std::string SequenceSpec::describe() const {
    std::string out(to_string(family_));
    if (family_ == Family::custom) return out + "(" + label_ + ")";
    if (family_ == Family::table) return out + "[" + std::to_string(params_.size()) + "]";
    if (!params_.empty()) out += "(" + std::to_string(params_[0]) + ")";
    return out;
}

ChiEstimate estimate_chi(const SequenceSpec& a, Index n_lo, Index n_hi) {
    if (n_lo < 1 || n_hi <= n_lo) throw Error("invalid-window", "need 1 <= n_lo < n_hi");
    if (auto mx = a.max_index(); mx && n_hi > *mx) {
        throw Error("index-out-of-range", "window exceeds table length");
    }

    const auto probes = dyadic_probes(n_lo, n_hi);
    std::vector<double> values;
    values.reserve(probes.size());
    for (Index n : probes) values.push_back(static_cast<double>(n) * a.eval(n));

    const auto& cls = a.asym();
    const bool analytic = cls && cls->geo_base == 1.0 && cls->power == -1.0 && cls->log_power == 0.0;
    ChiEstimate est;
    est.chi = analytic ? cls->constant : values.back();
    est.method = analytic ? ChiMethod::analytic : ChiMethod::numeric;
    for (double v : values) est.residual = std::max(est.residual, std::abs(v - est.chi));

    if (!analytic) {
        // A monotone trend whose last dyadic step still moves by more than 10%
        // means n a_n has not settled.
        bool increasing = true, decreasing = true;
        for (std::size_t i = 1; i < values.size(); ++i) {
            increasing = increasing && values[i] >= values[i - 1];
            decreasing = decreasing && values[i] <= values[i - 1];
        }
        if (values.size() >= 2) {
            const double prev = values[values.size() - 2];
            const double step = std::abs(values.back() - prev) / std::max(std::abs(prev), 1e-300);
            if ((increasing || decreasing) && step > 0.10) {
                throw Error("chi-not-convergent",
                            "n*a_n moved by " + std::to_string(step * 100.0) +
                                "% between the last two dyadic probes");
            }
        }
    }
    if (!(est.chi >= 1e-9)) throw Error("chi-zero", "estimated chi is below 1e-9");
    return est;
}

WeightFlags verify_weight(const WeightSpec& w, Index n_max) {
    if (n_max < 2) throw Error("invalid-window", "n_max must be >= 2");
    if (auto mx = w.max_index(); mx && n_max > *mx) {
        throw Error("index-out-of-range", "n_max exceeds table length");
    }
    WeightFlags flags;
    double prev = w.eval(1);
    double lo = prev, hi = prev;
    bool decreasing = true;
    for (Index n = 1; n <= n_max; ++n) {
        const double v = w.eval(n);
        if (!(v > 0.0)) {
            throw Error("weight-not-positive", "w_" + std::to_string(n) + " <= 0");
        }
        if (n > 1 && v > prev) decreasing = false;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        prev = v;
    }
    flags.strictly_positive = true;
    flags.decreasing = decreasing;
    if (const auto& cls = w.asym()) {
        const Limit lim = limit_class(*cls);
        flags.bounded = lim != Limit::infinite;
        flags.bounded_below = lim != Limit::zero;
    } else {
        flags.bounded = std::isfinite(hi);
        flags.bounded_below = w.max_index().has_value() && lo > 0.0;
    }
    return flags;
}

}  // namespace terraspec
