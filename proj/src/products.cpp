#include "terraspec/products.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace terraspec {

namespace {

constexpr double kNearSingular = 1e-12;

}  // namespace

double alpha(Complex lambda) {
    if (lambda == Complex{}) throw Error("alpha-undefined-at-zero", "alpha needs lambda != 0");
    return lambda.real() / std::norm(lambda);
}

Complex LogProduct::value() const {
    if (exact_zero) return {};
    return std::polar(std::exp(log_magnitude), argument);
}

LogProduct log_product(const SequenceSpec& a, Complex lambda, Index m, Index n) {
    if (m < 0 || n <= m) throw Error("invalid-window", "need 0 <= m < n");
    if (lambda == Complex{}) throw Error("alpha-undefined-at-zero", "product needs lambda != 0");

    LogProduct out;
    out.m = m;
    out.n = n;
    CompensatedSum<double> mag;
    CompensatedSum<double> arg;
    for (Index k = m + 1; k <= n; ++k) {
        const double ak = a.eval(k);
        const Complex factor = 1.0 - ak / lambda;
        if (factor == Complex{} || Complex{ak, 0.0} == lambda) {
            out.exact_zero = true;
            out.zero_index = k;
            out.log_magnitude = -std::numeric_limits<double>::infinity();
            return out;
        }
        if (std::abs(lambda - ak) <= kNearSingular * std::abs(lambda)) out.near_singular = true;
        mag.add(std::log(std::abs(factor)));
        arg.add(std::arg(factor));
    }
    out.log_magnitude = mag.value();
    out.argument = arg.value();
    return out;
}

std::string_view to_string(BandVerdict v) noexcept {
    switch (v) {
        case BandVerdict::bounded_band: return "bounded_band";
        case BandVerdict::drifting: return "drifting";
        case BandVerdict::degenerate: return "degenerate";
    }
    return "degenerate";
}

BandReport ratio_band(const SequenceSpec& a, Complex lambda, double chi, Index n_lo, Index n_hi,
                      const BandOptions& opts) {
    if (!(chi > 0.0)) throw Error("chi-zero", "ratio band needs chi > 0");
    if (n_lo < 1 || n_hi <= n_lo) throw Error("invalid-window", "need 1 <= n_lo < n_hi");

    BandReport rep;
    rep.exponent = opts.exponent.value_or(alpha(lambda) * chi);

    const auto probes = dyadic_probes(n_lo, n_hi);
    CompensatedSum<double> mag;
    std::size_t next = 0;
    for (Index k = 1; k <= n_hi; ++k) {
        const double ak = a.eval(k);
        const Complex factor = 1.0 - ak / lambda;
        if (factor == Complex{} || Complex{ak, 0.0} == lambda) {
            throw Error("lambda-in-S", "factor k=" + std::to_string(k) + " vanishes");
        }
        mag.add(std::log(std::abs(factor)));
        if (k == probes[next]) {
            BandPoint p;
            p.n = k;
            p.log_ratio = mag.value() + rep.exponent * std::log(static_cast<double>(k));
            p.ratio = std::exp(p.log_ratio);
            rep.ratios.push_back(p);
            ++next;
        }
    }

    std::vector<double> xs, ys;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& p : rep.ratios) {
        xs.push_back(std::log(static_cast<double>(p.n)));
        ys.push_back(p.log_ratio);
        lo = std::min(lo, p.log_ratio);
        hi = std::max(hi, p.log_ratio);
    }
    rep.band_min = std::exp(lo);
    rep.band_max = std::exp(hi);
    rep.log_log_slope = ls_slope(xs, ys);

    if (rep.ratios.size() < 3 || !std::isfinite(lo) || !std::isfinite(hi)) {
        rep.verdict = BandVerdict::degenerate;
    } else if (std::abs(rep.log_log_slope) < opts.slope_tolerance &&
               hi - lo < std::log(opts.band_ratio)) {
        rep.verdict = BandVerdict::bounded_band;
    } else {
        rep.verdict = BandVerdict::drifting;
    }
    return rep;
}

}  // namespace terraspec
