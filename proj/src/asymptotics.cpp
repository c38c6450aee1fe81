#include "terraspec/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "terraspec/common.hpp"

namespace terraspec {

namespace {

// Sign of x with a dead zone of kExponentSnap around 0.
int snapped_sign(double x) {
    if (x > kExponentSnap) return 1;
    if (x < -kExponentSnap) return -1;
    return 0;
}

int base_sign(double rho) { return snapped_sign(rho - 1.0); }

void check_finite_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error("class-overflow", std::string(what) + " left the positive finite range");
    }
}

}  // namespace

AsymptoticClass AsymptoticClass::make(double constant, double geo_base, double power,
                                      double log_power) {
    if (!(constant > 0.0) || !std::isfinite(constant)) {
        throw Error("invalid-class", "constant must be positive and finite");
    }
    if (!(geo_base > 0.0) || !std::isfinite(geo_base)) {
        throw Error("invalid-class", "geometric base must be positive and finite");
    }
    if (!std::isfinite(power) || !std::isfinite(log_power)) {
        throw Error("invalid-class", "exponents must be finite");
    }
    return {constant, geo_base, power, log_power};
}

double AsymptoticClass::log_value(double n) const {
    double v = std::log(constant) + n * std::log(geo_base) + power * std::log(n);
    if (log_power != 0.0) v += log_power * std::log(std::log(n));
    return v;
}

double AsymptoticClass::value(double n) const { return std::exp(log_value(n)); }

std::string_view to_string(Limit l) noexcept {
    switch (l) {
        case Limit::zero: return "zero";
        case Limit::finite_nonzero: return "finite_nonzero";
        case Limit::infinite: return "infinite";
    }
    return "infinite";
}

std::string_view to_string(SumVerdict v) noexcept {
    switch (v) {
        case SumVerdict::convergent: return "convergent";
        case SumVerdict::divergent: return "divergent";
        case SumVerdict::undecided_boundary: return "undecided-boundary";
    }
    return "undecided-boundary";
}

AsymptoticClass mul(const AsymptoticClass& a, const AsymptoticClass& b) {
    AsymptoticClass out{a.constant * b.constant, a.geo_base * b.geo_base, a.power + b.power,
                        a.log_power + b.log_power};
    check_finite_positive(out.constant, "constant");
    check_finite_positive(out.geo_base, "geometric base");
    return out;
}

AsymptoticClass reciprocal(const AsymptoticClass& a) {
    return {1.0 / a.constant, 1.0 / a.geo_base, -a.power, -a.log_power};
}

Limit limit_class(const AsymptoticClass& a) {
    const int rho = base_sign(a.geo_base);
    if (rho != 0) return rho < 0 ? Limit::zero : Limit::infinite;
    const int p = snapped_sign(a.power);
    if (p != 0) return p < 0 ? Limit::zero : Limit::infinite;
    const int q = snapped_sign(a.log_power);
    if (q != 0) return q < 0 ? Limit::zero : Limit::infinite;
    return Limit::finite_nonzero;
}

SumClass partial_sum(const AsymptoticClass& a) {
    const int rho = base_sign(a.geo_base);
    if (rho > 0) {
        // sum_{k<=n} rho^k ~ rho^n * rho/(rho-1)
        const double c = a.constant * a.geo_base / (a.geo_base - 1.0);
        return {SumVerdict::divergent, AsymptoticClass{c, a.geo_base, a.power, a.log_power}};
    }
    if (rho < 0) {
        const double c = a.constant * a.geo_base / (1.0 - a.geo_base);
        return {SumVerdict::convergent, AsymptoticClass{c, a.geo_base, a.power, a.log_power}};
    }
    const int p1 = snapped_sign(a.power + 1.0);
    if (p1 > 0) {
        const double e = a.power + 1.0;
        return {SumVerdict::divergent, AsymptoticClass{a.constant / e, 1.0, e, a.log_power}};
    }
    if (p1 < 0) {
        const double e = a.power + 1.0;
        return {SumVerdict::convergent, AsymptoticClass{a.constant / -e, 1.0, e, a.log_power}};
    }
    // power == -1: the (log n)^q factor decides.
    const int q1 = snapped_sign(a.log_power + 1.0);
    const int q0 = snapped_sign(a.log_power);
    if (q0 >= 0) {
        const double e = a.log_power + 1.0;
        return {SumVerdict::divergent, AsymptoticClass{a.constant / e, 1.0, 0.0, e}};
    }
    if (q1 < 0) {
        const double e = a.log_power + 1.0;
        return {SumVerdict::convergent, AsymptoticClass{a.constant / -e, 1.0, 0.0, e}};
    }
    return {SumVerdict::undecided_boundary, std::nullopt};
}

}  // namespace terraspec
