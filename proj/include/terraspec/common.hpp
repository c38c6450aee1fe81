#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace terraspec {

using Complex = std::complex<double>;
using Index = std::int64_t;

/// Domain error carrying a stable machine-readable code (e.g. "lambda-in-S").
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    [[nodiscard]] const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

enum class Tri { no, yes, inconclusive };

[[nodiscard]] constexpr std::string_view to_string(Tri t) noexcept {
    switch (t) {
        case Tri::no: return "no";
        case Tri::yes: return "yes";
        case Tri::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

[[nodiscard]] constexpr Tri to_tri(bool b) noexcept { return b ? Tri::yes : Tri::no; }

/// Neumaier-compensated running sum.
template <typename T>
class CompensatedSum {
public:
    void add(T x) noexcept {
        T t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    [[nodiscard]] T value() const noexcept { return sum_ + comp_; }

private:
    T sum_{};
    T comp_{};
};

/// Complex version compensates real and imaginary parts independently.
template <>
class CompensatedSum<Complex> {
public:
    void add(Complex x) noexcept {
        re_.add(x.real());
        im_.add(x.imag());
    }
    [[nodiscard]] Complex value() const noexcept { return {re_.value(), im_.value()}; }

private:
    CompensatedSum<double> re_;
    CompensatedSum<double> im_;
};

/// Dyadic probe indices lo, 2lo, 4lo, ... capped by hi; hi itself is always included.
[[nodiscard]] inline std::vector<Index> dyadic_probes(Index lo, Index hi) {
    std::vector<Index> out;
    if (lo < 1) lo = 1;
    for (Index n = lo; n < hi; n *= 2) out.push_back(n);
    out.push_back(hi);
    return out;
}

/// Least-squares slope of ys against xs.
[[nodiscard]] inline double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto m = static_cast<double>(xs.size());
    if (xs.size() < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace terraspec
