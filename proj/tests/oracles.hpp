#pragma once

#include <cmath>
#include <complex>
#include <vector>

// Independent reference computations used to check library results.
namespace oracle {

using C = std::complex<double>;
template <typename T = double>
using Matrix = std::vector<std::vector<std::complex<T>>>;

template <typename T = double>
Matrix<T> terraced_minus_lambda(const std::vector<double>& a, C lambda) {
    using CT = std::complex<T>;
    const auto n = a.size();
    Matrix<T> m(n, std::vector<CT>(n, CT{}));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k <= i; ++k) m[i][k] = CT{static_cast<T>(a[i])};
        m[i][i] -= CT{lambda.real(), lambda.imag()};
    }
    return m;
}

/// Inverse of a lower-triangular matrix, column by column by forward substitution.
template <typename T>
Matrix<T> forward_substitution_inverse(const Matrix<T>& l) {
    using C = std::complex<T>;
    const auto n = l.size();
    Matrix<T> inv(n, std::vector<C>(n, C{}));
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t i = col; i < n; ++i) {
            C acc = (i == col) ? C{1.0} : C{};
            for (std::size_t k = col; k < i; ++k) acc -= l[i][k] * inv[k][col];
            inv[i][col] = acc / l[i][i];
        }
    }
    return inv;
}

/// Singular values of a real 2x2 matrix [[p, q], [r, s]], largest first.
inline std::pair<double, double> svd2(double p, double q, double r, double s) {
    const double f = p * p + q * q + r * r + s * s;
    const double det = std::abs(p * s - q * r);
    const double disc = std::sqrt(std::max(0.0, f * f - 4.0 * det * det));
    return {std::sqrt((f + disc) / 2.0), std::sqrt(std::max(0.0, (f - disc) / 2.0))};
}

}  // namespace oracle
