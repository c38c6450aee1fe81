#include <doctest.h>

#include <cmath>

#include "terraspec/products.hpp"
#include "test_util.hpp"

using namespace terraspec;

TEST_CASE("alpha") {
    CHECK(alpha(Complex{2.0, 0.0}) == doctest::Approx(0.5));
    CHECK(alpha(Complex{0.0, 1.0}) == doctest::Approx(0.0));
    CHECK(alpha(Complex{0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(error_code([] { (void)alpha(Complex{}); }) == "alpha-undefined-at-zero");
}

TEST_CASE("log_product") {
    const auto single = log_product(SequenceSpec::table({1.0}), Complex{2.0}, 0, 1);
    CHECK(single.log_magnitude == doctest::Approx(std::log(0.5)));
    CHECK_FALSE(single.exact_zero);

    const auto zero = log_product(SequenceSpec::cesaro_scaled(1.0), Complex{1.0}, 0, 5);
    CHECK(zero.exact_zero);
    CHECK(zero.zero_index == 1);
    CHECK(zero.value() == Complex{});

    // 1/2 * 3/4 * 5/6 * 7/8 over integers
    long num = 1, den = 1;
    for (long k = 1; k <= 4; ++k) {
        num *= 2 * k - 1;
        den *= 2 * k;
    }
    REQUIRE(num == 105);
    REQUIRE(den == 384);
    const auto four = log_product(SequenceSpec::cesaro_scaled(1.0), Complex{2.0}, 0, 4);
    CHECK(four.log_magnitude == doctest::Approx(std::log(105.0 / 384.0)).epsilon(1e-14));
    CHECK(four.value().real() == doctest::Approx(105.0 / 384.0));
    CHECK(std::isfinite(four.log_magnitude));
}

TEST_CASE("log_product argument accumulates for complex lambda") {
    const Complex lam{0.3, 0.4};
    const auto a = SequenceSpec::cesaro_scaled(1.0);
    Complex direct{1.0};
    for (Index k = 3; k <= 40; ++k) direct *= 1.0 - a.eval(k) / lam;
    const auto lp = log_product(a, lam, 2, 40);
    CHECK(std::abs(lp.value() - direct) <= 1e-12 * std::abs(direct));
}

TEST_CASE("ratio_band") {
    const auto a = SequenceSpec::cesaro_scaled(1.0);
    const auto rep = ratio_band(a, Complex{2.0}, 1.0, 1 << 7, 1 << 15);
    CHECK(rep.verdict == BandVerdict::bounded_band);
    CHECK(std::abs(rep.log_log_slope) < 0.02);
    CHECK(rep.exponent == doctest::Approx(0.5));

    BandOptions wrong;
    wrong.exponent = 1.0;
    const auto drift = ratio_band(a, Complex{2.0}, 1.0, 1 << 7, 1 << 15, wrong);
    CHECK(drift.verdict == BandVerdict::drifting);
    CHECK(std::abs(drift.log_log_slope) == doctest::Approx(0.5).epsilon(0.02));

    CHECK(error_code([&] { (void)ratio_band(a, Complex{1.0 / 3.0}, 1.0, 1 << 7, 1 << 15); }) ==
          "lambda-in-S");
}
