#include <doctest.h>

#include <cmath>
#include <vector>

#include "terraspec/rhaly_operator.hpp"
#include "test_util.hpp"

using namespace terraspec;

namespace {

const auto kOne = SequenceSpec::constant(1.0);

}  // namespace

TEST_CASE("build_section") {
    const auto ces = build_section(SequenceSpec::cesaro_scaled(1.0), 2);
    CHECK(ces(0, 0) == Complex{1.0});
    CHECK(ces(0, 1) == Complex{0.0});
    CHECK(ces(1, 0) == Complex{0.5});
    CHECK(ces(1, 1) == Complex{0.5});

    const auto tab = build_section(SequenceSpec::table({1.0, 0.5}), 2);
    CHECK(tab.dense() == ces.dense());

    const auto sec = build_section(SequenceSpec::cesaro_scaled(2.0), 3);
    for (Index k = 0; k < 3; ++k) CHECK(sec(2, k).real() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("build_section shape invariants") {
    const auto sec = build_section(SequenceSpec::log_reciprocal(), 12);
    for (Index i = 0; i < 12; ++i) {
        for (Index k = 0; k < 12; ++k) {
            if (k > i) {
                CHECK(sec(i, k) == Complex{});
            } else {
                CHECK(sec(i, k) == sec(i, 0));
            }
        }
    }
}

TEST_CASE("apply") {
    const auto ces = build_section(SequenceSpec::cesaro_scaled(1.0), 3);
    const std::vector<Complex> ones(3, Complex{1.0});
    for (const auto& y : terraspec::apply(ces, ones)) CHECK(y.real() == doctest::Approx(1.0));

    const std::vector<Complex> e1{1.0, 0.0, 0.0};
    const auto col = terraspec::apply(ces, e1);
    CHECK(col[0].real() == doctest::Approx(1.0));
    CHECK(col[1].real() == doctest::Approx(0.5));
    CHECK(col[2].real() == doctest::Approx(1.0 / 3.0));

    const auto rh = build_section(SequenceSpec::table({2.0, 1.0, 2.0 / 3.0}), 3);
    for (const auto& y : terraspec::apply(rh, ones)) CHECK(y.real() == doctest::Approx(2.0));

    const std::vector<Complex> wrong(2);
    CHECK(error_code([&] { (void)terraspec::apply(rh, wrong); }) == "dimension-mismatch");
}

TEST_CASE("conjugate_section") {
    const auto ces = build_section(SequenceSpec::cesaro_scaled(1.0), 2);
    CHECK(conjugate_section(ces, kOne, kOne).dense() == ces.dense());

    const auto scaled = conjugate_section(ces, kOne, SequenceSpec::table({1.0, 0.5}));
    CHECK(scaled(1, 0).real() == doctest::Approx(0.25));
    CHECK(scaled(1, 1).real() == doctest::Approx(0.25));

    const auto other = conjugate_section(build_section(SequenceSpec::table({1.0, 0.5}), 2),
                                         SequenceSpec::table({1.0, 0.5}), kOne);
    CHECK(other(1, 0).real() == doctest::Approx(0.5));
    CHECK(other(1, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("criterion_sequence") {
    SUBCASE("Cesaro on c0 is identically one") {
        const auto seq = criterion_sequence(SequenceSpec::cesaro_scaled(1.0), kOne, kOne, 1000);
        REQUIRE(seq.samples.size() == 1000);
        for (const auto& c : seq.samples) CHECK(c.value == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("log weights with geometric decay match the closed form") {
        const auto geo = SequenceSpec::geometric(0.5);
        const auto seq = criterion_sequence(SequenceSpec::log_reciprocal(), geo, geo, 50);
        REQUIRE(seq.samples.size() == 50);
        for (const auto& c : seq.samples) {
            const double n = static_cast<double>(c.n);
            const double closed = (std::pow(2.0, n + 1) - 2.0) / (std::pow(2.0, n) * std::log(n + 1));
            CHECK(std::abs(c.value - closed) / closed <= 1e-12);
        }
    }
    SUBCASE("table hand evaluation") {
        const auto seq = criterion_sequence(SequenceSpec::table({2.0, 1.0}), kOne, kOne, 2);
        CHECK(seq.samples.at(1).value == doctest::Approx(2.0));
    }
    SUBCASE("huge partial sums switch to log space") {
        const auto seq = criterion_sequence(SequenceSpec::cesaro_scaled(1.0),
                                            SequenceSpec::geometric(0.01), kOne, 1 << 12);
        CHECK(seq.log_space);
        for (const auto& c : seq.samples) CHECK(std::isfinite(c.log_value));
    }
}

TEST_CASE("classify_boundedness") {
    const auto ces = classify_boundedness(SequenceSpec::cesaro_scaled(1.0), kOne, kOne);
    CHECK(ces.bounded == Tri::yes);
    CHECK(ces.compact == Tri::no);
    REQUIRE(ces.norm);
    CHECK(*ces.norm == doctest::Approx(1.0));

    const auto geo = SequenceSpec::geometric(0.5);
    const auto ex = classify_boundedness(SequenceSpec::log_reciprocal(), geo, geo);
    CHECK(ex.bounded == Tri::yes);
    CHECK(ex.compact == Tri::yes);

    const auto lr = classify_boundedness(SequenceSpec::log_reciprocal(), kOne, kOne);
    CHECK(lr.bounded == Tri::no);
    CHECK(lr.compact == Tri::no);
}

TEST_CASE("classify_boundedness falls back to numerics for tables") {
    std::vector<double> vals;
    for (int n = 1; n <= 4096; ++n) vals.push_back(1.0 / n);
    const auto rep = classify_boundedness(SequenceSpec::table(vals), kOne, kOne);
    CHECK(rep.method == Method::numeric);
    CHECK(rep.bounded == Tri::yes);
    CHECK(rep.sup_estimate == doctest::Approx(1.0));
}

TEST_CASE("operator_norm_bounds") {
    const auto one = operator_norm_bounds(SequenceSpec::cesaro_scaled(1.0), kOne, 1000);
    CHECK(one.lower == doctest::Approx(1.0));
    CHECK(one.upper == doctest::Approx(1.0));

    const auto two = operator_norm_bounds(SequenceSpec::cesaro_scaled(2.0), SequenceSpec::geometric(0.5), 1000);
    CHECK(two.lower == doctest::Approx(2.0));
    CHECK(two.upper == doctest::Approx(2.0));

    const auto tab = operator_norm_bounds(SequenceSpec::table({0.5, 1.0, 0.1}), kOne, 3);
    CHECK(tab.lower == doctest::Approx(1.0));
    CHECK(tab.lower_at == 2);
    CHECK(tab.upper == doctest::Approx(2.0));
    CHECK(tab.upper_at == 2);

    CHECK(error_code([] {
              (void)operator_norm_bounds(SequenceSpec::cesaro_scaled(1.0), SequenceSpec::power_weight(-1.0), 10);
          }) == "weight-not-decreasing");
}

TEST_CASE("matrix_bounded_test") {
    const EntryFn identity = [](Index i, Index k) { return i == k ? Complex{1.0} : Complex{}; };
    const auto id = matrix_bounded_test(identity, kOne, kOne, 1 << 12);
    CHECK(id.verdict == MatrixVerdict::pass);
    CHECK(id.row_sup == doctest::Approx(1.0));

    const auto ces = matrix_bounded_test(rhaly_entries(SequenceSpec::cesaro_scaled(1.0)), kOne, kOne, 1 << 12);
    CHECK(ces.verdict == MatrixVerdict::pass);
    CHECK(ces.row_sup == doctest::Approx(1.0));
    const auto crit = criterion_sequence(SequenceSpec::cesaro_scaled(1.0), kOne, kOne, 1 << 12);
    CHECK(ces.row_sup == doctest::Approx(crit.samples.back().value));

    const auto lr = matrix_bounded_test(rhaly_entries(SequenceSpec::log_reciprocal()), kOne, kOne, 1 << 12);
    CHECK(lr.verdict == MatrixVerdict::fail);
}
