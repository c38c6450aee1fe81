#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "terraspec/products.hpp"
#include "terraspec/spectrum.hpp"
#include "test_util.hpp"

using namespace terraspec;

namespace {

const auto kCesaro = SequenceSpec::cesaro_scaled(1.0);
const auto kOne = SequenceSpec::constant(1.0);

}  // namespace

TEST_CASE("disk_position") {
    CHECK(disk_position(Complex{0.5}, 1.0).position == DiskPosition::interior);
    CHECK(disk_position(Complex{1.0}, 1.0).position == DiskPosition::boundary);
    CHECK(disk_position(Complex{2.0}, 1.0).position == DiskPosition::exterior);
    CHECK(disk_position(Complex{0.5, 0.5}, 1.0).position == DiskPosition::boundary);
    const auto zero = disk_position(Complex{}, 1.0);
    CHECK(zero.at_zero);
    CHECK(zero.position == DiskPosition::boundary);
    CHECK(error_code([] { (void)disk_position(Complex{1.0}, 0.0); }) == "chi-zero");
}

TEST_CASE("dist_to_S") {
    const auto third = dist_to_S(Complex{1.0 / 3.0}, kCesaro, 1000);
    CHECK(third.distance == 0.0);
    CHECK(third.nearest == Index{3});

    const auto neg = dist_to_S(Complex{-1.0}, kCesaro, 1000);
    CHECK(neg.distance == doctest::Approx(1.0));
    CHECK_FALSE(neg.nearest.has_value());

    // |0.4 - 1/3| = 1/15 beats |0.4 - 1/2| = 1/10
    const auto mid = dist_to_S(Complex{0.4}, kCesaro, 1000);
    CHECK(mid.distance == doctest::Approx(1.0 / 15.0));
    CHECK(mid.nearest == Index{3});
}

TEST_CASE("point_spectrum_test") {
    const auto none = point_spectrum_test(Complex{1.0}, kCesaro, kOne, 1.0);
    CHECK(none.member == Tri::no);
    CHECK(none.in_s == Tri::yes);

    const auto weighted = point_spectrum_test(Complex{1.0}, kCesaro, kCesaro, 1.0);
    CHECK(weighted.member == Tri::yes);
    CHECK(weighted.exponent == doctest::Approx(1.0));

    const auto half = point_spectrum_test(Complex{0.5}, kCesaro, kCesaro, 1.0);
    CHECK(half.member == Tri::no);

    CHECK(point_spectrum_test(Complex{0.3}, kCesaro, kOne, 1.0).member == Tri::no);
}

TEST_CASE("eigenvector") {
    const auto two = eigenvector(Complex{1.0}, SequenceSpec::table({1.0, 0.5}), 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == Complex{1.0});
    CHECK(two[1].real() == doctest::Approx(1.0));

    for (const auto& x : eigenvector(Complex{1.0}, kCesaro, 4)) CHECK(x.real() == doctest::Approx(1.0));

    CHECK(error_code([] { (void)eigenvector(Complex{0.3}, kCesaro, 10); }) == "not-an-eigencandidate");
}

TEST_CASE("eigenvector solves the section recurrence") {
    const Complex lam{0.25};
    const Index n = 60;
    const auto x = eigenvector(lam, kCesaro, n);
    const auto y = terraspec::apply(build_section(kCesaro, n), x);
    for (Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        CHECK(std::abs(y[u] - lam * x[u]) <= 1e-12 * std::max(1.0, std::abs(lam * x[u])));
    }
    CHECK(x[0] == Complex{});
    CHECK(x[3] == Complex{1.0});
}

TEST_CASE("adjoint_eigvector") {
    const auto at_one = adjoint_eigvector(Complex{1.0}, kCesaro, 5);
    CHECK(at_one[0] == Complex{1.0});
    for (std::size_t i = 1; i < at_one.size(); ++i) CHECK(at_one[i] == Complex{});

    const auto tab = adjoint_eigvector(Complex{0.5}, SequenceSpec::table({1.0, 0.5}), 3);
    CHECK(tab[0] == Complex{1.0});
    CHECK(tab[1] == Complex{-1.0});
    CHECK(tab[2] == Complex{});

    const auto two = adjoint_eigvector(Complex{2.0}, kCesaro, 4);
    const double expected[] = {1.0, 0.5, 3.0 / 8.0, 5.0 / 16.0};
    for (std::size_t i = 0; i < 4; ++i) CHECK(two[i].real() == doctest::Approx(expected[i]));
}

TEST_CASE("adjoint_point_test") {
    CHECK(adjoint_point_test(Complex{0.4}, kCesaro, kOne, 1.0).member == Tri::yes);
    CHECK(adjoint_point_test(Complex{2.0}, kCesaro, kOne, 1.0).member == Tri::no);
    CHECK(adjoint_point_test(Complex{1.0 / 7.0}, kCesaro, kOne, 1.0).member == Tri::yes);
}

TEST_CASE("classify_point on Cesaro c0") {
    CHECK(classify_point(Complex{0.4}, kCesaro, kOne, 1.0).label == SpectralLabel::residual);
    CHECK(classify_point(Complex{2.0}, kCesaro, kOne, 1.0).label == SpectralLabel::resolvent);
    CHECK(classify_point(Complex{}, kCesaro, kOne, 1.0).label == SpectralLabel::continuous_candidate);
    CHECK(classify_point(Complex{0.5}, kCesaro, kOne, 1.0).label == SpectralLabel::residual);
    CHECK(classify_point(Complex{1.0}, kCesaro, kOne, 1.0).label == SpectralLabel::residual);

    const auto p = classify_point(Complex{0.4, 0.1}, kCesaro, kOne, 1.0);
    REQUIRE(p.evidence.alpha);
    CHECK(*p.evidence.alpha == alpha(Complex{0.4, 0.1}));
}

TEST_CASE("classify_point with s_n = 1/n") {
    const auto p = classify_point(Complex{1.0}, kCesaro, kCesaro, 1.0);
    CHECK(p.label == SpectralLabel::point);
    CHECK(p.evidence.a1 == Tri::yes);
    CHECK(p.evidence.in_s == Tri::yes);
    CHECK(classify_point(Complex{0.5}, kCesaro, kCesaro, 1.0).label != SpectralLabel::point);
}

TEST_CASE("classify_point hypothesis checks") {
    CHECK(error_code([] {
              (void)classify_point(Complex{2.0}, kCesaro, SequenceSpec::power_weight(-1.0), 1.0);
          }) == "weight-unbounded");
    CHECK(error_code([] {
              (void)classify_point(Complex{2.0}, SequenceSpec::log_reciprocal(), kOne, 1.0);
          }) == "operator-unbounded");
}

TEST_CASE("resolvent_section") {
    const auto two = resolvent_section(Complex{3.0}, SequenceSpec::table({1.0, 0.5}), 2);
    const auto inv = oracle::forward_substitution_inverse(oracle::terraced_minus_lambda({1.0, 0.5}, 3.0));
    CHECK(two(0, 0).real() == doctest::Approx(-0.5));
    CHECK(two(1, 0).real() == doctest::Approx(-0.1));
    CHECK(two(1, 1).real() == doctest::Approx(-0.4));
    for (Index i = 0; i < 2; ++i) {
        for (Index k = 0; k <= i; ++k) CHECK(std::abs(two(i, k) - inv[i][k]) < 1e-15);
    }

    const auto one = resolvent_section(Complex{0.3, 0.2}, kCesaro, 1);
    CHECK(std::abs(one(0, 0) - 1.0 / (1.0 - Complex{0.3, 0.2})) < 1e-15);

    const auto three = resolvent_section(Complex{2.0}, kCesaro, 3);
    CHECK(three(1, 0).real() == doctest::Approx(-1.0 / 3.0));

    CHECK(error_code([] { (void)resolvent_section(Complex{0.5}, kCesaro, 5); }) == "lambda-in-S");
    CHECK(error_code([] { (void)resolvent_section(Complex{}, kCesaro, 5); }) ==
          "resolvent-undefined-at-zero");
}

TEST_CASE("verify_resolvent") {
    const auto small = verify_resolvent(Complex{3.0}, SequenceSpec::table({1.0, 0.5}), 2, 1e-14);
    CHECK(small.max_residual < 1e-15);
    CHECK(small.pass);

    const auto big = verify_resolvent(Complex{2.0}, kCesaro, 200, 1e-10);
    CHECK(big.max_residual <= 1e-10);
    CHECK(big.pass);
    CHECK(big.claimed);

    CHECK(error_code([] { (void)verify_resolvent(Complex{1.0}, kCesaro, 10, 1e-10); }) == "lambda-in-S");
}

TEST_CASE("spectrum_grid") {
    const SpectrumContext ctx(kCesaro, kOne, 1.0);
    GridSpec grid{-0.2, 1.2, -0.2, 0.2, 3, 3};
    const auto pts = spectrum_grid(ctx, grid);
    REQUIRE(pts.size() == 9);
    for (const auto& p : pts) {
        const bool outside = std::abs(p.lambda - 0.5) > 0.5 + 1e-12;
        if (outside && p.evidence.dist.distance > 0.0) CHECK(p.label == SpectralLabel::resolvent);
    }
    CHECK(std::abs(pts[4].lambda - 0.5) < 1e-15);

    GridSpec with_zero{-1.0, 1.0, -1.0, 1.0, 3, 3};
    const auto zpts = spectrum_grid(ctx, with_zero);
    CHECK(zpts[4].lambda == Complex{});
    CHECK(zpts[4].label == SpectralLabel::continuous_candidate);

    GridSpec degenerate{0.0, 1.0, 0.0, 1.0, 1, 1};
    CHECK(error_code([&] { (void)spectrum_grid(ctx, degenerate); }) == "invalid-grid");
}

TEST_CASE("spectrum_grid is independent of job count") {
    const SpectrumContext ctx(kCesaro, kOne, 1.0);
    GridSpec grid{-0.25, 1.25, -0.75, 0.75, 9, 7};
    const auto serial = spectrum_grid(ctx, grid, 1);
    const auto parallel = spectrum_grid(ctx, grid, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].lambda == parallel[i].lambda);
        CHECK(serial[i].label == parallel[i].label);
    }
}

TEST_CASE("pseudospectrum_grid") {
    const auto one = build_section(SequenceSpec::table({1.0}), 1);
    GridSpec at_one{1.0, 2.0, 0.0, 1.0, 2, 2};
    const auto nodes = pseudospectrum_grid(one, at_one, {1e-3});
    CHECK(nodes[0].sigma_min == doctest::Approx(0.0));
    CHECK(nodes[0].within[0]);

    const auto ces = build_section(kCesaro, 2);
    GridSpec at_three{3.0, 4.0, 0.0, 1.0, 2, 2};
    const auto three = pseudospectrum_grid(ces, at_three, {});
    const auto sv = oracle::svd2(-2.0, 0.0, 0.5, -2.5);
    CHECK(three[0].sigma_min == doctest::Approx(sv.second).epsilon(1e-12));
}

TEST_CASE("pseudospectrum stays away from zero outside the disk") {
    GridSpec node{2.0, 2.5, 0.0, 0.5, 2, 2};
    double previous = INFINITY;
    for (Index n : {32, 64, 128}) {
        const auto res = pseudospectrum_grid(build_section(kCesaro, n), node, {});
        CHECK(res[0].sigma_min > 0.5);
        CHECK(res[0].sigma_min <= previous + 1e-12);
        previous = res[0].sigma_min;
    }
}
