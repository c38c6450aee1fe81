#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include <json.hpp>

#include "terraspec/cli.hpp"

using nlohmann::json;
namespace cli = terraspec::cli;

namespace {

const json kCesaro = {{"family", "cesaro_scaled"}, {"params", {{"chi", 1.0}}}};

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    return out;
}

}  // namespace

TEST_CASE("parse_sequence") {
    CHECK(cli::parse_sequence(kCesaro).eval(4) == 0.25);
    CHECK(cli::parse_sequence({{"family", "table"}, {"params", {{"values", {1.0, 0.5}}}}}).eval(2) == 0.5);
    CHECK(cli::parse_sequence({{"family", "log_reciprocal"}}).eval(1) == doctest::Approx(1.0 / std::log(2.0)));
}

TEST_CASE("classify") {
    const auto res = cli::run("classify", {{"a", kCesaro}});
    REQUIRE(res.exit_code == cli::kOk);
    const auto out = json::parse(res.output);
    CHECK(out["report"]["norm"].get<double>() == doctest::Approx(1.0));
    CHECK(out["report"]["compact"] == "no");
    CHECK(out["version"] == std::string(cli::kVersion));
    CHECK(out["config_digest"].get<std::string>().size() == 64);

    const json geo = {{"family", "geometric"}, {"params", {{"rho", 0.5}}}};
    const auto ex = cli::run("classify", {{"a", {{"family", "log_reciprocal"}}}, {"r", geo}, {"s", geo}});
    REQUIRE(ex.exit_code == cli::kOk);
    CHECK(json::parse(ex.output)["report"]["compact"] == "yes");

    const auto bad = cli::run("classify", {{"a", {{"family", "cesaro"}}}});
    CHECK(bad.exit_code == cli::kUsage);
    CHECK_FALSE(bad.diagnostic.empty());

    CHECK(cli::run("classify", json::object()).exit_code == cli::kUsage);
    CHECK(cli::run("no-such-command", json::object()).exit_code == cli::kUsage);
}

TEST_CASE("spectrum-map") {
    const json cfg = {{"a", kCesaro},
                      {"chi", 1.0},
                      {"grid", {{"re_range", {0.0, 2.0}}, {"im_range", {-1.0, 1.0}}, {"resolution", 3}}}};
    const auto res = cli::run("spectrum-map", cfg);
    REQUIRE(res.exit_code == cli::kOk);
    CHECK(res.output.rfind("# terraspec", 0) == 0);
    CHECK(res.output.find(cli::config_digest(cfg)) != std::string::npos);
    const auto lines = data_lines(res.output);
    REQUIRE(lines.size() == 10);
    CHECK(lines[0] == "re,im,label,alpha,alpha_chi,dist_to_S,a1,a2");
    // row-major with the imaginary index outer: node (2, 0) is the middle row's last entry
    CHECK(lines[6].rfind("2,0,resolvent,", 0) == 0);
    CHECK(lines[4].rfind("0,0,continuous_candidate,", 0) == 0);
}

TEST_CASE("resolvent-verify, product-band, ideal commands") {
    const auto rv = cli::run("resolvent-verify", {{"a", kCesaro}, {"lambda", 2.0}, {"N", 200}});
    CHECK(rv.exit_code == cli::kOk);
    CHECK(json::parse(rv.output)["results"][0]["max_residual"].get<double>() <= 1e-10);

    const auto pb = cli::run("product-band", {{"a", kCesaro}, {"chi", 1.0}, {"lambda", 2.0}});
    CHECK(pb.exit_code == cli::kOk);
    CHECK(json::parse(pb.output)["results"][0]["verdict"] == "bounded_band");

    const auto drift = cli::run("product-band", {{"a", kCesaro}, {"chi", 1.0}, {"lambda", 2.0},
                                                 {"exponent_shift", 0.5}});
    CHECK(drift.exit_code == cli::kAssertion);

    const auto ax = cli::run("ideal-axioms", {{"a", kCesaro}, {"trials", 200}, {"dim", 8}, {"seed", 5}});
    CHECK(ax.exit_code == cli::kOk);
    const auto axj = json::parse(ax.output);
    CHECK(axj["trials"] == 200);
    CHECK(axj["seed"] == 5);
    for (const auto& [key, count] : axj["violations"].items()) CHECK(count.get<int>() == 0);

    const auto qn = cli::run("ideal-qnorm", {{"a", kCesaro}, {"N", 4}});
    CHECK(qn.exit_code == cli::kOk);
    CHECK(json::parse(qn.output)["quasi_norm"]["value"].get<double>() > 0.0);
}

TEST_CASE("point-test") {
    const auto res = cli::run("point-test", {{"a", kCesaro}, {"lambdas", {0.4, 2.0, {0.0, 0.0}}}});
    REQUIRE(res.exit_code == cli::kOk);
    const auto pts = json::parse(res.output)["points"];
    CHECK(pts[0]["label"] == "residual");
    CHECK(pts[1]["label"] == "resolvent");
    CHECK(pts[2]["label"] == "continuous_candidate");
}

TEST_CASE("outputs are deterministic across runs and job counts") {
    const json cfg = {{"a", kCesaro},
                      {"grid", {{"re_range", {-0.25, 1.25}}, {"im_range", {-0.75, 0.75}}, {"resolution", 9}}}};
    const auto one = cli::run("spectrum-map", cfg, 1);
    const auto again = cli::run("spectrum-map", cfg, 1);
    const auto par = cli::run("spectrum-map", cfg, 4);
    CHECK(one.output == again.output);
    CHECK(one.output == par.output);

    const json ax = {{"a", kCesaro}, {"trials", 50}, {"seed", 3}};
    CHECK(cli::run("ideal-axioms", ax, 1).output == cli::run("ideal-axioms", ax, 3).output);
}

TEST_CASE("TERRASPEC_SEED overrides the config seed") {
    json cfg = {{"seed", 1}};
    ::setenv("TERRASPEC_SEED", "42", 1);
    cli::apply_env_overrides(cfg);
    ::unsetenv("TERRASPEC_SEED");
    CHECK(cfg["seed"] == 42);
    json untouched = {{"seed", 1}};
    cli::apply_env_overrides(untouched);
    CHECK(untouched["seed"] == 1);
}
