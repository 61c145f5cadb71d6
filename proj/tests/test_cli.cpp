#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "invpde/cli.hpp"
#include "invpde/euclidean.hpp"
#include "invpde/invariant_poly.hpp"
#include "invpde/jet.hpp"
#include "json.hpp"

using namespace invpde;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& contents)
        : path("cli_test_" + name) {
        std::ofstream f(path);
        f << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("generate prints the minimal-surface equation") {
    CliResult r = cli({"generate", "--group", "euclidean", "-n", "2", "--poly", "t1",
                       "--format", "latex"});
    CHECK(r.code == 0);
    CHECK(r.out.find("u_{11}") != std::string::npos);
    CHECK(r.out.find("u_{22}") != std::string::npos);
    CHECK(r.out.find("u_{1} u_{2} u_{12}") != std::string::npos);
    CHECK(r.out.find("= 0") != std::string::npos);
    CHECK(r.out.find("cleared factor") != std::string::npos);
}

TEST_CASE("generate JSON re-parses to the library numerator") {
    CliResult r = cli({"generate", "--group", "euclidean", "-n", "2", "--poly",
                       "1/2*t1^2 - 1/2*t2", "--format", "json"});
    CHECK(r.code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    Expr numerator = parse_expr_json(j.at("numerator").dump());
    Expr cleared = parse_expr_json(j.at("cleared").dump());
    auto pde = generate_euclidean_pde(
        parse_poly("1/2*t1^2 - 1/2*t2", InvariantPoly::Family::Euclidean), 2);
    CHECK(nf_equal(numerator, pde.numerator, 2));
    CHECK(nf_equal(cleared, pde.cleared, 2));
    CHECK(j.at("n") == 2);
    CHECK(j.at("group") == "euclidean");
}

TEST_CASE("invariants of the zero jet are zero") {
    TempFile jet("zero.json", jet_to_json(JetPoint2::zero(2)));
    CliResult r = cli({"invariants", "--group", "euclidean", "-n", "2", "--jet", jet.path});
    CHECK(r.code == 0);
    CHECK(r.out.find("tau_1 = 0") != std::string::npos);
    CHECK(r.out.find("tau_2 = 0") != std::string::npos);
}

TEST_CASE("verify runs a suite and reports") {
    CliResult r = cli({"verify", "--suite", "euclidean", "-n", "1", "--trials", "25", "--tol",
                       "1e-9", "--seed", "7"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"failures\":0") != std::string::npos);
    CHECK(r.out.find("\"seed\":7") != std::string::npos);

    SUBCASE("failures produce exit code 1") {
        CliResult bad = cli({"verify", "--suite", "euclidean", "-n", "1", "--trials", "5",
                             "--tol", "1e-18", "--seed", "7"});
        CHECK(bad.code == 1);
    }
    SUBCASE("deterministic output for fixed flags") {
        CliResult again = cli({"verify", "--suite", "euclidean", "-n", "1", "--trials", "25",
                               "--tol", "1e-9", "--seed", "7"});
        CHECK(again.out == r.out);
    }
}

TEST_CASE("bad flags exit 2 with usage") {
    CHECK(cli({"generate", "--group", "euclidean"}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"verify", "--suite", "frobnicate", "-n", "2"}).code == 2);
    CliResult r = cli({"generate", "--group", "euclidean", "-n", "2", "--poly", "t1 $ t2"});
    CHECK(r.code == 2);
    CHECK(r.err.find("position") != std::string::npos);
}

TEST_CASE("conformal generate rejects mixed weights before generation") {
    CliResult r = cli({"generate", "--group", "conformal", "-n", "3", "--poly", "c2 + c3"});
    CHECK(r.code == 2);
}

TEST_CASE("poly grammar") {
    InvariantPoly f = parse_poly("1/2*t1^2 - 1/2*t2", InvariantPoly::Family::Euclidean);
    CHECK(f.terms.size() == 2);
    CHECK(f.terms.at({2, 0}) == Rational(1, 2));
    CHECK(f.terms.at({0, 1}) == Rational(-1, 2));
    CHECK(parse_poly("t1", InvariantPoly::Family::Euclidean).terms.count({1}) == 1);
    CHECK(parse_poly("3*c2^3 - c3^2", InvariantPoly::Family::Conformal)
              .is_weighted_homogeneous());
    CHECK(parse_poly("t1 - t1", InvariantPoly::Family::Euclidean).is_zero());
    CHECK_THROWS_AS(parse_poly("c1", InvariantPoly::Family::Conformal), ParseError);
    CHECK_THROWS_AS(parse_poly("t1^-2", InvariantPoly::Family::Euclidean), ParseError);
    CHECK_THROWS_AS(parse_poly("q5", InvariantPoly::Family::Euclidean), ParseError);
    CHECK_THROWS_AS(parse_poly("", InvariantPoly::Family::Euclidean), ParseError);
    try {
        parse_poly("t1 + % t2", InvariantPoly::Family::Euclidean);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.position == 5);
    }
}
