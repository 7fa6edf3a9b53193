#include "p3pstrat/acceptance.hpp"
#include "p3pstrat/deltoid.hpp"
#include "p3pstrat/harness.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace p3pstrat;

namespace {


bool has_component(const FixtureTriangle &f, const SparsePoly &p) {
    for (const auto &c : f.components)
        if (c.poly == p)
            return true;
    return false;
}

std::string temp_file(const std::string &name, const std::string &content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path.string();
}

template <typename Fn> std::string error_of(Fn fn) {
    try {
        fn();
    } catch (const std::exception &e) {
        return e.what();
    }
    return "";
}

SparsePoly component(const std::string &terms) { return SparsePoly::parse("vars e1p e2p e3p\n" + terms); }

} // namespace

TEST_CASE("fixture store") {
    const auto &fx = load_fixtures();
    REQUIRE(fx.size() == 7);
    const std::vector<std::pair<std::string, std::string>> expect = {
        {"equilateral", "1,1,1"},    {"isosceles_right", "sqrt2,1,1"}, {"isosceles_acute", "4,3,3"},
        {"isosceles_obtuse", "5,3,3"}, {"general_right", "5,4,3"},     {"general_obtuse", "7,5,3"},
        {"general_acute", "7,6,5"}};
    for (const auto &[name, label] : expect) {
        const FixtureTriangle *f = find_fixture(name);
        REQUIRE(f);
        CHECK(f->sides_label == label);
        CHECK(find_fixture(label) == f);
        CHECK(f->leading_coefficients.size() == 5);
        int trivial = 0;
        for (const auto &c : f->components)
            trivial += c.trivial;
        CHECK(trivial == 3);
    }
    CHECK(find_fixture("nope") == nullptr);

    const FixtureTriangle *iso = find_fixture("isosceles_right");
    CHECK(iso->triangle.sq[0] == 2);
    CHECK(iso->triangle.sq[1] == 1);
    CHECK(iso->triangle.sq[2] == 1);
    CHECK(has_component(*iso, component("1 * e1p^2\n1 * e2p^2\n-2")));

    CHECK(has_component(*find_fixture("equilateral"),
                        component("1 * e1p^4\n-1 * e1p^2 e2p^2\n-1 * e1p^2 e3p^2\n1 * e2p^4\n-1 * e2p^2 e3p^2\n1 * e3p^4\n-1")));
    const FixtureTriangle *acute = find_fixture("general_acute");
    CHECK(has_component(*acute, component("5 * e1p^2\n-2 * e1p e2p\n5 * e2p^2\n-245")));
    CHECK(has_component(*acute, component("5 * e1p^2\n2 * e1p e2p\n5 * e2p^2\n-245")));
    CHECK(has_component(*acute, component("35 * e1p^2\n38 * e1p e3p\n35 * e3p^2\n-1260")));
    CHECK(has_component(*acute, component("7 * e2p^2\n-10 * e2p e3p\n7 * e3p^2\n-175")));
    CHECK(has_component(*acute, component("25 * e1p^4\n-12 * e1p^2 e2p^2\n-38 * e1p^2 e3p^2\n36 * e2p^4\n-60 * e2p^2 e3p^2\n49 * e3p^4\n-44100")));
    CHECK(acute->leading_coefficients == std::vector<long long>{57624, -141120, 171072, -103680, 31104});
}

TEST_CASE("text format of fixture components") {
    for (const auto &f : load_fixtures())
        for (const auto &c : f.components) {
            CHECK(c.poly.nvars() == 3);
            CHECK(SparsePoly::parse(c.poly.to_string()) == c.poly);
        }
}

TEST_CASE("every transcribed component is reached by some complement") {
    // guards against transcription typos; several quadric arcs are only reached
    // in the limit of sources on the circumcircle, so the sweep hugs the plane
    for (const auto &f : load_fixtures()) {
        const double R = circumcircle_data(f.triangle).R;
        const SweepResult s =
            sweep_cylinder(SweepConfig{f.triangle, 256, 2, 1e-4 * R, 1e-3 * R, 0.37, true, Tolerances{}});
        for (const auto &c : f.components) {
            if (c.trivial)
                continue;
            const std::vector<Component> only = {c};
            double best = INFINITY;
            for (const auto &r : s.records)
                best = std::min(best, component_membership(f.triangle, only, nullptr, r.complement_e.e).value);
            INFO(f.name << " " << c.name << " " << best);
            CHECK(best < 1e-6);
        }
    }
}

TEST_CASE("scene ingestion") {
    const Scene a = parse_scene(json::parse(R"({"triangle": {"s12": 5, "s13": 4, "s23": 3}})"));
    CHECK(a.triangle.sq[0] == 25);
    CHECK(a.centers.empty());

    const Scene b = parse_scene(
        json::parse(R"({"triangle": {"s12": "7", "s13": "6", "s23": "5"}, "centers": [[1, 2, 3], ["1/2", 0, "7/4"]]})"));
    CHECK(b.triangle.s12 == doctest::Approx(7));
    REQUIRE(b.centers.size() == 2);
    CHECK(b.centers[1].x() == 0.5);
    CHECK(b.centers[1].z() == 1.75);

    const Scene c = parse_scene(json::parse(R"({"triangle": {"s12_sq": 2, "s13": 1, "s23": 1}})"));
    CHECK(c.triangle.sq[0] == 2);

    CHECK(parse_rational(json("3/4"), "$.x") == mpq_class(3, 4));
    CHECK(parse_rational(json(-2), "$.x") == -2);
    CHECK_THROWS_AS(parse_rational(json("3/0"), "$.x"), SchemaError);
    CHECK_THROWS_AS(parse_rational(json("abc"), "$.x"), SchemaError);

    const std::string deg = error_of([] { parse_scene(json::parse(R"({"triangle": {"s12": 1, "s13": 1, "s23": 3}})")); });
    CHECK(deg.find("$.triangle") != std::string::npos);
    CHECK_THROWS_AS(parse_scene(json::parse(R"({"triangle": {"s12": 1, "s13": 1, "s23": 3}})")), DegenerateTriangle);

    const std::string missing = error_of([] { parse_scene(json::parse(R"({"triangle": {"s12": 1, "s13": 1}})")); });
    CHECK(missing.find("$.triangle.s23") != std::string::npos);
    const std::string badc =
        error_of([] { parse_scene(json::parse(R"({"triangle": {"s12": 1, "s13": 1, "s23": 1}, "centers": [[1, 2]]})")); });
    CHECK(badc.find("$.centers[0]") != std::string::npos);
    CHECK_THROWS_AS(parse_scene(json::parse("[1, 2]")), SchemaError);

    const std::string path = temp_file("p3pstrat_scene.json", R"({"triangle": {"s12": "7", "s13": 6, "s23": 5}})");
    CHECK(ingest_scene(path).triangle.s13 == doctest::Approx(6));
    CHECK_THROWS(ingest_scene(path + ".missing"));
}

TEST_CASE("side lists") {
    CHECK(parse_sides("7,6,5").s12 == doctest::Approx(7));
    CHECK(parse_sides("general_acute").s23 == doctest::Approx(5));
    const Triangle t = parse_sides("sqrt2,1,1");
    CHECK(t.sq[0] == 2);
    CHECK_THROWS(parse_sides("1,2"));
    CHECK_THROWS_AS(parse_sides("1,1,3"), DegenerateTriangle);
}

TEST_CASE("tolerance configuration") {
    Tolerances t;
    t.tau_rank = 1e-9;
    t.max_order = 5;
    const Tolerances back = tolerances_from_json(tolerances_to_json(t));
    CHECK(back.tau_rank == 1e-9);
    CHECK(back.max_order == 5);
    CHECK(tolerances_to_json(back) == tolerances_to_json(t));
    CHECK_THROWS_AS(tolerances_from_json(json::parse(R"({"tau_rnak": 1e-8})")), SchemaError);
    // partial configs keep defaults for the rest
    const Tolerances partial = tolerances_from_json(json::parse(R"({"cusp_ratio": 0.01})"));
    CHECK(partial.cusp_ratio == 0.01);
    CHECK(partial.tau_rank == Tolerances{}.tau_rank);

    CHECK(config_hash(t, 1).size() == 16);
    CHECK(config_hash(t, 1) == config_hash(back, 1));
    CHECK(config_hash(t, 1) != config_hash(t, 2));
    CHECK(config_hash(t, 1) != config_hash(Tolerances{}, 1));

    const std::string path = temp_file("p3pstrat_tol.json", R"({"membership": 1e-10})");
    CHECK(load_tolerances(path).membership == 1e-10);
    ::setenv(kToleranceEnv, path.c_str(), 1);
    CHECK(load_tolerances().membership == 1e-10);
    ::unsetenv(kToleranceEnv);
    CHECK(load_tolerances().membership == Tolerances{}.membership);
}

TEST_CASE("suite selection") {
    CHECK(suite_criteria("all") == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(suite_criteria("strata") == std::vector<int>{1, 2, 3, 4});
    CHECK(suite_criteria("deltoid") == std::vector<int>{5, 6, 7, 8});
    CHECK(suite_criteria("p3p") == std::vector<int>{9});
    CHECK(suite_criteria("c6") == std::vector<int>{6});
    CHECK_THROWS_AS(suite_criteria("bogus"), UnknownSuite);
    CHECK_THROWS_AS(run_verify("c10", AcceptanceOptions{}), UnknownSuite);
    for (int i = 1; i <= kCriterionCount; ++i)
        CHECK(!criterion_name(i).empty());
}

TEST_CASE("reports are deterministic") {
    AcceptanceOptions opt;
    opt.seed = 7;
    const RunReport a = run_verify("c1", opt), b = run_verify("c1", opt);
    CHECK(a.config_hash == config_hash(opt.tol, 7));
    CHECK(a.to_json(false).dump() == b.to_json(false).dump());
    const json j = a.to_json(true);
    CHECK(j.at("suite") == "c1");
    CHECK(j.at("seed") == 7);
    REQUIRE(j.at("checks").size() == 1);
    CHECK(j.at("checks")[0].contains("runtime_s"));
    CHECK_FALSE(a.to_json(false).at("checks")[0].contains("runtime_s"));
    CHECK(a.passed());
    CHECK(summary_line(a.checks[0]).find("PASS") != std::string::npos);
}

TEST_CASE("JSON views of results") {
    const Triangle t = make_triangle(5, 4, 3);
    const json c = to_json(classify(t, {4, 2, 1}));
    CHECK(c.at("label") == "DangerCylinder");
    CHECK(c.at("dual_space").at("mu") == 2);
    const json m = to_json(morley_angles(make_triangle(7, 6, 5)));
    CHECK(m.at("thetas").size() == 3);
    SolutionTriple s;
    s.e = Eigen::Vector3cd(1, std::complex<double>(2, 1), 3);
    const json sj = to_json(s);
    CHECK(sj.at("e").size() == 3);
}
