#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "p2f/errors.hpp"
#include "p2f/gysin.hpp"

using namespace p2f;
using namespace p2f::gysin;
using rmod::StandardModule;

namespace {

GysinProblem problem(int base, std::vector<rmod::Box> boxes = {}) {
    auto m = rmod::u_tower(base);
    m.boxes = std::move(boxes);
    return GysinProblem::make(m);
}

rmod::DegreeMap box_dims(const std::vector<rmod::Box>& boxes) {
    rmod::DegreeMap out;
    for (const auto& b : boxes)
        if (b.dim) out[b.deg] += b.dim;
    return out;
}

rmod::DegreeMap nonzero(const rmod::DegreeMap& d) {
    rmod::DegreeMap out;
    for (const auto& [k, n] : d)
        if (n) out[k] = n;
    return out;
}

rmod::DegreeMap sdims(const StandardModule& s, Grading lo) { return rmod::dims(s.module(), lo, lo + 15); }

}  // namespace

TEST_CASE("parity classification") {
    CHECK(classify_parity(sdims(StandardModule::make(0, 0, 0), 20), 0) == Parity::Even);
    CHECK(classify_parity(sdims(StandardModule::make(1, -1, -1), 20), 0) == Parity::Odd);
    CHECK(classify_parity(sdims(StandardModule::make(-1, -1, -1), 20), -1) == Parity::Even);
    CHECK_THROWS_AS(classify_parity({{0, 1}}, 0), WindowError);
}

TEST_CASE("local increase patterns") {
    CHECK(increase_classify(3, 3, 2, 1) == Increase::Increasing);
    CHECK(increase_classify(1, 1, 0, 1) == Increase::Increasing);
    CHECK(increase_classify(1, 2, 2, 1) == Increase::Decreasing);
    CHECK_THROWS_AS(increase_classify(-1, 0, 0, 1), ValidationError);
    CHECK_THROWS_AS(increase_classify(1, 1, 1, 0), ContractError);
}

TEST_CASE("stated closed form") {
    auto a = closed_form_stated(problem(0, {{-1, 2, 1}}));
    CHECK(a.towers == StandardModule::make(0, 0, 0));
    CHECK(nonzero(box_dims(a.boxes)) == rmod::DegreeMap{{-1, 1}});
    auto b = closed_form_stated(problem(0, {{-1, 1, 1}}));
    CHECK(b.towers == StandardModule::make(1, -1, -1));
    CHECK(nonzero(box_dims(b.boxes)) == rmod::DegreeMap{{-1, 1}});
    auto c = closed_form_stated(problem(-2, {{-2, 2, 1}}));
    CHECK(c.towers == StandardModule::make(0, 0, -2));
    CHECK(nonzero(box_dims(c.boxes)) == rmod::DegreeMap{{-2, 2}});
    CHECK_THROWS_AS(closed_form_stated(problem(0, {{-3, 1, 1}})), ValidationError);
}

TEST_CASE("feasibility examples") {
    auto pb = problem(0, {{-1, 1, 1}});
    auto ok = feasibility_check(pb, StandardModule::make(1, -1, -1).module());
    CHECK(ok.feasible);
    CHECK(ok.certificate.consistent());
    auto bad = feasibility_check(pb, StandardModule::make(1, -1, -1).module({{-1, 1, 1}}));
    CHECK_FALSE(bad.feasible);
    REQUIRE(bad.failing_degree.has_value());
    CHECK(*bad.failing_degree == Grading(-1));
    CHECK(feasibility_check(problem(-2), StandardModule::make(-1, -1, -1).module()).feasible);
    CHECK_THROWS_AS(feasibility_check(pb, rmod::u_tower(0)), ValidationError);
}

TEST_CASE("oracle examples") {
    for (int k = 0; k <= 5; ++k) {
        auto sols = oracle_solve(problem(0, {{-1, static_cast<std::size_t>(2 * k), 1}}));
        REQUIRE(sols.size() == 1);
        CHECK(sols[0].unique);
        CHECK(sols[0].towers == StandardModule::make(0, 0, 0));
        CHECK(nonzero(sols[0].finite_dims()) == nonzero(rmod::DegreeMap{{-1, static_cast<std::size_t>(k)}}));
    }
    auto one = oracle_solve(problem(0, {{-1, 1, 1}}));
    REQUIRE(one.size() == 1);
    CHECK(one[0].towers == StandardModule::make(1, -1, -1));
    CHECK(nonzero(one[0].finite_dims()).empty());
    CHECK(one[0].parity == Parity::Odd);

    auto p = oracle_solve(problem(-2));
    REQUIRE(p.size() == 1);
    CHECK(p[0].towers == StandardModule::make(-1, -1, -1));
}

TEST_CASE("non-unique remark input") {
    auto sols = oracle_solve(problem(-4, {{-4, 3, 1}, {-3, 1, 1}}));
    REQUIRE(sols.size() == 2);
    std::vector<std::pair<std::string, rmod::DegreeMap>> got;
    for (const auto& s : sols) {
        CHECK_FALSE(s.unique);
        got.emplace_back(s.towers.str(), nonzero(s.finite_dims()));
    }
    std::sort(got.begin(), got.end());
    CHECK(got[0].first == "S+_{-2,-2,-2}");
    CHECK(got[0].second == rmod::DegreeMap{{-4, 2}, {-3, 1}});
    CHECK(got[1].first == "S+_{0,-2,-2}");
    CHECK(got[1].second == rmod::DegreeMap{{-4, 2}});
}

TEST_CASE("corrected closed form and stated diffs") {
    auto a = closed_form_corrected(problem(0, {{-1, 1, 1}}));
    CHECK(a.towers == StandardModule::make(1, -1, -1));
    CHECK(nonzero(box_dims(a.boxes)).empty());
    auto d = stated_vs_corrected(problem(0, {{-1, 1, 1}}));
    REQUIRE(d.has_value());
    CHECK(d->kind == "multiplicity");

    CHECK(closed_form_corrected(problem(-2)).towers == StandardModule::make(-1, -1, -1));

    auto c = closed_form_corrected(problem(-2, {{-2, 1, 1}}));
    CHECK(c.towers == StandardModule::make(0, 0, -2));
    auto dc = stated_vs_corrected(problem(-2, {{-2, 1, 1}}));
    REQUIRE(dc.has_value());
    CHECK(dc->kind == "parity");

    CHECK_FALSE(stated_vs_corrected(problem(0, {{-1, 4, 1}})).has_value());
}

TEST_CASE("no partner for an invalid input") {
    CHECK_THROWS_AS(GysinProblem::make(rmod::v_tower(0)), ValidationError);
    CHECK_THROWS_AS(window_for(problem(0), 4), WindowError);
    CHECK_NOTHROW(window_for(problem(0), 12));
}

TEST_CASE("property: uniqueness over the closed-form family") {
    for (int k = -6; k <= 6; ++k)
        for (std::size_t n = 0; n <= 12; ++n)
            for (bool second : {false, true}) {
                if (second && n == 0) continue;
                FamilyInput f{k, n, second};
                auto pb = GysinProblem::make(family_module(f));
                auto sols = oracle_solve(pb);
                INFO("k=" << k << " n=" << n << " second=" << second);
                REQUIRE(sols.size() == 1);
                CHECK(sols[0].unique);
                CHECK(sols[0].certificate.consistent());

                auto co = closed_form_corrected(pb);
                CHECK(co.towers == sols[0].towers);
                CHECK(nonzero(box_dims(co.boxes)) == nonzero(sols[0].finite_dims()));
                CHECK(co.parity == sols[0].parity);

                auto diff = stated_vs_corrected(pb);
                CHECK(diff.has_value() == (second || n % 2 == 1));

                if (n + 2 <= 12) {
                    auto bigger = oracle_solve(GysinProblem::make(family_module({k, n + 2, second})));
                    REQUIRE(bigger.size() == 1);
                    CHECK(bigger[0].parity == sols[0].parity);
                }
            }
}

TEST_CASE("solution JSON carries the certificate") {
    auto sols = oracle_solve(problem(0, {{-1, 2, 1}}));
    auto j = to_json(sols[0]);
    REQUIRE(j.contains("certificate"));
    for (const char* key : {"s", "i", "p", "q", "m"}) CHECK(j["certificate"].contains(key));
    CHECK(j["certificate"]["s"].size() == sols[0].certificate.size());
}
