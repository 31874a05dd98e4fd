#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "p2f/errors.hpp"
#include "p2f/rmodules.hpp"

using namespace p2f;
using namespace p2f::rmod;

namespace {

DegreeMap nonzero(const DegreeMap& d) {
    DegreeMap out;
    for (const auto& [k, n] : d)
        if (n) out[k] = n;
    return out;
}

}  // namespace

TEST_CASE("rational arithmetic") {
    Rational a(1, 4), b(-3, 8);
    CHECK((a + b) == Rational(-1, 8));
    CHECK((a * b).str() == "-3/32");
    CHECK(Rational(6, 3).str() == "2");
    CHECK(Rational::parse("-5/10") == Rational(-1, 2));
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(-7, 2).frac() == Rational(1, 2));
    CHECK_THROWS(Rational(1, 2).to_int());
}

TEST_CASE("ring multiplication") {
    auto Q = RingElement::monomial(1, 0), Q2 = RingElement::monomial(2, 0), V = RingElement::monomial(0, 1);
    CHECK((Q * Q2).is_zero());
    CHECK(V * Q == RingElement::monomial(1, 1));
    CHECK(RingElement::monomial_degree(1, 1) == -5);
    auto one_v = RingElement::one() + V;
    CHECK((one_v * one_v) == RingElement::one() + RingElement::monomial(0, 2));
    CHECK((one_v * one_v).str() == "1 + V^2");
    CHECK(RingElement::monomial(2, 1).str() == "Q^2 V^1");
    CHECK(Q2.str() == "Q^2");
    CHECK(RingElement::zero().str() == "0");
}

TEST_CASE("dims of towers and standard modules") {
    auto s = StandardModule::make(0, 0, 0).module();
    CHECK(nonzero(dims(s, -1, 4)) == DegreeMap{{0, 1}, {1, 1}, {2, 1}, {4, 1}});
    CHECK(nonzero(dims(u_tower(-2), -3, 2)) == DegreeMap{{-2, 1}, {0, 1}, {2, 1}});
    auto f = StandardModule::make(1, -1, -1).module({{-1, 1, 1}});
    CHECK(nonzero(dims(f, -2, 3)) == DegreeMap{{-1, 2}, {0, 1}, {2, 1}, {3, 1}});
}

TEST_CASE("Q rank profile") {
    auto s = StandardModule::make(0, 0, 0).module();
    auto q = q_rank_profile(s, 0, 20);
    for (int k = 0; k <= 20; ++k) {
        int r = ((k % 4) + 4) % 4;
        CHECK(q[k] == ((r == 1 || r == 2) ? 1u : 0u));
    }
    auto t = q_rank_profile(StandardModule::make(1, -1, -1).module(), -3, 3);
    CHECK(t[0] == 1);
    CHECK(t[-1] == 0);
    StructuredModule boxes;
    boxes.boxes = {{0, 3, 1}, {5, 2, 1}};
    for (const auto& [k, n] : q_rank_profile(boxes, -2, 8)) CHECK(n == 0);
}

TEST_CASE("Q-strings carry Q inside the string") {
    StructuredModule m;
    m.boxes = {{-3, 1, 2}};
    CHECK(nonzero(dims(m, -6, 0)) == DegreeMap{{-4, 1}, {-3, 1}});
    CHECK(nonzero(q_rank_profile(m, -6, 0)) == DegreeMap{{-3, 1}});
    CHECK(m.min_degree() == -4);
}

TEST_CASE("correction terms and orientation reversal") {
    CHECK(correction_terms_of(StandardModule::make(0, 0, 0)) == CorrectionTerms{0, 0, 0});
    CHECK(correction_terms_of(StandardModule::from_starts(0, -1, 2)) == CorrectionTerms{1, -1, -1});
    CHECK(correction_terms_of(StandardModule::from_starts(2, 1, 4)) == CorrectionTerms{2, 0, 0});
    CHECK(reverse_orientation({0, 0, 0}) == CorrectionTerms{0, 0, 0});
    CHECK(reverse_orientation({1, -1, -1}) == CorrectionTerms{1, 1, -1});
    CHECK(reverse_orientation({-1, -1, -1}) == CorrectionTerms{1, 1, 1});
    CHECK_THROWS_AS(StandardModule::make(0, 1, 0), ValidationError);
    CHECK_THROWS_AS(StandardModule::make(1, 0, 0), ValidationError);
    CHECK_THROWS_AS((CorrectionTerms{Rational(1, 2), 0, 0}.validate()), ValidationError);
}

TEST_CASE("property: standard modules") {
    for (int g = -6; g <= 6; ++g)
        for (int db = 0; db <= 4; db += 2)
            for (int da = 0; da <= 4; da += 2) {
                auto s = StandardModule::make(g + db + da, g + db, g);
                auto m = s.module();
                CHECK(correction_terms_of(s) == CorrectionTerms{g + db + da, g + db, g});
                auto ct = correction_terms_of(s);
                CHECK(reverse_orientation(reverse_orientation(ct)) == ct);
                CHECK(reverse_orientation(ct).beta == -ct.beta);
                for (const auto& [k, n] : q_power_rank(m, 3, -30, 30)) CHECK(n == 0);
                Grading top = s.a() + 4;
                auto d = dims(m, top, top + 11);
                for (Grading k = top; k <= top + 3; k += 1) CHECK(d[k] == d[k + 4]);
                std::size_t period = 0;
                for (Grading k = top; k <= top + 3; k += 1) period += d[k];
                CHECK(period == 3);
            }
}

TEST_CASE("module JSON round trip") {
    auto m = StandardModule::make(1, -1, -3).module({{-2, 2, 1}, {-4, 1, 2}});
    auto j = to_json(m);
    auto back = module_from_json(j);
    CHECK(back.towers == m.towers);
    CHECK(back.boxes == m.boxes);
    CHECK(back.links == m.links);
    CHECK(to_json(back).dump() == j.dump());
    CHECK(rational_json(Rational(3, 4)) == "3/4");
    CHECK(rational_json(Rational(-2)) == -2);
    CHECK(rational_from_json(nlohmann::json("5/10")) == Rational(1, 2));
}

TEST_CASE("module JSON rejects bad input") {
    CHECK_THROWS_AS(module_from_json(nlohmann::json::parse(R"({"towers":[{"base":0,"step":3}]})")),
                    ValidationError);
    CHECK_THROWS_AS(module_from_json(nlohmann::json::parse(R"({"towers":[{"step":2}]})")), ValidationError);
}
