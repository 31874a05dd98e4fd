#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "p2f/errors.hpp"
#include "p2f/surgery.hpp"

using namespace p2f;
using namespace p2f::surgery;

namespace {

KnotData knot_for(long sigma, int arf) {
    long n = -sigma / 2;
    KnotData k = n == 0 ? unknot() : torus_knot_2(n);
    if (arf_from_alexander(k.alexander) != arf) k = connected_sum(k, figure_eight());
    return k;
}

KnotData make_knot(std::vector<long> a, long sigma) {
    KnotData k;
    k.name = "k";
    k.alexander = std::move(a);
    k.signature = sigma;
    return k;
}

std::vector<Grading> tower_bases(const StructuredModule& m) {
    std::vector<Grading> out;
    for (const auto& t : m.towers) out.push_back(t.base);
    return out;
}

std::size_t box_total(const StructuredModule& m) {
    std::size_t n = 0;
    for (const auto& b : m.boxes) n += b.dim;
    return n;
}

}  // namespace

TEST_CASE("knot validation") {
    auto t = validate_knot(make_knot({-1, 1}, -2));
    REQUIRE(t.arf.has_value());
    CHECK(*t.arf == 1);
    CHECK(*validate_knot(make_knot({1}, 0)).arf == 0);
    CHECK(*validate_knot(make_knot({3, -1}, 0)).arf == 1);

    CHECK_THROWS_AS(validate_knot(make_knot({1, 1}, 0)), ValidationError);
    CHECK_THROWS_AS(validate_knot(make_knot({-1, 1}, -1)), ValidationError);
    auto wrong_arf = make_knot({-1, 1}, -2);
    wrong_arf.arf = 0;
    CHECK_THROWS_AS(validate_knot(wrong_arf), ValidationError);
    // trefoil polynomial with signature 0 forces b_0 < 0
    CHECK_THROWS_AS(validate_knot(make_knot({-1, 1}, 0)), ValidationError);

    auto m = validate_knot(make_knot({-1, 1}, 2));
    CHECK(m.mirrored);
    CHECK(m.signature == -2);
}

TEST_CASE("torsion, delta and b coefficients") {
    CHECK(torsion_coefficient(validate_knot(torus_knot_2(1)), 0) == 1);
    CHECK(torsion_coefficient(validate_knot(figure_eight()), 0) == -1);
    CHECK(torsion_coefficient(validate_knot(torus_knot_2(1)), 1) == 0);
    CHECK(torsion_coefficient(validate_knot(torus_knot_2(3)), 3) == 0);

    CHECK(delta_bound(-2, 0) == 1);
    for (long s = -4; s <= 4; ++s) CHECK(delta_bound(0, s) == 0);
    CHECK(delta_bound(-8, 3) == 1);
    CHECK(delta_bound(-8, 0) == 2);
    CHECK_THROWS_AS(delta_bound(-3, 0), ContractError);

    CHECK(b_coefficient(validate_knot(torus_knot_2(1)), 0) == 0);
    CHECK(b_coefficient(validate_knot(figure_eight()), 0) == 1);
    CHECK(b_coefficient(validate_knot(torus_knot_2(2)), 0) == 0);
    CHECK(b_coefficient(validate_knot(torus_knot_2(2)), 1) == 0);
}

TEST_CASE("zero surgery modules") {
    auto f8 = hm_zero_surgery(validate_knot(figure_eight()));
    CHECK(tower_bases(f8.s0) == std::vector<Grading>{-1, 0});
    REQUIRE(f8.s0.boxes.size() == 1);
    CHECK(f8.s0.boxes[0].deg == Grading(-1));
    CHECK(f8.s0.boxes[0].dim == 1);
    for (const auto& l : f8.higher) {
        CHECK(l.b == 0);
        CHECK(l.delta == 0);
    }

    auto tr = hm_zero_surgery(validate_knot(torus_knot_2(1)));
    CHECK(tower_bases(tr.s0) == std::vector<Grading>{-1, -2});
    CHECK(box_total(tr.s0) == 0);

    auto t25 = hm_zero_surgery(validate_knot(torus_knot_2(2)));
    CHECK(tower_bases(t25.s0) == std::vector<Grading>{-1, -2});
    CHECK(box_total(t25.s0) == 0);
    bool saw_s1 = false;
    for (const auto& l : t25.higher)
        if (l.s == 1) {
            saw_s1 = true;
            CHECK(l.delta == 1);
            CHECK(l.b == 0);
        }
    CHECK(saw_s1);
}

TEST_CASE("plus one surgery") {
    auto tr = hm_plus_one_surgery(validate_knot(torus_knot_2(1)));
    CHECK(tower_bases(tr.self_conjugate) == std::vector<Grading>{-2});
    CHECK(box_total(tr.self_conjugate) == 0);

    auto f8 = hm_plus_one_surgery(validate_knot(figure_eight()));
    CHECK(tower_bases(f8.self_conjugate) == std::vector<Grading>{0});
    REQUIRE(f8.self_conjugate.boxes.size() == 1);
    CHECK(f8.self_conjugate.boxes[0].deg == Grading(-1));

    auto k8 = hm_plus_one_surgery(validate_knot(knot_for(-8, 1)));
    CHECK(tower_bases(k8.self_conjugate) == std::vector<Grading>{-4});
    REQUIRE(k8.self_conjugate.boxes.size() == 1);
    CHECK(k8.self_conjugate.boxes[0].deg == Grading(-5));
    CHECK(k8.self_conjugate.boxes[0].dim % 2 == 1);

    CHECK(hs_plus_one_surgery(validate_knot(torus_knot_2(1))).towers == StandardModule::make(-1, -1, -1));
    CHECK(hs_plus_one_surgery(validate_knot(figure_eight())).towers == StandardModule::make(1, -1, -1));
    CHECK(hs_plus_one_surgery(validate_knot(torus_knot_2(2))).towers == StandardModule::make(-1, -1, -1));
}

TEST_CASE("correction tables") {
    CHECK(table_correction_terms(-2, 1, 1) == CorrectionTerms{-1, -1, -1});
    CHECK(table_correction_terms(-8, 1, -1) == CorrectionTerms{1, -1, -3});
    CHECK(table_correction_terms(-16, 0, 1) == CorrectionTerms{-4, -4, -4});
    CHECK(table_correction_terms(-22, 0, 1) == CorrectionTerms{-6, -6, -6});
    for (long s = 0; s >= -16; s -= 2) CHECK(table_correction_terms(s, 0, -1) == CorrectionTerms{0, 0, 0});
    CHECK_THROWS_AS(table_correction_terms(2, 0, 1), ContractError);
    CHECK_THROWS_AS(table_correction_terms(-2, 2, 1), ContractError);
    CHECK_THROWS_AS(table_correction_terms(-2, 0, 0), ContractError);
}

TEST_CASE("correction terms with provenance") {
    auto tr = correction_terms(torus_knot_2(1), 1);
    CHECK(tr.terms == CorrectionTerms{-1, -1, -1});
    CHECK(tr.agree);
    REQUIRE(tr.pipeline.has_value());
    CHECK(*tr.pipeline == tr.table);

    CHECK(correction_terms(figure_eight(), -1).terms == CorrectionTerms{1, 1, -1});
    CHECK(correction_terms(unknot(), -1).terms == CorrectionTerms{0, 0, 0});
    CHECK(correction_terms(knot_for(-10, 0), -1).terms == CorrectionTerms{0, 0, 0});

    auto mirror = torus_knot_2(1);
    mirror.signature = 2;
    auto r = correction_terms(mirror, -1);
    CHECK(r.mirrored);
    CHECK(r.terms == rmod::reverse_orientation(table_correction_terms(-2, 1, 1)));
}

TEST_CASE("bar-triangle solvers") {
    auto bars = zero_surgery_bar_towers(StandardModule::make(-1, -3, -3), 1);
    CHECK(bars.bases == std::vector<Grading>{1, 0, -5, -2});
    CHECK(minus_one_towers(bars, 1) == StandardModule::make(1, -1, -3));

    auto p = zero_surgery_bar_towers(StandardModule::make(-1, -1, -1), 1);
    CHECK(p.bases == std::vector<Grading>{1, 0, -1, -2});
    CHECK(minus_one_towers(p, 1) == StandardModule::make(1, -1, -1));

    auto u = zero_surgery_bar_towers(StandardModule::make(0, 0, 0), 0);
    CHECK(minus_one_towers(u, 0) == StandardModule::make(0, 0, 0));
}

TEST_CASE("blowup coefficient") {
    CHECK(blowup_coefficient(0).is_zero());
    CHECK(blowup_coefficient(2) == rmod::RingElement::monomial(2, 0));
    CHECK(blowup_coefficient(3) == rmod::RingElement::monomial(2, 1));
    for (long k = -8; k <= 8; ++k) {
        long r = ((k % 4) + 4) % 4;
        if (r == 0 || r == 1) CHECK(blowup_coefficient(k).is_zero());
        else CHECK(blowup_coefficient(k) == rmod::RingElement::monomial(2, static_cast<int>((k * (k - 1)) / 4)));
    }
}

TEST_CASE("obstruction and cobordism checks") {
    CHECK(seifert_obstruction({1, -1, -3}));
    CHECK_FALSE(seifert_obstruction({0, 0, 0}));
    CHECK_FALSE(seifert_obstruction({1, 1, -1}));

    CHECK(spin_cobordism_check({0, 0, 0}, {0, 0, 0}, 1, 1).pass);
    auto v = spin_cobordism_check({0, 0, 0}, {0, 0, 0}, 1, 9);
    CHECK_FALSE(v.pass);
    CHECK_FALSE(v.violated.empty());
    CHECK(spin_cobordism_check({-1, -1, -1}, {1, 1, 1}, 2, 0).pass);
    CHECK_THROWS_AS(spin_cobordism_check({0, 0, 0}, {0, 0, 0}, 3, 0), ContractError);
}

TEST_CASE("catalog examples") {
    auto s = catalog("Sigma(2,3,25)");
    REQUIRE(s.correction.has_value());
    CHECK(*s.correction == CorrectionTerms{0, 0, 0});
    CHECK(box_total(s.hs) == 2);

    auto e = catalog("E_6");
    CHECK(tower_bases(e.hs) == std::vector<Grading>{2, 1, 0});
    CHECK(box_total(e.hs) == 3);

    auto e0 = catalog("E_0");
    CHECK(tower_bases(e0.hs) == std::vector<Grading>{1, 0, -1, 2});

    CHECK(catalog("Poincare").correction == CorrectionTerms{-1, -1, -1});
    CHECK_THROWS_AS(catalog("E_13"), ValidationError);
    CHECK_THROWS_AS(catalog("nowhere"), ValidationError);
    CHECK(catalog_names().size() >= 30);
}

TEST_CASE("property: catalog entries agree with the oracle") {
    for (const auto& name : catalog_names()) {
        auto e = catalog(name);
        if (!e.correction || e.hm.towers.size() != 1) continue;
        INFO(name);
        auto sols = gysin::oracle_solve(gysin::GysinProblem::make(e.hm));
        REQUIRE(sols.size() == 1);
        auto ct = rmod::correction_terms_of(sols[0].towers);
        if (e.hm_reversed) ct = rmod::reverse_orientation(ct);
        CHECK(ct == *e.correction);
    }
}

TEST_CASE("property: pipeline matches tables") {
    for (long sigma = 0; sigma >= -16; sigma -= 2)
        for (int arf : {0, 1}) {
            auto k = validate_knot(knot_for(sigma, arf));
            INFO("sigma=" << sigma << " arf=" << arf);
            CHECK((torsion_coefficient(k, 0) % 2 + 2) % 2 == *k.arf);
            for (int n : {1, -1}) {
                auto r = correction_terms(k, n);
                CHECK(r.agree);
                CHECK(r.terms == table_correction_terms(sigma, arf, n));
                CHECK_NOTHROW(r.terms.validate());
                CHECK(r.terms.alpha.is_integer());
                if (r.pipeline) CHECK(*r.pipeline == r.table);
            }
            if (arf == 1 && sigma < 0) {
                auto hs = hs_plus_one_surgery(k).towers;
                auto bars = zero_surgery_bar_towers(hs, 1);
                CHECK(minus_one_towers(bars, 1) ==
                      StandardModule::make(table_correction_terms(sigma, 1, -1).alpha,
                                           table_correction_terms(sigma, 1, -1).beta,
                                           table_correction_terms(sigma, 1, -1).gamma));
            }
            if (arf == 1 && sigma % 8 == 0 && sigma < 0) CHECK(seifert_obstruction(table_correction_terms(sigma, 1, -1)));
            if (arf == 0)
                for (int n : {1, -1}) CHECK_FALSE(seifert_obstruction(table_correction_terms(sigma, 0, n)));
        }
}

TEST_CASE("knot JSON") {
    auto j = to_json(validate_knot(figure_eight()));
    CHECK(j["sigma"] == 0);
    CHECK(j["arf"] == 1);
    auto r = to_json(correction_terms(torus_knot_2(1), 1));
    CHECK(r.contains("agree"));
}
