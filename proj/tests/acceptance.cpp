// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <string>

#include "p2f/cli.hpp"
#include "p2f/gysin.hpp"
#include "p2f/homalg.hpp"
#include "p2f/surgery.hpp"

using namespace p2f;
using rmod::CorrectionTerms;
using rmod::StandardModule;

namespace {

int failures = 0;

void criterion(int id, const std::string& title, const std::function<std::string()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string problem;
    try {
        problem = body();
    } catch (const std::exception& e) {
        problem = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = problem.empty();
    if (!ok) ++failures;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2fs", secs);
    std::cout << (ok ? "PASS" : "FAIL") << "  " << id << ". " << title << "  (" << buf << ")";
    if (!ok) std::cout << "  -- " << problem;
    std::cout << "\n";
}

rmod::StructuredModule hm(int base, std::vector<rmod::Box> boxes = {}) {
    auto m = rmod::u_tower(base);
    m.boxes = std::move(boxes);
    return m;
}

std::vector<gysin::GysinSolution> solve(const rmod::StructuredModule& m) {
    return gysin::oracle_solve(gysin::GysinProblem::make(m));
}

rmod::DegreeMap nonzero(const rmod::DegreeMap& d) {
    rmod::DegreeMap out;
    for (const auto& [k, n] : d)
        if (n) out[k] = n;
    return out;
}

std::string describe(const std::vector<gysin::GysinSolution>& sols) {
    std::string s;
    for (const auto& x : sols) s += (s.empty() ? "" : " | ") + x.str();
    return s.empty() ? "none" : s;
}

std::string unique_match(const rmod::StructuredModule& m, const StandardModule& towers, const rmod::DegreeMap& fin) {
    auto sols = solve(m);
    if (sols.size() != 1 || !sols[0].unique) return "expected a unique solution, got " + describe(sols);
    if (!(sols[0].towers == towers) || nonzero(sols[0].finite_dims()) != nonzero(fin))
        return "expected " + towers.str() + " with finite part fixed, got " + sols[0].str();
    return "";
}

surgery::KnotData knot_for(long sigma, int arf) {
    long n = -sigma / 2;
    auto k = n == 0 ? surgery::unknot() : surgery::torus_knot_2(n);
    if (surgery::arf_from_alexander(k.alexander) != arf) k = surgery::connected_sum(k, surgery::figure_eight());
    return k;
}

std::size_t total(const homalg::Dims& d) {
    std::size_t n = 0;
    for (const auto& [k, v] : d) n += v;
    return n;
}

}  // namespace

int main() {
    criterion(1, "Gysin oracle on the Sigma(2,3,12k+1) family", [] {
        for (int k = 0; k <= 5; ++k) {
            std::size_t n = 2 * k, m = k;
            auto e = unique_match(hm(0, {{-1, n, 1}}), StandardModule::make(0, 0, 0), {{-1, m}});
            if (!e.empty()) return "k=" + std::to_string(k) + ": " + e;
        }
        return std::string();
    });

    criterion(2, "Poincare sphere", [] { return unique_match(hm(-2), StandardModule::make(-1, -1, -1), {}); });

    criterion(3, "figure-eight families", [] {
        for (int k = 0; k <= 5; ++k) {
            std::size_t m = k;
            auto e = unique_match(hm(0, {{-1, 2 * m + 1, 1}}), StandardModule::make(1, -1, -1), {{-1, m}});
            if (e.empty()) e = unique_match(hm(0, {{-1, 2 * m, 1}}), StandardModule::make(0, 0, 0), {{-1, m}});
            if (!e.empty()) return "k=" + std::to_string(k) + ": " + e;
            // the stated form may only differ in multiplicity here
            auto d = gysin::stated_vs_corrected(gysin::GysinProblem::make(hm(0, {{-1, 2 * m + 1, 1}})));
            if (d && d->kind != "multiplicity") return "unexpected stated-form diff kind " + d->kind;
        }
        return std::string();
    });

    criterion(4, "correction tables, n=+1 pipeline (16 rows)", [] {
        int rows = 0;
        for (long sigma = 0; sigma >= -14; sigma -= 2)
            for (int arf : {0, 1}) {
                auto r = surgery::correction_terms(knot_for(sigma, arf), 1);
                auto want = surgery::table_correction_terms(sigma, arf, 1);
                if (!r.pipeline || !(*r.pipeline == want))
                    return "sigma=" + std::to_string(sigma) + " arf=" + std::to_string(arf) + ": pipeline " +
                           (r.pipeline ? r.pipeline->str() : "missing") + " vs table " + want.str();
                ++rows;
            }
        // quoted rows
        for (long k = 0; k <= 1; ++k) {
            if (!(surgery::table_correction_terms(-8 * k, 1, 1) == CorrectionTerms{-2 * k + 1, -2 * k - 1, -2 * k - 1}))
                return std::string("row sigma=-8k arf=1 differs");
            if (!(surgery::table_correction_terms(-8 * k - 6, 0, 1) ==
                  CorrectionTerms{-2 * k - 2, -2 * k - 2, -2 * k - 2}))
                return std::string("row sigma=-8k-6 arf=0 differs");
        }
        auto r16 = surgery::correction_terms(knot_for(-16, 1), 1);
        if (!r16.pipeline || !(*r16.pipeline == surgery::table_correction_terms(-16, 1, 1)))
            return std::string("sigma=-16 arf=1 disagrees");
        auto r16b = surgery::correction_terms(knot_for(-16, 0), 1);
        if (!r16b.pipeline || !(*r16b.pipeline == surgery::table_correction_terms(-16, 0, 1)))
            return std::string("sigma=-16 arf=0 disagrees");
        if (rows != 16) return "covered " + std::to_string(rows) + " rows";
        return std::string();
    });

    criterion(5, "worked -1 branch", [] {
        auto bars = surgery::zero_surgery_bar_towers(StandardModule::make(-1, -3, -3), 1);
        if (bars.bases != std::vector<Grading>{1, 0, -5, -2}) return std::string("bar tower bases differ");
        if (!(surgery::minus_one_towers(bars, 1) == StandardModule::make(1, -1, -3)))
            return std::string("minus-one towers differ from S+_{1,-1,-3}");
        for (long sigma = -2; sigma >= -16; sigma -= 2) {
            auto r = surgery::correction_terms(knot_for(sigma, 1), -1);
            auto want = surgery::table_correction_terms(sigma, 1, -1);
            if (!r.pipeline || !(*r.pipeline == want))
                return "sigma=" + std::to_string(sigma) + ": pipeline " + (r.pipeline ? r.pipeline->str() : "missing") +
                       " vs table " + want.str();
        }
        return std::string();
    });

    criterion(6, "non-uniqueness remark", [] {
        auto sols = solve(hm(-4, {{-4, 3, 1}, {-3, 1, 1}}));
        std::set<std::pair<std::string, rmod::DegreeMap>> got, want;
        for (const auto& s : sols) got.insert({s.towers.str(), nonzero(s.finite_dims())});
        want.insert({StandardModule::make(0, -2, -2).str(), {{-4, 2}}});
        want.insert({StandardModule::make(-2, -2, -2).str(), {{-4, 2}, {-3, 1}}});
        if (got != want) return "got " + describe(sols);
        return std::string();
    });

    criterion(7, "triangle detection on random admissible triples", [] {
        homalg::Random r(2024);
        std::size_t checked = 0, acyclic = 0;
        auto run = [&](const homalg::Triple& t) -> std::string {
            std::size_t dim = total(t.f1.source.dims()) + total(t.f1.target.dims()) + total(t.f2.target.dims());
            if (dim > 60) return "";
            auto cone = homalg::iterated_mapping_cone(t.f1, t.f2, t.h1);
            auto d2 = homalg::compose(cone.differential(), cone.differential());
            if (!d2.is_zero()) return std::string("iterated cone d^2 != 0");
            ++checked;
            auto res = homalg::triangle_detect(t.f1, t.f2, t.h1);
            if (res.acyclic) {
                ++acyclic;
                auto chk = homalg::check_exact_triangle(res.triangle);
                if (!chk.exact) return "not exact at " + chk.vertex + std::to_string(chk.degree) + ": " + chk.detail;
            }
            return "";
        };
        for (int i = 0; i < 150; ++i)
            if (auto e = run(homalg::random_exact_triple(r, 0, 3, 3)); !e.empty()) return e;
        for (int i = 0; i < 150; ++i)
            if (auto t = homalg::random_admissible_triple(r, 0, 3, 3))
                if (auto e = run(*t); !e.empty()) return e;
        if (acyclic < 100)
            return "only " + std::to_string(acyclic) + " acyclic triples of " + std::to_string(checked);
        return std::string();
    });

    criterion(8, "spectral sequence convergence and the toy model", [] {
        homalg::Random r(8);
        for (int t = 0; t < 60; ++t) {
            auto fc = homalg::random_filtered_complex(r, 3, 40);
            if (total(fc.complex.dims()) > 40) return std::string("generator exceeded 40 dims");
            auto sp = homalg::filtered_pages(fc, 3);
            homalg::Dims inf;
            for (const auto& [key, n] : sp.infinity)
                if (n) inf[key.second] += n;
            auto h = homalg::homology(fc.complex).dims;
            homalg::Dims hn;
            for (const auto& [k, n] : h)
                if (n) hn[k] = n;
            if (inf != hn) return "E-infinity differs from homology in trial " + std::to_string(t);
        }
        for (int seed = 1; seed <= 5; ++seed) {
            homalg::Random q(seed);
            auto c1 = homalg::random_complex(q, 0, 2, 2), c2 = homalg::random_complex(q, 0, 2, 2),
                 c3 = homalg::random_complex(q, 0, 2, 2);
            homalg::ChainMap f1{c1, c2, homalg::GradedMap::zero(c1.dims(), c2.dims(), 0)};
            homalg::ChainMap f2{c2, c3, homalg::GradedMap::zero(c2.dims(), c3.dims(), 0)};
            auto h = homalg::Homotopy::make(c1, c3, homalg::GradedMap::zero(c1.dims(), c3.dims(), 1));
            auto sp = homalg::filtered_pages(homalg::diagonal_iso_model(f1, f2, h), 4);
            if (sp.total(4) != 0) return "toy model E4 = " + std::to_string(sp.total(4)) + " for seed " + std::to_string(seed);
        }
        return std::string();
    });

    criterion(9, "blow-up coefficient", [] {
        for (long k = -8; k <= 8; ++k) {
            long r = ((k % 4) + 4) % 4;
            auto want = (r == 0 || r == 1) ? rmod::RingElement::zero()
                                           : rmod::RingElement::monomial(2, static_cast<int>(k * (k - 1) / 4));
            if (!(surgery::blowup_coefficient(k) == want))
                return "k=" + std::to_string(k) + ": " + surgery::blowup_coefficient(k).str();
        }
        return std::string();
    });

    criterion(10, "Seifert fibered obstruction", [] {
        for (long k = 1; k <= 5; ++k)
            if (!surgery::seifert_obstruction(surgery::table_correction_terms(-8 * k, 1, -1)))
                return "does not fire for sigma=" + std::to_string(-8 * k);
        for (long sigma = 0; sigma >= -40; sigma -= 2)
            for (int n : {1, -1})
                if (surgery::seifert_obstruction(surgery::table_correction_terms(sigma, 0, n)))
                    return "fires on Arf 0 output sigma=" + std::to_string(sigma);
        return std::string();
    });

    criterion(11, "spin cobordism inequalities", [] {
        CorrectionTerms z{0, 0, 0};
        for (long b : {0, 1})
            if (!surgery::spin_cobordism_check(z, z, 1, b).pass) return "b2-=" + std::to_string(b) + " flagged";
        if (!surgery::spin_cobordism_check(z, z, 2, 2).pass) return std::string("b2+=2 self pair flagged");
        if (!surgery::spin_cobordism_check({-1, -1, -1}, {1, 1, 1}, 2, 0).pass) return std::string("b2+=2 pair flagged");
        auto v = surgery::spin_cobordism_check(z, z, 1, 9);
        if (v.pass) return std::string("fabricated violation not flagged");
        // 1/8 steps stay exact
        if (surgery::spin_cobordism_check(z, {Rational(1, 8), Rational(1, 8), Rational(1, 8)}, 1, 2).pass != true)
            return std::string("1/8 boundary case flagged");
        return std::string();
    });

    criterion(12, "verify paper", [] {
        auto t0 = std::chrono::steady_clock::now();
        auto rep = cli::verify_paper();
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs >= 30) return "took " + std::to_string(secs) + "s";
        for (const auto& c : rep.checks) {
            if (c.status == cli::Status::Fail) return "FAIL " + c.id + ": expected " + c.expected + ", got " + c.got;
            if (c.status == cli::Status::Warn && c.warn_class != "stated-multiplicity" && c.warn_class != "stated-parity")
                return "undocumented WARN " + c.id;
        }
        return std::string();
    });

    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << "\n";
    return failures ? 1 : 0;
}
