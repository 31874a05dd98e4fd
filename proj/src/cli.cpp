#include "p2f/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "p2f/errors.hpp"
#include "p2f/gysin.hpp"
#include "p2f/homalg.hpp"
#include "p2f/surgery.hpp"

namespace p2f::cli {

using nlohmann::json;
using rmod::CorrectionTerms;
using rmod::StandardModule;
using rmod::StructuredModule;

std::string to_string(Status s) {
    switch (s) {
        case Status::Pass: return "PASS";
        case Status::Warn: return "WARN";
        default: return "FAIL";
    }
}

std::size_t VerifyReport::count(Status s) const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [s](const CheckResult& c) { return c.status == s; }));
}

namespace {

std::string error_line(const std::string& code, const std::string& msg) {
    std::string m = msg;
    std::replace(m.begin(), m.end(), '\n', ' ');
    return "error[" + code + "]: " + m;
}

std::string render_module(const StructuredModule& m) {
    std::string s;
    auto add = [&](const std::string& t) { s += (s.empty() ? "" : " + ") + t; };
    for (const auto& t : m.towers) {
        std::string name = t.step == 2 ? "T" : "V";
        add(name + (t.kind == rmod::TowerKind::Bar ? "bar" : "+") + "_" + t.base.str());
    }
    for (const auto& b : m.boxes) {
        if (b.dim == 0) continue;
        add("F^" + std::to_string(b.dim) + "<" + b.deg.str() + ">" +
            (b.qlen > 1 ? "[Q^" + std::to_string(b.qlen) + "]" : ""));
    }
    if (s.empty()) s = "0";
    if (!m.links.empty()) {
        s += " (Q:";
        for (auto [a, b] : m.links) s += " " + std::to_string(a) + "->" + std::to_string(b);
        s += ")";
    }
    return s;
}

std::string render_dims(const rmod::DegreeMap& d) {
    std::string s;
    for (const auto& [k, n] : d) s += (s.empty() ? "" : " + ") + ("F^" + std::to_string(n) + "<" + k.str() + ">");
    return s;
}

// towers plus finite part by degree, ignoring Q-string grouping
std::string flat(const gysin::GysinSolution& s) {
    std::string r = s.towers.str();
    auto d = render_dims(s.finite_dims());
    return d.empty() ? r : r + " + " + d;
}

std::string render_terms(const CorrectionTerms& ct) {
    return "alpha=" + ct.alpha.str() + " beta=" + ct.beta.str() + " gamma=" + ct.gamma.str();
}

std::string render_dims(const homalg::Dims& d) {
    std::string s = "{";
    bool first = true;
    for (auto [k, n] : homalg::clean(d)) {
        s += (first ? "" : ", ") + std::to_string(k) + ":" + std::to_string(n);
        first = false;
    }
    return s + "}";
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

surgery::KnotData knot_for(long sigma, int arf) {
    long n = -sigma / 2;
    surgery::KnotData k = n == 0 ? surgery::unknot() : surgery::torus_knot_2(n);
    if (surgery::arf_from_alexander(k.alexander) != arf) k = surgery::connected_sum(k, surgery::figure_eight());
    return k;
}

StructuredModule family_input(Grading tower, Grading deg, std::size_t n) {
    StructuredModule m = rmod::u_tower(tower);
    if (n) m.boxes.push_back({deg, n, 1});
    return m;
}

std::vector<gysin::GysinSolution> solve(const StructuredModule& m) {
    return gysin::oracle_solve(gysin::GysinProblem::make(m));
}

std::string solve_summary(const StructuredModule& m) {
    auto sols = solve(m);
    std::vector<std::string> v;
    for (const auto& s : sols) v.push_back(flat(s));
    return join(v, " | ") + (sols.size() == 1 ? " (unique)" : "");
}

class Suite {
public:
    void check(const std::string& id, const std::string& anchor, const std::string& expected,
               const std::function<std::string()>& got) {
        CheckResult c{id, anchor, expected, "", Status::Pass, ""};
        try {
            c.got = got();
            c.status = c.got == expected ? Status::Pass : Status::Fail;
        } catch (const Error& e) {
            c.got = error_line(e.code(), e.what());
            c.status = Status::Fail;
        } catch (const std::exception& e) {
            c.got = error_line("internal", e.what());
            c.status = Status::Fail;
        }
        checks.push_back(c);
    }

    void stated_form(const std::string& id, const StructuredModule& m, bool expect_diff,
                     const std::string& expected_class) {
        CheckResult c{id, "gysin closed form", "", "", Status::Pass, ""};
        try {
            auto pb = gysin::GysinProblem::make(m);
            auto st = gysin::closed_form_stated(pb);
            auto co = gysin::closed_form_corrected(pb);
            auto sols = gysin::oracle_solve(pb);
            c.expected = st.str() + " [" + gysin::to_string(st.parity) + "]";
            c.got = co.str() + " [" + gysin::to_string(co.parity) + "]";
            bool in_oracle = sols.size() == 1 && sols[0].towers == co.towers && sols[0].boxes == co.boxes;
            auto diff = gysin::stated_vs_corrected(pb);
            if (!in_oracle) {
                c.status = Status::Fail;
                c.got += " (oracle: " + sols.front().str() + ")";
            } else if (!diff) {
                c.status = expect_diff ? Status::Fail : Status::Pass;
            } else if (expect_diff && diff->kind == expected_class) {
                c.status = Status::Warn;
                c.warn_class = "stated-" + diff->kind;
            } else {
                c.status = Status::Fail;
            }
        } catch (const Error& e) {
            c.got = error_line(e.code(), e.what());
            c.status = Status::Fail;
        }
        checks.push_back(c);
    }

    std::vector<CheckResult> checks;
};

void gysin_checks(Suite& s) {
    for (std::size_t k = 0; k <= 5; ++k) {
        std::string ks = std::to_string(k);
        s.check("trefoil-12k+1-k" + ks, "trefoil family Sigma(2,3,12k+1)",
                "S+_{0,0,0}" + (k ? " + F^" + ks + "<-1>" : std::string()) + " (unique)",
                [&] { return solve_summary(family_input(0, -1, 2 * k)); });
        s.check("figure8-odd-k" + ks, "figure-eight family E_{2k+1}",
                "S+_{1,-1,-1}" + (k ? " + F^" + ks + "<-1>" : std::string()) + " (unique)",
                [&] { return solve_summary(family_input(0, -1, 2 * k + 1)); });
        s.check("figure8-even-k" + ks, "figure-eight family E_{2k}",
                "S+_{0,0,0}" + (k ? " + F^" + ks + "<-1>" : std::string()) + " (unique)",
                [&] { return solve_summary(family_input(0, -1, 2 * k)); });
    }
    s.check("poincare-oracle", "poincare", "S+_{-1,-1,-1} (unique)",
            [] { return solve_summary(rmod::u_tower(-2)); });
    s.check("remark-two-solutions", "non-uniqueness remark",
            "S+_{-2,-2,-2} + F^2<-4> + F^1<-3> | S+_{0,-2,-2} + F^2<-4>", [] {
                StructuredModule m = rmod::u_tower(-4);
                m.boxes = {{-4, 3, 1}, {-3, 1, 1}};
                auto sols = solve(m);
                std::vector<std::string> v;
                for (const auto& x : sols) v.push_back(flat(x));
                std::sort(v.begin(), v.end());
                return join(v, " | ");
            });
    s.check("feasibility-poincare", "poincare", "feasible", [] {
        auto pb = gysin::GysinProblem::make(rmod::u_tower(-2));
        return gysin::feasibility_check(pb, StandardModule::make(-1, -1, -1).module()).feasible ? "feasible"
                                                                                                : "infeasible";
    });
    s.check("parity-S000", "gysin parity", "even", [] {
        return gysin::to_string(
            gysin::classify_parity(rmod::dims(StandardModule::make(0, 0, 0).module(), 12, 19), 0));
    });
    s.check("parity-S1-1-1", "gysin parity", "odd", [] {
        return gysin::to_string(
            gysin::classify_parity(rmod::dims(StandardModule::make(1, -1, -1).module(), 12, 19), 0));
    });
    s.check("increase-left", "local increase pattern", "increasing", [] {
        return gysin::increase_classify(4, 4, 3, 1) == gysin::Increase::Increasing ? "increasing" : "decreasing";
    });
    s.check("increase-right", "local increase pattern", "decreasing", [] {
        return gysin::increase_classify(2, 3, 3, 1) == gysin::Increase::Increasing ? "increasing" : "decreasing";
    });

    // stated closed forms: the first form with even n is the only exact agreement
    for (long k : {0L, -1L, 1L}) {
        for (std::size_t n = 0; n <= 11; ++n) {
            std::string tag = "k" + std::to_string(k) + "-n" + std::to_string(n);
            s.stated_form("stated-first-" + tag, family_input(2 * k, 2 * k - 1, n), n % 2 == 1, "multiplicity");
            // n = 0 is the same input for both forms
            if (n > 0) s.stated_form("stated-second-" + tag, family_input(2 * k, 2 * k, n), true, "parity");
        }
    }
}

void table_checks(Suite& s) {
    for (long sigma = 0; sigma >= -16; sigma -= 2) {
        for (int arf : {0, 1}) {
            std::string tag = "sigma" + std::to_string(sigma) + "-arf" + std::to_string(arf);
            auto k = knot_for(sigma, arf);
            s.check("table-plus1-" + tag, "correction tables n=+1",
                    surgery::table_correction_terms(sigma, arf, 1).str(),
                    [&] { return surgery::correction_terms(k, 1).pipeline->str(); });
            s.check("table-minus1-" + tag, "correction tables n=-1",
                    surgery::table_correction_terms(sigma, arf, -1).str(),
                    [&] { return surgery::correction_terms(k, -1).pipeline->str(); });
        }
    }
    // rows quoted directly
    for (long k = 0; k <= 2; ++k) {
        std::string ks = std::to_string(k);
        s.check("row-8k-arf1-k" + ks, "table arf1 sigma=-8k",
                CorrectionTerms{-2 * k + 1, -2 * k - 1, -2 * k - 1}.str(),
                [&] { return surgery::table_correction_terms(-8 * k, 1, 1).str(); });
        s.check("row-8k6-arf0-k" + ks, "table arf0 sigma=-8k-6",
                CorrectionTerms{-2 * k - 2, -2 * k - 2, -2 * k - 2}.str(),
                [&] { return surgery::table_correction_terms(-8 * k - 6, 0, 1).str(); });
    }
    s.check("table-example-1", "table arf1", "(-1,-1,-1)",
            [] { return surgery::table_correction_terms(-2, 1, 1).str(); });
    s.check("table-example-2", "table arf1 n=-1", "(1,-1,-3)",
            [] { return surgery::table_correction_terms(-8, 1, -1).str(); });
    s.check("table-example-3", "table arf0", "(-4,-4,-4)",
            [] { return surgery::table_correction_terms(-16, 0, 1).str(); });
    s.check("correction-trefoil-plus1", "poincare", "alpha=-1 beta=-1 gamma=-1",
            [] { return render_terms(surgery::correction_terms(surgery::torus_knot_2(1), 1).terms); });
    s.check("correction-fig8-minus1", "table arf1 n=-1", "alpha=1 beta=1 gamma=-1",
            [] { return render_terms(surgery::correction_terms(surgery::figure_eight(), -1).terms); });
    s.check("hs-plus1-trefoil", "poincare", "S+_{-1,-1,-1}",
            [] { return surgery::hs_plus_one_surgery(surgery::torus_knot_2(1)).str(); });
    s.check("hs-plus1-fig8", "figure-eight E_1", "S+_{1,-1,-1}",
            [] { return surgery::hs_plus_one_surgery(surgery::figure_eight()).str(); });
}

std::string render_bases(const surgery::BarTowers& b) {
    std::vector<std::string> v;
    for (const auto& g : b.bases) v.push_back(g.str());
    return "(" + join(v, ",") + ")";
}

void bar_checks(Suite& s) {
    s.check("bar-worked-example", "minus one branch", "(1,0,-5,-2)", [] {
        return render_bases(surgery::zero_surgery_bar_towers(StandardModule::make(-1, -3, -3), 1));
    });
    s.check("minus-one-worked-example", "minus one branch", "S+_{1,-1,-3}", [] {
        auto b = surgery::zero_surgery_bar_towers(StandardModule::make(-1, -3, -3), 1);
        return surgery::minus_one_towers(b, 1).str();
    });
    s.check("bar-poincare", "poincare bar towers", "(1,0,-1,-2)", [] {
        return render_bases(surgery::zero_surgery_bar_towers(StandardModule::make(-1, -1, -1), 1));
    });
    s.check("minus-one-poincare", "poincare bar towers", "S+_{1,-1,-1}", [] {
        auto b = surgery::zero_surgery_bar_towers(StandardModule::make(-1, -1, -1), 1);
        return surgery::minus_one_towers(b, 1).str();
    });
    s.check("bar-unknot", "unknot S2xS1", "(-1,0,0,1,1,2)", [] {
        auto b = surgery::zero_surgery_bar_towers(StandardModule::make(0, 0, 0), 0);
        std::sort(b.bases.begin(), b.bases.end());
        return render_bases(b);
    });
    s.check("minus-one-arf0", "all zero for Arf 0", "S+_{0,0,0}", [] {
        auto b = surgery::zero_surgery_bar_towers(StandardModule::make(0, 0, 0), 0);
        return surgery::minus_one_towers(b, 0).str();
    });
}

void misc_checks(Suite& s) {
    for (long k = -8; k <= 8; ++k) {
        long r = ((k % 4) + 4) % 4;
        std::string expected =
            r == 0 || r == 1 ? "0" : (k * (k - 1) / 4 == 0 ? "Q^2" : "Q^2 V^" + std::to_string(k * (k - 1) / 4));
        s.check("blowup-k" + std::to_string(k), "blow-up coefficient", expected,
                [k] { return surgery::blowup_coefficient(k).str(); });
    }
    for (long k = 1; k <= 5; ++k)
        s.check("sfs-obstructed-k" + std::to_string(k), "seifert obstruction", "obstructed", [k] {
            return surgery::seifert_obstruction(surgery::table_correction_terms(-8 * k, 1, -1)) ? "obstructed"
                                                                                               : "clear";
        });
    s.check("sfs-arf0-clear", "seifert obstruction", "clear", [] {
        for (long sigma = 0; sigma >= -40; sigma -= 2)
            for (int n : {1, -1})
                if (surgery::seifert_obstruction(surgery::table_correction_terms(sigma, 0, n))) return "obstructed";
        return "clear";
    });
    s.check("sfs-clear-example", "seifert obstruction", "clear",
            [] { return surgery::seifert_obstruction(CorrectionTerms{1, 1, -1}) ? "obstructed" : "clear"; });
    auto cob = [](CorrectionTerms a, CorrectionTerms b, int p, long m) {
        auto c = surgery::spin_cobordism_check(a, b, p, m);
        return c.pass ? std::string("pass") : "violated " + c.violated;
    };
    CorrectionTerms z{0, 0, 0};
    s.check("cobordism-self-pair", "spin cobordism inequalities", "pass", [&] { return cob(z, z, 1, 1); });
    s.check("cobordism-fabricated", "spin cobordism inequalities", "violated alpha1 >= beta0 + (b2- - 1)/8: 0 < 1",
            [&] { return cob(z, z, 1, 9); });
    s.check("cobordism-b2plus2", "spin cobordism inequalities", "pass",
            [&] { return cob({-1, -1, -1}, {1, 1, 1}, 2, 0); });
    s.check("cobordism-fraction", "spin cobordism inequalities", "violated alpha1 >= beta0 + (b2- - 1)/8: 0 < 1/8",
            [&] { return cob(z, z, 1, 2); });

    auto arf = [](surgery::KnotData k) { return std::to_string(*surgery::validate_knot(k).arf); };
    s.check("arf-trefoil", "knot invariants", "1", [&] { return arf(surgery::torus_knot_2(1)); });
    s.check("arf-unknot", "knot invariants", "0", [&] { return arf(surgery::unknot()); });
    s.check("arf-figure8", "knot invariants", "1", [&] { return arf(surgery::figure_eight()); });
    s.check("t0-trefoil", "torsion coefficient", "1",
            [] { return std::to_string(surgery::torsion_coefficient(surgery::torus_knot_2(1), 0)); });
    s.check("t0-figure8", "torsion coefficient", "-1",
            [] { return std::to_string(surgery::torsion_coefficient(surgery::figure_eight(), 0)); });
    s.check("b0-figure8", "b coefficient", "1",
            [] { return std::to_string(surgery::b_coefficient(surgery::figure_eight(), 0)); });
    s.check("delta-2-0", "delta bound", "1", [] { return std::to_string(surgery::delta_bound(-2, 0)); });
    s.check("delta-8-3", "delta bound", "1", [] { return std::to_string(surgery::delta_bound(-8, 3)); });
    s.check("hm0-figure8", "zero surgery", "T+_-1 + T+_0 + F^1<-1>",
            [] { return render_module(surgery::hm_zero_surgery(surgery::figure_eight()).s0); });
}

void catalog_checks(Suite& s) {
    for (const auto& name : surgery::catalog_names()) {
        auto e = surgery::catalog(name);
        if (e.hm.towers.size() != 1) {
            // two-tower HM: compare the bar-triangle towers
            s.check("catalog-" + name, "catalog", render_module(e.hs), [&] {
                surgery::BarTowers b = name == "E_0"
                                           ? surgery::zero_surgery_bar_towers(
                                                 surgery::hs_plus_one_surgery(surgery::figure_eight()).towers, 1)
                                           : surgery::zero_surgery_bar_towers(StandardModule::make(0, 0, 0), 0);
                auto bases = b.bases;
                auto want = e.hs;
                std::vector<Grading> got_sorted = bases, want_sorted;
                for (const auto& t : want.towers) want_sorted.push_back(t.base);
                std::sort(got_sorted.begin(), got_sorted.end());
                std::sort(want_sorted.begin(), want_sorted.end());
                return got_sorted == want_sorted ? render_module(e.hs) : render_module(b.module());
            });
            continue;
        }
        std::string expected = e.correction->str();
        if (!e.hm_reversed) {
            std::vector<rmod::Box> boxes = e.hs.boxes;
            gysin::GysinSolution ref;
            ref.towers = StandardModule::from_starts(e.hs.towers[0].base, e.hs.towers[1].base, e.hs.towers[2].base);
            ref.boxes = boxes;
            expected = flat(ref) + " " + expected;
        }
        s.check("catalog-" + name, "catalog", expected, [&] {
            auto sols = solve(e.hm);
            if (sols.size() != 1) return std::to_string(sols.size()) + " solutions";
            auto ct = rmod::correction_terms_of(sols[0].towers);
            if (e.hm_reversed) return rmod::reverse_orientation(ct).str();
            return flat(sols[0]) + " " + ct.str();
        });
    }
}

void homalg_checks(Suite& s) {
    using namespace homalg;
    s.check("homology-example", "homology", "{0:1}", [] {
        F2Matrix d = F2Matrix::from_rows({{1}, {0}});
        return render_dims(homology(GradedComplex({{1, 1}, {0, 2}}, {{1, d}})).dims);
    });
    s.check("cone-identity-acyclic", "mapping cone", "{}", [] {
        Random r(3);
        auto c = random_complex(r, 0, 3, 3);
        auto cone = mapping_cone(ChainMap::make(c, c, GradedMap::identity(c.dims())));
        return render_dims(homology(cone.complex).dims);
    });
    s.check("triangle-random-100", "triangle detection", "100 acyclic, 0 failures", [] {
        Random r(2024);
        std::size_t acyclic = 0, failures = 0;
        for (int t = 0; t < 100; ++t) {
            auto tr = random_exact_triple(r, 0, 3, 3);
            auto res = triangle_detect(tr.f1, tr.f2, tr.h1);
            if (!res.acyclic) continue;
            ++acyclic;
            if (!check_exact_triangle(res.triangle).exact) ++failures;
        }
        return std::to_string(acyclic) + " acyclic, " + std::to_string(failures) + " failures";
    });
    s.check("spectral-random-50", "spectral sequence", "0 failures", [] {
        Random r(77);
        std::size_t failures = 0;
        for (int t = 0; t < 50; ++t) {
            auto fc = random_filtered_complex(r, 3, 40);
            auto sp = filtered_pages(fc, 3);
            if (sp.by_degree(sp.stable_from < sp.pages.size() ? sp.stable_from : sp.pages.size() - 1) !=
                homology(fc.complex).dims)
                ++failures;
        }
        return std::to_string(failures) + " failures";
    });
    s.check("toy-model-E4", "diagonal isomorphism model", "E3>0 E4=0", [] {
        Random r(9);
        auto c1 = random_complex(r, 0, 2, 2), c2 = random_complex(r, 0, 2, 2), c3 = random_complex(r, 0, 2, 2);
        ChainMap f1{c1, c2, GradedMap::zero(c1.dims(), c2.dims(), 0)};
        ChainMap f2{c2, c3, GradedMap::zero(c2.dims(), c3.dims(), 0)};
        auto h = Homotopy::make(c1, c3, GradedMap::zero(c1.dims(), c3.dims(), 1));
        auto sp = filtered_pages(diagonal_iso_model(f1, f2, h), 4);
        return std::string(sp.total(3) > 0 ? "E3>0" : "E3=0") + (sp.total(4) == 0 ? " E4=0" : " E4>0");
    });
}

}  // namespace

VerifyReport verify_paper() {
    auto t0 = std::chrono::steady_clock::now();
    Suite s;
    gysin_checks(s);
    table_checks(s);
    bar_checks(s);
    misc_checks(s);
    catalog_checks(s);
    homalg_checks(s);
    VerifyReport r;
    r.checks = std::move(s.checks);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

json to_json(const VerifyReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        json j = {{"id", c.id}, {"anchor", c.anchor}, {"expected", c.expected}, {"got", c.got},
                  {"status", to_string(c.status)}};
        if (!c.warn_class.empty()) j["warn_class"] = c.warn_class;
        checks.push_back(j);
    }
    return {{"checks", checks},
            {"summary",
             {{"pass", r.count(Status::Pass)}, {"warn", r.count(Status::Warn)}, {"fail", r.count(Status::Fail)}}}};
}

VerifyReport report_from_json(const json& j) {
    VerifyReport r;
    try {
        for (const auto& c : j.at("checks")) {
            CheckResult x;
            x.id = c.at("id").get<std::string>();
            x.anchor = c.at("anchor").get<std::string>();
            x.expected = c.at("expected").get<std::string>();
            x.got = c.at("got").get<std::string>();
            std::string st = c.at("status").get<std::string>();
            if (st == "PASS") x.status = Status::Pass;
            else if (st == "WARN") x.status = Status::Warn;
            else if (st == "FAIL") x.status = Status::Fail;
            else throw ValidationError("unknown status '" + st + "'");
            x.warn_class = c.value("warn_class", "");
            r.checks.push_back(x);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed report: ") + e.what());
    }
    return r;
}

namespace {

json read_json_arg(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg[0] == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw ValidationError("cannot read " + arg.substr(1));
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("invalid JSON: ") + e.what());
    }
}

json read_json_file(const std::string& path) { return read_json_arg("@" + path); }

std::vector<long> parse_alexander(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stol(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw ValidationError("bad Alexander coefficient '" + item + "'");
        }
    }
    if (out.empty()) throw ValidationError("empty Alexander polynomial");
    return out;
}

int parse_surgery(const std::string& s) {
    if (s == "+1" || s == "1") return 1;
    if (s == "-1") return -1;
    throw ValidationError("surgery coefficient must be +1 or -1, got '" + s + "'");
}

json knot_record(const surgery::KnotData& k, int n) {
    auto rep = surgery::correction_terms(k, n);
    auto norm = surgery::validate_knot(k);
    return {{"name", k.name},
            {"sigma", k.signature},
            {"arf", *norm.arf},
            {"surgery", n},
            {"mirrored", norm.mirrored},
            {"hm_plus_one", rmod::to_json(surgery::hm_plus_one_surgery(norm).self_conjugate)},
            {"hs_towers", rmod::to_json(rep.terms)},
            {"table", rmod::to_json(rep.table)},
            {"agree", rep.agree},
            {"obstructed", surgery::seifert_obstruction(rep.terms)}};
}

std::string record_line(const json& r) {
    if (r.contains("error")) return r["name"].get<std::string>() + ": " + r["error"].get<std::string>();
    auto t = r["hs_towers"];
    auto g = [&](const char* key) { return rmod::rational_from_json(t[key]).str(); };
    return r["name"].get<std::string>() + ": alpha=" + g("alpha") + " beta=" + g("beta") + " gamma=" + g("gamma") +
           " obstructed=" + (r["obstructed"].get<bool>() ? "yes" : "no");
}

struct CsvRow {
    std::size_t line = 0;
    std::string name, signature, alexander, arf, surgery;
};

std::vector<CsvRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path);
    std::vector<CsvRow> rows;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.emplace_back();
        if (no == 1 && !f.empty() && f[0] == "name") continue;
        if (f.size() != 5)
            throw ValidationError(path + ":" + std::to_string(no) + ": expected 5 columns, got " +
                                  std::to_string(f.size()));
        rows.push_back({no, f[0], f[1], f[2], f[3], f[4]});
    }
    return rows;
}

json batch_row(const CsvRow& row) {
    try {
        surgery::KnotData k;
        k.name = row.name;
        try {
            k.signature = std::stol(row.signature);
        } catch (const std::logic_error&) {
            throw ValidationError("bad signature '" + row.signature + "'");
        }
        k.alexander = parse_alexander(row.alexander);
        if (!row.arf.empty()) {
            if (row.arf != "0" && row.arf != "1") throw ValidationError("Arf must be 0 or 1");
            k.arf = row.arf == "1";
        }
        return knot_record(k, parse_surgery(row.surgery));
    } catch (const Error& e) {
        return {{"name", row.name}, {"line", row.line}, {"error", error_line(e.code(), e.what())}};
    }
}

homalg::FilteredComplex filtered_from_json(const json& j) {
    const json& cj = j.contains("complex") ? j.at("complex") : j;
    auto c = homalg::complex_from_json(cj);
    std::map<int, std::vector<int>> level;
    try {
        for (const auto& [key, v] : j.at("levels").items()) level[std::stoi(key)] = v.get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed levels: ") + e.what());
    } catch (const std::logic_error&) {
        throw ValidationError("level keys must be integer degrees");
    }
    return homalg::FilteredComplex::make(c, level);
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"p2f: Pin(2) monopole Floer computations over F2"};
    app.require_subcommand(1);
    int code = 0;
    std::function<void()> action;

    bool as_json = false;
    auto add_json = [&](CLI::App* sub) { sub->add_flag("--json", as_json, "emit canonical JSON"); };

    auto* gy = app.add_subcommand("gysin", "abstract Gysin sequence oracle");
    gy->require_subcommand(1);
    auto* gy_solve = gy->add_subcommand("solve", "all standard-module partners of an HM-side module");
    std::string hm_arg;
    bool compare = false;
    gy_solve->add_option("--hm", hm_arg, "module JSON, or @file")->required();
    gy_solve->add_flag("--compare", compare, "also show the stated and corrected closed forms");
    add_json(gy_solve);
    gy_solve->callback([&] {
        action = [&] {
            auto pb = gysin::GysinProblem::make(rmod::module_from_json(read_json_arg(hm_arg)));
            auto sols = gysin::oracle_solve(pb);
            std::optional<gysin::StatedDiff> diff;
            if (compare) {
                if (!gysin::family_of(pb)) throw ValidationError("--compare needs a T+_{2k} + F^n<2k-1 or 2k> input");
                diff = gysin::stated_vs_corrected(pb);
            }
            if (as_json) {
                json j = {{"solutions", json::array()}, {"unique", sols.size() == 1}, {"count", sols.size()}};
                for (const auto& s : sols) j["solutions"].push_back(gysin::to_json(s));
                if (compare) {
                    j["stated"] = gysin::closed_form_stated(pb).str();
                    j["corrected"] = gysin::closed_form_corrected(pb).str();
                    j["diff"] = diff ? json(diff->kind) : json(nullptr);
                }
                print_json(out, j);
                return;
            }
            for (std::size_t i = 0; i < sols.size(); ++i)
                out << "solution " << i + 1 << ": " << sols[i].str() << "  parity=" << gysin::to_string(sols[i].parity)
                    << "  " << rmod::correction_terms_of(sols[i].towers).str() << "\n";
            out << "unique=" << (sols.size() == 1 ? "true" : "false") << "\n";
            if (compare) {
                out << "stated: " << gysin::closed_form_stated(pb).str() << "\n";
                out << "corrected: " << gysin::closed_form_corrected(pb).str() << "\n";
                out << "diff: " << (diff ? diff->kind : "none") << "\n";
            }
        };
    });

    auto* knot = app.add_subcommand("knot", "correction terms of +-1 surgeries on alternating knots");
    knot->require_subcommand(1);
    auto* kc = knot->add_subcommand("correction", "one knot");
    std::string alex, surg, name = "K";
    long sig = 0;
    std::optional<int> arf_opt;
    kc->add_option("--alexander", alex, "a0;a1;...;ag of the symmetrized polynomial")->required();
    kc->add_option("--signature", sig, "knot signature")->required();
    kc->add_option("--surgery", surg, "+1 or -1")->required();
    kc->add_option("--arf", arf_opt, "Arf invariant, cross-checked")->check(CLI::Range(0, 1));
    kc->add_option("--name", name, "label for the output");
    add_json(kc);
    kc->callback([&] {
        action = [&] {
            surgery::KnotData k;
            k.name = name;
            k.alexander = parse_alexander(alex);
            k.signature = sig;
            k.arf = arf_opt;
            json r = knot_record(k, parse_surgery(surg));
            if (as_json) {
                print_json(out, r);
                return;
            }
            auto t = r["hs_towers"];
            out << "alpha=" << rmod::rational_from_json(t["alpha"]).str()
                << " beta=" << rmod::rational_from_json(t["beta"]).str()
                << " gamma=" << rmod::rational_from_json(t["gamma"]).str() << "\n";
        };
    });

    auto* kb = knot->add_subcommand("batch", "CSV of knots: name,signature,alexander,arf,surgery");
    std::string csv;
    unsigned jobs = 1;
    kb->add_option("file", csv, "CSV path")->required();
    kb->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 256u));
    add_json(kb);
    kb->callback([&] {
        action = [&] {
            auto rows = read_csv(csv);
            std::vector<json> results(rows.size());
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t i = next++; i < rows.size(); i = next++) results[i] = batch_row(rows[i]);
            };
            std::vector<std::thread> pool;
            for (unsigned t = 1; t < std::min<std::size_t>(jobs, rows.size()); ++t) pool.emplace_back(worker);
            worker();
            for (auto& t : pool) t.join();
            std::size_t failed = 0;
            for (const auto& r : results) failed += r.contains("error");
            if (as_json) {
                print_json(out, json(results));
            } else {
                for (const auto& r : results) out << record_line(r) << "\n";
            }
            if (failed) {
                err << error_line("batch", std::to_string(failed) + " of " + std::to_string(rows.size()) +
                                               " rows failed")
                    << "\n";
                code = 2;
            }
        };
    });

    auto* ha = app.add_subcommand("homalg", "chain complexes over F2");
    ha->require_subcommand(1);
    auto* tri = ha->add_subcommand("triangle", "triangle detection from an iterated mapping cone");
    std::string tri_file;
    tri->add_option("file", tri_file, "JSON with c1, c2, c3, f1, f2, h1")->required();
    add_json(tri);
    tri->callback([&] {
        action = [&] {
            json j = read_json_file(tri_file);
            for (const char* key : {"c1", "c2", "c3", "f1", "f2", "h1"})
                if (!j.contains(key)) throw ValidationError(std::string("triangle input lacks key '") + key + "'");
            auto c1 = homalg::complex_from_json(j["c1"]);
            auto c2 = homalg::complex_from_json(j["c2"]);
            auto c3 = homalg::complex_from_json(j["c3"]);
            auto f1 = homalg::ChainMap::make(c1, c2, homalg::map_from_json(j["f1"], c1.dims(), c2.dims(), 0));
            auto f2 = homalg::ChainMap::make(c2, c3, homalg::map_from_json(j["f2"], c2.dims(), c3.dims(), 0));
            auto h1 = homalg::Homotopy::make(c1, c3, homalg::map_from_json(j["h1"], c1.dims(), c3.dims(), 1));
            auto res = homalg::triangle_detect(f1, f2, h1);
            homalg::TriangleCheck chk;
            if (res.acyclic) chk = homalg::check_exact_triangle(res.triangle);
            if (as_json) {
                json o = {{"acyclic", res.acyclic}, {"cone_homology", homalg::to_json(res.cone_homology)}};
                if (res.acyclic) {
                    const auto& t = res.triangle;
                    o["homology"] = {{"c1", homalg::to_json(t.A)}, {"c2", homalg::to_json(t.B)},
                                     {"c3", homalg::to_json(t.C)}};
                    o["maps"] = {{"f1", homalg::to_json(t.ab)}, {"f2", homalg::to_json(t.bc)},
                                 {"f3", homalg::to_json(t.ca)}};
                    o["exact"] = chk.exact;
                }
                print_json(out, o);
            } else if (!res.acyclic) {
                out << "iterated cone acyclic: no\n";
                out << "H(cone) = " << render_dims(res.cone_homology) << "\n";
            } else {
                const auto& t = res.triangle;
                out << "iterated cone acyclic: yes\n";
                out << "H(C1) = " << render_dims(t.A) << "  H(C2) = " << render_dims(t.B)
                    << "  H(C3) = " << render_dims(t.C) << "\n";
                out << "F3 (degree -1): " << homalg::to_json(t.ca).dump() << "\n";
                out << "exact: " << (chk.exact ? "yes" : "no at " + chk.vertex + std::to_string(chk.degree)) << "\n";
            }
            if (res.acyclic && !chk.exact) code = 2;
        };
    });

    auto* ss = ha->add_subcommand("ss", "spectral sequence pages of a filtered complex");
    std::string ss_file;
    std::size_t rmax = 4;
    bool toy = false;
    std::uint64_t seed = 1;
    ss->add_option("file", ss_file, "JSON complex with a \"levels\" object");
    ss->add_option("--rmax", rmax, "last page to print");
    ss->add_flag("--toy", toy, "use the diagonal isomorphism model on random complexes");
    ss->add_option("--seed", seed, "seed for --toy");
    add_json(ss);
    ss->callback([&] {
        action = [&] {
            homalg::FilteredComplex fc;
            if (toy) {
                homalg::Random r(seed);
                auto c1 = homalg::random_complex(r, 0, 2, 2), c2 = homalg::random_complex(r, 0, 2, 2),
                     c3 = homalg::random_complex(r, 0, 2, 2);
                homalg::ChainMap f1{c1, c2, homalg::GradedMap::zero(c1.dims(), c2.dims(), 0)};
                homalg::ChainMap f2{c2, c3, homalg::GradedMap::zero(c2.dims(), c3.dims(), 0)};
                auto h = homalg::Homotopy::make(c1, c3, homalg::GradedMap::zero(c1.dims(), c3.dims(), 1));
                fc = homalg::diagonal_iso_model(f1, f2, h);
            } else if (!ss_file.empty()) {
                fc = filtered_from_json(read_json_file(ss_file));
            } else {
                throw ValidationError("give a filtered complex file or --toy");
            }
            auto sp = homalg::filtered_pages(fc, rmax);
            auto hom = homalg::homology(fc.complex).dims;
            if (as_json) {
                json pages = json::array();
                for (std::size_t r = 0; r < sp.pages.size(); ++r)
                    pages.push_back({{"r", r}, {"total", sp.total(r)}, {"by_degree", homalg::to_json(sp.by_degree(r))}});
                homalg::Dims inf;
                for (const auto& [key, n] : sp.infinity) inf[key.second] += n;
                print_json(out, {{"pages", pages},
                                 {"infinity", homalg::to_json(inf)},
                                 {"stable_from", sp.stable_from},
                                 {"homology", homalg::to_json(hom)}});
                return;
            }
            for (std::size_t r = 0; r < sp.pages.size(); ++r)
                out << "E^" << r << ": total " << sp.total(r) << "  " << render_dims(sp.by_degree(r)) << "\n";
            out << "stable from E^" << sp.stable_from << "\n";
            out << "H = " << render_dims(hom) << "\n";
        };
    });

    auto* bl = app.add_subcommand("blowup", "blow-up coefficient in R");
    long kk = 0;
    bl->add_option("-k", kk, "integer k")->required();
    add_json(bl);
    bl->callback([&] {
        action = [&] {
            auto c = surgery::blowup_coefficient(kk);
            if (as_json) print_json(out, {{"k", kk}, {"coefficient", c.str()}, {"zero", c.is_zero()}});
            else out << c.str() << "\n";
        };
    });

    auto* cat = app.add_subcommand("catalog", "manifolds with known Floer data");
    std::string cat_name;
    cat->add_option("name", cat_name, "entry name; omit to list");
    add_json(cat);
    cat->callback([&] {
        action = [&] {
            if (cat_name.empty()) {
                auto names = surgery::catalog_names();
                if (as_json) print_json(out, json(names));
                else
                    for (const auto& n : names) out << n << "\n";
                return;
            }
            auto e = surgery::catalog(cat_name);
            if (as_json) {
                json j = {{"name", e.name}, {"hm", rmod::to_json(e.hm)}, {"hs", rmod::to_json(e.hs)},
                          {"hm_reversed", e.hm_reversed}, {"note", e.note}};
                j["correction"] = e.correction ? rmod::to_json(*e.correction) : json(nullptr);
                print_json(out, j);
                return;
            }
            out << "name: " << e.name << "\n";
            out << "HM" << (e.hm_reversed ? " (reversed orientation)" : "") << ": " << render_module(e.hm) << "\n";
            out << "HS: " << render_module(e.hs) << "\n";
            if (e.correction) out << "correction: " << e.correction->str() << "\n";
            if (!e.note.empty()) out << "note: " << e.note << "\n";
        };
    });

    auto* ver = app.add_subcommand("verify", "golden checks");
    ver->require_subcommand(1);
    auto* vp = ver->add_subcommand("paper", "replay every reference value");
    add_json(vp);
    vp->callback([&] {
        action = [&] {
            auto rep = verify_paper();
            if (as_json) {
                print_json(out, to_json(rep));
            } else {
                for (const auto& c : rep.checks) {
                    out << to_string(c.status) << "  " << c.id << "  [" << c.anchor << "]";
                    if (c.status != Status::Pass) out << "  expected=" << c.expected << "  got=" << c.got;
                    out << "\n";
                }
                out << rep.checks.size() << " checks: " << rep.count(Status::Pass) << " PASS, "
                    << rep.count(Status::Warn) << " WARN, " << rep.count(Status::Fail) << " FAIL\n";
            }
            if (!rep.ok()) code = 2;
        };
    });

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        // help on a subcommand arrives as a ParseError with exit code 0
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << error_line("usage", e.what()) << "\n";
        return 1;
    }
    if (!action) {
        err << error_line("usage", "no subcommand given") << "\n";
        return 1;
    }
    try {
        action();
    } catch (const Error& e) {
        err << error_line(e.code(), e.what()) << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << error_line("internal", e.what()) << "\n";
        return 2;
    }
    return code;
}

}  // namespace p2f::cli
