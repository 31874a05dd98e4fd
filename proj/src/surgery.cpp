#include "p2f/surgery.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include "p2f/errors.hpp"

namespace p2f::surgery {

using rmod::Box;
using rmod::Tower;
using rmod::TowerKind;

namespace {

long mod(long a, long n) { return ((a % n) + n) % n; }

long ceil_div(long a, long b) {
    long q = a / b;
    if (a % b != 0 && ((a < 0) == (b < 0))) ++q;
    return q;
}

}  // namespace

KnotData unknot() { return {"unknot", {1}, 0, std::nullopt, false}; }

KnotData torus_knot_2(long n) {
    if (n < 0) throw ContractError("torus_knot_2 needs n >= 0");
    KnotData k;
    k.name = "T(2," + std::to_string(2 * n + 1) + ")";
    for (long j = 0; j <= n; ++j) k.alexander.push_back((j + n) % 2 ? -1 : 1);
    k.signature = -2 * n;
    return k;
}

KnotData figure_eight() { return {"4_1", {3, -1}, 0, std::nullopt, false}; }

KnotData connected_sum(const KnotData& a, const KnotData& b) {
    long ga = static_cast<long>(a.alexander.size()) - 1, gb = static_cast<long>(b.alexander.size()) - 1;
    std::map<long, long> prod;
    for (long i = -ga; i <= ga; ++i)
        for (long j = -gb; j <= gb; ++j)
            prod[i + j] += a.alexander[std::abs(i)] * b.alexander[std::abs(j)];
    KnotData k;
    k.name = a.name + "#" + b.name;
    for (long s = 0; s <= ga + gb; ++s) k.alexander.push_back(prod[s]);
    while (k.alexander.size() > 1 && k.alexander.back() == 0) k.alexander.pop_back();
    k.signature = a.signature + b.signature;
    return k;
}

int arf_from_alexander(const std::vector<long>& a) {
    if (a.empty()) throw ValidationError("empty Alexander polynomial");
    long d = a[0];
    for (std::size_t j = 1; j < a.size(); ++j) d += 2 * (j % 2 ? -a[j] : a[j]);
    switch (mod(d, 8)) {
        case 1:
        case 7:
            return 0;
        case 3:
        case 5:
            return 1;
        default:
            throw ValidationError("Alexander polynomial has even determinant " + std::to_string(d));
    }
}

long torsion_coefficient(const KnotData& k, long s) {
    long g = static_cast<long>(k.alexander.size()) - 1;
    long t = 0;
    for (long j = 1; std::abs(s) + j <= g; ++j) t += j * k.alexander[std::abs(s) + j];
    return t;
}

long delta_bound(long sigma, long s) {
    if (sigma % 2) throw ContractError("signature must be even, got " + std::to_string(sigma));
    return std::max(0L, ceil_div(std::abs(sigma) - 2 * std::abs(s), 4));
}

long b_coefficient(const KnotData& k, long s) {
    long sign = mod(s + k.signature / 2, 2) ? -1 : 1;
    return sign * (delta_bound(k.signature, s) - torsion_coefficient(k, s));
}

KnotData validate_knot(KnotData k) {
    if (k.alexander.empty()) throw ValidationError("knot " + k.name + ": empty Alexander polynomial");
    long total = k.alexander[0];
    for (std::size_t j = 1; j < k.alexander.size(); ++j) total += 2 * k.alexander[j];
    if (total != 1)
        throw ValidationError("knot " + k.name + ": Alexander polynomial not normalized, Delta(1) = " +
                              std::to_string(total));
    if (k.signature % 2) throw ValidationError("knot " + k.name + ": odd signature");
    if (k.signature > 0) {
        k.signature = -k.signature;
        k.mirrored = !k.mirrored;
    }
    int arf = arf_from_alexander(k.alexander);
    if (k.arf && *k.arf != arf)
        throw ValidationError("knot " + k.name + ": stated Arf " + std::to_string(*k.arf) +
                              " but Delta(-1) gives " + std::to_string(arf));
    k.arf = arf;
    if (mod(torsion_coefficient(k, 0), 2) != arf)
        throw InternalError("knot " + k.name + ": t_0 mod 2 disagrees with Delta(-1) mod 8");
    long g = static_cast<long>(k.alexander.size()) - 1;
    for (long s = 0; s <= std::max(g, std::abs(k.signature) / 2) + 1; ++s)
        if (b_coefficient(k, s) < 0)
            throw ValidationError("knot " + k.name + ": b_" + std::to_string(s) + " = " +
                                  std::to_string(b_coefficient(k, s)) +
                                  " not consistent with alternating hypothesis");
    return k;
}

namespace {

std::vector<ParityOnlyLevel> higher_levels(const KnotData& k) {
    std::vector<ParityOnlyLevel> out;
    long g = static_cast<long>(k.alexander.size()) - 1;
    long top = std::max(g, std::abs(k.signature) / 2);
    for (long s = 1; s <= top; ++s) {
        ParityOnlyLevel l{s, b_coefficient(k, s), delta_bound(k.signature, s),
                          static_cast<int>(mod(s + k.signature / 2, 2))};
        if (l.b != 0 || l.delta != 0) out.push_back(l);
    }
    return out;
}

}  // namespace

ZeroSurgeryModules hm_zero_surgery(const KnotData& kin) {
    KnotData k = validate_knot(kin);
    ZeroSurgeryModules z;
    long d = delta_bound(k.signature, 0);
    z.s0.towers = {Tower{-1, 2, TowerKind::Plus}, Tower{-2 * d, 2, TowerKind::Plus}};
    long b0 = b_coefficient(k, 0);
    if (b0 > 0) z.s0.boxes.push_back(Box{k.signature / 2 - 1, static_cast<std::size_t>(b0), 1});
    z.higher = higher_levels(k);
    return z;
}

PlusOneHM hm_plus_one_surgery(const KnotData& kin) {
    KnotData k = validate_knot(kin);
    PlusOneHM h;
    h.self_conjugate = rmod::u_tower(-2 * delta_bound(k.signature, 0));
    long b0 = b_coefficient(k, 0);
    if (b0 > 0) h.self_conjugate.boxes.push_back(Box{k.signature / 2 - 1, static_cast<std::size_t>(b0), 1});
    h.conjugate_pairs = higher_levels(k);
    return h;
}

gysin::GysinSolution hs_plus_one_surgery(const KnotData& k) {
    auto pb = gysin::GysinProblem::make(hm_plus_one_surgery(k).self_conjugate);
    auto sols = gysin::oracle_solve(pb);
    if (sols.size() != 1)
        throw InternalError("knot " + k.name + ": Gysin oracle returned " + std::to_string(sols.size()) +
                            " solutions for the +1 surgery");
    return sols.front();
}

CorrectionTerms table_correction_terms(long sigma, int arf, int n) {
    if (sigma > 0 || sigma % 2) throw ContractError("table needs an even signature <= 0");
    if (arf != 0 && arf != 1) throw ContractError("Arf must be 0 or 1");
    if (n != 1 && n != -1) throw ContractError("surgery coefficient must be +1 or -1");
    long k = -sigma / 8, r = -sigma % 8;
    auto ct = [](long a, long b, long c) { return CorrectionTerms{a, b, c}; };
    if (arf == 0) {
        if (n == -1) return ct(0, 0, 0);
        switch (r) {
            case 0: return ct(-2 * k, -2 * k, -2 * k);
            case 2: return ct(-2 * k, -2 * k, -2 * k - 2);
            case 4: return ct(-2 * k, -2 * k - 2, -2 * k - 2);
            default: return ct(-2 * k - 2, -2 * k - 2, -2 * k - 2);
        }
    }
    if (n == 1) {
        switch (r) {
            case 0: return ct(-2 * k + 1, -2 * k - 1, -2 * k - 1);
            case 2:
            case 4: return ct(-2 * k - 1, -2 * k - 1, -2 * k - 1);
            default: return ct(-2 * k - 1, -2 * k - 1, -2 * k - 3);
        }
    }
    if (r == 0) return ct(1, -2 * k + 1, -2 * k - 1);
    return ct(1, -2 * k - 1, -2 * k - 1);
}

StructuredModule BarTowers::module() const {
    StructuredModule m;
    for (const auto& b : bases) m.towers.push_back(Tower{b, 4, TowerKind::Plus});
    m.links = links;
    return m;
}

namespace {

struct LinkedTowers {
    std::vector<Grading> bases;
    std::vector<std::pair<std::size_t, std::size_t>> links;
};

long residue(const Grading& g) { return mod(g.to_int(), 4); }

// towers of S in order (c, b, a), linked c->b->a
LinkedTowers standard_towers(const StandardModule& s) {
    return {{s.c(), s.b(), s.a()}, {{0, 1}, {1, 2}}};
}

// drop tower `drop` (if any) and append the survivors of src, shifted, into out
void keep_except(const LinkedTowers& src, std::optional<std::size_t> drop, const Grading& shift, BarTowers& out) {
    std::map<std::size_t, std::size_t> where;
    for (std::size_t i = 0; i < src.bases.size(); ++i) {
        if (drop && *drop == i) continue;
        where[i] = out.bases.size();
        out.bases.push_back(src.bases[i] + shift);
    }
    for (auto [s, t] : src.links)
        if (where.count(s) && where.count(t)) out.links.emplace_back(where[s], where[t]);
}

StandardModule standard_from_towers(std::vector<Grading> towers) {
    if (towers.size() != 3)
        throw InfeasibleError("surgery triangle leaves " + std::to_string(towers.size()) +
                              " towers, a homology sphere needs 3");
    // a, b, c sit in consecutive residues r, r+1, r+2
    for (const auto& a : towers) {
        long r = residue(a);
        std::optional<Grading> b, c;
        for (const auto& t : towers) {
            if (residue(t) == mod(r + 1, 4)) b = t;
            if (residue(t) == mod(r + 2, 4)) c = t;
        }
        if (b && c) return StandardModule::from_starts(*c, *b, a);
    }
    throw InfeasibleError("surgery triangle towers do not form a standard module");
}

}  // namespace

BarTowers zero_surgery_bar_towers(const StandardModule& y1, int arf) {
    if (arf != 0 && arf != 1) throw ContractError("Arf must be 0 or 1");
    for (const auto& g : {y1.alpha(), y1.beta(), y1.gamma()})
        if (!g.is_integer()) throw ValidationError("surgery on a knot in S^3 gives integral correction terms");
    // triangle S^3 -(deg -1)-> Y_0 -(deg 0)-> Y_1 -(F_1)-> S^3
    LinkedTowers s3 = standard_towers(StandardModule::make(0, 0, 0));
    LinkedTowers y = standard_towers(y1);
    std::optional<std::size_t> hit_in_s3, injected_from_y1;
    if (arf == 1) {
        // F_1 is injective on the top tower of Y_1 and zero on the others
        injected_from_y1 = 0;
        for (std::size_t i = 0; i < 3; ++i)
            if (residue(s3.bases[i]) == residue(y.bases[0])) hit_in_s3 = i;
        if (!hit_in_s3)
            throw InfeasibleError("top tower of Y_1 has no tower of matching degree in S^3 to map to");
    }
    BarTowers out;
    // the S^3 towers off the image of F_1 lift through the degree -1 map
    keep_except(s3, hit_in_s3, -1, out);
    // the Y_1 towers in ker F_1 are hit by the degree 0 map
    keep_except(y, injected_from_y1, 0, out);
    return out;
}

StandardModule minus_one_towers(const BarTowers& bars, int arf) {
    if (arf != 0 && arf != 1) throw ContractError("Arf must be 0 or 1");
    // triangle Y_{-1} -(deg -1)-> Y_0 -(deg 0)-> S^3 -(F_inf)-> Y_{-1}
    LinkedTowers s3 = standard_towers(StandardModule::make(0, 0, 0));
    std::vector<Grading> result;
    std::vector<bool> s3_in_image(3, true);
    if (arf == 1) {
        // F_inf injective on the top tower of S^3, zero elsewhere
        result.push_back(s3.bases[0]);
        s3_in_image[0] = false;
    }
    std::vector<bool> used(bars.bases.size(), false);
    for (std::size_t i = 0; i < 3; ++i) {
        if (!s3_in_image[i]) continue;
        std::optional<std::size_t> pick;
        for (std::size_t j = 0; j < bars.bases.size(); ++j) {
            if (used[j] || residue(bars.bases[j]) != residue(s3.bases[i]) || bars.bases[j] > s3.bases[i])
                continue;
            if (!pick || bars.bases[j] < bars.bases[*pick]) pick = j;
        }
        if (!pick)
            throw InfeasibleError("no tower of Y_0 surjects onto the S^3 tower at " + s3.bases[i].str());
        used[*pick] = true;
    }
    for (std::size_t j = 0; j < bars.bases.size(); ++j)
        if (!used[j]) result.push_back(bars.bases[j] + 1);
    return standard_from_towers(result);
}

CorrectionReport correction_terms(const KnotData& kin, int n) {
    if (n != 1 && n != -1) throw ContractError("surgery coefficient must be +1 or -1");
    KnotData k = validate_knot(kin);
    CorrectionReport r;
    r.mirrored = k.mirrored;
    int slot = k.mirrored ? -n : n;
    r.table = table_correction_terms(k.signature, *k.arf, slot);
    if (slot == 1) {
        r.pipeline = rmod::correction_terms_of(hs_plus_one_surgery(k).towers);
        r.provenance = "gysin oracle on HM of +1 surgery";
    } else {
        auto y1 = hs_plus_one_surgery(k).towers;
        r.pipeline = rmod::correction_terms_of(minus_one_towers(zero_surgery_bar_towers(y1, *k.arf), *k.arf));
        r.provenance = "surgery triangles through the 0 surgery";
    }
    r.agree = *r.pipeline == r.table;
    if (!r.agree)
        throw InternalError("knot " + k.name + ": pipeline gives " + r.pipeline->str() + " but table gives " +
                            r.table.str());
    r.terms = r.table;
    if (k.mirrored) {
        r.terms = rmod::reverse_orientation(r.terms);
        r.provenance += ", mirrored and reversed";
    }
    return r;
}

rmod::RingElement blowup_coefficient(long k) {
    long r = mod(k, 4);
    if (r == 0 || r == 1) return rmod::RingElement::zero();
    return rmod::RingElement::monomial(2, static_cast<int>((k * (k - 1)) / 4));
}

bool seifert_obstruction(const CorrectionTerms& ct) { return ct.alpha != ct.beta && ct.beta != ct.gamma; }

CobordismCheck spin_cobordism_check(const CorrectionTerms& ct0, const CorrectionTerms& ct1, int b2plus,
                                    long b2minus) {
    if (b2plus != 1 && b2plus != 2) throw ContractError("b2+ must be 1 or 2");
    if (b2minus < 0) throw ContractError("b2- must be non-negative");
    CobordismCheck c;
    if (b2plus == 1) {
        Rational shift(b2minus - 1, 8);
        if (!(ct1.alpha >= ct0.beta + shift)) {
            c.pass = false;
            c.violated = "alpha1 >= beta0 + (b2- - 1)/8: " + ct1.alpha.str() + " < " + (ct0.beta + shift).str();
        } else if (!(ct1.beta >= ct0.gamma + shift)) {
            c.pass = false;
            c.violated = "beta1 >= gamma0 + (b2- - 1)/8: " + ct1.beta.str() + " < " + (ct0.gamma + shift).str();
        }
    } else {
        Rational shift(b2minus - 2, 8);
        if (!(ct1.alpha >= ct0.gamma + shift)) {
            c.pass = false;
            c.violated = "alpha1 >= gamma0 + (b2- - 2)/8: " + ct1.alpha.str() + " < " + (ct0.gamma + shift).str();
        }
    }
    return c;
}

namespace {

StructuredModule with_box(StructuredModule m, Grading deg, long dim) {
    if (dim > 0) m.boxes.push_back(Box{deg, static_cast<std::size_t>(dim), 1});
    return m;
}

CatalogEntry brieskorn(long p) {
    CatalogEntry e;
    e.name = "Sigma(2,3," + std::to_string(p) + ")";
    long r = mod(p, 12);
    auto S = [](long a, long b, long c) { return StandardModule::make(a, b, c); };
    if (r == 1) {
        long k = (p - 1) / 12;
        e.hm = with_box(rmod::u_tower(0), -1, 2 * k);
        e.hs = S(0, 0, 0).module(k ? std::vector<Box>{{-1, static_cast<std::size_t>(k), 1}} : std::vector<Box>{});
    } else if (r == 7) {
        long k = (p + 5) / 12;
        e.hm = with_box(rmod::u_tower(0), -1, 2 * k - 1);
        e.hs = S(1, -1, -1).module(k > 1 ? std::vector<Box>{{-1, static_cast<std::size_t>(k - 1), 1}}
                                         : std::vector<Box>{});
    } else if (r == 5) {
        long k = (p - 5) / 12;
        e.hm = with_box(rmod::u_tower(-2), -2, 2 * k);
        e.hm_reversed = true;
        e.hs = S(1, 1, 1).module(k ? std::vector<Box>{{1, static_cast<std::size_t>(k), 1}} : std::vector<Box>{});
    } else if (r == 11) {
        long k = (p + 1) / 12;
        e.hm = with_box(rmod::u_tower(-2), -2, 2 * k - 1);
        e.hm_reversed = true;
        e.hs = S(2, 0, 0).module(k > 1 ? std::vector<Box>{{1, static_cast<std::size_t>(k - 1), 1}}
                                       : std::vector<Box>{});
    } else {
        throw ValidationError("Sigma(2,3," + std::to_string(p) + ") is not in the catalog families");
    }
    if (e.hm_reversed) e.note = "hm is HM of the orientation reversal";
    const auto& t = e.hs.towers;
    e.correction = rmod::correction_terms_of(StandardModule::from_starts(t[0].base, t[1].base, t[2].base));
    return e;
}

CatalogEntry figure_eight_surgery(long n) {
    CatalogEntry e;
    e.name = "E_" + std::to_string(n);
    if (n == 0) {
        e.hm = hm_zero_surgery(figure_eight()).s0;
        BarTowers b{{1, 0, -1, 2}, {{0, 1}, {2, 3}}};
        e.hs = b.module();
        e.note = "self-conjugate spin-c structure only";
        return e;
    }
    long an = std::abs(n), k = an / 2;
    StandardModule towers = an % 2 ? StandardModule::make(1, -1, -1) : StandardModule::make(0, 0, 0);
    if (n > 0) {
        e.hm = with_box(rmod::u_tower(0), -1, an);
        e.hs = towers.module(k ? std::vector<Box>{{-1, static_cast<std::size_t>(k), 1}} : std::vector<Box>{});
        e.correction = rmod::correction_terms_of(towers);
        return e;
    }
    // E_{-n} = -E_n; reduced HM moves from degree -1 to degree 0
    e.hm = with_box(rmod::u_tower(0), 0, an);
    auto ct = rmod::reverse_orientation(rmod::correction_terms_of(towers));
    StandardModule rev = StandardModule::make(ct.alpha, ct.beta, ct.gamma);
    e.hs = rev.module(k ? std::vector<Box>{{0, static_cast<std::size_t>(k), 1}} : std::vector<Box>{});
    e.correction = ct;
    e.note = "derived from E_" + std::to_string(an) + " by orientation reversal";
    return e;
}

}  // namespace

CatalogEntry catalog(const std::string& name) {
    static const std::regex sigma_re(R"(Sigma\(2,3,(\d+)\))");
    static const std::regex e_re(R"(E_(-?\d+))");
    std::smatch m;
    if (std::regex_match(name, m, sigma_re)) {
        long p = std::stol(m[1]);
        long r = mod(p, 12);
        long k = r == 1 ? (p - 1) / 12 : r == 5 ? (p - 5) / 12 : r == 7 ? (p + 5) / 12 : (p + 1) / 12;
        if (k > 6) throw ValidationError("catalog covers k <= 6 only");
        return brieskorn(p);
    }
    if (std::regex_match(name, m, e_re)) {
        long n = std::stol(m[1]);
        if (std::abs(n) > 12) throw ValidationError("catalog covers |n| <= 12 only");
        return figure_eight_surgery(n);
    }
    CatalogEntry e;
    e.name = name;
    if (name == "Poincare") {
        e.hm = rmod::u_tower(-2);
        e.hs = StandardModule::make(-1, -1, -1).module();
        e.correction = CorrectionTerms{-1, -1, -1};
        e.note = "+1 surgery on the right-handed trefoil";
    } else if (name == "S3") {
        e.hm = rmod::u_tower(0);
        e.hs = StandardModule::make(0, 0, 0).module();
        e.correction = CorrectionTerms{0, 0, 0};
    } else if (name == "S2xS1") {
        e.hm = hm_zero_surgery(unknot()).s0;
        BarTowers b{{2, 1, 0, 1, 0, -1}, {{0, 1}, {1, 2}, {3, 4}, {4, 5}}};
        e.hs = b.module();
        e.note = "torsion spin-c structure";
    } else {
        throw ValidationError("unknown catalog entry '" + name + "'");
    }
    return e;
}

std::vector<std::string> catalog_names() {
    std::vector<std::string> names = {"S3", "Poincare", "S2xS1"};
    for (long k = 0; k <= 6; ++k) {
        names.push_back("Sigma(2,3," + std::to_string(12 * k + 1) + ")");
        names.push_back("Sigma(2,3," + std::to_string(12 * k + 5) + ")");
        if (k > 0) {
            names.push_back("Sigma(2,3," + std::to_string(12 * k - 1) + ")");
            names.push_back("Sigma(2,3," + std::to_string(12 * k - 5) + ")");
        }
    }
    for (long n = -12; n <= 12; ++n) names.push_back("E_" + std::to_string(n));
    return names;
}

nlohmann::json to_json(const KnotData& k) {
    nlohmann::json j = {{"name", k.name}, {"alexander", k.alexander}, {"sigma", k.signature}, {"mirrored", k.mirrored}};
    if (k.arf) j["arf"] = *k.arf;
    return j;
}

nlohmann::json to_json(const CorrectionReport& r) {
    nlohmann::json j = {{"terms", rmod::to_json(r.terms)},
                        {"table", rmod::to_json(r.table)},
                        {"agree", r.agree},
                        {"mirrored", r.mirrored},
                        {"provenance", r.provenance},
                        {"obstructed", seifert_obstruction(r.terms)}};
    if (r.pipeline) j["pipeline"] = rmod::to_json(*r.pipeline);
    return j;
}

nlohmann::json to_json(const BarTowers& b) {
    nlohmann::json bases = nlohmann::json::array();
    for (const auto& g : b.bases) bases.push_back(rmod::rational_json(g));
    nlohmann::json links = nlohmann::json::array();
    for (auto [s, t] : b.links) links.push_back({s, t});
    return {{"bases", bases}, {"links", links}};
}

}  // namespace p2f::surgery
