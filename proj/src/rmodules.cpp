#include "p2f/rmodules.hpp"

#include <algorithm>
#include <functional>

#include "p2f/errors.hpp"

namespace p2f::rmod {

RingElement RingElement::monomial(int q, int v) {
    RingElement r;
    if (q < 0 || v < 0) throw ContractError("negative exponent in monomial");
    if (q <= 2 && v <= V_CUTOFF) r.c_[q][v] = true;
    return r;
}

bool RingElement::is_zero() const {
    return c_[0].none() && c_[1].none() && c_[2].none();
}

RingElement operator+(const RingElement& a, const RingElement& b) {
    RingElement r = a;
    for (int q = 0; q < 3; ++q) r.c_[q] ^= b.c_[q];
    return r;
}

RingElement operator*(const RingElement& a, const RingElement& b) {
    RingElement r;
    for (int qa = 0; qa < 3; ++qa)
        for (int qb = 0; qa + qb < 3; ++qb)
            for (int va = 0; va <= V_CUTOFF; ++va) {
                if (!a.c_[qa][va]) continue;
                // shifted copy of b's row, truncated at the cutoff
                r.c_[qa + qb] ^= b.c_[qb] << va;
            }
    return r;
}

RingElement ring_mul(const RingElement& x, const RingElement& y) { return x * y; }

std::vector<std::pair<int, int>> RingElement::terms() const {
    std::vector<std::pair<int, int>> t;
    for (int v = 0; v <= V_CUTOFF; ++v)
        for (int q = 0; q < 3; ++q)
            if (c_[q][v]) t.emplace_back(q, v);
    std::sort(t.begin(), t.end());
    return t;
}

std::string RingElement::str() const {
    auto t = terms();
    if (t.empty()) return "0";
    std::string out;
    for (auto [q, v] : t) {
        if (!out.empty()) out += " + ";
        std::string mono;
        if (q > 0) mono += "Q^" + std::to_string(q);
        if (q > 0 && v > 0) mono += " ";
        if (v > 0) mono += "V^" + std::to_string(v);
        if (mono.empty()) mono = "1";
        out += mono;
    }
    return out;
}

namespace {

bool same_coset(const Grading& a, const Grading& b) { return (a - b).is_integer(); }

bool tower_has(const Tower& t, const Grading& k) {
    if (!same_coset(k, t.base)) return false;
    std::int64_t off = (k - t.base).to_int();
    if (t.kind == TowerKind::Plus && off < 0) return false;
    return ((off % t.step) + t.step) % t.step == 0;
}

void check_window(const Grading& lo, const Grading& hi) {
    if (hi < lo) throw WindowError("empty window [" + lo.str() + "," + hi.str() + "]");
}

template <class F>
DegreeMap over_window(const Grading& lo, const Grading& hi, F f) {
    check_window(lo, hi);
    DegreeMap out;
    for (Grading k = lo; k <= hi; k += 1) out[k] = f(k);
    return out;
}

}  // namespace

void StructuredModule::validate() const {
    for (const auto& t : towers)
        if (t.step != 2 && t.step != 4)
            throw ValidationError("tower step must be 2 or 4, got " + std::to_string(t.step));
    for (const auto& b : boxes)
        if (b.qlen < 1 || b.qlen > 3)
            throw ValidationError("Q-string length must be 1..3, got " + std::to_string(b.qlen));
    for (auto [s, t] : links) {
        if (s >= towers.size() || t >= towers.size() || s == t)
            throw ValidationError("bad Q-link " + std::to_string(s) + "->" + std::to_string(t));
        if (!same_coset(towers[s].base - 1, towers[t].base))
            throw ValidationError("Q-link between towers in different gradings cosets");
    }
    std::vector<Grading> all;
    for (const auto& t : towers) all.push_back(t.base);
    for (const auto& b : boxes) all.push_back(b.deg);
    for (const auto& g : all)
        if (!same_coset(g, all.front()))
            throw ValidationError("module gradings do not differ by integers");
}

bool StructuredModule::has_bar_towers() const {
    return std::any_of(towers.begin(), towers.end(),
                       [](const Tower& t) { return t.kind == TowerKind::Bar; });
}

Grading StructuredModule::min_degree() const {
    if (has_bar_towers()) throw WindowError("module with two-sided towers has no minimum degree");
    if (towers.empty() && boxes.empty()) throw WindowError("zero module has no minimum degree");
    std::vector<Grading> all;
    for (const auto& t : towers) all.push_back(t.base);
    for (const auto& b : boxes)
        if (b.dim > 0) all.push_back(b.deg - (b.qlen - 1));
    return *std::min_element(all.begin(), all.end());
}

Grading StructuredModule::max_base() const {
    std::vector<Grading> all;
    for (const auto& t : towers) all.push_back(t.base);
    for (const auto& b : boxes) all.push_back(b.deg);
    if (all.empty()) throw WindowError("zero module has no base degree");
    return *std::max_element(all.begin(), all.end());
}

StructuredModule u_tower(Grading d) { return {{Tower{d, 2, TowerKind::Plus}}, {}, {}}; }
StructuredModule v_tower(Grading d) { return {{Tower{d, 4, TowerKind::Plus}}, {}, {}}; }

StructuredModule direct_sum(const StructuredModule& a, const StructuredModule& b) {
    StructuredModule r = a;
    std::size_t off = a.towers.size();
    r.towers.insert(r.towers.end(), b.towers.begin(), b.towers.end());
    r.boxes.insert(r.boxes.end(), b.boxes.begin(), b.boxes.end());
    for (auto [s, t] : b.links) r.links.emplace_back(s + off, t + off);
    return r;
}

DegreeMap dims(const StructuredModule& m, Grading lo, Grading hi) {
    return over_window(lo, hi, [&](const Grading& k) {
        std::size_t d = 0;
        for (const auto& t : m.towers) d += tower_has(t, k);
        for (const auto& b : m.boxes)
            if (same_coset(k, b.deg) && k <= b.deg && k > b.deg - b.qlen) d += b.dim;
        return d;
    });
}

DegreeMap q_power_rank(const StructuredModule& m, int power, Grading lo, Grading hi) {
    if (power < 0) throw ContractError("negative Q power");
    std::vector<std::vector<std::size_t>> out(m.towers.size());
    for (auto [s, t] : m.links) out[s].push_back(t);
    return over_window(lo, hi, [&](const Grading& k) {
        std::size_t r = 0;
        // each path of `power` links whose towers are all populated contributes one
        std::function<void(std::size_t, int)> walk = [&](std::size_t t, int step) {
            if (!tower_has(m.towers[t], k - step)) return;
            if (step == power) {
                ++r;
                return;
            }
            for (auto nxt : out[t]) walk(nxt, step + 1);
        };
        for (std::size_t t = 0; t < m.towers.size(); ++t) walk(t, 0);
        for (const auto& b : m.boxes)
            if (same_coset(k, b.deg) && k <= b.deg && k - power > b.deg - b.qlen) r += b.dim;
        return r;
    });
}

DegreeMap q_rank_profile(const StructuredModule& m, Grading lo, Grading hi) {
    return q_power_rank(m, 1, lo, hi);
}

void CorrectionTerms::validate() const {
    if (!(alpha >= beta && beta >= gamma))
        throw ValidationError("correction terms out of order: " + str());
    if (!(alpha - beta).is_integer() || !(beta - gamma).is_integer())
        throw ValidationError("correction terms with different fractional parts: " + str());
}

std::string CorrectionTerms::str() const {
    return "(" + alpha.str() + "," + beta.str() + "," + gamma.str() + ")";
}

StandardModule StandardModule::make(Grading alpha, Grading beta, Grading gamma) {
    CorrectionTerms{alpha, beta, gamma}.validate();
    auto even = [](const Grading& g) { return g.is_integer() && g.to_int() % 2 == 0; };
    if (!even(alpha - beta) || !even(beta - gamma))
        throw ValidationError("standard module S+_{" + alpha.str() + "," + beta.str() + "," +
                              gamma.str() + "} needs even gaps between correction terms");
    StandardModule s;
    s.alpha_ = alpha;
    s.beta_ = beta;
    s.gamma_ = gamma;
    return s;
}

StandardModule StandardModule::from_starts(Grading c, Grading b, Grading a) {
    return make(a / 2, (b - 1) / 2, (c - 2) / 2);
}

StructuredModule StandardModule::module(const std::vector<Box>& boxes) const {
    StructuredModule m;
    m.towers = {Tower{c(), 4, TowerKind::Plus}, Tower{b(), 4, TowerKind::Plus},
                Tower{a(), 4, TowerKind::Plus}};
    m.links = {{0, 1}, {1, 2}};
    m.boxes = boxes;
    return m;
}

std::string StandardModule::str() const {
    return "S+_{" + alpha_.str() + "," + beta_.str() + "," + gamma_.str() + "}";
}

CorrectionTerms correction_terms_of(const StandardModule& s) {
    return {s.a() / 2, (s.b() - 1) / 2, (s.c() - 2) / 2};
}

CorrectionTerms reverse_orientation(const CorrectionTerms& ct) {
    return {-ct.gamma, -ct.beta, -ct.alpha};
}

nlohmann::json rational_json(const Rational& r) {
    if (r.is_integer()) return r.num();
    return r.str();
}

Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    throw ValidationError("expected an integer or \"p/q\" string, got " + j.dump());
}

nlohmann::json to_json(const StructuredModule& m) {
    nlohmann::json towers = nlohmann::json::array(), boxes = nlohmann::json::array(),
                   links = nlohmann::json::array();
    for (const auto& t : m.towers)
        towers.push_back({{"base", rational_json(t.base)},
                          {"step", t.step},
                          {"kind", t.kind == TowerKind::Plus ? "plus" : "bar"}});
    for (const auto& b : m.boxes) {
        nlohmann::json jb = {{"deg", rational_json(b.deg)}, {"dim", b.dim}};
        if (b.qlen != 1) jb["qlen"] = b.qlen;
        boxes.push_back(jb);
    }
    for (auto [s, t] : m.links) links.push_back({s, t});
    return {{"towers", towers}, {"boxes", boxes}, {"links", links}};
}

StructuredModule module_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("module JSON must be an object");
    StructuredModule m;
    try {
        for (const auto& t : j.value("towers", nlohmann::json::array())) {
            Tower tw;
            tw.base = rational_from_json(t.at("base"));
            tw.step = t.value("step", 4);
            std::string kind = t.value("kind", "plus");
            if (kind == "plus") tw.kind = TowerKind::Plus;
            else if (kind == "bar") tw.kind = TowerKind::Bar;
            else throw ValidationError("unknown tower kind '" + kind + "'");
            m.towers.push_back(tw);
        }
        for (const auto& b : j.value("boxes", nlohmann::json::array())) {
            std::int64_t dim = b.at("dim").get<std::int64_t>();
            if (dim < 0) throw ValidationError("negative box dimension");
            m.boxes.push_back(Box{rational_from_json(b.at("deg")), static_cast<std::size_t>(dim),
                                  b.value("qlen", 1)});
        }
        for (const auto& l : j.value("links", nlohmann::json::array()))
            m.links.emplace_back(l.at(0).get<std::size_t>(), l.at(1).get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed module JSON: ") + e.what());
    }
    m.validate();
    return m;
}

nlohmann::json to_json(const CorrectionTerms& ct) {
    return {{"alpha", rational_json(ct.alpha)},
            {"beta", rational_json(ct.beta)},
            {"gamma", rational_json(ct.gamma)}};
}

}  // namespace p2f::rmod
