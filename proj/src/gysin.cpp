#include "p2f/gysin.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <tuple>

#include "p2f/errors.hpp"

namespace p2f::gysin {

using rmod::Box;
using rmod::DegreeMap;
using rmod::StandardModule;
using rmod::StructuredModule;
using rmod::TowerKind;

std::string to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

namespace {

long mod(long a, long n) { return ((a % n) + n) % n; }

// top period has to be free of finite parts
constexpr int kStableSpan = 8;

}  // namespace

GysinProblem GysinProblem::make(const StructuredModule& m) {
    m.validate();
    if (m.towers.size() != 1 || m.towers[0].step != 2 || m.towers[0].kind != TowerKind::Plus)
        throw ValidationError("Gysin input needs exactly one U-tower (step 2, kind plus)");
    if (!m.links.empty()) throw ValidationError("Gysin input carries no Q-links");
    for (const auto& b : m.boxes)
        if (b.qlen != 1) throw ValidationError("Gysin input boxes are plain F-summands");
    return GysinProblem{m};
}

Grading GysinProblem::tower_base() const { return M.towers.at(0).base; }

bool Certificate::consistent() const {
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] < 0 || i[k] < 0 || p[k] < 0 || q[k] < 0 || m[k] < 0) return false;
        long q_up = k + 1 < q.size() ? q[k + 1] : q[k];
        if (k + 1 == q.size()) continue;
        if (s[k] != q_up + i[k] || m[k] != i[k] + p[k] || s[k] != p[k] + q[k]) return false;
    }
    return true;
}

DegreeMap GysinSolution::finite_dims() const {
    DegreeMap out;
    for (const auto& b : boxes)
        for (int j = 0; j < b.qlen; ++j) out[b.deg - j] += b.dim;
    for (auto it = out.begin(); it != out.end();)
        it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

std::string GysinSolution::str() const {
    std::string s = towers.str();
    for (const auto& b : boxes) {
        if (b.dim == 0) continue;
        s += " + F^" + std::to_string(b.dim) + "<" + b.deg.str() + ">";
        if (b.qlen > 1) s += "[Q^" + std::to_string(b.qlen) + "]";
    }
    return s;
}

int window_pad() {
    if (const char* env = std::getenv("P2F_WINDOW_PAD")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            throw ValidationError(std::string("P2F_WINDOW_PAD is not an integer: ") + env);
        }
    }
    return 12;
}

Window window_for(const GysinProblem& pb, int pad) {
    if (pad < kStableSpan)
        throw WindowError("window pad " + std::to_string(pad) + " is below the stabilization span " +
                          std::to_string(kStableSpan));
    return {pb.M.min_degree() - 4, pb.M.max_base() + pad};
}

Parity classify_parity(const DegreeMap& sdims, Grading h) {
    if (sdims.size() < 4) throw WindowError("parity needs at least one full period");
    bool empty_minus = false, empty_plus = false;
    auto it = sdims.end();
    for (int j = 0; j < 4; ++j) {
        --it;
        const auto& [deg, dim] = *it;
        Grading off = deg - h * 2;
        if (!off.is_integer()) throw ContractError("degree " + deg.str() + " not in the grading coset of h");
        long r = mod(off.to_int(), 4);
        if (r == 3 && dim == 0) empty_minus = true;
        if (r == 1 && dim == 0) empty_plus = true;
    }
    if (empty_minus == empty_plus)
        throw ContractError("module is neither even nor odd in its top period");
    return empty_minus ? Parity::Even : Parity::Odd;
}

Increase increase_classify(long s_up, long s_k, long s_down, long m_k) {
    if (m_k != 1) throw ContractError("local increase pattern needs M_k = F");
    if (s_down >= 0 && s_k == s_down + 1 && s_up == s_k) return Increase::Increasing;
    if (s_down >= 1 && s_k == s_down && s_up == s_k - 1) return Increase::Decreasing;
    throw ValidationError("local ranks (" + std::to_string(s_up) + "," + std::to_string(s_k) + "," +
                          std::to_string(s_down) + ") fit neither pattern");
}

namespace {

bool is_standard_shape(const StructuredModule& S) {
    if (S.towers.size() != 3) return false;
    for (const auto& t : S.towers)
        if (t.step != 4 || t.kind != TowerKind::Plus) return false;
    auto links = S.links;
    std::sort(links.begin(), links.end());
    return links == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}};
}

}  // namespace

Feasibility feasibility_check(const GysinProblem& pb, const StructuredModule& S, std::optional<Window> w) {
    S.validate();
    if (!is_standard_shape(S))
        throw ValidationError("candidate must be a standard module (towers c,b,a linked c->b->a) plus boxes");
    Window win = w ? *w : window_for(pb, window_pad());
    Grading tb = pb.tower_base();
    if (!(S.towers[0].base - tb).is_integer())
        throw ValidationError("candidate lives in a different grading coset than M");

    Feasibility out;
    if (S.max_base() > win.hi - kStableSpan) {
        out.reason = "candidate not stabilized inside the window";
        out.failing_degree = S.max_base();
        return out;
    }
    Grading lo = std::min(win.lo, S.min_degree()) - 2;
    Grading hi = win.hi;
    DegreeMap s = rmod::dims(S, lo, hi);
    DegreeMap q = rmod::q_rank_profile(S, lo, hi + 1);
    DegreeMap m = rmod::dims(pb.M, lo, hi);

    Certificate& c = out.certificate;
    c.lo = lo;
    for (Grading k = lo; k <= hi; k += 1) {
        long sk = s[k], qk = q[k], qk1 = q[k + 1], mk = m[k];
        long ik = sk - qk1, pk = sk - qk;
        c.s.push_back(sk);
        c.q.push_back(qk);
        c.m.push_back(mk);
        c.i.push_back(ik);
        c.p.push_back(pk);
        if (!out.failing_degree && (ik < 0 || pk < 0 || mk != ik + pk)) {
            out.failing_degree = k;
            out.reason = ik < 0 || pk < 0 ? "negative rank" : "dimension mismatch at M";
        }
    }
    if (out.failing_degree) return out;
    // iota is V-equivariant and injective on the c-tower, so V kills nothing at the c bottom
    Grading cstart = S.towers[0].base;
    if (!(cstart - 4 < tb)) {
        out.failing_degree = cstart - 4;
        out.reason = "V-equivariance of iota fails below the c-tower";
        return out;
    }
    out.feasible = true;
    return out;
}

namespace {

struct StringChoice {
    long top;
    int len;
    long count;
};

struct Search {
    long lo, hi, base, tb;
    std::vector<long> m, t, qt, cov, qb;
    std::vector<StringChoice> chosen;
    std::vector<std::vector<StringChoice>> found;

    long idx(long z) const { return z - base; }

    void run(long z) {
        if (z < base) {
            found.push_back(chosen);
            return;
        }
        long q_up = qt[idx(z + 1)] + qb[idx(z + 1)];
        long fixed = 2 * (t[idx(z)] + cov[idx(z)]) - qt[idx(z)] - qb[idx(z)] - q_up;
        long R = m[idx(z)] - fixed;
        if (R < 0) return;
        bool may_start = z <= hi - kStableSpan && z >= lo;
        long max2 = (may_start && z - 1 >= lo) ? R : 0;
        long max3 = (may_start && z - 2 >= lo) ? R : 0;
        for (long n3 = 0; n3 <= max3; ++n3)
            for (long n2 = 0; n2 + n3 <= R && n2 <= max2; ++n2) {
                long rest = R - n2 - n3;
                if (rest % 2) continue;
                long n1 = rest / 2;
                if (n1 > 0 && !may_start) continue;
                long sk = t[idx(z)] + cov[idx(z)] + n1 + n2 + n3;
                long qk = qt[idx(z)] + qb[idx(z)] + n2 + n3;
                if (sk - q_up < 0 || sk - qk < 0) continue;
                apply(z, n1, n2, n3, +1);
                run(z - 1);
                apply(z, n1, n2, n3, -1);
            }
    }

    void apply(long z, long n1, long n2, long n3, int sign) {
        cov[idx(z)] += sign * (n1 + n2 + n3);
        qb[idx(z)] += sign * (n2 + n3);
        if (n2 + n3) {
            cov[idx(z - 1)] += sign * (n2 + n3);
            if (n3) {
                cov[idx(z - 2)] += sign * n3;
                qb[idx(z - 1)] += sign * n3;
            }
        }
        if (sign > 0) {
            for (auto [len, n] : {std::pair{1, n1}, std::pair{2, n2}, std::pair{3, n3}})
                if (n) chosen.push_back({z, len, n});
        } else {
            chosen.erase(std::remove_if(chosen.begin(), chosen.end(),
                                        [z](const StringChoice& s) { return s.top == z; }),
                         chosen.end());
        }
    }
};

}  // namespace

std::vector<GysinSolution> oracle_solve(const GysinProblem& pb, std::optional<int> pad) {
    Window win = window_for(pb, pad ? *pad : window_pad());
    Grading tb = pb.tower_base();
    Grading f = tb.frac();
    auto as_int = [&](const Grading& g) { return (g - f).to_int(); };

    Search base_search;
    base_search.lo = as_int(win.lo);
    base_search.hi = as_int(win.hi);
    base_search.tb = as_int(tb);
    base_search.base = base_search.lo - 6;
    long n = base_search.hi + 3 - base_search.base + 1;
    base_search.m.assign(n, 0);
    DegreeMap md = rmod::dims(pb.M, win.lo, win.hi);
    for (const auto& [deg, d] : md) base_search.m[base_search.idx(as_int(deg))] = static_cast<long>(d);

    std::vector<GysinSolution> sols;
    long lo = base_search.lo, hi = base_search.hi;
    for (long a = lo - 2; a <= hi; ++a)
        for (long b = a + 1; b >= lo - 2; b -= 4)
            for (long c = b + 1; c >= lo - 2; c -= 4) {
                if (!(c - 4 < base_search.tb)) continue;
                Search s = base_search;
                s.t.assign(n, 0);
                s.qt.assign(n, 0);
                s.cov.assign(n, 0);
                s.qb.assign(n, 0);
                for (long z = s.base; z < s.base + n; ++z) {
                    for (long st : {a, b, c}) s.t[s.idx(z)] += (z >= st && mod(z - st, 4) == 0);
                    for (auto [x, y] : {std::pair{c, b}, std::pair{b, a}})
                        s.qt[s.idx(z)] += (z >= x && mod(z - x, 4) == 0 && z - 1 >= y && mod(z - 1 - y, 4) == 0);
                }
                s.run(hi);
                for (const auto& choice : s.found) {
                    GysinSolution sol;
                    sol.towers = StandardModule::from_starts(Grading(c) + f, Grading(b) + f, Grading(a) + f);
                    for (const auto& ch : choice)
                        sol.boxes.push_back(Box{Grading(ch.top) + f, static_cast<std::size_t>(ch.count), ch.len});
                    std::sort(sol.boxes.begin(), sol.boxes.end(), [](const Box& x, const Box& y) {
                        return std::tie(y.deg, x.qlen) < std::tie(x.deg, y.qlen);
                    });
                    Feasibility fz = feasibility_check(pb, sol.module(), win);
                    if (!fz.feasible)
                        throw InternalError("oracle produced a candidate the certificate rejects: " + sol.str() +
                                            " (" + fz.reason + ")");
                    sol.certificate = fz.certificate;
                    sol.parity = classify_parity(rmod::dims(sol.module(), win.hi - 7, win.hi), pb.h());
                    sols.push_back(std::move(sol));
                }
            }
    if (sols.empty()) throw InfeasibleError("no feasible Gysin partner");
    std::sort(sols.begin(), sols.end(), [](const GysinSolution& x, const GysinSolution& y) {
        return std::tuple(y.towers.alpha(), y.towers.beta(), y.towers.gamma(), x.boxes.size()) <
               std::tuple(x.towers.alpha(), x.towers.beta(), x.towers.gamma(), y.boxes.size());
    });
    bool unique = sols.size() == 1;
    for (auto& s : sols) s.unique = unique;
    return sols;
}

std::optional<FamilyInput> family_of(const GysinProblem& pb) {
    Grading tb = pb.tower_base();
    std::optional<Grading> deg;
    std::size_t n = 0;
    for (const auto& b : pb.M.boxes) {
        if (b.dim == 0) continue;
        if (deg && *deg != b.deg) return std::nullopt;
        deg = b.deg;
        n += b.dim;
    }
    FamilyInput f{tb / 2, n, false};
    if (!deg || *deg == tb - 1) return f;
    if (*deg == tb) {
        f.second_form = true;
        return f;
    }
    return std::nullopt;
}

StructuredModule family_module(const FamilyInput& f) {
    StructuredModule m = rmod::u_tower(f.k * 2);
    if (f.n > 0) m.boxes.push_back(Box{f.second_form ? f.k * 2 : f.k * 2 - 1, f.n, 1});
    return m;
}

namespace {

FamilyInput require_family(const GysinProblem& pb) {
    auto f = family_of(pb);
    if (!f) throw ValidationError("input is not of the form T+_{2k} + F^n<2k-1> or T+_{2k} + F^n<2k>");
    return *f;
}

GysinSolution make_solution(StandardModule towers, Grading box_deg, std::size_t mult, Parity parity) {
    GysinSolution s;
    s.towers = towers;
    if (mult > 0) s.boxes.push_back(Box{box_deg, mult, 1});
    s.parity = parity;
    return s;
}

}  // namespace

GysinSolution closed_form_stated(const GysinProblem& pb) {
    FamilyInput f = require_family(pb);
    Grading k = f.k;
    std::size_t m = f.n / 2;
    bool odd = f.n % 2;
    if (!f.second_form) {
        Grading d = k * 2 - 1;
        if (!odd) return make_solution(StandardModule::make(k, k, k), d, m, Parity::Even);
        return make_solution(StandardModule::make(k + 1, k - 1, k - 1), d, m + 1, Parity::Odd);
    }
    Grading d = k * 2;
    if (odd) return make_solution(StandardModule::make(k, k, k), d, m + 1, Parity::Even);
    return make_solution(StandardModule::make(k + 1, k + 1, k - 1), d, m + 1, Parity::Odd);
}

GysinSolution closed_form_corrected(const GysinProblem& pb) {
    FamilyInput f = require_family(pb);
    Grading k = f.k;
    std::size_t m = f.n / 2;
    bool odd = f.n % 2;
    GysinSolution s;
    if (!f.second_form) {
        Grading d = k * 2 - 1;
        s = odd ? make_solution(StandardModule::make(k + 1, k - 1, k - 1), d, m, Parity::Odd)
                : make_solution(StandardModule::make(k, k, k), d, m, Parity::Even);
    } else {
        Grading d = k * 2;
        s = odd ? make_solution(StandardModule::make(k + 1, k + 1, k - 1), d, m, Parity::Odd)
                : make_solution(StandardModule::make(k, k, k), d, m, Parity::Even);
    }
    Window win = window_for(pb, window_pad());
    Feasibility fz = feasibility_check(pb, s.module(), win);
    if (!fz.feasible)
        throw InternalError("corrected closed form fails its certificate: " + s.str() + " (" + fz.reason + ")");
    s.certificate = fz.certificate;
    Parity p = classify_parity(rmod::dims(s.module(), win.hi - 7, win.hi), pb.h());
    if (p != s.parity) throw InternalError("corrected closed form parity label disagrees with its module");
    return s;
}

std::optional<StatedDiff> stated_vs_corrected(const GysinProblem& pb) {
    GysinSolution st = closed_form_stated(pb);
    GysinSolution co = closed_form_corrected(pb);
    if (st.towers == co.towers && st.boxes == co.boxes && st.parity == co.parity) return std::nullopt;
    StatedDiff d;
    d.kind = st.towers == co.towers ? "multiplicity" : "parity";
    d.stated = st.str() + " [" + to_string(st.parity) + "]";
    d.corrected = co.str() + " [" + to_string(co.parity) + "]";
    return d;
}

nlohmann::json to_json(const Certificate& c) {
    return {{"lo", rmod::rational_json(c.lo)}, {"s", c.s}, {"i", c.i}, {"p", c.p}, {"q", c.q}, {"m", c.m}};
}

nlohmann::json to_json(const GysinSolution& s) {
    return {{"correction_terms", rmod::to_json(rmod::correction_terms_of(s.towers))},
            {"module", rmod::to_json(s.module())},
            {"parity", to_string(s.parity)},
            {"unique", s.unique},
            {"summary", s.str()},
            {"certificate", to_json(s.certificate)}};
}

}  // namespace p2f::gysin
