#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "p2f/rational.hpp"

namespace p2f::rmod {

constexpr int V_CUTOFF = 64;

// Element of F[[V]][Q]/(Q^3) truncated above V^V_CUTOFF.
class RingElement {
public:
    static RingElement zero() { return {}; }
    static RingElement one() { return monomial(0, 0); }
    static RingElement monomial(int q, int v);

    static int monomial_degree(int q, int v) { return -q - 4 * v; }

    bool coeff(int q, int v) const { return c_[q][v]; }
    bool is_zero() const;
    friend RingElement operator+(const RingElement& a, const RingElement& b);
    friend RingElement operator*(const RingElement& a, const RingElement& b);
    friend bool operator==(const RingElement& a, const RingElement& b) { return a.c_ == b.c_; }

    // terms as (q, v), ordered by q then v
    std::vector<std::pair<int, int>> terms() const;
    // "0", "1", "Q^2 V^1", "1 + V^2"
    std::string str() const;

private:
    std::array<std::bitset<V_CUTOFF + 1>, 3> c_{};
};

RingElement ring_mul(const RingElement& x, const RingElement& y);

enum class TowerKind { Plus, Bar };

struct Tower {
    Grading base;
    int step = 4;  // 4 for V-towers, 2 for U-towers
    TowerKind kind = TowerKind::Plus;
    friend bool operator==(const Tower&, const Tower&) = default;
};

// A Q-string F[Q]/Q^qlen occupying deg, deg-1, ..., deg-qlen+1, repeated dim times.
// qlen 1 is an ordinary box with zero Q action.
struct Box {
    Grading deg;
    std::size_t dim = 1;
    int qlen = 1;
    friend bool operator==(const Box&, const Box&) = default;
};

struct StructuredModule {
    std::vector<Tower> towers;
    std::vector<Box> boxes;
    std::vector<std::pair<std::size_t, std::size_t>> links;  // source tower -> target tower

    void validate() const;
    bool has_bar_towers() const;
    // smallest populated degree; throws WindowError for two-sided towers
    Grading min_degree() const;
    Grading max_base() const;
};

StructuredModule u_tower(Grading d);  // T+_d
StructuredModule v_tower(Grading d);  // V+_d
StructuredModule direct_sum(const StructuredModule& a, const StructuredModule& b);

using DegreeMap = std::map<Grading, std::size_t>;

DegreeMap dims(const StructuredModule& m, Grading lo, Grading hi);
// rank of Q from degree k to k-1
DegreeMap q_rank_profile(const StructuredModule& m, Grading lo, Grading hi);
// rank of Q^power from degree k to k-power
DegreeMap q_power_rank(const StructuredModule& m, int power, Grading lo, Grading hi);

struct CorrectionTerms {
    Grading alpha, beta, gamma;
    void validate() const;
    std::string str() const;
    friend bool operator==(const CorrectionTerms&, const CorrectionTerms&) = default;
};

class StandardModule {
public:
    // S+_{alpha,beta,gamma}; requires alpha >= beta >= gamma with even integer gaps
    static StandardModule make(Grading alpha, Grading beta, Grading gamma);
    // from tower starts (c, b, a) = (2gamma+2, 2beta+1, 2alpha)
    static StandardModule from_starts(Grading c, Grading b, Grading a);

    Grading alpha() const { return alpha_; }
    Grading beta() const { return beta_; }
    Grading gamma() const { return gamma_; }
    Grading a() const { return alpha_ * 2; }
    Grading b() const { return beta_ * 2 + 1; }
    Grading c() const { return gamma_ * 2 + 2; }

    // towers ordered (c, b, a) with links c->b->a
    StructuredModule module(const std::vector<Box>& boxes = {}) const;
    std::string str() const;
    friend bool operator==(const StandardModule&, const StandardModule&) = default;

private:
    Grading alpha_, beta_, gamma_;
};

CorrectionTerms correction_terms_of(const StandardModule& s);
CorrectionTerms reverse_orientation(const CorrectionTerms& ct);

nlohmann::json to_json(const StructuredModule& m);
StructuredModule module_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CorrectionTerms& ct);
nlohmann::json rational_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

}  // namespace p2f::rmod
