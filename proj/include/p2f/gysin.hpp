#pragma once

#include <optional>
#include <string>
#include <vector>

#include "p2f/rmodules.hpp"

namespace p2f::gysin {

enum class Parity { Even, Odd };
std::string to_string(Parity p);

// HM-side input: one U-tower (step 2) plus boxes with zero Q action.
struct GysinProblem {
    rmod::StructuredModule M;

    static GysinProblem make(const rmod::StructuredModule& m);
    Grading tower_base() const;  // 2h(M)
    Grading h() const { return tower_base() / 2; }
};

struct Certificate {
    Grading lo;  // degree of index 0
    std::vector<long> s, i, p, q, m;

    std::size_t size() const { return s.size(); }
    // checks the three exactness relations and non-negativity
    bool consistent() const;
};

struct GysinSolution {
    rmod::StandardModule towers = rmod::StandardModule::make(0, 0, 0);
    std::vector<rmod::Box> boxes;
    Parity parity = Parity::Even;
    Certificate certificate;
    bool unique = false;

    rmod::StructuredModule module() const { return towers.module(boxes); }
    // total box dimension by degree, ignoring how Q strings group them
    rmod::DegreeMap finite_dims() const;
    std::string str() const;
};

struct Window {
    Grading lo, hi;
};

// default pad 12, overridden by P2F_WINDOW_PAD
int window_pad();
Window window_for(const GysinProblem& pb, int pad);

Parity classify_parity(const rmod::DegreeMap& sdims, Grading h);

enum class Increase { Increasing, Decreasing };
Increase increase_classify(long s_up, long s_k, long s_down, long m_k);

struct Feasibility {
    bool feasible = false;
    Certificate certificate;
    std::optional<Grading> failing_degree;
    std::string reason;
};

// S must be a standard module (towers c, b, a with links) plus boxes / Q-strings
Feasibility feasibility_check(const GysinProblem& pb, const rmod::StructuredModule& S,
                              std::optional<Window> w = std::nullopt);

std::vector<GysinSolution> oracle_solve(const GysinProblem& pb, std::optional<int> pad = std::nullopt);

// T+_{2k} + F^n<2k-1> (first form) or T+_{2k} + F^n<2k> (second form)
struct FamilyInput {
    Grading k;
    std::size_t n = 0;
    bool second_form = false;
};
std::optional<FamilyInput> family_of(const GysinProblem& pb);
rmod::StructuredModule family_module(const FamilyInput& f);

GysinSolution closed_form_stated(const GysinProblem& pb);
GysinSolution closed_form_corrected(const GysinProblem& pb);

struct StatedDiff {
    std::string kind;  // "multiplicity" or "parity"
    std::string stated, corrected;
};
std::optional<StatedDiff> stated_vs_corrected(const GysinProblem& pb);

nlohmann::json to_json(const GysinSolution& s);
nlohmann::json to_json(const Certificate& c);

}  // namespace p2f::gysin
