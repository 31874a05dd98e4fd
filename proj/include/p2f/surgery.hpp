#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "p2f/gysin.hpp"
#include "p2f/rmodules.hpp"

namespace p2f::surgery {

using rmod::CorrectionTerms;
using rmod::StandardModule;
using rmod::StructuredModule;

struct KnotData {
    std::string name;
    std::vector<long> alexander;  // a_0 .. a_g of the symmetrized polynomial
    long signature = 0;
    std::optional<int> arf;
    bool mirrored = false;  // set by validate_knot when sigma > 0 was flipped
};

KnotData unknot();
KnotData torus_knot_2(long n);  // T(2, 2n+1)
KnotData figure_eight();
KnotData connected_sum(const KnotData& a, const KnotData& b);

int arf_from_alexander(const std::vector<long>& a);
KnotData validate_knot(KnotData k);

long torsion_coefficient(const KnotData& k, long s);
long delta_bound(long sigma, long s);
long b_coefficient(const KnotData& k, long s);

// spin-c level s > 0 of the zero surgery; degrees known only mod 2
struct ParityOnlyLevel {
    long s = 0;
    long b = 0;           // F^b in degree parity box_parity
    long delta = 0;       // F[U]/U^delta in odd degree
    int box_parity = 0;
};

struct ZeroSurgeryModules {
    StructuredModule s0;
    std::vector<ParityOnlyLevel> higher;
};
ZeroSurgeryModules hm_zero_surgery(const KnotData& k);

struct PlusOneHM {
    StructuredModule self_conjugate;  // T+_{-2delta} + F^{b0}<sigma/2-1>
    std::vector<ParityOnlyLevel> conjugate_pairs;  // Q-split, never affect towers
};
PlusOneHM hm_plus_one_surgery(const KnotData& k);
gysin::GysinSolution hs_plus_one_surgery(const KnotData& k);

CorrectionTerms table_correction_terms(long sigma, int arf, int n);

struct CorrectionReport {
    CorrectionTerms terms;
    CorrectionTerms table;
    std::optional<CorrectionTerms> pipeline;
    bool agree = true;
    bool mirrored = false;
    std::string provenance;
};
CorrectionReport correction_terms(const KnotData& k, int n);

// i_* images of bar groups as V-tower starts plus Q-links
struct BarTowers {
    std::vector<Grading> bases;
    std::vector<std::pair<std::size_t, std::size_t>> links;
    StructuredModule module() const;
};
BarTowers zero_surgery_bar_towers(const StandardModule& hs_plus_one, int arf);
StandardModule minus_one_towers(const BarTowers& bars, int arf);

rmod::RingElement blowup_coefficient(long k);
bool seifert_obstruction(const CorrectionTerms& ct);

struct CobordismCheck {
    bool pass = true;
    std::string violated;
};
CobordismCheck spin_cobordism_check(const CorrectionTerms& ct0, const CorrectionTerms& ct1, int b2plus,
                                    long b2minus);

struct CatalogEntry {
    std::string name;
    StructuredModule hm;
    StructuredModule hs;
    std::optional<CorrectionTerms> correction;
    // hm is the input for the reversed manifold; compare towers after reverse_orientation
    bool hm_reversed = false;
    std::string note;
};
CatalogEntry catalog(const std::string& name);
std::vector<std::string> catalog_names();

nlohmann::json to_json(const KnotData& k);
nlohmann::json to_json(const CorrectionReport& r);
nlohmann::json to_json(const BarTowers& b);

}  // namespace p2f::surgery
