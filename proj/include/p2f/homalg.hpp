#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "p2f/f2la.hpp"

namespace p2f::homalg {

using f2la::BitVector;
using f2la::F2Matrix;

using Dims = std::map<int, std::size_t>;
std::size_t dim_at(const Dims& d, int k);
Dims clean(Dims d);  // drops zero entries

// Linear map of graded spaces; block k sends src_k to tgt_{k+shift}.
struct GradedMap {
    Dims src, tgt;
    int shift = 0;
    std::map<int, F2Matrix> blocks;

    static GradedMap zero(const Dims& src, const Dims& tgt, int shift);
    static GradedMap identity(const Dims& d);
    F2Matrix block(int k) const;
    void set_block(int k, const F2Matrix& m);  // checks the shape
    bool is_zero() const;
};

GradedMap compose(const GradedMap& g, const GradedMap& f);  // g after f
GradedMap operator+(const GradedMap& a, const GradedMap& b);

class GradedComplex {
public:
    GradedComplex() = default;
    // d maps degree k to k-1; d^2 = 0 is checked here
    GradedComplex(Dims dims, std::map<int, F2Matrix> d);

    const Dims& dims() const { return dims_; }
    std::size_t dim(int k) const { return dim_at(dims_, k); }
    F2Matrix d(int k) const { return d_.block(k); }
    const GradedMap& differential() const { return d_; }
    std::vector<int> degrees() const;
    std::size_t total_dim() const;

private:
    Dims dims_;
    GradedMap d_{{}, {}, -1, {}};
};

struct ChainMap {
    GradedComplex source, target;
    GradedMap map;

    // verifies f d = d f in every degree
    static ChainMap make(const GradedComplex& s, const GradedComplex& t, const GradedMap& f);
};

struct Homotopy {
    GradedComplex source, target;
    GradedMap map;

    static Homotopy make(const GradedComplex& s, const GradedComplex& t, const GradedMap& h);
};

// first degree where f d != d f, or nullopt
std::optional<int> chain_map_defect(const GradedComplex& s, const GradedComplex& t, const GradedMap& f);

class HomologyData {
public:
    Dims dims;
    std::map<int, std::vector<BitVector>> reps;

    // coordinates of a cycle of degree k in the basis reps[k]
    BitVector coords(int k, const BitVector& cycle) const;
    std::size_t total() const;

private:
    std::map<int, F2Matrix> solve_;  // columns: boundary basis, then reps
    std::map<int, std::size_t> nboundary_;
    friend HomologyData homology(const GradedComplex& c);
};

HomologyData homology(const GradedComplex& c);
// matrix of the map induced on homology, per source degree
GradedMap induced(const GradedMap& f, const HomologyData& hs, const HomologyData& ht);

struct Cone {
    GradedComplex complex;
    ChainMap inclusion;   // C2 -> cone
    ChainMap projection;  // cone -> C1, degree -1
};
// cone_n = C2_n + C1_{n-1}, d = [[d2, f1], [0, d1]]
Cone mapping_cone(const ChainMap& f);

// C_n = C3_n + C2_{n-1} + C1_{n-2}, d = [[d3, f2, H1], [0, d2, f1], [0, 0, d1]]
GradedComplex iterated_mapping_cone(const ChainMap& f1, const ChainMap& f2, const Homotopy& h1);

struct TriangleMaps {
    Dims A, B, C;
    GradedMap ab, bc, ca;
};

struct TriangleCheck {
    bool exact = true;
    std::string vertex;
    int degree = 0;
    std::string detail;
};
TriangleCheck check_exact_triangle(const TriangleMaps& t);

struct TriangleResult {
    bool acyclic = false;
    Dims cone_homology;  // of the iterated cone
    TriangleMaps triangle;  // H(C1) -> H(C2) -> H(C3) -> H(C1), the last of degree -1
};
TriangleResult triangle_detect(const ChainMap& f1, const ChainMap& f2, const Homotopy& h1);

// one summand of a block complex: the complex in degree n holds parts[i] in degree n + offset[i]
struct BlockEntry {
    std::size_t from, to;
    GradedMap map;
};
GradedComplex block_complex(const std::vector<Dims>& parts, const std::vector<int>& offsets,
                            const std::vector<BlockEntry>& entries, const std::string& name = "complex");
GradedMap block_map(const std::vector<Dims>& src_parts, const std::vector<int>& src_offsets,
                    const std::vector<Dims>& tgt_parts, const std::vector<int>& tgt_offsets, int shift,
                    const std::vector<BlockEntry>& entries);

struct MonopoleParts {
    Dims o, s, u;
    // superscript is the source: d_o_s maps C^o to C^s
    GradedMap d_o_o, d_o_s, d_u_o, d_u_s;       // degree -1
    GradedMap bar_s_s, bar_u_u;                 // degree -1
    GradedMap bar_s_u;                          // degree 0
    GradedMap bar_u_s;                          // degree -2

    static MonopoleParts zero(const Dims& o, const Dims& s, const Dims& u);
};
struct MonopoleComplexes {
    GradedComplex to, from, bar;  // check, hat, bar
};
MonopoleComplexes assemble_monopole_complexes(const MonopoleParts& p);

// [[V2, H], [0, V1]] on the cone of f1; H has degree shift(V) + 1
ChainMap cone_module_action(const ChainMap& f1, const ChainMap& v1, const ChainMap& v2, const Homotopy& hmix);
// [[V3, H2, G1], [0, V2, H1], [0, 0, V1]] on the iterated cone
ChainMap iterated_cone_module_action(const ChainMap& f1, const ChainMap& f2, const Homotopy& h1, const ChainMap& v1,
                                     const ChainMap& v2, const ChainMap& v3, const Homotopy& hmix1,
                                     const Homotopy& hmix2, const Homotopy& g1);

// all H with d_t H + H d_s = rhs, or nullopt; H has degree rhs.shift + 1
std::optional<GradedMap> solve_homotopy(const GradedComplex& s, const GradedComplex& t, const GradedMap& rhs);
// basis of the space of chain maps of the given degree
std::vector<GradedMap> chain_map_basis(const GradedComplex& s, const GradedComplex& t, int shift);

struct FilteredComplex {
    GradedComplex complex;
    std::map<int, std::vector<int>> level;  // filtration level of each basis element

    static FilteredComplex make(const GradedComplex& c, std::map<int, std::vector<int>> level);
};

struct SpectralPages {
    // pages[r][(p, k)] = dim E^r_p in total degree k
    std::vector<std::map<std::pair<int, int>, std::size_t>> pages;
    std::map<std::pair<int, int>, std::size_t> infinity;
    std::size_t stable_from = 0;  // first r with E^r = E^infinity
    std::size_t total(std::size_t r) const;
    Dims by_degree(std::size_t r) const;
};
SpectralPages filtered_pages(const FilteredComplex& fc, std::size_t r_max);

// Cone of the identity on the iterated cone of t, with one filtration level per block:
// C'3, C'2, C'1, C3, C2, C1 at levels 0..5. Diagonal maps are identities, all other
// off-diagonal corrections vanish.
FilteredComplex diagonal_iso_model(const ChainMap& f1, const ChainMap& f2, const Homotopy& h1);

// random generators used by property tests and the CLI demo
struct Random {
    std::mt19937_64 rng;
    explicit Random(std::uint64_t seed) : rng(seed) {}
    bool coin(double p = 0.5);
    std::size_t below(std::size_t n);
};
GradedComplex random_complex(Random& r, int lo, int hi, std::size_t max_dim);
F2Matrix random_invertible(Random& r, std::size_t n);
ChainMap random_chain_map(Random& r, const GradedComplex& s, const GradedComplex& t);
// conjugate by a random automorphism in every degree
struct Conjugated {
    GradedComplex complex;
    GradedMap to, from;  // chain isomorphisms old -> new and back
};
Conjugated random_conjugate(Random& r, const GradedComplex& c);
FilteredComplex random_filtered_complex(Random& r, int levels, std::size_t max_total);

struct Triple {
    ChainMap f1, f2;
    Homotopy h1;
};
// random f1, f2 with H1 solved for; nullopt when f2 f1 is not nullhomotopic
std::optional<Triple> random_admissible_triple(Random& r, int lo, int hi, std::size_t max_dim);
// C3 is a conjugate of cone(f1), so the iterated cone is acyclic
Triple random_exact_triple(Random& r, int lo, int hi, std::size_t max_dim);

nlohmann::json to_json(const GradedComplex& c);
GradedComplex complex_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GradedMap& m);
GradedMap map_from_json(const nlohmann::json& j, const Dims& src, const Dims& tgt, int shift);
nlohmann::json to_json(const Dims& d);

}  // namespace p2f::homalg
