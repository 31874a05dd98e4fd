#include "p2f/homalg.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "p2f/errors.hpp"

namespace p2f::homalg {

std::size_t dim_at(const Dims& d, int k) {
    auto it = d.find(k);
    return it == d.end() ? 0 : it->second;
}

Dims clean(Dims d) {
    for (auto it = d.begin(); it != d.end();)
        it = it->second == 0 ? d.erase(it) : std::next(it);
    return d;
}

namespace {

std::string matrix_str(const F2Matrix& m) {
    std::string s = "[";
    for (std::size_t r = 0; r < m.rows(); ++r) s += (r ? "," : "") + m.row(r).str();
    return s + "]";
}

void require_same(const Dims& a, const Dims& b, const std::string& what) {
    if (clean(a) != clean(b)) throw ContractError(what + ": graded dimensions do not match");
}

}  // namespace

GradedMap GradedMap::zero(const Dims& src, const Dims& tgt, int shift) {
    GradedMap m;
    m.src = clean(src);
    m.tgt = clean(tgt);
    m.shift = shift;
    return m;
}

GradedMap GradedMap::identity(const Dims& d) {
    GradedMap m = zero(d, d, 0);
    for (auto [k, n] : m.src) m.blocks[k] = F2Matrix::identity(n);
    return m;
}

F2Matrix GradedMap::block(int k) const {
    auto it = blocks.find(k);
    if (it != blocks.end()) return it->second;
    return F2Matrix(dim_at(tgt, k + shift), dim_at(src, k));
}

void GradedMap::set_block(int k, const F2Matrix& m) {
    if (m.rows() != dim_at(tgt, k + shift) || m.cols() != dim_at(src, k))
        throw ContractError("block at degree " + std::to_string(k) + " has shape " + m.shape() + ", expected " +
                            std::to_string(dim_at(tgt, k + shift)) + "x" + std::to_string(dim_at(src, k)));
    if (m.rows() == 0 || m.cols() == 0) {
        blocks.erase(k);
        return;
    }
    blocks[k] = m;
}

bool GradedMap::is_zero() const {
    return std::all_of(blocks.begin(), blocks.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

GradedMap compose(const GradedMap& g, const GradedMap& f) {
    require_same(g.src, f.tgt, "compose");
    GradedMap out = GradedMap::zero(f.src, g.tgt, f.shift + g.shift);
    for (auto [k, n] : out.src) {
        (void)n;
        out.set_block(k, f2la::compose(g.block(k + f.shift), f.block(k)));
    }
    return out;
}

GradedMap operator+(const GradedMap& a, const GradedMap& b) {
    require_same(a.src, b.src, "sum of maps");
    require_same(a.tgt, b.tgt, "sum of maps");
    if (a.shift != b.shift) throw ContractError("sum of maps with different degrees");
    GradedMap out = GradedMap::zero(a.src, a.tgt, a.shift);
    for (auto [k, n] : out.src) {
        (void)n;
        out.set_block(k, a.block(k) + b.block(k));
    }
    return out;
}

GradedComplex::GradedComplex(Dims dims, std::map<int, F2Matrix> diff) : dims_(clean(std::move(dims))) {
    d_ = GradedMap::zero(dims_, dims_, -1);
    for (const auto& [k, m] : diff) d_.set_block(k, m);
    for (auto [k, n] : dims_) {
        (void)n;
        if (!f2la::compose(d(k - 1), d(k)).is_zero())
            throw ValidationError("d^2 != 0 at degree " + std::to_string(k));
    }
}

std::vector<int> GradedComplex::degrees() const {
    std::vector<int> out;
    for (auto [k, n] : dims_) out.push_back(k);
    return out;
}

std::size_t GradedComplex::total_dim() const {
    std::size_t t = 0;
    for (auto [k, n] : dims_) t += n;
    return t;
}

std::optional<int> chain_map_defect(const GradedComplex& s, const GradedComplex& t, const GradedMap& f) {
    require_same(f.src, s.dims(), "chain map source");
    require_same(f.tgt, t.dims(), "chain map target");
    std::set<int> ks;
    for (int k : s.degrees()) {
        ks.insert(k);
        ks.insert(k + 1);
    }
    for (int k : ks) {
        F2Matrix lhs = f2la::compose(f.block(k - 1), s.d(k));
        F2Matrix rhs = f2la::compose(t.d(k + f.shift), f.block(k));
        if (!(lhs + rhs).is_zero()) return k;
    }
    return std::nullopt;
}

ChainMap ChainMap::make(const GradedComplex& s, const GradedComplex& t, const GradedMap& f) {
    if (auto k = chain_map_defect(s, t, f)) {
        F2Matrix res = f2la::compose(f.block(*k - 1), s.d(*k)) + f2la::compose(t.d(*k + f.shift), f.block(*k));
        throw ValidationError("chain map identity fails at degree " + std::to_string(*k) + ", residual " +
                              matrix_str(res));
    }
    return {s, t, f};
}

Homotopy Homotopy::make(const GradedComplex& s, const GradedComplex& t, const GradedMap& h) {
    require_same(h.src, s.dims(), "homotopy source");
    require_same(h.tgt, t.dims(), "homotopy target");
    return {s, t, h};
}

BitVector HomologyData::coords(int k, const BitVector& cycle) const {
    auto it = solve_.find(k);
    if (it == solve_.end()) {
        if (cycle.any()) throw ContractError("nonzero chain in a degree with no cycles");
        return BitVector(0);
    }
    auto x = f2la::image_membership(it->second, cycle);
    if (!x) throw ContractError("vector of degree " + std::to_string(k) + " is not a cycle");
    std::size_t nb = nboundary_.at(k);
    return x->slice(nb, x->size() - nb);
}

std::size_t HomologyData::total() const {
    std::size_t t = 0;
    for (auto [k, n] : dims) t += n;
    return t;
}

HomologyData homology(const GradedComplex& c) {
    HomologyData h;
    for (int k : c.degrees()) {
        std::size_t n = c.dim(k);
        f2la::Span span(n);
        F2Matrix above = c.d(k + 1);
        for (std::size_t j = 0; j < above.cols(); ++j) span.add(above.column(j));
        std::vector<BitVector> cols = span.basis();
        std::size_t nb = cols.size();
        std::vector<BitVector> reps;
        for (const auto& z : f2la::kernel_basis(c.d(k)))
            if (span.add(z)) reps.push_back(z);
        cols.insert(cols.end(), reps.begin(), reps.end());
        h.solve_[k] = F2Matrix::from_columns(cols, n);
        h.nboundary_[k] = nb;
        if (!reps.empty()) {
            h.dims[k] = reps.size();
            h.reps[k] = std::move(reps);
        }
    }
    return h;
}

GradedMap induced(const GradedMap& f, const HomologyData& hs, const HomologyData& ht) {
    GradedMap out = GradedMap::zero(hs.dims, ht.dims, f.shift);
    for (const auto& [k, reps] : hs.reps) {
        F2Matrix fk = f.block(k);
        std::vector<BitVector> cols;
        for (const auto& r : reps) cols.push_back(ht.coords(k + f.shift, fk.apply(r)));
        out.set_block(k, F2Matrix::from_columns(cols, dim_at(ht.dims, k + f.shift)));
    }
    return out;
}

namespace {

// degree n of the block complex holds parts[i] in degree n + offset[i]
struct Layout {
    std::map<int, std::vector<std::size_t>> start;  // per degree, row offset of each part
    Dims dims;
};

Layout layout(const std::vector<Dims>& parts, const std::vector<int>& offsets) {
    if (parts.size() != offsets.size()) throw ContractError("block layout: parts and offsets differ in length");
    std::set<int> degrees;
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (auto [j, n] : parts[i])
            if (n) degrees.insert(j - offsets[i]);
    Layout l;
    for (int n : degrees) {
        std::size_t acc = 0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            l.start[n].push_back(acc);
            acc += dim_at(parts[i], n + offsets[i]);
        }
        l.dims[n] = acc;
    }
    return l;
}

std::size_t start_of(const Layout& l, int n, std::size_t part) {
    auto it = l.start.find(n);
    return it == l.start.end() ? 0 : it->second[part];
}

GradedMap assemble_map(const std::vector<Dims>& sp, const std::vector<int>& so, const std::vector<Dims>& tp,
                       const std::vector<int>& to, int shift, const std::vector<BlockEntry>& entries) {
    Layout ls = layout(sp, so), lt = layout(tp, to);
    GradedMap out = GradedMap::zero(ls.dims, lt.dims, shift);
    std::map<int, F2Matrix> acc;
    for (auto [n, d] : out.src) acc[n] = F2Matrix(dim_at(out.tgt, n + shift), d);
    for (const auto& e : entries) {
        if (e.from >= sp.size() || e.to >= tp.size()) throw ContractError("block entry out of range");
        int need = shift + to[e.to] - so[e.from];
        if (e.map.shift != need)
            throw ContractError("block entry " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                                " has degree " + std::to_string(e.map.shift) + ", expected " + std::to_string(need));
        require_same(e.map.src, sp[e.from], "block entry source");
        require_same(e.map.tgt, tp[e.to], "block entry target");
        for (auto& [n, m] : acc) {
            F2Matrix b = e.map.block(n + so[e.from]);
            if (b.rows() == 0 || b.cols() == 0) continue;
            m.paste(b, start_of(lt, n + shift, e.to), start_of(ls, n, e.from));
        }
    }
    for (auto& [n, m] : acc) out.set_block(n, m);
    return out;
}

}  // namespace

GradedComplex block_complex(const std::vector<Dims>& parts, const std::vector<int>& offsets,
                            const std::vector<BlockEntry>& entries, const std::string& name) {
    GradedMap d = assemble_map(parts, offsets, parts, offsets, -1, entries);
    try {
        return GradedComplex(d.src, d.blocks);
    } catch (const ValidationError& e) {
        throw ValidationError(name + ": " + e.what());
    }
}

GradedMap block_map(const std::vector<Dims>& src_parts, const std::vector<int>& src_offsets,
                    const std::vector<Dims>& tgt_parts, const std::vector<int>& tgt_offsets, int shift,
                    const std::vector<BlockEntry>& entries) {
    return assemble_map(src_parts, src_offsets, tgt_parts, tgt_offsets, shift, entries);
}

Cone mapping_cone(const ChainMap& f) {
    if (f.map.shift != 0) throw ContractError("mapping cone needs a degree 0 chain map");
    if (auto k = chain_map_defect(f.source, f.target, f.map))
        throw ValidationError("mapping cone: chain map identity fails at degree " + std::to_string(*k));
    const auto& c1 = f.source;
    const auto& c2 = f.target;
    std::vector<Dims> parts = {c2.dims(), c1.dims()};
    std::vector<int> offs = {0, -1};
    GradedComplex cone = block_complex(
        parts, offs, {{0, 0, c2.differential()}, {1, 1, c1.differential()}, {1, 0, f.map}}, "mapping cone");
    GradedMap inc = block_map({c2.dims()}, {0}, parts, offs, 0, {{0, 0, GradedMap::identity(c2.dims())}});
    GradedMap proj = block_map(parts, offs, {c1.dims()}, {0}, -1, {{1, 0, GradedMap::identity(c1.dims())}});
    return {cone, ChainMap::make(c2, cone, inc), ChainMap::make(cone, c1, proj)};
}

namespace {

void check_triple(const ChainMap& f1, const ChainMap& f2, const Homotopy& h1) {
    if (f1.map.shift != 0 || f2.map.shift != 0) throw ContractError("f1 and f2 must have degree 0");
    if (h1.map.shift != 1) throw ContractError("H1 must have degree +1");
    require_same(f1.target.dims(), f2.source.dims(), "f1 target vs f2 source");
    require_same(h1.source.dims(), f1.source.dims(), "H1 source vs C1");
    require_same(h1.target.dims(), f2.target.dims(), "H1 target vs C3");
    const auto& c1 = f1.source;
    const auto& c3 = f2.target;
    GradedMap ff = compose(f2.map, f1.map);
    for (int k : c1.degrees()) {
        F2Matrix res = f2la::compose(c3.d(k + 1), h1.map.block(k)) + f2la::compose(h1.map.block(k - 1), c1.d(k)) +
                       ff.block(k);
        if (!res.is_zero())
            throw ValidationError("nullhomotopy identity fails at degree " + std::to_string(k) + ", residual " +
                                  matrix_str(res));
    }
}

}  // namespace

GradedComplex iterated_mapping_cone(const ChainMap& f1, const ChainMap& f2, const Homotopy& h1) {
    check_triple(f1, f2, h1);
    const auto& c1 = f1.source;
    const auto& c2 = f1.target;
    const auto& c3 = f2.target;
    return block_complex({c3.dims(), c2.dims(), c1.dims()}, {0, -1, -2},
                         {{0, 0, c3.differential()},
                          {1, 1, c2.differential()},
                          {2, 2, c1.differential()},
                          {1, 0, f2.map},
                          {2, 0, h1.map},
                          {2, 1, f1.map}},
                         "iterated mapping cone");
}

TriangleCheck check_exact_triangle(const TriangleMaps& t) {
    struct Vertex {
        const char* name;
        const Dims* space;
        const GradedMap* in;
        const GradedMap* out;
    };
    const Vertex vs[] = {{"A", &t.A, &t.ca, &t.ab}, {"B", &t.B, &t.ab, &t.bc}, {"C", &t.C, &t.bc, &t.ca}};
    require_same(t.ab.src, t.A, "triangle A");
    require_same(t.bc.src, t.B, "triangle B");
    require_same(t.ca.src, t.C, "triangle C");
    for (const auto& v : vs) {
        for (auto [k, n] : clean(*v.space)) {
            F2Matrix g = v.in->block(k - v.in->shift);
            F2Matrix h = v.out->block(k);
            if (!f2la::compose(h, g).is_zero())
                return {false, v.name, k, "image of incoming map not contained in kernel of outgoing map"};
            std::size_t ker = n - f2la::rank(h), im = f2la::rank(g);
            if (ker != im)
                return {false, v.name, k,
                        "dim ker = " + std::to_string(ker) + " but dim im = " + std::to_string(im)};
        }
    }
    return {};
}

TriangleResult triangle_detect(const ChainMap& f1, const ChainMap& f2, const Homotopy& h1) {
    TriangleResult out;
    GradedComplex big = iterated_mapping_cone(f1, f2, h1);
    HomologyData hbig = homology(big);
    out.cone_homology = hbig.dims;
    if (hbig.total() != 0) return out;
    out.acyclic = true;

    const auto& c1 = f1.source;
    const auto& c2 = f1.target;
    const auto& c3 = f2.target;
    Cone cone = mapping_cone(f1);
    GradedMap delta = block_map({c2.dims(), c1.dims()}, {0, -1}, {c3.dims()}, {0}, 0,
                                {{0, 0, f2.map}, {1, 0, h1.map}});
    ChainMap dmap = ChainMap::make(cone.complex, c3, delta);

    HomologyData hm = homology(cone.complex), h1d = homology(c1), h2d = homology(c2), h3d = homology(c3);
    GradedMap dstar = induced(dmap.map, hm, h3d);
    GradedMap dinv = GradedMap::zero(h3d.dims, hm.dims, 0);
    std::set<int> ks;
    for (auto [k, n] : hm.dims) ks.insert(k);
    for (auto [k, n] : h3d.dims) ks.insert(k);
    for (int k : ks) {
        std::optional<F2Matrix> inv;
        if (dim_at(hm.dims, k) == dim_at(h3d.dims, k)) inv = f2la::inverse(dstar.block(k));
        if (!inv)
            throw InternalError("connecting map is not an isomorphism at degree " + std::to_string(k) +
                                " although the iterated cone is acyclic");
        dinv.set_block(k, *inv);
    }
    GradedMap pstar = induced(cone.projection.map, hm, h1d);
    out.triangle = {h1d.dims, h2d.dims, h3d.dims, induced(f1.map, h1d, h2d), induced(f2.map, h2d, h3d),
                    compose(pstar, dinv)};
    return out;
}

namespace {

void require_degree(const GradedMap& m, int shift, const std::string& name) {
    if (m.shift != shift)
        throw ContractError(name + " must have degree " + std::to_string(shift) + ", got " + std::to_string(m.shift));
}

}  // namespace

MonopoleParts MonopoleParts::zero(const Dims& o, const Dims& s, const Dims& u) {
    MonopoleParts p;
    p.o = clean(o);
    p.s = clean(s);
    p.u = clean(u);
    p.d_o_o = GradedMap::zero(o, o, -1);
    p.d_o_s = GradedMap::zero(o, s, -1);
    p.d_u_o = GradedMap::zero(u, o, -1);
    p.d_u_s = GradedMap::zero(u, s, -1);
    p.bar_s_s = GradedMap::zero(s, s, -1);
    p.bar_u_u = GradedMap::zero(u, u, -1);
    p.bar_s_u = GradedMap::zero(s, u, 0);
    p.bar_u_s = GradedMap::zero(u, s, -2);
    return p;
}

MonopoleComplexes assemble_monopole_complexes(const MonopoleParts& p) {
    require_degree(p.d_o_o, -1, "d_o_o");
    require_degree(p.d_o_s, -1, "d_o_s");
    require_degree(p.d_u_o, -1, "d_u_o");
    require_degree(p.d_u_s, -1, "d_u_s");
    require_degree(p.bar_s_s, -1, "bar_s_s");
    require_degree(p.bar_u_u, -1, "bar_u_u");
    require_degree(p.bar_s_u, 0, "bar_s_u");
    require_degree(p.bar_u_s, -2, "bar_u_s");
    MonopoleComplexes out;
    out.to = block_complex({p.o, p.s}, {0, 0},
                           {{0, 0, p.d_o_o},
                            {0, 1, p.d_o_s},
                            {1, 0, compose(p.d_u_o, p.bar_s_u)},
                            {1, 1, p.bar_s_s + compose(p.d_u_s, p.bar_s_u)}},
                           "check complex");
    out.from = block_complex({p.o, p.u}, {0, 0},
                             {{0, 0, p.d_o_o},
                              {1, 0, p.d_u_o},
                              {0, 1, compose(p.bar_s_u, p.d_o_s)},
                              {1, 1, compose(p.bar_s_u, p.d_u_s)}},
                             "hat complex");
    // C^u sits one degree lower in the bar complex
    out.bar = block_complex({p.s, p.u}, {0, 1},
                            {{0, 0, p.bar_s_s}, {0, 1, p.bar_s_u}, {1, 0, p.bar_u_s}, {1, 1, p.bar_u_u}},
                            "bar complex");
    return out;
}

namespace {

ChainMap checked_action(const GradedComplex& c, const GradedMap& m, const std::string& what) {
    if (auto k = chain_map_defect(c, c, m)) {
        F2Matrix res = f2la::compose(m.block(*k - 1), c.d(*k)) + f2la::compose(c.d(*k + m.shift), m.block(*k));
        throw ValidationError(what + " identity fails at degree " + std::to_string(*k) + ", residual " +
                              matrix_str(res));
    }
    return {c, c, m};
}

}  // namespace

ChainMap cone_module_action(const ChainMap& f1, const ChainMap& v1, const ChainMap& v2, const Homotopy& hmix) {
    int s = v1.map.shift;
    require_degree(v2.map, s, "V2");
    require_degree(hmix.map, s + 1, "mixing homotopy");
    const auto& c1 = f1.source;
    const auto& c2 = f1.target;
    GradedMap lhs = compose(c2.differential(), hmix.map) + compose(hmix.map, c1.differential());
    GradedMap rhs = compose(f1.map, v1.map) + compose(v2.map, f1.map);
    GradedMap res = lhs + rhs;
    for (const auto& [k, m] : res.blocks)
        if (!m.is_zero())
            throw ValidationError("module action homotopy identity fails at degree " + std::to_string(k) +
                                  ", residual " + matrix_str(m));
    Cone cone = mapping_cone(f1);
    std::vector<Dims> parts = {c2.dims(), c1.dims()};
    GradedMap act = block_map(parts, {0, -1}, parts, {0, -1}, s, {{0, 0, v2.map}, {1, 1, v1.map}, {1, 0, hmix.map}});
    return checked_action(cone.complex, act, "cone module action");
}

ChainMap iterated_cone_module_action(const ChainMap& f1, const ChainMap& f2, const Homotopy& h1, const ChainMap& v1,
                                     const ChainMap& v2, const ChainMap& v3, const Homotopy& hmix1,
                                     const Homotopy& hmix2, const Homotopy& g1) {
    int s = v1.map.shift;
    require_degree(v2.map, s, "V2");
    require_degree(v3.map, s, "V3");
    require_degree(hmix1.map, s + 1, "H1 mixing homotopy");
    require_degree(hmix2.map, s + 1, "H2 mixing homotopy");
    require_degree(g1.map, s + 2, "G1");
    GradedComplex big = iterated_mapping_cone(f1, f2, h1);
    std::vector<Dims> parts = {f2.target.dims(), f1.target.dims(), f1.source.dims()};
    std::vector<int> offs = {0, -1, -2};
    GradedMap act = block_map(parts, offs, parts, offs, s,
                              {{0, 0, v3.map},
                               {1, 1, v2.map},
                               {2, 2, v1.map},
                               {1, 0, hmix2.map},
                               {2, 1, hmix1.map},
                               {2, 0, g1.map}});
    return checked_action(big, act, "iterated cone module action");
}

namespace {

// Linear operator X -> d_t X + X d_s on maps X: s -> t of degree sigma.
struct HomotopyOperator {
    const GradedComplex& s;
    const GradedComplex& t;
    int sigma;
    std::map<int, std::size_t> var_off, eq_off;
    std::size_t nvars = 0, neqs = 0;

    HomotopyOperator(const GradedComplex& s_, const GradedComplex& t_, int sigma_) : s(s_), t(t_), sigma(sigma_) {
        for (int k : s.degrees()) {
            var_off[k] = nvars;
            nvars += t.dim(k + sigma) * s.dim(k);
            eq_off[k] = neqs;
            neqs += t.dim(k + sigma - 1) * s.dim(k);
        }
    }

    std::size_t var(int k, std::size_t i, std::size_t j) const { return var_off.at(k) + i * s.dim(k) + j; }

    F2Matrix matrix() const {
        F2Matrix a(neqs, nvars);
        for (int k : s.degrees()) {
            std::size_t sk = s.dim(k), rows = t.dim(k + sigma - 1);
            F2Matrix dt = t.d(k + sigma), ds = s.d(k);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < sk; ++j) {
                    std::size_t e = eq_off.at(k) + i * sk + j;
                    for (std::size_t l = 0; l < dt.cols(); ++l)
                        if (dt.get(i, l)) a.flip(e, var(k, l, j));
                    if (s.dim(k - 1) == 0) continue;
                    for (std::size_t l = 0; l < ds.rows(); ++l)
                        if (ds.get(l, j)) a.flip(e, var(k - 1, i, l));
                }
        }
        return a;
    }

    BitVector flatten_rhs(const GradedMap& rhs) const {
        BitVector b(neqs);
        for (int k : s.degrees()) {
            F2Matrix m = rhs.block(k);
            for (std::size_t i = 0; i < m.rows(); ++i)
                for (std::size_t j = 0; j < m.cols(); ++j)
                    if (m.get(i, j)) b.set(eq_off.at(k) + i * s.dim(k) + j);
        }
        return b;
    }

    GradedMap unflatten(const BitVector& x) const {
        GradedMap h = GradedMap::zero(s.dims(), t.dims(), sigma);
        for (int k : s.degrees()) {
            F2Matrix m(t.dim(k + sigma), s.dim(k));
            for (std::size_t i = 0; i < m.rows(); ++i)
                for (std::size_t j = 0; j < m.cols(); ++j)
                    if (x.get(var(k, i, j))) m.set(i, j);
            h.set_block(k, m);
        }
        return h;
    }
};

}  // namespace

std::optional<GradedMap> solve_homotopy(const GradedComplex& s, const GradedComplex& t, const GradedMap& rhs) {
    require_same(rhs.src, s.dims(), "homotopy equation source");
    require_same(rhs.tgt, t.dims(), "homotopy equation target");
    HomotopyOperator op(s, t, rhs.shift + 1);
    auto x = f2la::image_membership(op.matrix(), op.flatten_rhs(rhs));
    if (!x) return std::nullopt;
    return op.unflatten(*x);
}

std::vector<GradedMap> chain_map_basis(const GradedComplex& s, const GradedComplex& t, int shift) {
    HomotopyOperator op(s, t, shift);
    std::vector<GradedMap> out;
    for (const auto& v : f2la::kernel_basis(op.matrix())) out.push_back(op.unflatten(v));
    return out;
}

FilteredComplex FilteredComplex::make(const GradedComplex& c, std::map<int, std::vector<int>> level) {
    for (int k : c.degrees())
        if (level[k].size() != c.dim(k))
            throw ValidationError("filtration levels missing in degree " + std::to_string(k));
    for (int k : c.degrees()) {
        F2Matrix d = c.d(k);
        for (std::size_t r = 0; r < d.rows(); ++r)
            for (std::size_t j = 0; j < d.cols(); ++j)
                if (d.get(r, j) && level[k - 1][r] > level[k][j])
                    throw ValidationError("differential raises filtration level in degree " + std::to_string(k));
    }
    for (auto it = level.begin(); it != level.end();)
        it = c.dim(it->first) == 0 ? level.erase(it) : std::next(it);
    return {c, std::move(level)};
}

std::size_t SpectralPages::total(std::size_t r) const {
    std::size_t t = 0;
    for (const auto& [key, n] : pages.at(r)) t += n;
    return t;
}

Dims SpectralPages::by_degree(std::size_t r) const {
    Dims d;
    for (const auto& [key, n] : pages.at(r)) d[key.second] += n;
    return clean(d);
}

namespace {

struct PageComputer {
    const FilteredComplex& fc;

    // Z^r_p in degree k: x in F_p C_k with dx in F_{p-r}
    std::vector<BitVector> Z(int k, int r, int p) const {
        const auto& lv = fc.level.at(k);
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < lv.size(); ++j)
            if (lv[j] <= p) cols.push_back(j);
        std::vector<std::size_t> rows;
        if (fc.level.count(k - 1)) {
            const auto& lw = fc.level.at(k - 1);
            for (std::size_t i = 0; i < lw.size(); ++i)
                if (lw[i] > p - r) rows.push_back(i);
        }
        F2Matrix d = fc.complex.d(k);
        F2Matrix sub(rows.size(), cols.size());
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (std::size_t b = 0; b < cols.size(); ++b)
                if (d.get(rows[a], cols[b])) sub.set(a, b);
        std::vector<BitVector> out;
        for (const auto& v : f2la::kernel_basis(sub)) {
            BitVector x(lv.size());
            for (std::size_t b = 0; b < cols.size(); ++b)
                if (v.get(b)) x.set(cols[b]);
            out.push_back(x);
        }
        return out;
    }

    std::size_t page_dim(int k, int r, int p) const {
        std::size_t n = fc.complex.dim(k);
        f2la::Span num(n), den(n);
        for (const auto& v : Z(k, r, p)) num.add(v);
        for (const auto& v : Z(k, r - 1, p - 1)) den.add(v);
        if (fc.level.count(k + 1)) {
            F2Matrix d = fc.complex.d(k + 1);
            for (const auto& v : Z(k + 1, r - 1, p + r - 1)) den.add(d.apply(v));
        }
        for (const auto& v : den.basis())
            if (!num.contains(v)) throw InternalError("spectral page denominator escapes numerator");
        return num.dim() - den.dim();
    }
};

}  // namespace

SpectralPages filtered_pages(const FilteredComplex& fc, std::size_t r_max) {
    int pmin = 0, pmax = -1;
    bool first = true;
    for (const auto& [k, lv] : fc.level)
        for (int p : lv) {
            pmin = first ? p : std::min(pmin, p);
            pmax = first ? p : std::max(pmax, p);
            first = false;
        }
    std::size_t r_inf = first ? 1 : static_cast<std::size_t>(pmax - pmin + 2);
    PageComputer pc{fc};
    SpectralPages sp;
    std::size_t upto = std::max(r_max, r_inf);
    std::vector<std::map<std::pair<int, int>, std::size_t>> all;
    for (std::size_t r = 0; r <= upto; ++r) {
        std::map<std::pair<int, int>, std::size_t> page;
        for (int k : fc.complex.degrees())
            for (int p = pmin; p <= pmax; ++p)
                if (std::size_t n = pc.page_dim(k, static_cast<int>(r), p)) page[{p, k}] = n;
        all.push_back(std::move(page));
    }
    sp.infinity = all[r_inf];
    sp.stable_from = r_inf;
    while (sp.stable_from > 0 && all[sp.stable_from - 1] == sp.infinity) --sp.stable_from;
    all.resize(r_max + 1);
    sp.pages = std::move(all);
    return sp;
}

FilteredComplex diagonal_iso_model(const ChainMap& f1, const ChainMap& f2, const Homotopy& h1) {
    check_triple(f1, f2, h1);
    const auto& c1 = f1.source;
    const auto& c2 = f1.target;
    const auto& c3 = f2.target;
    std::vector<Dims> parts = {c3.dims(), c2.dims(), c1.dims(), c3.dims(), c2.dims(), c1.dims()};
    std::vector<int> offs = {0, -1, -2, -1, -2, -3};
    std::vector<BlockEntry> entries;
    for (std::size_t base : {0u, 3u}) {
        entries.push_back({base, base, c3.differential()});
        entries.push_back({base + 1, base + 1, c2.differential()});
        entries.push_back({base + 2, base + 2, c1.differential()});
        entries.push_back({base + 1, base, f2.map});
        entries.push_back({base + 2, base, h1.map});
        entries.push_back({base + 2, base + 1, f1.map});
    }
    for (std::size_t i = 0; i < 3; ++i) entries.push_back({i + 3, i, GradedMap::identity(parts[i])});
    GradedComplex c = block_complex(parts, offs, entries, "diagonal iso model");
    std::map<int, std::vector<int>> level;
    for (int n : c.degrees())
        for (std::size_t i = 0; i < parts.size(); ++i)
            level[n].insert(level[n].end(), dim_at(parts[i], n + offs[i]), static_cast<int>(i));
    return FilteredComplex::make(c, level);
}

bool Random::coin(double p) { return std::bernoulli_distribution(p)(rng); }

std::size_t Random::below(std::size_t n) {
    if (n == 0) return 0;
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

F2Matrix random_invertible(Random& r, std::size_t n) {
    F2Matrix up = F2Matrix::identity(n), low = F2Matrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (r.coin()) up.set(i, j);
            if (r.coin()) low.set(j, i);
        }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), r.rng);
    F2Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) p.set(i, perm[i]);
    return f2la::compose(p, f2la::compose(up, low));
}

namespace {

// sum of elementary pairs x -> y, then conjugated degreewise by the given automorphisms
GradedComplex conjugate(const GradedComplex& c, const std::map<int, F2Matrix>& a) {
    std::map<int, F2Matrix> d;
    for (int k : c.degrees()) {
        if (c.dim(k - 1) == 0) continue;
        auto inv = f2la::inverse(a.at(k));
        d[k] = f2la::compose(a.at(k - 1), f2la::compose(c.d(k), *inv));
    }
    return GradedComplex(c.dims(), d);
}

}  // namespace

GradedComplex random_complex(Random& r, int lo, int hi, std::size_t max_dim) {
    Dims dims;
    for (int k = lo; k <= hi; ++k) dims[k] = r.below(max_dim + 1);
    dims = clean(dims);
    std::map<int, std::size_t> used_top;  // generators of C_k already used as targets
    std::map<int, F2Matrix> d;
    for (int k = hi; k > lo; --k) {
        std::size_t src_free = dim_at(dims, k) - used_top[k];
        std::size_t tgt = dim_at(dims, k - 1);
        if (src_free == 0 || tgt == 0) continue;
        std::size_t pairs = r.below(std::min(src_free, tgt) + 1);
        F2Matrix m(tgt, dim_at(dims, k));
        // sources are the last generators of C_k, targets the first of C_{k-1}
        for (std::size_t i = 0; i < pairs; ++i) m.set(i, dim_at(dims, k) - 1 - i);
        used_top[k - 1] = pairs;
        d[k] = m;
    }
    GradedComplex base(dims, d);
    std::map<int, F2Matrix> a;
    for (auto [k, n] : base.dims()) a[k] = random_invertible(r, n);
    return conjugate(base, a);
}

Conjugated random_conjugate(Random& r, const GradedComplex& c) {
    std::map<int, F2Matrix> a;
    for (auto [k, n] : c.dims()) a[k] = random_invertible(r, n);
    Conjugated out{conjugate(c, a), GradedMap::zero(c.dims(), c.dims(), 0), GradedMap::zero(c.dims(), c.dims(), 0)};
    for (auto [k, n] : c.dims()) {
        out.to.set_block(k, a[k]);
        out.from.set_block(k, *f2la::inverse(a[k]));
    }
    return out;
}

ChainMap random_chain_map(Random& r, const GradedComplex& s, const GradedComplex& t) {
    GradedMap f = GradedMap::zero(s.dims(), t.dims(), 0);
    for (const auto& b : chain_map_basis(s, t, 0))
        if (r.coin()) f = f + b;
    return ChainMap::make(s, t, f);
}

FilteredComplex random_filtered_complex(Random& r, int levels, std::size_t max_total) {
    int lo = 0, hi = 3;
    Dims dims;
    std::size_t budget = max_total;
    for (int k = lo; k <= hi; ++k) {
        std::size_t n = r.below(std::min<std::size_t>(budget, max_total / 3 + 1) + 1);
        dims[k] = n;
        budget -= n;
    }
    std::map<int, std::vector<int>> level;
    for (auto [k, n] : dims) {
        for (std::size_t i = 0; i < n; ++i) level[k].push_back(static_cast<int>(r.below(levels)));
        std::sort(level[k].begin(), level[k].end());
    }
    std::map<int, F2Matrix> d;
    std::map<int, std::vector<bool>> used;
    for (auto [k, n] : dims) used[k].assign(n, false);
    for (int k = hi; k > lo; --k) {
        F2Matrix m(dims[k - 1], dims[k]);
        for (std::size_t j = 0; j < dims[k]; ++j) {
            if (used[k][j] || !r.coin(0.7)) continue;
            std::vector<std::size_t> cand;
            for (std::size_t i = 0; i < dims[k - 1]; ++i)
                if (!used[k - 1][i] && level[k - 1][i] <= level[k][j]) cand.push_back(i);
            if (cand.empty()) continue;
            std::size_t i = cand[r.below(cand.size())];
            used[k][j] = used[k - 1][i] = true;
            m.set(i, j);
        }
        d[k] = m;
    }
    GradedComplex base(dims, d);
    // unipotent upper triangular in level order keeps the filtration
    std::map<int, F2Matrix> a;
    for (auto [k, n] : base.dims()) {
        F2Matrix u = F2Matrix::identity(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (r.coin()) u.set(i, j);
        a[k] = u;
    }
    return FilteredComplex::make(conjugate(base, a), level);
}

std::optional<Triple> random_admissible_triple(Random& r, int lo, int hi, std::size_t max_dim) {
    GradedComplex c1 = random_complex(r, lo, hi, max_dim);
    GradedComplex c2 = random_complex(r, lo, hi, max_dim);
    GradedComplex c3 = random_complex(r, lo, hi, max_dim);
    ChainMap f1 = random_chain_map(r, c1, c2);
    ChainMap f2 = random_chain_map(r, c2, c3);
    auto h = solve_homotopy(c1, c3, compose(f2.map, f1.map));
    if (!h) return std::nullopt;
    return Triple{f1, f2, Homotopy::make(c1, c3, *h)};
}

Triple random_exact_triple(Random& r, int lo, int hi, std::size_t max_dim) {
    GradedComplex c1 = random_complex(r, lo, hi, max_dim);
    GradedComplex c2 = random_complex(r, lo, hi, max_dim);
    ChainMap f1 = random_chain_map(r, c1, c2);
    Cone cone = mapping_cone(f1);
    std::vector<Dims> parts = {c2.dims(), c1.dims()};
    GradedMap h = block_map({c1.dims()}, {0}, parts, {0, -1}, 1, {{0, 1, GradedMap::identity(c1.dims())}});
    Conjugated cj = random_conjugate(r, cone.complex);
    ChainMap f2 = ChainMap::make(c2, cj.complex, compose(cj.to, cone.inclusion.map));
    return {f1, f2, Homotopy::make(c1, cj.complex, compose(cj.to, h))};
}

nlohmann::json to_json(const Dims& d) {
    nlohmann::json j = nlohmann::json::object();
    for (auto [k, n] : clean(d)) j[std::to_string(k)] = n;
    return j;
}

nlohmann::json to_json(const GradedMap& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, b] : m.blocks)
        if (!b.is_zero()) j[std::to_string(k)] = b.to_rows();
    return j;
}

nlohmann::json to_json(const GradedComplex& c) {
    auto ks = c.degrees();
    nlohmann::json window = ks.empty() ? nlohmann::json::array({0, -1}) : nlohmann::json::array({ks.front(), ks.back()});
    return {{"window", window}, {"dims", to_json(c.dims())}, {"d", to_json(c.differential())}};
}

namespace {

int parse_degree(const std::string& s) {
    try {
        std::size_t used = 0;
        int k = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return k;
    } catch (const std::logic_error&) {
        throw ValidationError("degree key '" + s + "' is not an integer");
    }
}

F2Matrix matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols) {
    if (!j.is_array()) throw ValidationError("matrix must be a list of rows");
    if (j.empty()) {
        if (rows != 0) throw ValidationError("empty matrix where " + std::to_string(rows) + " rows were expected");
        return F2Matrix(0, cols);
    }
    std::vector<std::vector<int>> r;
    for (const auto& row : j) {
        std::vector<int> bits;
        for (const auto& b : row) {
            int v = b.get<int>();
            if (v != 0 && v != 1) throw ValidationError("matrix entries must be 0 or 1");
            bits.push_back(v);
        }
        r.push_back(bits);
    }
    for (const auto& row : r)
        if (row.size() != r.front().size()) throw ValidationError("ragged matrix rows");
    F2Matrix m = F2Matrix::from_rows(r);
    if (m.rows() != rows || m.cols() != cols)
        throw ValidationError("matrix has shape " + m.shape() + ", expected " + std::to_string(rows) + "x" +
                              std::to_string(cols));
    return m;
}

}  // namespace

GradedComplex complex_from_json(const nlohmann::json& j) {
    try {
        Dims dims;
        for (const auto& [key, v] : j.at("dims").items()) {
            long n = v.get<long>();
            if (n < 0) throw ValidationError("negative dimension");
            dims[parse_degree(key)] = static_cast<std::size_t>(n);
        }
        if (j.contains("window")) {
            int lo = j["window"].at(0).get<int>(), hi = j["window"].at(1).get<int>();
            for (auto [k, n] : clean(dims))
                if (k < lo || k > hi) throw ValidationError("degree " + std::to_string(k) + " outside the window");
        }
        std::map<int, F2Matrix> d;
        nlohmann::json dj = j.value("d", nlohmann::json::object());
        for (const auto& [key, v] : dj.items()) {
            int k = parse_degree(key);
            d[k] = matrix_from_json(v, dim_at(dims, k - 1), dim_at(dims, k));
        }
        return GradedComplex(dims, d);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed complex JSON: ") + e.what());
    }
}

GradedMap map_from_json(const nlohmann::json& j, const Dims& src, const Dims& tgt, int shift) {
    try {
        const nlohmann::json& blocks = j.contains("blocks") ? j.at("blocks") : j;
        GradedMap m = GradedMap::zero(src, tgt, shift);
        for (const auto& [key, v] : blocks.items()) {
            int k = parse_degree(key);
            m.set_block(k, matrix_from_json(v, dim_at(tgt, k + shift), dim_at(src, k)));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed map JSON: ") + e.what());
    }
}

}  // namespace p2f::homalg
