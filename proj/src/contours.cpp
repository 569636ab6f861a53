#include <ising/contours.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <deque>
#include <limits>
#include <optional>

namespace ising {

// ---------------------------------------------------------------------------
// ℤ[√2]

namespace {

using Int = ZSqrt2::Int;

Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw NumericalError("ZSqrt2: overflow in addition");
    return r;
}

Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw NumericalError("ZSqrt2: overflow in multiplication");
    return r;
}

std::string int128_to_string(Int v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    std::string s;
    // work with negative values so INT128_MIN survives
    Int w = neg ? v : -v;
    while (w != 0) {
        s.push_back(static_cast<char>('0' - static_cast<int>(w % 10)));
        w /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

}  // namespace

ZSqrt2 ZSqrt2::alpha_pow(int k) {
    if (k < -1) throw PreconditionError("alpha_pow: exponent below -1");
    if (k == -1) return ZSqrt2(1, 1);
    ZSqrt2 r(1, 0);
    const ZSqrt2 alpha(-1, 1);
    for (int i = 0; i < k; ++i) r *= alpha;
    return r;
}

ZSqrt2 ZSqrt2::operator+(const ZSqrt2& o) const { return ZSqrt2(checked_add(a_, o.a_), checked_add(b_, o.b_)); }
ZSqrt2 ZSqrt2::operator-(const ZSqrt2& o) const { return ZSqrt2(checked_add(a_, -o.a_), checked_add(b_, -o.b_)); }

ZSqrt2 ZSqrt2::operator*(const ZSqrt2& o) const {
    // (a + b√2)(c + d√2) = ac + 2bd + (ad + bc)√2
    const Int ac = checked_mul(a_, o.a_);
    const Int bd2 = checked_mul(checked_mul(b_, o.b_), 2);
    return ZSqrt2(checked_add(ac, bd2), checked_add(checked_mul(a_, o.b_), checked_mul(b_, o.a_)));
}

int ZSqrt2::sign() const {
    auto sg = [](Int v) { return v > 0 ? 1 : v < 0 ? -1 : 0; };
    const int sa = sg(a_), sb = sg(b_);
    if (sa == 0) return sb;
    if (sb == 0 || sa == sb) return sa;
    // opposite signs: compare a² with 2b²
    constexpr Int lim = Int(1) << 62;
    if (a_ < lim && a_ > -lim && b_ < lim && b_ > -lim) {
        const Int a2 = a_ * a_, b2 = 2 * b_ * b_;
        return a2 > b2 ? sa : sb;  // a² = 2b² impossible for b ≠ 0
    }
    const long double ra = static_cast<long double>(a_), rb = static_cast<long double>(b_);
    const long double a2 = ra * ra, b2 = 2 * rb * rb;
    if (std::abs(a2 - b2) <= 1e-15L * std::max(a2, b2)) throw NumericalError("ZSqrt2: sign undecidable at this size");
    return a2 > b2 ? sa : sb;
}

std::string ZSqrt2::to_string() const {
    return int128_to_string(a_) + (b_ < 0 ? " - " : " + ") + int128_to_string(b_ < 0 ? -b_ : b_) + "√2";
}

// ---------------------------------------------------------------------------
// Cycle space

namespace {

/// Spanning forest of the subgraph made of `allowed` edges; every vertex gets
/// the mask of tree edges on its path to the root of its component.
struct Forest {
    std::vector<EdgeMask> root_path;
    std::vector<int> component;
    std::vector<EdgeMask> cycle_basis;
};

Forest build_forest(const DiscreteDomain& domain, EdgeMask allowed) {
    const int nv = static_cast<int>(domain.vertices().size());
    const auto edges = domain.edges();
    std::vector<std::vector<std::pair<int, int>>> adj(nv);
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        if (!(allowed >> e & 1)) continue;
        adj[edges[e].u].emplace_back(edges[e].v, e);
        adj[edges[e].v].emplace_back(edges[e].u, e);
    }
    Forest f;
    f.root_path.assign(nv, 0);
    f.component.assign(nv, -1);
    EdgeMask tree = 0;
    int ncomp = 0;
    for (int s = 0; s < nv; ++s) {
        if (f.component[s] >= 0) continue;
        f.component[s] = ncomp;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            for (auto [w, e] : adj[v]) {
                if (f.component[w] >= 0) continue;
                f.component[w] = ncomp;
                f.root_path[w] = f.root_path[v] | (EdgeMask(1) << e);
                tree |= EdgeMask(1) << e;
                queue.push_back(w);
            }
        }
        ++ncomp;
    }
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        if (!(allowed >> e & 1) || (tree >> e & 1)) continue;
        f.cycle_basis.push_back((EdgeMask(1) << e) ^ f.root_path[edges[e].u] ^ f.root_path[edges[e].v]);
    }
    return f;
}

void check_cap(const DiscreteDomain& domain, const EnumerationLimits& limits) {
    const auto ne = domain.edges().size();
    if (static_cast<long>(ne) > limits.max_edges || ne > 63)
        throw CapExceededError(fmt::format("enumeration cap exceeded: {} edges > {}", ne, limits.max_edges));
}

/// Visits particular ⊕ (every element of the span of `basis`) in Gray-code order.
template <class F>
void gray_walk(EdgeMask particular, const std::vector<EdgeMask>& basis, F&& visit) {
    EdgeMask cur = particular;
    visit(cur);
    const std::uint64_t n = std::uint64_t(1) << basis.size();
    for (std::uint64_t i = 1; i < n; ++i) {
        cur ^= basis[std::countr_zero(i)];
        visit(cur);
    }
}

EdgeMask all_edges(const DiscreteDomain& domain) {
    const auto ne = domain.edges().size();
    return ne >= 64 ? ~EdgeMask(0) : (EdgeMask(1) << ne) - 1;
}

/// Edge subsets of `allowed` whose odd-degree vertices are exactly {s, t}
/// (none when s == t); false when the parity constraint is infeasible.
template <class F>
bool walk_odd_sets(const DiscreteDomain& domain, EdgeMask allowed, int s, int t, F&& visit) {
    const Forest f = build_forest(domain, allowed);
    EdgeMask particular = 0;
    if (s != t) {
        if (f.component[s] != f.component[t]) return false;
        particular = f.root_path[s] ^ f.root_path[t];
    }
    gray_walk(particular, f.cycle_basis, visit);
    return true;
}

}  // namespace

std::vector<ContourConfig> enumerate_even_subsets(const DiscreteDomain& domain, EnumerationLimits limits) {
    check_cap(domain, limits);
    std::vector<ContourConfig> out;
    walk_odd_sets(domain, all_edges(domain), 0, 0, [&](EdgeMask m) { out.push_back({m}); });
    return out;
}

PartitionFunctions partition_functions(const DiscreteDomain& domain, int edge, EnumerationLimits limits) {
    if (edge < 0 || edge >= static_cast<int>(domain.edges().size()))
        throw PreconditionError("partition_functions: edge not in domain");
    check_cap(domain, limits);
    const int ne = static_cast<int>(domain.edges().size());
    std::vector<ZSqrt2> powers;
    for (int k = 0; k <= ne; ++k) powers.push_back(ZSqrt2::alpha_pow(k));
    PartitionFunctions pf;
    walk_odd_sets(domain, all_edges(domain), 0, 0, [&](EdgeMask m) {
        const ZSqrt2& w = powers[std::popcount(m)];
        ((m >> edge & 1) ? pf.z_minus : pf.z_plus) += w;
    });
    pf.z = pf.z_plus + pf.z_minus;
    return pf;
}

EnergyOracle oracle_energy_plus(const DiscreteDomain& domain, int horizontal_edge, EnumerationLimits limits) {
    if (horizontal_edge < 0 || horizontal_edge >= static_cast<int>(domain.edges().size()) ||
        !domain.edges()[horizontal_edge].horizontal)
        throw PreconditionError("oracle_energy_plus: need a horizontal edge of the domain");
    EnergyOracle o;
    o.partition = partition_functions(domain, horizontal_edge, limits);
    o.plus = 2.0 * o.partition.plus_ratio() - (2.0 + std::numbers::sqrt2) / 2.0;
    o.free = -o.plus;
    return o;
}

// ---------------------------------------------------------------------------
// Spinor configurations

namespace {

struct SourceInfo {
    int e1;
    int east;  ///< vertex a + δ/2
};

SourceInfo source_info(const DiscreteDomain& domain, HalfPoint a) {
    const int m = domain.medial_index(a);
    if (m < 0 || !a.is_horizontal_midpoint() || domain.medial_vertices()[m].kind != MedialKind::interior)
        throw PreconditionError("source must be the midpoint of a horizontal edge of the domain");
    const int e1 = domain.medial_vertices()[m].index;
    return {e1, domain.edges()[e1].v};
}

}  // namespace

std::vector<SpinorConfig> enumerate_spinor_configs(const DiscreteDomain& domain, HalfPoint a, HalfPoint z,
                                                   EnumerationLimits limits) {
    check_cap(domain, limits);
    const SourceInfo src = source_info(domain, a);
    if (z == a) throw PreconditionError("enumerate_spinor_configs: z must differ from a");
    const int mz = domain.medial_index(z);
    if (mz < 0) throw PreconditionError("enumerate_spinor_configs: z is not a medial vertex of the domain");
    const MedialVertex& zv = domain.medial_vertices()[mz];

    EdgeMask allowed = all_edges(domain) & ~(EdgeMask(1) << src.e1);
    std::vector<int> ends;
    if (zv.kind == MedialKind::interior) {
        allowed &= ~(EdgeMask(1) << zv.index);
        ends = {domain.edges()[zv.index].u, domain.edges()[zv.index].v};
    } else {
        ends = {domain.boundary()[zv.index].inner};
    }
    std::vector<SpinorConfig> out;
    for (int p : ends)
        walk_odd_sets(domain, allowed, src.east, p, [&](EdgeMask m) { out.push_back({m, a, z, p}); });
    return out;
}

namespace {

struct Piece {
    HalfPoint dir;  ///< direction of travel when leaving the vertex, unit half-steps doubled
    int edge;       ///< edge id, or -1 for the target half-edge
    int to;         ///< vertex reached (full edges only)
};

/// Turn from travel direction d to e: +1 left, −1 right, 0 straight.
int turn(HalfPoint d, HalfPoint e) {
    const int cross = d.x * e.y - d.y * e.x;
    return cross > 0 ? 1 : cross < 0 ? -1 : 0;
}

}  // namespace

WindingReport winding_well_defined(const DiscreteDomain& domain, const SpinorConfig& config) {
    const SourceInfo src = source_info(domain, config.source);
    const auto verts = domain.vertices();
    const auto edges = domain.edges();
    const int nv = static_cast<int>(verts.size());

    std::vector<std::vector<Piece>> pieces(nv);
    std::vector<int> degree(nv, 0);
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        if (!(config.edges >> e & 1)) continue;
        const int u = edges[e].u, v = edges[e].v;
        const HalfPoint d = HalfPoint::of(verts[v]) - HalfPoint::of(verts[u]);
        pieces[u].push_back({{d.x / 2, d.y / 2}, e, v});
        pieces[v].push_back({{-d.x / 2, -d.y / 2}, e, u});
    }
    for (int v = 0; v < nv; ++v) degree[v] = static_cast<int>(pieces[v].size());
    const HalfPoint zdir = config.target - HalfPoint::of(verts[config.target_vertex]);
    pieces[config.target_vertex].push_back({zdir, -1, -1});
    ++degree[config.target_vertex];
    ++degree[src.east];  // the source half-edge arrives here

    WindingReport rep;
    std::optional<int> first;
    EdgeMask used = 0;
    // depth-first over every admissible continuation
    auto dfs = [&](auto&& self, int v, HalfPoint din, int k) -> void {
        for (const Piece& pc : pieces[v]) {
            if (pc.edge >= 0 && (used >> pc.edge & 1)) continue;
            const int t = turn(din, pc.dir);
            if (t == 0 && degree[v] == 4) continue;  // never straight through a crossing
            if (pc.edge < 0) {
                const int w = ((k + t) % 8 + 8) % 8;
                ++rep.walks;
                if (!first) first = w;
                else if (*first != w) rep.consistent = false;
                continue;
            }
            used |= EdgeMask(1) << pc.edge;
            self(self, pc.to, pc.dir, k + t);
            used &= ~(EdgeMask(1) << pc.edge);
        }
    };
    dfs(dfs, src.east, HalfPoint{1, 0}, 0);
    if (!first) throw NumericalError("winding_well_defined: no admissible walk reaches z");
    rep.winding = *first;
    return rep;
}

cplx oracle_spinor(const DiscreteDomain& domain, HalfPoint a, HalfPoint z, EnumerationLimits limits) {
    const SourceInfo src = source_info(domain, a);
    const PartitionFunctions pf = partition_functions(domain, src.e1, limits);
    if (z == a) return pf.plus_ratio();

    // 2e^{−iπk/4} in ℤ[√2] + iℤ[√2]
    static const std::array<std::pair<ZSqrt2, ZSqrt2>, 8> phase2 = {{
        {ZSqrt2(2), ZSqrt2(0)},
        {ZSqrt2(0, 1), ZSqrt2(0, -1)},
        {ZSqrt2(0), ZSqrt2(-2)},
        {ZSqrt2(0, -1), ZSqrt2(0, -1)},
        {ZSqrt2(-2), ZSqrt2(0)},
        {ZSqrt2(0, -1), ZSqrt2(0, 1)},
        {ZSqrt2(0), ZSqrt2(2)},
        {ZSqrt2(0, 1), ZSqrt2(0, 1)},
    }};
    ZSqrt2 re, im;
    for (const SpinorConfig& c : enumerate_spinor_configs(domain, a, z, limits)) {
        const WindingReport w = winding_well_defined(domain, c);
        if (!w.consistent)
            throw NumericalError(fmt::format("winding ill-defined for configuration {:#x}", c.edges));
        const ZSqrt2 weight = ZSqrt2::alpha_pow(c.weight_exponent());
        re += weight * phase2[w.winding].first;
        im += weight * phase2[w.winding].second;
    }
    const double zz = 2.0 * pf.z.to_double();
    return {re.to_double() / zz, im.to_double() / zz};
}

HighTempCorrelation high_temp_correlation(const DiscreteDomain& domain, GridPoint z1, GridPoint z2,
                                          EnumerationLimits limits) {
    check_cap(domain, limits);
    const int e = domain.edge_index(z1, z2);
    if (e < 0) throw PreconditionError("high_temp_correlation: vertices are not adjacent in the domain");
    const int ne = static_cast<int>(domain.edges().size());
    std::vector<ZSqrt2> powers;
    for (int k = 0; k <= ne; ++k) powers.push_back(ZSqrt2::alpha_pow(k));
    HighTempCorrelation h;
    walk_odd_sets(domain, all_edges(domain), domain.vertex_index(z1), domain.vertex_index(z2),
                  [&](EdgeMask m) { h.numerator += powers[std::popcount(m)]; });
    walk_odd_sets(domain, all_edges(domain), 0, 0, [&](EdgeMask m) { h.z += powers[std::popcount(m)]; });
    return h;
}

std::pair<HalfPoint, HalfPoint> faces_of_edge(const DiscreteDomain& domain, int e) {
    const HalfPoint m = domain.edge_midpoint(e);
    if (domain.edges()[e].horizontal) return {m + HalfPoint{0, -1}, m + HalfPoint{0, 1}};
    return {m + HalfPoint{-1, 0}, m + HalfPoint{1, 0}};
}

BijectionReport low_temp_bijection_check(const DiscreteDomain& domain, EnumerationLimits limits) {
    check_cap(domain, limits);
    const int nd = static_cast<int>(domain.dual_vertices().size());
    if (nd > limits.max_dual_spins)
        throw CapExceededError(fmt::format("enumeration cap exceeded: {} dual spins > {}", nd, limits.max_dual_spins));
    const int ne = static_cast<int>(domain.edges().size());
    std::vector<std::array<int, 2>> faces(ne);
    for (int e = 0; e < ne; ++e) {
        auto [f1, f2] = faces_of_edge(domain, e);
        faces[e] = {domain.dual_index(f1), domain.dual_index(f2)};  // −1: frozen +
    }
    BijectionReport rep;
    std::vector<EdgeMask> image;
    bool all_even = true;
    const std::uint64_t states = std::uint64_t(1) << nd;
    for (std::uint64_t s = 0; s < states; ++s) {
        auto spin = [&](int f) { return f < 0 ? 1 : ((s >> f & 1) ? -1 : 1); };
        EdgeMask omega = 0;
        int energy = 0;  // Σ σσ over edges
        for (int e = 0; e < ne; ++e) {
            const int p = spin(faces[e][0]) * spin(faces[e][1]);
            energy += p;
            if (p < 0) omega |= EdgeMask(1) << e;
        }
        std::vector<int> deg(domain.vertices().size(), 0);
        for (int e = 0; e < ne; ++e)
            if (omega >> e & 1) ++deg[domain.edges()[e].u], ++deg[domain.edges()[e].v];
        for (int d : deg) all_even = all_even && d % 2 == 0;
        const double ratio = std::exp(kBetaCritical * (energy - ne));
        rep.max_weight_error = std::max(rep.max_weight_error, std::abs(ratio - std::pow(kAlpha, std::popcount(omega))));
        image.push_back(omega);
    }
    rep.spin_states = image.size();
    std::sort(image.begin(), image.end());
    const bool injective = std::adjacent_find(image.begin(), image.end()) == image.end();
    std::vector<EdgeMask> even;
    for (const auto& c : enumerate_even_subsets(domain, limits)) even.push_back(c.edges);
    std::sort(even.begin(), even.end());
    rep.even_subsets = even.size();
    rep.bijective = all_even && injective && image == even;
    return rep;
}

nlohmann::json oracle_to_json(const DiscreteDomain& domain, HalfPoint a, HalfPoint z, EnumerationLimits limits) {
    const SourceInfo src = source_info(domain, a);
    const PartitionFunctions pf = partition_functions(domain, src.e1, limits);
    const cplx f = oracle_spinor(domain, a, z, limits);
    auto zs = [](const ZSqrt2& v) {
        return nlohmann::json{{"exact", v.to_string()}, {"value", v.to_double()}};
    };
    const cplx ac = a.embed(domain.mesh()), zc = z.embed(domain.mesh());
    return {{"domain_hash", fmt::format("{:016x}", domain_hash(domain))},
            {"a", {ac.real(), ac.imag()}},
            {"z", {zc.real(), zc.imag()}},
            {"Z", zs(pf.z)},
            {"Z_plus", zs(pf.z_plus)},
            {"Z_minus", zs(pf.z_minus)},
            {"spinor", {f.real(), f.imag()}}};
}

}  // namespace ising
