#include <ising/spinor.hpp>

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <chrono>
#include <deque>
#include <numbers>
#include <ostream>

namespace ising {

namespace {

constexpr GridPoint kSteps[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

int step_slot(GridPoint s) {
    for (int i = 0; i < 4; ++i)
        if (kSteps[i] == s) return i;
    return -1;
}

/// ν_out^{-1/2} for a boundary medial vertex, unit modulus, principal branch.
cplx boundary_phase(const DiscreteDomain& d, int m) {
    const cplx nu = d.outward_normal(m) / d.mesh();
    return 1.0 / std::sqrt(nu);
}

int source_medial(const DiscreteDomain& domain, HalfPoint a) {
    const int m = domain.medial_index(a);
    if (m < 0 || !a.is_horizontal_midpoint() || domain.medial_vertices()[m].kind != MedialKind::interior)
        throw PreconditionError("source must be the midpoint of an interior horizontal edge");
    return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

cplx SpinorField::at(HalfPoint m) const {
    const int i = domain->medial_index(m);
    if (i < 0) throw PreconditionError(fmt::format("({},{})/2 is not a medial vertex of the domain", m.x, m.y));
    return values[i];
}

LinearSystem assemble_bvp(const DiscreteDomain& domain, HalfPoint a) {
    if (!domain.simply_connected()) throw PreconditionError("assemble_bvp: domain is not simply connected");
    LinearSystem sys;
    sys.source = source_medial(domain, a);
    const auto medial = domain.medial_vertices();
    sys.column.resize(medial.size());
    int cols = 0;
    for (std::size_t m = 0; m < medial.size(); ++m) {
        sys.column[m] = cols;
        cols += medial[m].kind == MedialKind::interior ? 2 : 1;
    }
    const auto edges = domain.medial_edges();
    const HalfPoint west = a - HalfPoint{1, 0};

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(edges.size() * 4);
    sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(edges.size()));
    // Re(ū f(m)) as a row fragment
    auto add = [&](int row, int m, cplx u, double sign) {
        const int c = sys.column[m];
        if (medial[m].kind == MedialKind::interior) {
            trip.emplace_back(row, c, sign * u.real());
            trip.emplace_back(row, c + 1, sign * u.imag());
        } else {
            trip.emplace_back(row, c, sign * (std::conj(u) * boundary_phase(domain, m)).real());
        }
    };
    for (int r = 0; r < static_cast<int>(edges.size()); ++r) {
        const MedialEdge& me = edges[r];
        const cplx u = me.line.direction();
        add(r, me.horizontal_end, u, 1.0);
        add(r, me.vertical_end, u, -1.0);
        // P[f(a) − 1] = P[f(a_{−1±i})] on the two west edges
        if (me.horizontal_end == sys.source && HalfPoint::of(domain.vertices()[me.vertex]) == west)
            sys.rhs[r] = u.real();
    }
    sys.matrix.resize(static_cast<Eigen::Index>(edges.size()), cols);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.matrix.makeCompressed();
    return sys;
}

SpinorField solve_spinor(const DiscreteDomain& domain, HalfPoint a, double tolerance) {
    const auto t0 = std::chrono::steady_clock::now();
    const LinearSystem sys = assemble_bvp(domain, a);
    if (sys.equations() != sys.unknowns())
        throw NumericalError(fmt::format("BVP is not square: {} equations, {} unknowns", sys.equations(), sys.unknowns()));

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) throw NumericalError("BVP factorization failed (singular system?)");
    const Eigen::VectorXd u = lu.solve(sys.rhs);
    const double residual = (sys.matrix * u - sys.rhs).lpNorm<Eigen::Infinity>();
    if (!(residual <= tolerance))
        throw NumericalError(fmt::format("BVP solve residual {:.3g} exceeds {:.3g}", residual, tolerance));

    SpinorField f;
    f.domain = &domain;
    f.source = a;
    const auto medial = domain.medial_vertices();
    f.values.resize(medial.size());
    for (std::size_t m = 0; m < medial.size(); ++m) {
        const int c = sys.column[m];
        f.values[m] = medial[m].kind == MedialKind::interior ? cplx(u[c], u[c + 1])
                                                             : u[c] * boundary_phase(domain, static_cast<int>(m));
    }
    f.report = {sys.equations(), sys.unknowns(), residual, seconds_since(t0)};
    return f;
}

SpinorField difference_spinor(const SpinorField& f, const CouplingEvaluator& c0) {
    SpinorField g = f;
    const auto medial = f.domain->medial_vertices();
    for (std::size_t m = 0; m < medial.size(); ++m) g.values[m] -= full_plane_spinor(c0, medial[m].pos - f.source);
    return g;
}

EnergyDensity energy_density(const SpinorField& f) {
    // f_C(a, a) = (2+√2)/4 exactly
    const double plus = 2.0 * (f.source_value().real() - (2.0 + std::numbers::sqrt2) / 4.0);
    return {plus, -plus};
}

double s_holomorphicity_residual(const SpinorField& f, bool include_source) {
    const int src = f.domain->medial_index(f.source);
    double r = 0.0;
    for (const MedialEdge& me : f.domain->medial_edges()) {
        if (!include_source && (me.horizontal_end == src || me.vertical_end == src)) continue;
        r = std::max(r, std::abs(project(me.line, f.values[me.horizontal_end]) - project(me.line, f.values[me.vertical_end])));
    }
    return r;
}

double boundary_condition_residual(const SpinorField& f) {
    double r = 0.0;
    const auto medial = f.domain->medial_vertices();
    for (std::size_t m = 0; m < medial.size(); ++m) {
        if (medial[m].kind != MedialKind::boundary) continue;
        const cplx nu = f.domain->outward_normal(static_cast<int>(m)) / f.domain->mesh();
        r = std::max(r, std::abs((f.values[m] * std::sqrt(nu)).imag()));
    }
    return r;
}

double singularity_residual(const SpinorField& f) {
    const cplx fa = f.source_value();
    double r = 0.0;
    for (int sx : {1, -1}) {
        for (int sy : {1, -1}) {
            const HalfPoint nb = f.source + HalfPoint{sx, sy};
            const EdgeLine l = edge_line_between(f.source, nb);
            r = std::max(r, std::abs(project(l, sx > 0 ? fa : fa - 1.0) - project(l, f.at(nb))));
        }
    }
    return r;
}

cplx dbar(const SpinorField& f, HalfPoint v) {
    if (v.is_medial()) throw PreconditionError("dbar: needs a primal or dual point");
    for (HalfPoint s : {HalfPoint{1, 0}, HalfPoint{-1, 0}, HalfPoint{0, 1}, HalfPoint{0, -1}})
        if (f.domain->medial_index(v + s) < 0)
            throw PreconditionError(fmt::format("dbar: missing medial neighbor of ({},{})/2", v.x, v.y));
    return f.at(v + HalfPoint{1, 0}) - f.at(v - HalfPoint{1, 0}) +
           cplx(0, 1) * (f.at(v + HalfPoint{0, 1}) - f.at(v - HalfPoint{0, 1}));
}

cplx contour_sum(const SpinorField& f, const std::vector<HalfPoint>& loop) {
    if (loop.size() < 3 || loop.front() != loop.back()) throw PreconditionError("contour_sum: contour is not closed");
    cplx s = 0.0;
    for (std::size_t i = 0; i + 1 < loop.size(); ++i) {
        const HalfPoint d = loop[i + 1] - loop[i];
        if (std::abs(d.x) != 1 || std::abs(d.y) != 1) throw PreconditionError("contour_sum: consecutive points not medial-adjacent");
        s += 0.5 * (f.at(loop[i]) + f.at(loop[i + 1])) * (loop[i + 1].embed(f.domain->mesh()) - loop[i].embed(f.domain->mesh()));
    }
    return s;
}

std::vector<HalfPoint> diamond_contour(HalfPoint center, int k) {
    const int r = 2 * k + 1;
    std::vector<HalfPoint> loop;
    // east corner, then counterclockwise along the four sides
    HalfPoint p = center + HalfPoint{r, 0};
    for (HalfPoint d : {HalfPoint{-1, 1}, HalfPoint{-1, -1}, HalfPoint{1, -1}, HalfPoint{1, 1}}) {
        for (int i = 0; i < r; ++i) {
            loop.push_back(p);
            p = p + d;
        }
    }
    loop.push_back(loop.front());
    return loop;
}

// ---------------------------------------------------------------------------
// Discrete integral

bool DiscreteIntegral::dual_is_interior(int i) const { return domain->dual_index(dual_points[i]) >= 0; }

DiscreteIntegral discrete_integral(const SpinorField& f, double tolerance) {
    return discrete_integral(f, HalfPoint::of(f.domain->vertices()[0]), tolerance);
}

DiscreteIntegral discrete_integral(const SpinorField& f, HalfPoint base, double tolerance) {
    const DiscreteDomain& d = *f.domain;
    const double mesh = d.mesh();
    const auto verts = d.vertices();
    const int nv = static_cast<int>(verts.size());
    const int src = d.medial_index(f.source);

    DiscreteIntegral I;
    I.domain = &d;
    I.base = base;
    for (const GridPoint& p : verts)
        for (HalfPoint s : {HalfPoint{1, 1}, HalfPoint{-1, 1}, HalfPoint{-1, -1}, HalfPoint{1, -1}})
            I.dual_points.push_back(HalfPoint::of(p) + s);
    std::sort(I.dual_points.begin(), I.dual_points.end());
    I.dual_points.erase(std::unique(I.dual_points.begin(), I.dual_points.end()), I.dual_points.end());
    for (int i = 0; i < static_cast<int>(I.dual_points.size()); ++i) I.dual_lookup.emplace(I.dual_points[i], i);

    // graph on primal (0..nv−1) and dual (nv + i) nodes; weight = I(to) − I(from)
    struct Arc {
        int to;
        double inc;
    };
    std::vector<std::vector<Arc>> adj(nv + I.dual_points.size());
    struct Link {
        int b, w;
        double inc;
    };
    std::vector<Link> links;
    for (const MedialEdge& me : d.medial_edges()) {
        const int y = me.horizontal_end == src ? me.vertical_end : me.horizontal_end;
        const double p = (std::conj(me.line.direction()) * f.values[y]).real();
        const double inc = std::numbers::sqrt2 * mesh * p * p;  // I(b) − I(w)
        const int w = nv + I.dual_lookup.at(me.dual);
        adj[me.vertex].push_back({w, -inc});
        adj[w].push_back({me.vertex, inc});
        links.push_back({me.vertex, w, inc});
    }

    std::vector<double> val(adj.size(), 0.0);
    std::vector<char> seen(adj.size(), 0);
    int start = -1;
    if (base.is_primal()) start = d.vertex_index(base.grid());
    else if (auto it = I.dual_lookup.find(base); it != I.dual_lookup.end()) start = nv + it->second;
    if (start < 0) throw PreconditionError("discrete_integral: base point is not a vertex of the closure");
    std::deque<int> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
        const int n = queue.front();
        queue.pop_front();
        for (const Arc& a : adj[n]) {
            if (seen[a.to]) continue;
            seen[a.to] = 1;
            val[a.to] = val[n] + a.inc;
            queue.push_back(a.to);
        }
    }
    for (const Link& l : links)
        I.max_inconsistency = std::max(I.max_inconsistency, std::abs(val[l.b] - val[l.w] - l.inc));
    if (I.max_inconsistency > tolerance)
        throw NumericalError(fmt::format("discrete integral is multivalued: mismatch {:.3g}", I.max_inconsistency));

    I.primal.assign(val.begin(), val.begin() + nv);
    I.dual.assign(val.begin() + nv, val.end());

    // boundary primal values, one per boundary edge
    I.boundary_of.assign(nv, {-1, -1, -1, -1});
    I.boundary.resize(d.boundary().size());
    for (int b = 0; b < static_cast<int>(d.boundary().size()); ++b) {
        const BoundaryEntry& be = d.boundary()[b];
        I.boundary_of[be.inner][step_slot(be.step)] = b;
        const HalfPoint m = HalfPoint::of(verts[be.inner]) + HalfPoint{be.step.j, be.step.k};
        const cplx fm = f.at(m);
        I.boundary[b] = I.primal[be.inner] - (fm * fm * (mesh * cplx(be.step.j, be.step.k))).real();
    }

    // same-sublattice rule I(y) − I(x) = −Re(f(m)²(y − x)), away from a
    for (int e = 0; e < static_cast<int>(d.edges().size()); ++e) {
        const int m = d.medial_of_edge(e);
        if (m == src) continue;
        const Edge& ed = d.edges()[e];
        const cplx fm = f.values[m];
        const cplx step = ed.horizontal ? cplx(mesh, 0) : cplx(0, mesh);
        const double want = -(fm * fm * step).real();
        I.max_same_lattice = std::max(I.max_same_lattice, std::abs(I.primal[ed.v] - I.primal[ed.u] - want));
        const HalfPoint mp = d.medial_vertices()[m].pos;
        const HalfPoint s = ed.horizontal ? HalfPoint{0, 1} : HalfPoint{1, 0};
        const double dwant = -(fm * fm * (ed.horizontal ? cplx(0, mesh) : cplx(mesh, 0))).real();
        I.max_same_lattice =
            std::max(I.max_same_lattice, std::abs(I.at_dual(mp + s) - I.at_dual(mp - s) - dwant));
    }
    return I;
}

double laplacian_primal(const DiscreteIntegral& I, int vertex) {
    const DiscreteDomain& d = *I.domain;
    double s = -4.0 * I.primal[vertex];
    for (int k = 0; k < 4; ++k) {
        const int n = d.vertex_index(d.vertices()[vertex] + kSteps[k]);
        s += n >= 0 ? I.primal[n] : I.boundary[I.boundary_of[vertex][k]];
    }
    return s;
}

double laplacian_dual(const DiscreteIntegral& I, HalfPoint face) {
    double s = -4.0 * I.at_dual(face);
    for (HalfPoint st : {HalfPoint{2, 0}, HalfPoint{0, 2}, HalfPoint{-2, 0}, HalfPoint{0, -2}}) {
        auto it = I.dual_lookup.find(face + st);
        if (it == I.dual_lookup.end()) throw PreconditionError("laplacian_dual: face lacks a neighbor in the closure");
        s += I.dual[it->second];
    }
    return s;
}

SubSuperReport check_sub_super(const DiscreteIntegral& I, const SpinorField& f, double tol, bool exclude_source) {
    const DiscreteDomain& d = *I.domain;
    SubSuperReport rep;
    const HalfPoint a = f.source;
    if (exclude_source)
        rep.excluded = {a + HalfPoint{1, 0}, a - HalfPoint{1, 0}, a + HalfPoint{0, 1}, a - HalfPoint{0, 1}};
    auto excluded = [&](HalfPoint p) { return std::find(rep.excluded.begin(), rep.excluded.end(), p) != rep.excluded.end(); };

    rep.min_primal_laplacian = std::numeric_limits<double>::infinity();
    for (int v = 0; v < static_cast<int>(d.vertices().size()); ++v) {
        const HalfPoint p = HalfPoint::of(d.vertices()[v]);
        if (excluded(p)) continue;
        const double l = laplacian_primal(I, v);
        rep.min_primal_laplacian = std::min(rep.min_primal_laplacian, l);
        if (l < -tol) rep.primal_violations.push_back(p);
    }
    rep.max_dual_laplacian = -std::numeric_limits<double>::infinity();
    for (HalfPoint w : d.dual_vertices()) {
        if (excluded(w)) continue;
        const double l = laplacian_dual(I, w);
        rep.max_dual_laplacian = std::max(rep.max_dual_laplacian, l);
        if (l > tol) rep.dual_violations.push_back(w);
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < static_cast<int>(I.dual_points.size()); ++i) {
        if (I.dual_is_interior(i)) continue;
        lo = std::min(lo, I.dual[i]);
        hi = std::max(hi, I.dual[i]);
    }
    rep.boundary_dual_spread = hi > lo ? hi - lo : 0.0;

    for (int b = 0; b < static_cast<int>(d.boundary().size()); ++b) {
        const BoundaryEntry& be = d.boundary()[b];
        const HalfPoint m = HalfPoint::of(d.vertices()[be.inner]) + HalfPoint{be.step.j, be.step.k};
        const cplx fm = f.at(m);
        const cplx nu = d.mesh() * cplx(be.step.j, be.step.k);
        const cplx g = fm * std::sqrt(nu);
        const double dnu = I.boundary[b] - I.primal[be.inner];
        rep.boundary_identity = std::max(rep.boundary_identity, std::abs(dnu - (g.imag() * g.imag() - g.real() * g.real())));
        rep.boundary_modulus = std::max(rep.boundary_modulus, std::abs(dnu + d.mesh() * std::norm(fm)));
    }
    return rep;
}

void write_field_csv(std::ostream& out, const SpinorField& f) {
    out << "re(z),im(z),re(f),im(f),class\n";
    const auto medial = f.domain->medial_vertices();
    for (std::size_t m = 0; m < medial.size(); ++m) {
        const cplx z = medial[m].pos.embed(f.domain->mesh());
        const char* cls = medial[m].pos == f.source                 ? "source"
                          : medial[m].kind == MedialKind::interior ? "interior"
                                                                   : "boundary";
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{}\n", z.real(), z.imag(), f.values[m].real(),
                           f.values[m].imag(), cls);
    }
}

void write_integral_csv(std::ostream& out, const DiscreteIntegral& I) {
    out << "re(z),im(z),value,class\n";
    const DiscreteDomain& d = *I.domain;
    const double h = d.mesh();
    for (std::size_t v = 0; v < I.primal.size(); ++v) {
        const cplx z = embed(d.vertices()[v], h);
        out << fmt::format("{:.17g},{:.17g},{:.17g},primal\n", z.real(), z.imag(), I.primal[v]);
    }
    for (std::size_t b = 0; b < I.boundary.size(); ++b) {
        const cplx z = embed(d.boundary()[b].outside, h);
        out << fmt::format("{:.17g},{:.17g},{:.17g},boundary\n", z.real(), z.imag(), I.boundary[b]);
    }
    for (std::size_t i = 0; i < I.dual.size(); ++i) {
        const cplx z = I.dual_points[i].embed(h);
        out << fmt::format("{:.17g},{:.17g},{:.17g},dual\n", z.real(), z.imag(), I.dual[i]);
    }
}

}  // namespace ising
