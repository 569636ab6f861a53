#include <ising/commands.hpp>

#include <ising/contours.hpp>
#include <ising/continuum.hpp>

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

namespace ising {

namespace {

using clock_type = std::chrono::steady_clock;

double since(clock_type::time_point t0) { return std::chrono::duration<double>(clock_type::now() - t0).count(); }

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string csv_opt(const std::optional<double>& v) { return v ? fmt::format("{:.17g}", *v) : std::string(); }

DiscreteDomain from_points(std::vector<GridPoint> pts) { return DiscreteDomain(std::move(pts), 1.0); }

}  // namespace

// ---------------------------------------------------------------------------
// Sweep

RunReport cmd_sweep(const SweepSpec& spec) {
    if (spec.meshes.empty()) throw PreconditionError("sweep: no meshes given");
    for (std::size_t i = 1; i < spec.meshes.size(); ++i)
        if (!(spec.meshes[i] < spec.meshes[i - 1])) throw PreconditionError("sweep: meshes must be strictly decreasing");
    if (!spec.region.contains(spec.a)) throw PreconditionError("sweep: a is not inside the region");

    std::optional<double> target;
    if (const Disk* d = spec.region.disk()) target = hyperbolic_element(ConformalFrame::disk(*d, spec.a)) / (2 * std::numbers::pi);

    RunReport rep{spec, {}};
    for (double mesh : spec.meshes) {
        SweepRecord r;
        r.mesh = mesh;
        r.target = target;
        const auto t0 = clock_type::now();
        try {
            const DiscreteDomain dom = discretize(spec.region, mesh);
            r.vertices = dom.vertices().size();
            r.a_discrete = nearest_horizontal_midpoint(dom, spec.a);
            const SpinorField f = solve_spinor(dom, r.a_discrete);
            const EnergyDensity e = energy_density(f);
            r.plus_over_delta = e.plus / mesh;
            r.free_over_delta = e.free / mesh;
            r.residual = f.report.residual;
            if (target) r.relative_error = std::abs(*r.plus_over_delta - *target) / std::abs(*target);
        } catch (const std::exception& ex) {
            r.error = ex.what();
        }
        r.seconds = since(t0);
        rep.records.push_back(r);
    }
    return rep;
}

void write_sweep_csv(std::ostream& out, const RunReport& report) {
    out << "delta,vertices,plus_over_delta,free_over_delta,target,relative_error,residual,wall_seconds,error\n";
    for (const SweepRecord& r : report.records)
        out << fmt::format("{:.17g},{},{},{},{},{},{:.3g},{:.3f},\"{}\"\n", r.mesh, r.vertices, csv_opt(r.plus_over_delta),
                           csv_opt(r.free_over_delta), csv_opt(r.target), csv_opt(r.relative_error), r.residual,
                           r.seconds, r.error);
}

nlohmann::json sweep_to_json(const RunReport& report) {
    nlohmann::json recs = nlohmann::json::array();
    for (const SweepRecord& r : report.records) {
        const cplx a = r.a_discrete.embed(r.mesh);
        recs.push_back({{"delta", r.mesh},
                        {"vertices", r.vertices},
                        {"a_discrete", {a.real(), a.imag()}},
                        {"plus_over_delta", opt(r.plus_over_delta)},
                        {"free_over_delta", opt(r.free_over_delta)},
                        {"target", opt(r.target)},
                        {"relative_error", opt(r.relative_error)},
                        {"residual", r.residual},
                        {"error", r.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.error)}});
    }
    return {{"version", 1},
            {"region", report.spec.region},
            {"a", {report.spec.a.real(), report.spec.a.imag()}},
            {"meshes", report.spec.meshes},
            {"records", recs}};
}

nlohmann::json sweep_meta_json(const RunReport& report) {
    nlohmann::json t = nlohmann::json::array();
    double total = 0.0;
    for (const SweepRecord& r : report.records) {
        t.push_back({{"delta", r.mesh}, {"wall_seconds", r.seconds}});
        total += r.seconds;
    }
    return {{"timings", t}, {"total_seconds", total}};
}

// ---------------------------------------------------------------------------
// Test domains

std::vector<DiscreteDomain> oracle_test_domains(int max_edges) {
    std::vector<std::vector<GridPoint>> shapes;
    auto block = [](int nx, int ny) {
        std::vector<GridPoint> v;
        for (int j = 0; j < nx; ++j)
            for (int k = 0; k < ny; ++k) v.push_back({j, k});
        return v;
    };
    auto minus = [](std::vector<GridPoint> v, std::initializer_list<GridPoint> drop) {
        std::erase_if(v, [&](GridPoint p) { return std::find(drop.begin(), drop.end(), p) != drop.end(); });
        return v;
    };
    auto plus = [](std::vector<GridPoint> v, std::initializer_list<GridPoint> add) {
        v.insert(v.end(), add.begin(), add.end());
        return v;
    };
    shapes.push_back(block(2, 1));                         // single edge
    shapes.push_back(block(4, 1));                         // path
    shapes.push_back(block(2, 2));                         // unit cell
    shapes.push_back({{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}});  // cross
    shapes.push_back(block(3, 2));
    shapes.push_back(block(2, 3));
    shapes.push_back(plus(block(3, 2), {{1, 2}}));         // T
    shapes.push_back(minus(block(3, 3), {{2, 2}}));        // L-ish
    shapes.push_back(minus(block(3, 3), {{1, 2}}));        // U: outside point with multiplicity 3
    shapes.push_back(block(4, 2));
    shapes.push_back(block(2, 4));
    shapes.push_back({{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}, {0, 1}, {1, 2}});  // staircase
    shapes.push_back(block(3, 3));
    shapes.push_back(block(5, 2));
    shapes.push_back(block(2, 5));
    shapes.push_back(plus(block(3, 3), {{3, 1}}));
    shapes.push_back(minus(block(4, 3), {{3, 2}}));
    shapes.push_back(block(6, 2));
    std::vector<DiscreteDomain> out;
    for (auto& s : shapes) {
        DiscreteDomain d = from_points(std::move(s));
        if (static_cast<int>(d.edges().size()) <= max_edges && d.simply_connected() && !d.horizontal_edges().empty())
            out.push_back(std::move(d));
    }
    return out;
}

double oracle_solver_discrepancy(const DiscreteDomain& domain) {
    double worst = 0.0;
    for (int e : domain.horizontal_edges()) {
        const HalfPoint a = domain.edge_midpoint(e);
        const SpinorField f = solve_spinor(domain, a);
        for (const MedialVertex& mv : domain.medial_vertices())
            worst = std::max(worst, std::abs(f.at(mv.pos) - oracle_spinor(domain, a, mv.pos)));
        const PartitionFunctions pf = partition_functions(domain, e);
        worst = std::max(worst, std::abs(f.source_value() - pf.plus_ratio()));
    }
    return worst;
}

NestedChain nested_test_chain() {
    NestedChain c;
    c.a = {1, 2};  // edge (0,1)–(1,1)
    c.domains.push_back(DiscreteDomain::block(2, 2));
    c.domains.push_back(DiscreteDomain::block(2, 3));
    c.domains.push_back(DiscreteDomain::block(3, 3));
    c.domains.push_back(DiscreteDomain::block(4, 3));
    return c;
}

bool exact_monotone(const NestedChain& chain, std::string* detail) {
    std::vector<PartitionFunctions> pf;
    const EnumerationLimits lim{24, 20};
    for (const DiscreteDomain& d : chain.domains) {
        const int m = d.medial_index(chain.a);
        if (m < 0) throw PreconditionError("nested chain: a is not an edge of every domain");
        pf.push_back(partition_functions(d, d.medial_vertices()[m].index, lim));
    }
    bool ok = true;
    std::string text;
    for (std::size_t i = 0; i + 1 < pf.size(); ++i) {
        // Z⁺_i/Z_i ≥ Z⁺_{i+1}/Z_{i+1}, both Z positive
        const ZSqrt2 lhs = pf[i].z_plus * pf[i + 1].z, rhs = pf[i + 1].z_plus * pf[i].z;
        ok = ok && lhs >= rhs;
        text += fmt::format("{}{:.12f}", i ? " >= " : "", pf[i].plus_ratio());
    }
    text += fmt::format(" >= {:.12f}", pf.back().plus_ratio());
    if (detail) *detail = "Z+/Z: " + text;
    return ok;
}

// ---------------------------------------------------------------------------
// Verification suite

namespace {

struct Check {
    std::string name;
    VerifyLevel level;
    std::function<CheckResult(const VerifyOptions&)> run;
};

CheckResult result(std::string detail, bool ok) { return {"", ok, std::move(detail), 0.0}; }

const std::vector<Check>& registry() {
    static const std::vector<Check> checks = {
        {"coupling-table", VerifyLevel::quick,
         [](const VerifyOptions& o) {
             CouplingEvaluator local;
             const CouplingEvaluator& c0 = o.coupling ? *o.coupling : local;
             double worst = 0.0;
             std::string where;
             for (const auto& e : exact_coupling_table()) {
                 const double d = std::abs(c0(e.x, e.y) - e.value);
                 if (d > worst) worst = d, where = fmt::format("({},{})", e.x, e.y);
             }
             return result(fmt::format("max |C0 - exact| = {:.2e} at {}", worst, where), worst <= 1e-10);
         }},
        {"coupling-routes", VerifyLevel::quick,
         [](const VerifyOptions&) {
             CouplingEvaluator c0;
             double worst = 0.0;
             for (int x = -9; x <= 9; x += 2)
                 for (int y = -8; y <= 8; y += 3)
                     if ((x + y) & 1) worst = std::max(worst, std::abs(c0.quadrature(x, y) - c0_phi_residue(x, y)));
             return result(fmt::format("max |theta-route - phi-route| = {:.2e}", worst), worst <= 1e-10);
         }},
        {"full-plane-singularity", VerifyLevel::quick,
         [](const VerifyOptions& o) {
             CouplingEvaluator local;
             const auto r = check_full_plane_singularity(o.coupling ? *o.coupling : local);
             return result(fmt::format("closed form {:.2e}, quadrature {:.2e}", r.closed_form, r.quadrature),
                           r.closed_form <= 1e-14 && r.quadrature <= 1e-8);
         }},
        {"kenyon-asymptotics", VerifyLevel::quick,
         [](const VerifyOptions&) {
             CouplingEvaluator c0;
             double kx = 0, ky = 0;
             for (int x = -50; x <= 50; ++x)
                 for (int y = -50; y <= 50; ++y) {
                     const double r = std::hypot(double(x), double(y));
                     if (r < 10 || r > 50 || !((x + y) & 1)) continue;
                     const double k = std::abs(c0.quadrature(x, y) - c0_asymptotic(x, y)) * r * r;
                     (x & 1 ? kx : ky) = std::max(x & 1 ? kx : ky, k);
                 }
             return result(fmt::format("sup |C0 - asym|*|z|^2: x odd {:.4f}, y odd {:.4f}", kx, ky), kx <= 5 && ky <= 5);
         }},
        {"oracle-equivalence", VerifyLevel::quick,
         [](const VerifyOptions&) {
             const auto doms = oracle_test_domains(16);
             double worst = 0.0;
             for (const auto& d : doms) worst = std::max(worst, oracle_solver_discrepancy(d));
             return result(fmt::format("{} domains, max |solver - oracle| = {:.2e}", doms.size(), worst),
                           doms.size() >= 10 && worst < 1e-9);
         }},
        {"winding", VerifyLevel::quick,
         [](const VerifyOptions&) {
             std::size_t configs = 0, walks = 0, bad = 0;
             for (const auto& d : oracle_test_domains(12))
                 for (int e : d.horizontal_edges()) {
                     const HalfPoint a = d.edge_midpoint(e);
                     for (const MedialVertex& z : d.medial_vertices()) {
                         if (z.pos == a) continue;
                         for (const auto& c : enumerate_spinor_configs(d, a, z.pos)) {
                             const auto w = winding_well_defined(d, c);
                             ++configs;
                             walks += w.walks;
                             bad += !w.consistent;
                         }
                     }
                 }
             return result(fmt::format("{} configurations, {} walks, {} inconsistent", configs, walks, bad), bad == 0);
         }},
        {"energy-identities", VerifyLevel::quick,
         [](const VerifyOptions&) {
             int cases = 0, bad = 0;
             double solver = 0.0;
             const ZSqrt2 s2(0, 1), a(-1, 1), ainv(1, 1);
             for (const auto& d : oracle_test_domains(16))
                 for (int e : d.horizontal_edges()) {
                     ++cases;
                     const EnergyOracle o = oracle_energy_plus(d, e);
                     const auto& pf = o.partition;
                     const Edge& ed = d.edges()[e];
                     const auto ht = high_temp_correlation(d, d.vertices()[ed.u], d.vertices()[ed.v]);
                     // num/Z − √2/2 = −(2Z⁺/Z − (2+√2)/2), multiplied through by 2Z
                     const bool ident = ht.numerator * ZSqrt2(2) - s2 * pf.z ==
                                        -(pf.z_plus * ZSqrt2(4) - ZSqrt2(2, 1) * pf.z);
                     const bool toggle = ht.numerator == a * pf.z_plus + ainv * pf.z_minus;
                     bad += !(ident && toggle && o.free == -o.plus);
                     const SpinorField f = solve_spinor(d, d.edge_midpoint(e));
                     const EnergyDensity en = energy_density(f);
                     solver = std::max({solver, std::abs(en.plus - o.plus), std::abs(en.free + en.plus)});
                 }
             return result(fmt::format("{} cases, {} exact failures, solver deviation {:.2e}", cases, bad, solver),
                           bad == 0 && solver <= 1e-9);
         }},
        {"low-temperature-bijection", VerifyLevel::quick,
         [](const VerifyOptions&) {
             int bad = 0, n = 0;
             double werr = 0.0;
             for (const auto& d : oracle_test_domains(16)) {
                 const auto r = low_temp_bijection_check(d);
                 ++n;
                 bad += !r.bijective;
                 werr = std::max(werr, r.max_weight_error);
             }
             return result(fmt::format("{} domains, {} non-bijective, weight error {:.2e}", n, bad, werr),
                           bad == 0 && werr < 1e-12);
         }},
        {"bvp-structure", VerifyLevel::quick,
         [](const VerifyOptions&) {
             const DiscreteDomain d = DiscreteDomain::block(12, 12);
             const HalfPoint a = nearest_horizontal_midpoint(d, {5.5, 5.5});
             const SpinorField f = solve_spinor(d, a);
             CouplingEvaluator::Options co;
             co.crossover_radius = 1e9;
             const CouplingEvaluator c0(co);
             const SpinorField g = difference_spinor(f, c0);
             // f itself away from the four centers touching a; the difference everywhere
             double dbar_max = 0.0;
             auto near_a = [&](HalfPoint v) { return std::abs(v.x - a.x) + std::abs(v.y - a.y) == 1; };
             std::vector<HalfPoint> centers(d.dual_vertices().begin(), d.dual_vertices().end());
             for (GridPoint p : d.vertices()) centers.push_back(HalfPoint::of(p));
             for (HalfPoint v : centers) {
                 if (!near_a(v)) dbar_max = std::max(dbar_max, std::abs(dbar(f, v)));
                 dbar_max = std::max(dbar_max, std::abs(dbar(g, v)));
             }
             const double shol = s_holomorphicity_residual(f), bc = boundary_condition_residual(f),
                          sing = singularity_residual(f), diff = s_holomorphicity_residual(g, true),
                          morera = std::abs(contour_sum(g, diamond_contour(a - HalfPoint{1, 0}, 1)));
             return result(fmt::format("residual {:.1e}, s-hol {:.1e}, boundary {:.1e}, singularity {:.1e}, dbar {:.1e}, "
                                       "difference s-hol {:.1e}, Morera at a {:.1e}",
                                       f.report.residual, shol, bc, sing, dbar_max, diff, morera),
                           shol <= 1e-9 && bc <= 1e-9 && sing <= 1e-9 && dbar_max <= 1e-9 && diff <= 1e-8 &&
                               morera <= 1e-8);
         }},
        {"discrete-integral", VerifyLevel::quick,
         [](const VerifyOptions&) {
             const DiscreteDomain d = DiscreteDomain::block(20, 20);
             const HalfPoint a = nearest_horizontal_midpoint(d, {9.5, 9.5});
             const SpinorField f = solve_spinor(d, a);
             const DiscreteIntegral I = discrete_integral(f);
             const SubSuperReport r = check_sub_super(I, f, 1e-8);
             return result(fmt::format("I° spread {:.1e}, violations {}+{}, boundary {:.1e}, same-lattice {:.1e}",
                                       r.boundary_dual_spread, r.primal_violations.size(), r.dual_violations.size(),
                                       r.boundary_modulus, I.max_same_lattice),
                           r.ok(1e-8) && I.max_same_lattice <= 1e-8);
         }},
        {"monotonicity", VerifyLevel::quick,
         [](const VerifyOptions&) {
             std::string detail;
             const bool ok = exact_monotone(nested_test_chain(), &detail);
             return result(detail, ok);
         }},
        {"mc-unit-cell", VerifyLevel::full,
         [](const VerifyOptions& o) {
             MCParams p;
             p.seed = o.seed;
             p.sweeps = 200000;
             const Estimate e = estimate_energy(DiscreteDomain::block(2, 2), {1, 0}, BoundaryCondition::plus, p);
             const double exact = std::tanh(4 * kBetaCritical) - std::numbers::sqrt2 / 2;
             return result(fmt::format("{:.5f} +- {:.5f} vs {:.5f}", e.mean, e.std_error, exact),
                           std::abs(e.mean - exact) <= 3 * e.std_error);
         }},
        {"mc-square", VerifyLevel::full,
         [](const VerifyOptions& o) {
             const DiscreteDomain d = DiscreteDomain::block(8, 8);
             const HalfPoint a = nearest_horizontal_midpoint(d, {3.5, 3.5});
             MCParams p;
             p.seed = o.seed;
             p.sweeps = 1000000;
             const Estimate e = estimate_energy(d, a, BoundaryCondition::plus, p);
             const double s = energy_density(solve_spinor(d, a)).plus;
             return result(fmt::format("{:.5f} +- {:.5f} vs solver {:.5f}", e.mean, e.std_error, s),
                           std::abs(e.mean - s) <= 3 * e.std_error);
         }},
        {"disk-convergence", VerifyLevel::full,
         [](const VerifyOptions&) {
             const RunReport r = cmd_sweep({Disk{{0, 0}, 1.0}, {0, 0}, {1.0 / 16, 1.0 / 32, 1.0 / 64}});
             const auto& last = r.records.back();
             return result(fmt::format("relative error at delta=1/64: {:.2e}", last.relative_error.value_or(NAN)),
                           last.relative_error && *last.relative_error < 0.1);
         }},
    };
    return checks;
}

}  // namespace

std::vector<std::string> verify_check_names(VerifyLevel level) {
    std::vector<std::string> out;
    for (const auto& c : registry())
        if (level == VerifyLevel::full || c.level == VerifyLevel::quick) out.push_back(c.name);
    return out;
}

CheckResult run_check(const std::string& name, const VerifyOptions& opt) {
    for (const auto& c : registry()) {
        if (c.name != name) continue;
        const auto t0 = clock_type::now();
        CheckResult r;
        try {
            r = c.run(opt);
        } catch (const std::exception& ex) {
            r = {"", false, fmt::format("exception: {}", ex.what()), 0.0};
        }
        r.name = name;
        r.seconds = since(t0);
        return r;
    }
    throw PreconditionError(fmt::format("unknown check '{}'", name));
}

std::string format_report_line(const CheckResult& r) {
    return fmt::format("[{}] {:<26} {} ({:.2f}s)", r.passed ? "PASS" : "FAIL", r.name, r.detail, r.seconds);
}

std::vector<CheckResult> cmd_verify(const VerifyOptions& opt, std::ostream* progress) {
    std::vector<CheckResult> out;
    for (const auto& name : verify_check_names(opt.level)) {
        out.push_back(run_check(name, opt));
        if (progress) *progress << format_report_line(out.back()) << std::endl;
    }
    return out;
}

HalfPoint medial_at(const DiscreteDomain& domain, cplx z) {
    const cplx d = 2.0 * z / domain.mesh();
    const HalfPoint h{static_cast<int>(std::lround(d.real())), static_cast<int>(std::lround(d.imag()))};
    if (std::abs(d - cplx(h.x, h.y)) > 1e-6 || domain.medial_index(h) < 0)
        throw PreconditionError(fmt::format("({}, {}) is not a medial vertex of the domain", z.real(), z.imag()));
    return h;
}

}  // namespace ising
