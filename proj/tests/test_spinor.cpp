#include <doctest.h>

#include <ising/commands.hpp>
#include <ising/contours.hpp>
#include <ising/spinor.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ising;

namespace {

const double alpha = std::numbers::sqrt2 - 1.0;
const double fc_diag = (2 + std::numbers::sqrt2) / 4;

SpinorField constant_field(const DiscreteDomain& d, HalfPoint a, cplx c) {
    SpinorField f;
    f.domain = &d;
    f.source = a;
    f.values.assign(d.medial_vertices().size(), c);
    return f;
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("unit cell solve matches the exact sums") {
    const DiscreteDomain d = DiscreteDomain::block(2, 2);
    const HalfPoint a{1, 0};
    const SpinorField f = solve_spinor(d, a);
    CHECK(std::abs(f.source_value() - 1 / (1 + std::pow(alpha, 4))) < 1e-12);
    for (const MedialVertex& mv : d.medial_vertices()) CHECK(std::abs(f.at(mv.pos) - oracle_spinor(d, a, mv.pos)) < 1e-12);
    const LinearSystem sys = assemble_bvp(d, a);
    CHECK(sys.equations() == sys.unknowns());
    CHECK(sys.equations() == Eigen::Index(d.medial_edges().size()));
}

TEST_CASE("2x3 block and other small domains") {
    const DiscreteDomain d = DiscreteDomain::block(2, 3);
    CHECK(oracle_solver_discrepancy(d) < 1e-10);
    for (const auto& dom : oracle_test_domains(13)) CHECK(oracle_solver_discrepancy(dom) < 1e-10);
}

TEST_CASE("preconditions") {
    const DiscreteDomain d = DiscreteDomain::block(3, 3);
    CHECK_THROWS_AS(assemble_bvp(d, HalfPoint{-1, 0}), PreconditionError);  // boundary medial vertex
    CHECK_THROWS_AS(assemble_bvp(d, HalfPoint{0, 1}), PreconditionError);   // vertical edge
    std::vector<GridPoint> ring;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            if (!(j == 1 && k == 1)) ring.push_back({j, k});
    const DiscreteDomain r(ring, 1.0);
    CHECK_THROWS_AS(solve_spinor(r, HalfPoint{1, 0}), PreconditionError);
}

TEST_CASE("boundary condition and residuals") {
    const DiscreteDomain d = discretize(Disk{{0, 0}, 1.0}, 1.0 / 8);
    const SpinorField f = solve_spinor(d, nearest_horizontal_midpoint(d, {0, 0}));
    CHECK(boundary_condition_residual(f) < 1e-12);
    for (std::size_t m = 0; m < d.medial_vertices().size(); ++m) {
        if (d.medial_vertices()[m].kind != MedialKind::boundary) continue;
        const cplx nu = d.outward_normal(int(m)) / d.mesh();
        CHECK(std::abs((f.values[m] * std::sqrt(nu)).imag()) < 1e-12);
    }
    CHECK(s_holomorphicity_residual(f) < 1e-12);
    CHECK(s_holomorphicity_residual(f, true) > 0.1);  // the edges at a carry the source
    CHECK(singularity_residual(f) < 1e-12);
    CHECK(f.report.residual < 1e-12);
}

TEST_CASE("difference spinor and energy density") {
    const CouplingEvaluator c0;
    const DiscreteDomain cell = DiscreteDomain::block(2, 2);
    const SpinorField f = solve_spinor(cell, {1, 0});
    const SpinorField g = difference_spinor(f, c0);
    const PartitionFunctions pf = partition_functions(cell, 0);
    CHECK(std::abs(g.source_value() - (pf.plus_ratio() - fc_diag)) < 1e-12);
    const EnergyDensity e = energy_density(f);
    CHECK(e.plus == doctest::Approx(2 * (1 / (1 + std::pow(alpha, 4)) - fc_diag)).epsilon(1e-12));
    CHECK(e.plus == doctest::Approx(oracle_energy_plus(cell, 0).plus).epsilon(1e-12));
    CHECK(e.free == -e.plus);

    // growing squares around the same central edge: the difference at a decays
    double prev = 1.0;
    for (int n : {4, 8, 16, 32}) {
        const DiscreteDomain d = DiscreteDomain::block(n, n);
        const HalfPoint a = nearest_horizontal_midpoint(d, {n / 2.0 - 0.5, n / 2.0 - 1});
        const double v = std::abs(difference_spinor(solve_spinor(d, a), c0).source_value());
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 0.02);
}

TEST_CASE("discrete dbar") {
    const DiscreteDomain d = DiscreteDomain::block(4, 4);
    const HalfPoint a{3, 2};
    const SpinorField c = constant_field(d, a, {0.3, -0.7});
    SpinorField id = c;
    for (std::size_t m = 0; m < d.medial_vertices().size(); ++m) id.values[m] = d.medial_vertices()[m].pos.embed(d.mesh());
    const SpinorField f = solve_spinor(d, a);
    for (GridPoint p : d.vertices()) {
        const HalfPoint v = HalfPoint::of(p);
        CHECK(std::abs(dbar(c, v)) < 1e-15);
        CHECK(std::abs(dbar(id, v)) < 1e-15);
        if (std::abs(v.x - a.x) + std::abs(v.y - a.y) != 1) CHECK(std::abs(dbar(f, v)) < 1e-12);
    }
    for (HalfPoint w : d.dual_vertices()) {
        CHECK(std::abs(dbar(id, w)) < 1e-15);
        if (std::abs(w.x - a.x) + std::abs(w.y - a.y) != 1) CHECK(std::abs(dbar(f, w)) < 1e-12);
    }
    CHECK_THROWS_AS(dbar(f, HalfPoint{1, 0}), PreconditionError);
}

TEST_CASE("discrete contour sums") {
    const DiscreteDomain d = DiscreteDomain::block(12, 12);
    const HalfPoint a = nearest_horizontal_midpoint(d, {5.5, 5.5});
    const SpinorField f = solve_spinor(d, a);
    const CouplingEvaluator c0;
    const SpinorField g = difference_spinor(f, c0);
    const SpinorField c = constant_field(d, a, {1.5, 2.0});
    const HalfPoint far = a + HalfPoint{-7, 6};  // a dual vertex away from a
    CHECK(std::abs(contour_sum(c, diamond_contour(far, 2))) < 1e-14);
    CHECK(std::abs(contour_sum(f, diamond_contour(far, 2))) < 1e-9);
    const auto around = diamond_contour(a - HalfPoint{1, 0}, 2);
    CHECK(std::abs(contour_sum(f, around)) > 1e-3);
    CHECK(std::abs(contour_sum(g, around)) < 1e-9);
    CHECK_THROWS_AS(contour_sum(f, {a, a + HalfPoint{1, 1}}), PreconditionError);
}

TEST_CASE("discrete integral of zero and constant fields") {
    const DiscreteDomain d = DiscreteDomain::block(4, 4);
    const HalfPoint a{3, 2};
    const DiscreteIntegral z = discrete_integral(constant_field(d, a, 0.0));
    for (double v : z.primal) CHECK(v == 0.0);
    for (double v : z.dual) CHECK(v == 0.0);
    for (double v : z.boundary) CHECK(v == 0.0);

    const DiscreteIntegral I = discrete_integral(constant_field(d, a, {0.4, 0.9}));
    CHECK(I.max_inconsistency < 1e-14);
    for (int v = 0; v < int(d.vertices().size()); ++v) CHECK(std::abs(laplacian_primal(I, v)) < 1e-13);
    for (HalfPoint w : d.dual_vertices()) CHECK(std::abs(laplacian_dual(I, w)) < 1e-13);
}

TEST_CASE("sub/superharmonicity and boundary behaviour") {
    const DiscreteDomain small = DiscreteDomain::block(2, 3);
    for (int e : small.horizontal_edges()) {
        const SpinorField f = solve_spinor(small, small.edge_midpoint(e));
        const SubSuperReport r = check_sub_super(discrete_integral(f), f, 1e-9);
        CHECK(r.ok(1e-9));
    }
    const DiscreteDomain d = DiscreteDomain::block(10, 10);
    const HalfPoint a = nearest_horizontal_midpoint(d, {4.5, 4.5});
    const SpinorField f = solve_spinor(d, a);
    const DiscreteIntegral I = discrete_integral(f);
    const SubSuperReport r = check_sub_super(I, f, 1e-9);
    CHECK(r.ok(1e-9));
    CHECK(r.excluded.size() == 4);
    CHECK(I.max_same_lattice < 1e-12);
    // integration base does not matter beyond a constant
    const DiscreteIntegral J = discrete_integral(f, HalfPoint{5, 5});
    const double shift = J.primal[0] - I.primal[0];
    for (std::size_t v = 0; v < I.primal.size(); ++v) CHECK(std::abs(J.primal[v] - I.primal[v] - shift) < 1e-12);
    // without the exclusion, any violation sits next to a
    const SubSuperReport all = check_sub_super(I, f, 1e-9, false);
    for (HalfPoint p : all.primal_violations) CHECK(std::abs(p.x - a.x) + std::abs(p.y - a.y) == 1);
    for (HalfPoint p : all.dual_violations) CHECK(std::abs(p.x - a.x) + std::abs(p.y - a.y) == 1);
}

TEST_CASE("CSV exports") {
    const DiscreteDomain d = DiscreteDomain::block(2, 2);
    const SpinorField f = solve_spinor(d, {1, 0});
    std::ostringstream field;
    write_field_csv(field, f);
    // header + 4 edge midpoints + 8 boundary midpoints
    CHECK(count_lines(field.str()) == 1 + 12);
    CHECK(field.str().find(",source\n") != std::string::npos);
    std::ostringstream integral;
    const DiscreteIntegral I = discrete_integral(f);
    write_integral_csv(integral, I);
    CHECK(count_lines(integral.str()) == 1 + int(I.primal.size() + I.boundary.size() + I.dual.size()));
    CHECK(I.primal.size() == 4);
    CHECK(I.dual.size() == 9);
}
