#include <doctest.h>

#include <ising/continuum.hpp>

#include <cmath>
#include <numbers>

using namespace ising;

namespace {
const double pi = std::numbers::pi;
const ConformalFrame unit0 = ConformalFrame::disk({0, 0}, 1.0, {0, 0});
}  // namespace

TEST_CASE("Mobius frame") {
    for (cplx z : {cplx(0.2, 0.1), cplx(-0.5, 0.3), cplx(0, -0.9)}) {
        CHECK(std::abs(unit0.psi(z) - z) < 1e-15);
        CHECK(std::abs(unit0.dpsi(z) - 1.0) < 1e-15);
    }
    const auto f = ConformalFrame::disk({0, 0}, 1.0, {0.5, 0});
    CHECK(std::abs(f.psi(0.5)) < 1e-15);
    CHECK(std::abs(f.dpsi(0.5) - 4.0 / 3) < 1e-15);
    // derivative against a central difference, and √ψ′ squared
    const auto g = ConformalFrame::disk({1, -2}, 3.0, {1.7, -1.1});
    for (cplx z : {cplx(1.2, -2.5), cplx(2.9, -0.4), cplx(-1.5, -2.2)}) {
        const double h = 1e-5;
        const cplx num = (g.psi(z + h) - g.psi(z - h)) / (2 * h);
        CHECK(std::abs(num - g.dpsi(z)) < 1e-8);
        CHECK(std::abs(g.sqrt_dpsi(z) * g.sqrt_dpsi(z) - g.dpsi(z)) < 1e-14);
        CHECK(std::abs(g.psi(z)) < 1.0);
    }
    CHECK(std::abs(g.psi(cplx(1, -2) + 3.0 * std::polar(1.0, 0.7))) == doctest::Approx(1.0));
    CHECK(g.sqrt_dpsi(g.source()).real() > 0);
    CHECK(std::abs(g.sqrt_dpsi(g.source()).imag()) < 1e-15);
    CHECK_THROWS_AS(ConformalFrame::disk({0, 0}, 1.0, {1.0, 0}), PreconditionError);
    CHECK_THROWS_AS(ConformalFrame::disk({0, 0}, -1.0, {0, 0}), PreconditionError);
}

TEST_CASE("hyperbolic metric element") {
    CHECK(hyperbolic_element(unit0) == doctest::Approx(2.0));
    for (double r : {0.1, 0.4, 0.8}) {
        const auto f = ConformalFrame::disk({0, 0}, 1.0, std::polar(r, 1.1));
        CHECK(hyperbolic_element(f) == doctest::Approx(2 / (1 - r * r)).epsilon(1e-14));
    }
    CHECK(hyperbolic_element(ConformalFrame::disk({2, 3}, 5.0, {2, 3})) == doctest::Approx(2.0 / 5));
}

TEST_CASE("continuous spinors") {
    CHECK(std::abs(continuous_spinor(unit0, 0.5) - 3 / (2 * pi)) < 1e-15);
    CHECK(std::abs(full_plane_continuous_spinor(0, {0, 1}) - cplx(0, -1 / (2 * pi))) < 1e-15);
    // residue 1/2π in every direction
    const auto f = ConformalFrame::disk({0, 0}, 1.0, {0.3, -0.2});
    for (cplx d : {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)}) {
        const double h = 1e-7;
        CHECK(std::abs(h * d * continuous_spinor(f, f.source() + h * d) - 1 / (2 * pi)) < 1e-6);
    }
}

TEST_CASE("diagonal of the difference") {
    CHECK(diagonal_difference(unit0) == doctest::Approx(1 / (2 * pi)));
    const auto f = ConformalFrame::disk({0, 0}, 1.0, {0.3, 0});
    const double target = diagonal_difference(f);
    CHECK(target == doctest::Approx(1 / (1 - 0.09) / (2 * pi)));
    CHECK(std::abs(diagonal_difference_limit(f) - target) < 1e-8);
    // one-sided error is linear in h
    auto err = [&](double h) {
        const cplx z = f.source() + h;
        return std::abs((continuous_spinor(f, z) - full_plane_continuous_spinor(f.source(), z)).real() - target);
    };
    CHECK(err(1e-3) / err(5e-4) == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("boundary condition") {
    CHECK(boundary_condition_residual(unit0) < 1e-12);
    // on the unit circle f_Ω(0, e^{iθ}) e^{iθ/2} = cos(θ/2)/π
    for (double t : {0.3, 1.7, 2.9}) {
        const cplx e = std::polar(1.0, t);
        CHECK(std::abs(continuous_spinor(unit0, e) * std::polar(1.0, t / 2) - std::cos(t / 2) / pi) < 1e-14);
    }
    const auto f = ConformalFrame::disk({0, 0}, 1.0, {0.3, 0});
    CHECK(boundary_condition_residual(f) < 1e-10);
    CHECK(boundary_condition_residual(ConformalFrame::disk({1, 1}, 2.0, {1.5, 0.4})) < 1e-10);
    CHECK(boundary_condition_residual(f, 256, true) > 1e-2);
}

TEST_CASE("f squared integrates to zero along the boundary") {
    const auto f = ConformalFrame::disk({0, 0}, 1.0, {0.3, 0.2});
    CHECK(std::abs(boundary_square_integral(f, 0.0, 1.0)) < 1e-10);
    CHECK(std::abs(boundary_square_integral(f, 1.0, 5.0)) < 1e-10);
}
