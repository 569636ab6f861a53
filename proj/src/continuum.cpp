#include <ising/continuum.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ising {

namespace {
constexpr double pi = std::numbers::pi;
}

ConformalFrame ConformalFrame::disk(cplx center, double radius, cplx a) {
    if (!(radius > 0)) throw PreconditionError("disk radius must be positive");
    if (!(std::abs(a - center) < radius))
        throw PreconditionError(fmt::format("point ({},{}) is not inside the disk", a.real(), a.imag()));
    return ConformalFrame(center, radius, a);
}

cplx ConformalFrame::psi(cplx z) const {
    const cplx w = (z - c_) / r_;
    return (w - alpha_) / (1.0 - std::conj(alpha_) * w);
}

cplx ConformalFrame::dpsi(cplx z) const {
    const cplx w = (z - c_) / r_;
    const cplx den = 1.0 - std::conj(alpha_) * w;
    return (1.0 - std::norm(alpha_)) / (r_ * den * den);
}

cplx ConformalFrame::sqrt_dpsi(cplx z) const {
    // 1 − ᾱw stays in the right half-plane on the disk, so this branch is
    // continuous there and positive at a
    const cplx w = (z - c_) / r_;
    return std::sqrt((1.0 - std::norm(alpha_)) / r_) / (1.0 - std::conj(alpha_) * w);
}

double hyperbolic_element(const ConformalFrame& frame) { return 2.0 * frame.dpsi(frame.source()).real(); }

cplx continuous_spinor(const ConformalFrame& frame, cplx z) {
    const cplx p = frame.psi(z);
    return frame.sqrt_dpsi(frame.source()) * frame.sqrt_dpsi(z) * (p + 1.0) / (p * 2.0 * pi);
}

cplx full_plane_continuous_spinor(cplx a, cplx z) { return 1.0 / (2.0 * pi * (z - a)); }

double diagonal_difference(const ConformalFrame& frame) { return frame.dpsi(frame.source()).real() / (2.0 * pi); }

double diagonal_difference_limit(const ConformalFrame& frame, double h) {
    auto g = [&](double s) {
        cplx acc = 0.0;
        for (cplx d : {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)}) {
            const cplx z = frame.source() + s * d;
            acc += continuous_spinor(frame, z) - full_plane_continuous_spinor(frame.source(), z);
        }
        return acc.real() / 4.0;
    };
    return 2.0 * g(h / 2) - g(h);
}

double boundary_condition_residual(const ConformalFrame& frame, int samples, bool full_plane) {
    double r = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double t = 2.0 * pi * k / samples;
        const cplx nu = std::polar(1.0, t);
        const cplx z = frame.center() + frame.radius() * nu;
        const cplx f = full_plane ? full_plane_continuous_spinor(frame.source(), z) : continuous_spinor(frame, z);
        r = std::max(r, std::abs((f * std::sqrt(nu)).imag()));
    }
    return r;
}

double boundary_square_integral(const ConformalFrame& frame, double t0, double t1) {
    auto integrand = [&](double t) {
        const cplx e = std::polar(1.0, t);
        const cplx f = continuous_spinor(frame, frame.center() + frame.radius() * e);
        return (f * f * cplx(0, frame.radius()) * e).real();
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, t0, t1, 10, 1e-12);
}

}  // namespace ising
