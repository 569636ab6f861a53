#pragma once

// Closed-form continuum objects on disks: the Möbius frame ψ_a, the
// hyperbolic metric element, and the continuous spinors f_Ω and f_C.

#include <ising/lattice.hpp>
#include <ising/types.hpp>

namespace ising {

/// ψ_a: disk → 𝔻 with ψ_a(a) = 0 and ψ_a′(a) > 0.
class ConformalFrame {
public:
    /// Throws PreconditionError if a is not strictly inside the disk.
    static ConformalFrame disk(cplx center, double radius, cplx a);
    static ConformalFrame disk(const Disk& d, cplx a) { return disk(d.center, d.radius, a); }

    cplx psi(cplx z) const;
    cplx dpsi(cplx z) const;
    /// Branch of √ψ′ continuous on the disk and positive at a.
    cplx sqrt_dpsi(cplx z) const;

    cplx source() const { return a_; }
    cplx center() const { return c_; }
    double radius() const { return r_; }
    bool contains(cplx z) const { return std::abs(z - c_) < r_; }

private:
    ConformalFrame(cplx c, double r, cplx a) : c_(c), r_(r), a_(a), alpha_((a - c) / r) {}
    cplx c_;
    double r_;
    cplx a_;
    cplx alpha_;  ///< (a − c)/R
};

/// ℓ_Ω(a) = 2ψ_a′(a).
double hyperbolic_element(const ConformalFrame& frame);

/// f_Ω(a, z) = (1/2π)√ψ′(a)√ψ′(z)(ψ(z) + 1)/ψ(z).
cplx continuous_spinor(const ConformalFrame& frame, cplx z);

/// f_C(a, z) = 1/(2π(z − a)).
cplx full_plane_continuous_spinor(cplx a, cplx z);

/// (f_Ω − f_C)(a, a) = ψ_a′(a)/(2π).
double diagonal_difference(const ConformalFrame& frame);

/// Numerical limit of (f_Ω − f_C)(a, a + h): average over h·{1, i, −1, −i}
/// at h and h/2, then Richardson extrapolation.
double diagonal_difference_limit(const ConformalFrame& frame, double h = 1e-3);

/// Max over `samples` equally spaced boundary points of |Im(f ν_out^{1/2})|,
/// for f_Ω or, with `full_plane`, for f_C.
double boundary_condition_residual(const ConformalFrame& frame, int samples = 256, bool full_plane = false);

/// Re ∫ f_Ω(a, z)² dz along the boundary arc from angle t0 to t1.
double boundary_square_integral(const ConformalFrame& frame, double t0, double t1);

}  // namespace ising
