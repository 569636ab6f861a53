#pragma once

// Kenyon's dimer coupling function C₀ on lattice displacements and the
// full-plane discrete spinor built from it.

#include <ising/lattice.hpp>
#include <ising/types.hpp>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>

namespace ising {

enum class CouplingMethod { exact, quadrature, asymptotic };
std::string to_string(CouplingMethod m);

/// C(0, x+iy) = (1/4π²)∬ e^{i(xθ−yφ)} / (2i sinθ + 2 sinφ) dθ dφ.
///
/// Quadrature runs on a one-dimensional reduction (residue in θ); beyond the
/// crossover radius the asymptotic formula is used instead. Values are
/// cached per displacement; the cache takes concurrent readers.
class CouplingEvaluator {
public:
    struct Options {
        double crossover_radius = 40.0;
        double tolerance = 1e-9;  ///< max accepted quadrature error estimate
    };

    CouplingEvaluator() : CouplingEvaluator(Options{}) {}
    explicit CouplingEvaluator(Options opt) : opt_(opt) {}

    /// Cached value; 0 when x + y is even (C₀(0,0) included).
    cplx operator()(int x, int y) const;
    CouplingMethod method_for(int x, int y) const;

    /// Always integrates, bypassing cache and crossover.
    cplx quadrature(int x, int y) const;

    const Options& options() const { return opt_; }
    std::size_t cache_size() const;
    void clear_cache();
    /// Replaces a cached value; for fault-injection tests only.
    void overwrite_cache_entry(int x, int y, cplx value);

private:
    static std::uint64_t key(int x, int y) {
        return (std::uint64_t(std::uint32_t(x)) << 32) | std::uint32_t(y);
    }

    Options opt_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<std::uint64_t, cplx> cache_;
};

/// Second, independent route (residue in φ), plain adaptive quadrature.
/// Slower; used to cross-check the main evaluator.
cplx c0_phi_residue(int x, int y);

/// Large-|z| form: Re(1/(πz)) for x odd, i·Im(1/(πz)) for y odd.
/// Throws PreconditionError when x + y is even.
cplx c0_asymptotic(int x, int y);

struct ExactCoupling {
    int x, y;
    cplx value;
};

/// The twelve closed-form values at |z| ≤ √5.
std::span<const ExactCoupling> exact_coupling_table();

/// f_C(a, z) for a medial vertex z, given as half-lattice offsets D = 2(z − a)/δ.
/// D = (0,0) gives (2+√2)/4.
cplx full_plane_spinor(const CouplingEvaluator& c0, HalfPoint offset);

/// f_C(a, z) with a, z in the plane (a a horizontal midpoint, z a medial vertex).
cplx full_plane_spinor(const CouplingEvaluator& c0, cplx a, cplx z, double mesh);

/// Closed forms of f_C(a, a ± δ/2 ± iδ/2).
cplx full_plane_neighbor_closed_form(int sx, int sy);

struct SingularityResiduals {
    double closed_form = 0.0;
    double quadrature = 0.0;
};

/// Max residual of the four projection relations at a:
/// P_ℓ[f(a,a)] = P_ℓ[f(a,a_{1±i})], P_ℓ[f(a,a) − 1] = P_ℓ[f(a,a_{−1±i})].
SingularityResiduals check_full_plane_singularity(const CouplingEvaluator& c0);

/// CSV table over |x+iy| ≤ radius with columns x,y,re,im,method.
void write_coupling_csv(std::ostream& out, const CouplingEvaluator& c0, double radius);

}  // namespace ising
