#pragma once

// The discrete Riemann boundary value problem for f_Ω(a, ·), the difference
// with the full-plane spinor, the energy density, and the discrete integral
// of f² with its harmonicity checks.

#include <ising/coupling.hpp>
#include <ising/lattice.hpp>

#include <Eigen/SparseCore>

#include <array>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace ising {

/// Real sparse system A·u = b. Interior medial vertices own two unknowns
/// (Re, Im); boundary ones own one, t, with f = t·ν_out^{-1/2}. One row per
/// medial edge: Re(ū f(x)) − Re(ū f(y)) = rhs, with u the direction of ℓ(e).
struct LinearSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    std::vector<int> column;  ///< first unknown of each medial vertex
    int source = 0;           ///< medial id of a

    Eigen::Index equations() const { return matrix.rows(); }
    Eigen::Index unknowns() const { return matrix.cols(); }
};

struct SolveReport {
    Eigen::Index equations = 0;
    Eigen::Index unknowns = 0;
    double residual = 0.0;  ///< max-norm of A·u − b
    double seconds = 0.0;
};

/// Complex value per medial vertex of a domain (indexed by medial id).
/// Holds a pointer to the domain, which must outlive it.
struct SpinorField {
    const DiscreteDomain* domain = nullptr;
    HalfPoint source;
    std::vector<cplx> values;
    SolveReport report;

    cplx at(HalfPoint m) const;
    cplx source_value() const { return at(source); }
};

/// Throws PreconditionError unless a is the midpoint of a horizontal edge
/// of the domain and the domain is simply connected.
LinearSystem assemble_bvp(const DiscreteDomain& domain, HalfPoint a);

/// Sparse LU on the square system; NumericalError if the residual exceeds `tolerance`.
SpinorField solve_spinor(const DiscreteDomain& domain, HalfPoint a, double tolerance = 1e-9);

/// f_Ω − f_C on every medial vertex.
SpinorField difference_spinor(const SpinorField& f, const CouplingEvaluator& c0);

struct EnergyDensity {
    double plus = 0.0;
    double free = 0.0;
};

/// plus = 2(f_Ω − f_C)(a, a), free = −plus.
EnergyDensity energy_density(const SpinorField& f);

/// Max |P_ℓ[f(x)] − P_ℓ[f(y)]| over medial edges; those at a are skipped
/// unless `include_source`.
double s_holomorphicity_residual(const SpinorField& f, bool include_source = false);

/// Max |Im(f ν_out^{1/2})| / |ν_out|^{1/2} over boundary medial vertices.
double boundary_condition_residual(const SpinorField& f);

/// Max residual of the four relations at a:
/// P_ℓ[f(a)] = P_ℓ[f(a_{1±i})], P_ℓ[f(a) − 1] = P_ℓ[f(a_{−1±i})].
double singularity_residual(const SpinorField& f);

/// ∂̄_δ f at a primal or dual point of the half-lattice; throws if one of the
/// four surrounding medial values is missing.
cplx dbar(const SpinorField& f, HalfPoint v);

/// Σ (f(v_i) + f(v_{i+1}))/2 · (v_{i+1} − v_i) along a closed medial loop
/// (last point equal to the first).
cplx contour_sum(const SpinorField& f, const std::vector<HalfPoint>& loop);

/// Counterclockwise loop through the medial vertices at ℓ¹-distance 2k+1
/// (half-lattice units) from `center`, closed.
std::vector<HalfPoint> diamond_contour(HalfPoint center, int k);

/// Discrete antiderivative of −Re f² on primal and dual vertices.
struct DiscreteIntegral {
    const DiscreteDomain* domain = nullptr;
    HalfPoint base;
    std::vector<double> primal;    ///< per domain vertex
    std::vector<double> boundary;  ///< per boundary entry (∂V with multiplicity)
    std::vector<std::array<int, 4>> boundary_of;  ///< entry per (vertex, step E,N,W,S), or −1
    std::vector<HalfPoint> dual_points;  ///< face centers touching a domain vertex
    std::vector<double> dual;
    std::unordered_map<HalfPoint, int, PointHash> dual_lookup;
    double max_inconsistency = 0.0;   ///< primal–dual rule over all medial edges
    double max_same_lattice = 0.0;    ///< same-sublattice rule, edges away from a

    double at_dual(HalfPoint d) const { return dual.at(dual_lookup.at(d)); }
    bool dual_is_interior(int i) const;
};

/// Breadth-first integration from `base` (a domain vertex or a face center
/// touching one). Increments: I(b) − I(w) = √2δ|P_ℓ[f(y)]|²; boundary primal
/// values by I(y) − I(x) = −Re(f(m)²(y − x)). Throws NumericalError if two
/// paths disagree by more than `tolerance`.
DiscreteIntegral discrete_integral(const SpinorField& f, HalfPoint base, double tolerance = 1e-9);
DiscreteIntegral discrete_integral(const SpinorField& f, double tolerance = 1e-9);

/// Δ_δ H(x) = Σ H(neighbors) − 4H(x); boundary neighbors taken per edge.
double laplacian_primal(const DiscreteIntegral& I, int vertex);
double laplacian_dual(const DiscreteIntegral& I, HalfPoint face);

struct SubSuperReport {
    std::vector<HalfPoint> primal_violations;  ///< Δ I• < −tol
    std::vector<HalfPoint> dual_violations;    ///< Δ I° > tol
    std::vector<HalfPoint> excluded;           ///< a ± δ/2, a ± iδ/2
    double min_primal_laplacian = 0.0;
    double max_dual_laplacian = 0.0;
    double boundary_dual_spread = 0.0;         ///< max − min of I° on ∂V*
    double boundary_identity = 0.0;            ///< max |∂_ν I• − (Im(fν^½)² − Re(fν^½)²)|
    double boundary_modulus = 0.0;             ///< max |∂_ν I• + δ|f(m)|²|
    bool ok(double tol) const {
        return primal_violations.empty() && dual_violations.empty() && boundary_dual_spread <= tol &&
               boundary_identity <= tol && boundary_modulus <= tol;
    }
};

/// Sub/superharmonicity at interior vertices (skipping the four next to the
/// source when `exclude_source`) and the boundary behaviour of I.
SubSuperReport check_sub_super(const DiscreteIntegral& I, const SpinorField& f, double tol = 1e-9,
                               bool exclude_source = true);

/// CSV with columns re(z),im(z),re(f),im(f),class (interior|boundary|source).
void write_field_csv(std::ostream& out, const SpinorField& f);

/// CSV with columns re(z),im(z),value,class (primal|boundary|dual).
void write_integral_csv(std::ostream& out, const DiscreteIntegral& I);

}  // namespace ising
