#pragma once

// Exhaustive contour enumeration on tiny domains. Exponential time; used as
// the exact reference for partition functions, energy densities and the
// discrete spinor.

#include <ising/exact.hpp>
#include <ising/lattice.hpp>

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace ising {

/// α = √2 − 1 = tanh β_c = e^{−2β_c}.
inline const double kAlpha = std::numbers::sqrt2 - 1.0;
/// β_c = ½ ln(√2 + 1).
inline const double kBetaCritical = 0.5 * std::log(std::numbers::sqrt2 + 1.0);

/// Bit i set ⇔ edge i of the domain is in the collection.
using EdgeMask = std::uint64_t;

struct EnumerationLimits {
    int max_edges = 20;
    int max_dual_spins = 20;
};

struct ContourConfig {
    EdgeMask edges = 0;
    int size() const { return std::popcount(edges); }
};

/// All ω ⊆ E with every vertex of even degree, the empty set included.
/// Iterates the cycle space of the domain in Gray-code order.
std::vector<ContourConfig> enumerate_even_subsets(const DiscreteDomain& domain, EnumerationLimits limits = {});

struct PartitionFunctions {
    ZSqrt2 z;        ///< Σ α^{|ω|} over even ω
    ZSqrt2 z_plus;   ///< ω not containing e
    ZSqrt2 z_minus;  ///< ω containing e

    double plus_ratio() const { return z_plus.to_double() / z.to_double(); }
};

PartitionFunctions partition_functions(const DiscreteDomain& domain, int edge, EnumerationLimits limits = {});

struct EnergyOracle {
    PartitionFunctions partition;
    double plus = 0.0;  ///< ⟨ε⟩⁺ = 2Z⁺/Z − (2+√2)/2
    double free = 0.0;  ///< ⟨ε⟩^free = −⟨ε⟩⁺
};

EnergyOracle oracle_energy_plus(const DiscreteDomain& domain, int horizontal_edge, EnumerationLimits limits = {});

/// γ ∈ C(a, z): full edges plus the half-edge [a, a+δ/2] and one half of the
/// edge carrying z, ending at `target_vertex`.
struct SpinorConfig {
    EdgeMask edges = 0;
    HalfPoint source;   ///< a
    HalfPoint target;   ///< z
    int target_vertex = 0;  ///< domain vertex the z half-edge is attached to

    /// |γ| with both half-edges counted ½.
    int weight_exponent() const { return std::popcount(edges) + 1; }
};

std::vector<SpinorConfig> enumerate_spinor_configs(const DiscreteDomain& domain, HalfPoint a, HalfPoint z,
                                                   EnumerationLimits limits = {});

struct WindingReport {
    bool consistent = true;
    int winding = 0;  ///< W / (π/2) mod 8 of the first walk found
    std::size_t walks = 0;
};

/// Follows every admissible walk along `config` and compares their windings mod 4π.
WindingReport winding_well_defined(const DiscreteDomain& domain, const SpinorConfig& config);

/// f(a, z) = (1/Z) Σ α^{|γ|} e^{−iW(γ)/2}, and Z⁺/Z at z = a.
/// Throws NumericalError if some configuration has an ill-defined winding.
cplx oracle_spinor(const DiscreteDomain& domain, HalfPoint a, HalfPoint z, EnumerationLimits limits = {});

struct HighTempCorrelation {
    ZSqrt2 numerator;  ///< Σ α^{|ω̃|} over ω̃ odd exactly at z1, z2
    ZSqrt2 z;
    double value() const { return numerator.to_double() / z.to_double(); }
};

/// Free-boundary ⟨σ_{z1} σ_{z2}⟩ for adjacent vertices, by direct
/// enumeration of C(z1, z2).
HighTempCorrelation high_temp_correlation(const DiscreteDomain& domain, GridPoint z1, GridPoint z2,
                                          EnumerationLimits limits = {});

struct BijectionReport {
    bool bijective = false;
    std::size_t spin_states = 0;
    std::size_t even_subsets = 0;
    double max_weight_error = 0.0;  ///< max |Boltzmann ratio − α^{|ω|}|
};

/// Maps every + boundary dual spin state to its disagreement contour and
/// checks the map onto even subsets together with the weights.
BijectionReport low_temp_bijection_check(const DiscreteDomain& domain, EnumerationLimits limits = {});

/// The two faces on either side of edge `e` (outside faces included).
std::pair<HalfPoint, HalfPoint> faces_of_edge(const DiscreteDomain& domain, int e);

/// {domain_hash, a, z, Z, Z_plus, Z_minus, spinor} for the edge carrying a.
nlohmann::json oracle_to_json(const DiscreteDomain& domain, HalfPoint a, HalfPoint z, EnumerationLimits limits = {});

}  // namespace ising
