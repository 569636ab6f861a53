#pragma once

// Monte Carlo for the Ising model on a discrete domain: + boundary on the
// dual (bounded faces, outside faces frozen to +1) and free boundary on the
// primal graph.

#include <ising/contours.hpp>
#include <ising/lattice.hpp>

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ising {

enum class BoundaryCondition { plus, free };
enum class Algorithm { cluster, single_flip };

BoundaryCondition parse_boundary(const std::string& s);
Algorithm parse_algorithm(const std::string& s);
std::string to_string(BoundaryCondition b);
std::string to_string(Algorithm a);

struct MCParams {
    double beta = kBetaCritical;
    long burn_in = 1000;
    long sweeps = 100000;  ///< measurement sweeps per chain
    std::uint64_t seed = 1;
    Algorithm algorithm = Algorithm::cluster;
    bool zero_temperature = false;  ///< β = ∞: every spin +1
    int chains = 1;
    int threads = 1;
    int batches = 32;
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;  ///< from batch means
    long samples = 0;
    int batches = 0;
};

/// SplitMix64 step; used to derive per-chain seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Spins on the nodes of an interaction graph; a neighbor index of −1 is the
/// frozen + ghost.
class IsingChain {
public:
    IsingChain(const DiscreteDomain& domain, BoundaryCondition bc, const MCParams& params, int chain = 0);

    /// One sweep of the chosen algorithm.
    void sweep();
    const std::vector<std::int8_t>& spins() const { return spin_; }
    /// Node positions: face centers (plus) or vertices (free), half-lattice units.
    const std::vector<HalfPoint>& nodes() const { return pos_; }
    /// Spin at a node position; +1 for outside faces in the + ensemble.
    int spin_at(HalfPoint p) const;
    /// Edge set of the domain on which the two sides disagree (+ ensemble) —
    /// the low-temperature contour of the current state.
    EdgeMask disagreement_contour() const;

private:
    void sweep_cluster();
    void sweep_heat_bath();
    double uniform();

    const DiscreteDomain* domain_;
    BoundaryCondition bc_;
    MCParams params_;
    std::mt19937_64 rng_;
    std::vector<HalfPoint> pos_;
    std::vector<std::int8_t> spin_;
    std::vector<std::pair<int, int>> bonds_;  ///< second = −1 for the ghost
    std::vector<std::vector<int>> neighbors_;
    std::vector<int> parent_;
    std::vector<std::array<int, 2>> edge_nodes_;  ///< per domain edge, the two face nodes (plus)
};

/// Chain for the + ensemble after burn-in; call sweep() for each new sample.
IsingChain sample_plus(const DiscreteDomain& domain, const MCParams& params, int chain = 0);

/// E[σσ] − √2/2 on the dual vertical edge through a (plus) or the primal
/// horizontal edge carrying a (free). Chains run on up to `threads` threads;
/// the result depends only on seed, chains, sweeps and batches.
Estimate estimate_energy(const DiscreteDomain& domain, HalfPoint a, BoundaryCondition bc, const MCParams& params);

}  // namespace ising
