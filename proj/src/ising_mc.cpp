#include <ising/ising_mc.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

namespace ising {

BoundaryCondition parse_boundary(const std::string& s) {
    if (s == "plus") return BoundaryCondition::plus;
    if (s == "free") return BoundaryCondition::free;
    throw PreconditionError(fmt::format("unknown boundary condition '{}'", s));
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "cluster") return Algorithm::cluster;
    if (s == "single-flip") return Algorithm::single_flip;
    throw PreconditionError(fmt::format("unknown algorithm '{}'", s));
}

std::string to_string(BoundaryCondition b) { return b == BoundaryCondition::plus ? "plus" : "free"; }
std::string to_string(Algorithm a) { return a == Algorithm::cluster ? "cluster" : "single-flip"; }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

IsingChain::IsingChain(const DiscreteDomain& domain, BoundaryCondition bc, const MCParams& params, int chain)
    : domain_(&domain), bc_(bc), params_(params), rng_(splitmix64(splitmix64(params.seed) ^ std::uint64_t(chain))) {
    if (!(params.beta > 0)) throw PreconditionError("beta must be positive");
    if (bc == BoundaryCondition::plus) {
        pos_.assign(domain.dual_vertices().begin(), domain.dual_vertices().end());
        edge_nodes_.resize(domain.edges().size());
        for (int e = 0; e < static_cast<int>(domain.edges().size()); ++e) {
            auto [f1, f2] = faces_of_edge(domain, e);
            const int i = domain.dual_index(f1), j = domain.dual_index(f2);
            edge_nodes_[e] = {i, j};
            if (i < 0 && j < 0) continue;  // both sides frozen: constant term
            bonds_.emplace_back(i < 0 ? j : i, i < 0 ? -1 : j);
        }
    } else {
        for (GridPoint p : domain.vertices()) pos_.push_back(HalfPoint::of(p));
        for (const Edge& e : domain.edges()) bonds_.emplace_back(e.u, e.v);
    }
    spin_.assign(pos_.size(), 1);
    neighbors_.resize(pos_.size());
    for (auto [i, j] : bonds_) {
        neighbors_[i].push_back(j);
        if (j >= 0) neighbors_[j].push_back(i);
    }
    parent_.resize(pos_.size() + 1);
}

double IsingChain::uniform() { return double(rng_() >> 11) * 0x1.0p-53; }

void IsingChain::sweep() {
    if (params_.zero_temperature) {
        std::fill(spin_.begin(), spin_.end(), std::int8_t(1));
        return;
    }
    if (params_.algorithm == Algorithm::cluster) sweep_cluster();
    else sweep_heat_bath();
}

void IsingChain::sweep_cluster() {
    const int n = static_cast<int>(spin_.size());
    const int ghost = n;
    std::iota(parent_.begin(), parent_.end(), 0);
    auto find = [&](int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    };
    const double p = -std::expm1(-2.0 * params_.beta);
    for (auto [i, j] : bonds_) {
        const int sj = j < 0 ? 1 : spin_[j];
        if (spin_[i] != sj || uniform() >= p) continue;
        const int ri = find(i), rj = find(j < 0 ? ghost : j);
        if (ri != rj) parent_[std::max(ri, rj)] = std::min(ri, rj);
    }
    // ghost component keeps +; every other cluster gets a fresh random sign
    std::vector<std::int8_t> sign(n + 1, 0);
    const int rg = find(ghost);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (r == rg) {
            spin_[i] = 1;
            continue;
        }
        if (sign[r] == 0) sign[r] = uniform() < 0.5 ? 1 : -1;
        spin_[i] = sign[r];
    }
}

void IsingChain::sweep_heat_bath() {
    for (std::size_t i = 0; i < spin_.size(); ++i) {
        int h = 0;
        for (int j : neighbors_[i]) h += j < 0 ? 1 : spin_[j];
        const double up = 1.0 / (1.0 + std::exp(-2.0 * params_.beta * h));
        spin_[i] = uniform() < up ? 1 : -1;
    }
}

int IsingChain::spin_at(HalfPoint p) const {
    auto it = std::lower_bound(pos_.begin(), pos_.end(), p);
    if (it != pos_.end() && *it == p) return spin_[it - pos_.begin()];
    if (bc_ == BoundaryCondition::plus && p.is_dual()) return 1;
    throw PreconditionError(fmt::format("({},{})/2 carries no spin in this ensemble", p.x, p.y));
}

EdgeMask IsingChain::disagreement_contour() const {
    if (bc_ != BoundaryCondition::plus) throw PreconditionError("disagreement contour needs the + ensemble");
    EdgeMask m = 0;
    for (std::size_t e = 0; e < edge_nodes_.size() && e < 64; ++e) {
        const int s1 = edge_nodes_[e][0] < 0 ? 1 : spin_[edge_nodes_[e][0]];
        const int s2 = edge_nodes_[e][1] < 0 ? 1 : spin_[edge_nodes_[e][1]];
        if (s1 != s2) m |= EdgeMask(1) << e;
    }
    return m;
}

IsingChain sample_plus(const DiscreteDomain& domain, const MCParams& params, int chain) {
    if (domain.dual_vertices().empty()) throw PreconditionError("sample_plus: the domain has no bounded face");
    IsingChain c(domain, BoundaryCondition::plus, params, chain);
    for (long s = 0; s < params.burn_in; ++s) c.sweep();
    return c;
}

Estimate estimate_energy(const DiscreteDomain& domain, HalfPoint a, BoundaryCondition bc, const MCParams& params) {
    if (!a.is_horizontal_midpoint() || domain.medial_index(a) < 0)
        throw PreconditionError("estimate_energy: a must be a horizontal edge midpoint");
    if (params.batches < 16) throw PreconditionError("estimate_energy: need at least 16 batches");
    if (params.sweeps < params.batches) throw PreconditionError("estimate_energy: fewer sweeps than batches");
    if (params.chains < 1) throw PreconditionError("estimate_energy: need at least one chain");
    const HalfPoint p = bc == BoundaryCondition::plus ? a + HalfPoint{0, 1} : a + HalfPoint{1, 0};
    const HalfPoint q = bc == BoundaryCondition::plus ? a - HalfPoint{0, 1} : a - HalfPoint{1, 0};
    if (bc == BoundaryCondition::free && (domain.vertex_index(p.grid()) < 0 || domain.vertex_index(q.grid()) < 0))
        throw PreconditionError("estimate_energy: the edge at a is not an edge of the domain");
    if (bc == BoundaryCondition::plus && domain.dual_vertices().empty())
        throw PreconditionError("estimate_energy: the domain has no bounded face");

    const int nb = params.batches;
    const long per = params.sweeps / nb;
    std::vector<std::vector<double>> batch(params.chains, std::vector<double>(nb, 0.0));
    auto run = [&](int c) {
        IsingChain chain(domain, bc, params, c);
        for (long s = 0; s < params.burn_in; ++s) chain.sweep();
        for (int b = 0; b < nb; ++b) {
            long acc = 0;
            for (long s = 0; s < per; ++s) {
                chain.sweep();
                acc += chain.spin_at(p) * chain.spin_at(q);
            }
            batch[c][b] = double(acc) / double(per);
        }
    };
    const int nt = std::max(1, std::min(params.threads, params.chains));
    for (int c0 = 0; c0 < params.chains; c0 += nt) {
        std::vector<std::thread> pool;
        for (int c = c0; c < std::min(params.chains, c0 + nt); ++c) pool.emplace_back(run, c);
        for (auto& t : pool) t.join();
    }

    std::vector<double> all;
    for (const auto& b : batch) all.insert(all.end(), b.begin(), b.end());
    const double mean = std::accumulate(all.begin(), all.end(), 0.0) / all.size();
    double var = 0.0;
    for (double x : all) var += (x - mean) * (x - mean);
    var /= double(all.size() - 1);
    Estimate est;
    est.mean = mean - std::numbers::sqrt2 / 2.0;
    est.std_error = std::sqrt(var / double(all.size()));
    est.samples = per * nb * params.chains;
    est.batches = static_cast<int>(all.size());
    return est;
}

}  // namespace ising
