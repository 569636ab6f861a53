#include <doctest.h>

#include <ising/contours.hpp>
#include <ising/ising_mc.hpp>
#include <ising/spinor.hpp>

#include <cmath>
#include <map>
#include <numbers>

using namespace ising;

namespace {

const double alpha = std::numbers::sqrt2 - 1.0;

struct Histogram {
    std::map<EdgeMask, double> mean, se;
};

// batch-means histogram of disagreement contours
Histogram contour_histogram(const DiscreteDomain& d, MCParams p, long sweeps, int batches = 32) {
    IsingChain c = sample_plus(d, p);
    std::map<EdgeMask, std::vector<double>> counts;
    const long per = sweeps / batches;
    for (const auto& w : enumerate_even_subsets(d)) counts[w.edges].assign(batches, 0.0);
    for (int b = 0; b < batches; ++b)
        for (long s = 0; s < per; ++s) {
            c.sweep();
            auto it = counts.find(c.disagreement_contour());
            if (it == counts.end()) FAIL("disagreement contour is not an even subset");  // never
            it->second[b] += 1.0 / per;
        }
    Histogram h;
    for (auto& [m, v] : counts) {
        double mu = 0, var = 0;
        for (double x : v) mu += x / batches;
        for (double x : v) var += (x - mu) * (x - mu) / (batches - 1);
        h.mean[m] = mu;
        h.se[m] = std::sqrt(var / batches);
    }
    return h;
}

void check_against_weights(const DiscreteDomain& d, const Histogram& h) {
    double z = 0;
    for (const auto& w : enumerate_even_subsets(d)) z += std::pow(alpha, w.size());
    for (const auto& w : enumerate_even_subsets(d)) {
        const double p = std::pow(alpha, w.size()) / z;
        CHECK(std::abs(h.mean.at(w.edges) - p) <= 4 * h.se.at(w.edges) + 1e-12);
    }
}

}  // namespace

TEST_CASE("unit cell, plus boundary") {
    const DiscreteDomain d = DiscreteDomain::block(2, 2);
    MCParams p;
    p.sweeps = 100000;
    p.seed = 7;
    const Estimate e = estimate_energy(d, {1, 0}, BoundaryCondition::plus, p);
    const double exact = std::tanh(4 * kBetaCritical) - std::numbers::sqrt2 / 2;
    CHECK(std::abs(e.mean - exact) <= 3 * e.std_error);
    CHECK(exact == doctest::Approx(oracle_energy_plus(d, 0).plus).epsilon(1e-14));
    CHECK(e.batches == 32);

    // E[σ] of the single dual spin
    IsingChain c = sample_plus(d, p);
    const int n = 64000;
    std::vector<double> batch(32, 0.0);
    for (int b = 0; b < 32; ++b)
        for (int s = 0; s < n / 32; ++s) {
            c.sweep();
            batch[b] += c.spin_at({1, 1}) / double(n / 32);
        }
    double mu = 0, var = 0;
    for (double x : batch) mu += x / 32;
    for (double x : batch) var += (x - mu) * (x - mu) / 31;
    CHECK(std::abs(mu - std::tanh(4 * kBetaCritical)) <= 3 * std::sqrt(var / 32));
    CHECK(c.spin_at({-1, 1}) == 1);  // outside face
}

TEST_CASE("single edge, free boundary") {
    const DiscreteDomain d = DiscreteDomain::block(2, 1);
    MCParams p;
    p.sweeps = 100000;
    p.seed = 3;
    for (Algorithm alg : {Algorithm::cluster, Algorithm::single_flip}) {
        p.algorithm = alg;
        const Estimate e = estimate_energy(d, {1, 0}, BoundaryCondition::free, p);
        CHECK(std::abs(e.mean - (alpha - std::numbers::sqrt2 / 2)) <= 3 * e.std_error);
    }
}

TEST_CASE("zero temperature and replay") {
    const DiscreteDomain d = DiscreteDomain::block(5, 5);
    MCParams p;
    p.zero_temperature = true;
    IsingChain z = sample_plus(d, p);
    for (int s = 0; s < 10; ++s) {
        z.sweep();
        for (auto v : z.spins()) CHECK(v == 1);
    }
    MCParams q;
    q.seed = 99;
    q.burn_in = 10;
    IsingChain a = sample_plus(d, q), b = sample_plus(d, q);
    bool differs_from_other_seed = false;
    q.seed = 100;
    IsingChain c = sample_plus(d, q);
    for (int s = 0; s < 200; ++s) {
        a.sweep(), b.sweep(), c.sweep();
        CHECK(a.spins() == b.spins());
        differs_from_other_seed |= a.spins() != c.spins();
    }
    CHECK(differs_from_other_seed);
}

TEST_CASE("estimates do not depend on the thread count") {
    const DiscreteDomain d = DiscreteDomain::block(4, 4);
    MCParams p;
    p.sweeps = 3200;
    p.chains = 4;
    p.threads = 1;
    const Estimate one = estimate_energy(d, {3, 2}, BoundaryCondition::plus, p);
    p.threads = 4;
    const Estimate four = estimate_energy(d, {3, 2}, BoundaryCondition::plus, p);
    CHECK(one.mean == four.mean);
    CHECK(one.std_error == four.std_error);
    CHECK(one.batches == 128);
}

TEST_CASE("single-flip stationary distribution") {
    // two dual spins: four states with weights α^{|contour|}
    const DiscreteDomain d = DiscreteDomain::block(3, 2);
    MCParams p;
    p.algorithm = Algorithm::single_flip;
    p.seed = 11;
    check_against_weights(d, contour_histogram(d, p, 200000));
    check_against_weights(DiscreteDomain::block(2, 2), contour_histogram(DiscreteDomain::block(2, 2), p, 100000));
}

TEST_CASE("cluster chain reproduces the low-temperature contour weights") {
    MCParams p;
    p.seed = 5;
    check_against_weights(DiscreteDomain::block(2, 2), contour_histogram(DiscreteDomain::block(2, 2), p, 100000));
    check_against_weights(DiscreteDomain::block(3, 2), contour_histogram(DiscreteDomain::block(3, 2), p, 200000));
    check_against_weights(DiscreteDomain::block(3, 3), contour_histogram(DiscreteDomain::block(3, 3), p, 400000));
}

TEST_CASE("4x4 block against the exact sums") {
    const DiscreteDomain d = DiscreteDomain::block(4, 4);
    MCParams p;
    p.sweeps = 200000;
    p.seed = 21;
    const Estimate e = estimate_energy(d, {3, 2}, BoundaryCondition::plus, p);
    const double exact = oracle_energy_plus(d, d.medial_vertices()[d.medial_index({3, 2})].index, {24, 20}).plus;
    CHECK(std::abs(e.mean - exact) <= 3 * e.std_error);
}

TEST_CASE("8x8: plus and free have opposite signs") {
    const DiscreteDomain d = DiscreteDomain::block(8, 8);
    const HalfPoint a = nearest_horizontal_midpoint(d, {3.5, 3.5});
    MCParams p;
    p.sweeps = 200000;
    p.seed = 17;
    const Estimate plus = estimate_energy(d, a, BoundaryCondition::plus, p);
    const Estimate free = estimate_energy(d, a, BoundaryCondition::free, p);
    CHECK(plus.mean > 0);
    CHECK(free.mean < 0);
    CHECK(std::abs(plus.mean + free.mean) <= 3 * std::hypot(plus.std_error, free.std_error));
    const double s = energy_density(solve_spinor(d, a)).plus;
    CHECK(std::abs(free.mean + s) <= 3 * free.std_error);
}

TEST_CASE("12x12 against the solver") {
    const DiscreteDomain d = DiscreteDomain::block(12, 12);
    const HalfPoint a = nearest_horizontal_midpoint(d, {5.5, 5.5});
    MCParams p;
    p.sweeps = 1000000;
    p.seed = 12;
    const Estimate e = estimate_energy(d, a, BoundaryCondition::plus, p);
    const double s = energy_density(solve_spinor(d, a)).plus;
    CHECK(std::abs(e.mean - s) <= 3 * e.std_error);
}

TEST_CASE("preconditions") {
    const DiscreteDomain d = DiscreteDomain::block(3, 3);
    MCParams p;
    CHECK_THROWS_AS(estimate_energy(d, {0, 1}, BoundaryCondition::plus, p), PreconditionError);
    p.batches = 8;
    CHECK_THROWS_AS(estimate_energy(d, {1, 0}, BoundaryCondition::plus, p), PreconditionError);
    CHECK_THROWS_AS(sample_plus(DiscreteDomain::block(3, 1), MCParams{}), PreconditionError);
    CHECK_THROWS_AS(parse_boundary("periodic"), PreconditionError);
    CHECK(parse_algorithm("single-flip") == Algorithm::single_flip);
}
