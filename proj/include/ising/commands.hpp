#pragma once

// Orchestration behind the command-line tool: sweeps, the named verification
// suite, and artifact export.

#include <ising/coupling.hpp>
#include <ising/ising_mc.hpp>
#include <ising/lattice.hpp>
#include <ising/spinor.hpp>

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ising {

// ---------------------------------------------------------------------------
// Sweep

struct SweepSpec {
    Region region;
    cplx a{0.0, 0.0};
    std::vector<double> meshes;  ///< strictly decreasing
};

struct SweepRecord {
    double mesh = 0.0;
    std::size_t vertices = 0;
    HalfPoint a_discrete;
    std::optional<double> plus_over_delta;
    std::optional<double> free_over_delta;
    std::optional<double> target;  ///< ℓ_Ω(a)/2π, disks only
    std::optional<double> relative_error;
    double residual = 0.0;
    double seconds = 0.0;
    std::string error;  ///< non-empty if this mesh failed
};

struct RunReport {
    SweepSpec spec;
    std::vector<SweepRecord> records;
};

/// Discretize, solve and compare with ±ℓ/2π for every mesh. Failures are
/// recorded per mesh; the sweep continues.
RunReport cmd_sweep(const SweepSpec& spec);

void write_sweep_csv(std::ostream& out, const RunReport& report);
/// Deterministic content only (no timings).
nlohmann::json sweep_to_json(const RunReport& report);
/// Timings and environment, kept apart so the main JSON is reproducible.
nlohmann::json sweep_meta_json(const RunReport& report);

// ---------------------------------------------------------------------------
// Verification

enum class VerifyLevel { quick, full };

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::quick;
    std::uint64_t seed = 1;
    int threads = 1;
    /// Evaluator used by coupling checks; a fresh one when null. Lets tests
    /// inject a corrupted cache.
    const CouplingEvaluator* coupling = nullptr;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<std::string> verify_check_names(VerifyLevel level);
CheckResult run_check(const std::string& name, const VerifyOptions& opt);
std::vector<CheckResult> cmd_verify(const VerifyOptions& opt, std::ostream* progress = nullptr);

/// Small simply connected test domains with at most `max_edges` edges.
std::vector<DiscreteDomain> oracle_test_domains(int max_edges);

/// Max |solve_spinor − oracle_spinor| over every horizontal a and every
/// medial z of the domain (z = a included).
double oracle_solver_discrepancy(const DiscreteDomain& domain);

/// Nested chain used for the monotonicity check, each sharing the edge at a.
struct NestedChain {
    std::vector<DiscreteDomain> domains;
    HalfPoint a;
};
NestedChain nested_test_chain();

/// Exact check that Z⁺/Z is non-increasing along the chain (so ⟨ε⟩⁺ is
/// non-increasing and ⟨ε⟩^free non-decreasing).
bool exact_monotone(const NestedChain& chain, std::string* detail = nullptr);

// ---------------------------------------------------------------------------
// Export / helpers

/// Medial vertex at the given point (in the domain's units); throws if none.
HalfPoint medial_at(const DiscreteDomain& domain, cplx z);

std::string format_report_line(const CheckResult& r);

}  // namespace ising
