// isinglab — command-line front end.

#include <ising/commands.hpp>
#include <ising/contours.hpp>
#include <ising/continuum.hpp>
#include <ising/coupling.hpp>
#include <ising/ising_mc.hpp>
#include <ising/lattice.hpp>
#include <ising/spinor.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace ising;
using nlohmann::json;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    int threads = 1;
    double tolerance = 1e-9;
    std::string out_dir = ".";
};

struct DomainArgs {
    std::string domain_file, region, block;
    double mesh = 0.0;

    void add(CLI::App* app) {
        app->add_option("--domain", domain_file, "domain JSON written by `discretize`");
        app->add_option("--region", region, "disk:cx,cy,r | rect:x0,y0,x1,y1 | polygon:x,y;x,y;...");
        app->add_option("--mesh", mesh, "mesh size δ (with --region); fractions like 1/32 accepted")
            ->transform([](std::string s) {
                if (auto p = s.find('/'); p != std::string::npos)
                    return fmt::format("{:.17g}", std::stod(s.substr(0, p)) / std::stod(s.substr(p + 1)));
                return s;
            });
        app->add_option("--block", block, "nx,ny vertex block with δ = 1");
    }

    DiscreteDomain load() const {
        const int n = !domain_file.empty() + !region.empty() + !block.empty();
        if (n != 1) throw PreconditionError("give exactly one of --domain, --region (with --mesh) or --block");
        if (!domain_file.empty()) {
            std::ifstream in(domain_file);
            if (!in) throw Error(fmt::format("cannot read {}", domain_file));
            return domain_from_json(json::parse(in));
        }
        if (!block.empty()) {
            int nx = 0, ny = 0;
            if (std::sscanf(block.c_str(), "%d,%d", &nx, &ny) != 2) throw PreconditionError("--block expects nx,ny");
            return DiscreteDomain::block(nx, ny);
        }
        if (!(mesh > 0)) throw PreconditionError("--region needs a positive --mesh");
        return discretize(Region::parse(region), mesh);
    }
};

cplx parse_point(const std::string& s) {
    double x = 0, y = 0;
    if (std::sscanf(s.c_str(), "%lf,%lf", &x, &y) != 2) throw PreconditionError(fmt::format("bad point '{}', expected x,y", s));
    return {x, y};
}

std::vector<double> parse_meshes(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ',');) {
        if (auto p = tok.find('/'); p != std::string::npos)
            out.push_back(std::stod(tok.substr(0, p)) / std::stod(tok.substr(p + 1)));
        else
            out.push_back(std::stod(tok));
    }
    return out;
}

fs::path out_path(const Globals& g, const std::string& name) {
    fs::path p(name);
    if (p.is_relative()) p = fs::path(g.out_dir) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
}

/// Writes to the named file (under --out-dir) or to stdout when name is empty.
template <class F>
void emit(const Globals& g, const std::string& name, F&& write) {
    if (name.empty()) {
        write(std::cout);
        return;
    }
    const fs::path p = out_path(g, name);
    std::ofstream out(p);
    if (!out) throw Error(fmt::format("cannot write {}", p.string()));
    write(out);
    if (!out) throw Error(fmt::format("write failed: {}", p.string()));
    std::cerr << "wrote " << p.string() << '\n';
}

json pt(cplx z) { return {z.real(), z.imag()}; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"isinglab — critical Ising energy density: exact enumeration, discrete spinor solver, Monte Carlo"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    Globals g;
    app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads")->capture_default_str();
    app.add_option("--tolerance", g.tolerance, "solver tolerance")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "directory for output files")->capture_default_str();

    // discretize
    auto* c_disc = app.add_subcommand("discretize", "build a discrete domain and write it as JSON");
    DomainArgs d_disc;
    d_disc.add(c_disc);
    std::string disc_out;
    c_disc->add_option("--out", disc_out, "output file (stdout if omitted)");

    // solve
    auto* c_solve = app.add_subcommand("solve", "solve the boundary value problem; field CSV + report");
    DomainArgs d_solve;
    d_solve.add(c_solve);
    std::string solve_a, solve_out;
    c_solve->add_option("--a", solve_a, "point a (snapped to the nearest horizontal edge)")->required();
    c_solve->add_option("--out", solve_out, "field CSV file (stdout if omitted)");

    // energy
    auto* c_energy = app.add_subcommand("energy", "energy density at a, plus and free");
    DomainArgs d_energy;
    d_energy.add(c_energy);
    std::string energy_a;
    c_energy->add_option("--a", energy_a, "point a")->required();

    // sweep
    auto* c_sweep = app.add_subcommand("sweep", "mesh sweep against the continuum target");
    std::string sw_region, sw_a = "0,0", sw_meshes = "1/16,1/32,1/64", sw_name = "sweep";
    c_sweep->add_option("--region", sw_region, "region descriptor")->required();
    c_sweep->add_option("--a", sw_a, "point a")->capture_default_str();
    c_sweep->add_option("--meshes", sw_meshes, "strictly decreasing list")->capture_default_str();
    c_sweep->add_option("--name", sw_name, "output basename (.csv, .json, .meta.json)")->capture_default_str();

    // coupling
    auto* c_coup = app.add_subcommand("coupling", "C0 value table as CSV");
    double coup_radius = 5;
    std::string coup_out;
    c_coup->add_option("--radius", coup_radius, "|x+iy| ≤ radius")->capture_default_str();
    c_coup->add_option("--out", coup_out, "CSV file (stdout if omitted)");

    // oracle
    auto* c_oracle = app.add_subcommand("oracle", "exact enumeration of Z, Z±, f(a,z)");
    DomainArgs d_oracle;
    d_oracle.add(c_oracle);
    std::string or_a, or_z, or_out;
    int or_cap = 20;
    c_oracle->add_option("--a", or_a, "point a")->required();
    c_oracle->add_option("--z", or_z, "medial vertex z (defaults to a)");
    c_oracle->add_option("--max-edges", or_cap, "enumeration cap")->capture_default_str();
    c_oracle->add_option("--out", or_out, "JSON file (stdout if omitted)");

    // mc
    auto* c_mc = app.add_subcommand("mc", "Monte Carlo estimate of the energy density");
    DomainArgs d_mc;
    d_mc.add(c_mc);
    std::string mc_a, mc_bc = "plus", mc_alg = "cluster", mc_out;
    MCParams mp;
    c_mc->add_option("--a", mc_a, "point a")->required();
    c_mc->add_option("--boundary", mc_bc, "plus|free")->capture_default_str();
    c_mc->add_option("--algorithm", mc_alg, "cluster|single-flip")->capture_default_str();
    c_mc->add_option("--sweeps", mp.sweeps, "measurement sweeps per chain")->capture_default_str();
    c_mc->add_option("--burn-in", mp.burn_in, "burn-in sweeps")->capture_default_str();
    c_mc->add_option("--chains", mp.chains, "independent chains")->capture_default_str();
    c_mc->add_option("--batches", mp.batches, "batches per chain")->capture_default_str();
    c_mc->add_option("--beta", mp.beta, "inverse temperature")->capture_default_str();
    c_mc->add_option("--out", mc_out, "JSON file (stdout if omitted)");

    // verify
    auto* c_verify = app.add_subcommand("verify", "run the named check suite");
    std::string v_level = "quick";
    std::vector<std::string> v_only;
    c_verify->add_option("--level", v_level, "quick|full")->capture_default_str();
    c_verify->add_option("--check", v_only, "run only these checks");
    bool v_list = false;
    c_verify->add_flag("--list", v_list, "list check names");

    // export
    auto* c_export = app.add_subcommand("export", "write field, integral or coupling artifacts");
    std::string ex_kind;
    c_export->add_option("kind", ex_kind, "field|integral|coupling")->required()->check(
        CLI::IsMember({"field", "integral", "coupling"}));
    DomainArgs d_export;
    d_export.add(c_export);
    std::string ex_a, ex_out;
    double ex_radius = 5;
    c_export->add_option("--a", ex_a, "point a (field, integral)");
    c_export->add_option("--radius", ex_radius, "coupling table radius")->capture_default_str();
    c_export->add_option("--out", ex_out, "output file (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_disc) {
            const DiscreteDomain dom = d_disc.load();
            emit(g, disc_out, [&](std::ostream& o) { o << domain_to_json(dom).dump(2) << '\n'; });
        } else if (*c_solve) {
            const DiscreteDomain dom = d_solve.load();
            const HalfPoint a = nearest_horizontal_midpoint(dom, parse_point(solve_a));
            const SpinorField f = solve_spinor(dom, a, g.tolerance);
            emit(g, solve_out, [&](std::ostream& o) { write_field_csv(o, f); });
            const json rep = {{"a", pt(a.embed(dom.mesh()))},
                              {"equations", f.report.equations},
                              {"unknowns", f.report.unknowns},
                              {"residual", f.report.residual},
                              {"s_holomorphicity", s_holomorphicity_residual(f)},
                              {"boundary", boundary_condition_residual(f)},
                              {"singularity", singularity_residual(f)}};
            std::cerr << rep.dump(2) << '\n';
        } else if (*c_energy) {
            const DiscreteDomain dom = d_energy.load();
            const HalfPoint a = nearest_horizontal_midpoint(dom, parse_point(energy_a));
            const SpinorField f = solve_spinor(dom, a, g.tolerance);
            const EnergyDensity e = energy_density(f);
            json out = {{"a", pt(a.embed(dom.mesh()))}, {"mesh", dom.mesh()},          {"plus", e.plus},
                        {"free", e.free},                {"plus_over_delta", e.plus / dom.mesh()},
                        {"free_over_delta", e.free / dom.mesh()}, {"residual", f.report.residual}};
            std::cout << out.dump(2) << '\n';
        } else if (*c_sweep) {
            SweepSpec spec{Region::parse(sw_region), parse_point(sw_a), parse_meshes(sw_meshes)};
            const RunReport rep = cmd_sweep(spec);
            emit(g, sw_name + ".csv", [&](std::ostream& o) { write_sweep_csv(o, rep); });
            emit(g, sw_name + ".json", [&](std::ostream& o) { o << sweep_to_json(rep).dump(2) << '\n'; });
            emit(g, sw_name + ".meta.json", [&](std::ostream& o) { o << sweep_meta_json(rep).dump(2) << '\n'; });
            write_sweep_csv(std::cout, rep);
            for (const auto& r : rep.records)
                if (!r.error.empty()) return 1;
        } else if (*c_coup) {
            const CouplingEvaluator c0;
            emit(g, coup_out, [&](std::ostream& o) { write_coupling_csv(o, c0, coup_radius); });
        } else if (*c_oracle) {
            const DiscreteDomain dom = d_oracle.load();
            const HalfPoint a = nearest_horizontal_midpoint(dom, parse_point(or_a));
            const HalfPoint z = or_z.empty() ? a : medial_at(dom, parse_point(or_z));
            const json j = oracle_to_json(dom, a, z, EnumerationLimits{or_cap, or_cap});
            emit(g, or_out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
        } else if (*c_mc) {
            const DiscreteDomain dom = d_mc.load();
            const HalfPoint a = nearest_horizontal_midpoint(dom, parse_point(mc_a));
            mp.seed = g.seed;
            mp.threads = g.threads;
            mp.algorithm = parse_algorithm(mc_alg);
            const BoundaryCondition bc = parse_boundary(mc_bc);
            const Estimate e = estimate_energy(dom, a, bc, mp);
            const json j = {{"a", pt(a.embed(dom.mesh()))},
                            {"boundary", to_string(bc)},
                            {"algorithm", to_string(mp.algorithm)},
                            {"beta", mp.beta},
                            {"seed", mp.seed},
                            {"chains", mp.chains},
                            {"sweeps", mp.sweeps},
                            {"burn_in", mp.burn_in},
                            {"mean", e.mean},
                            {"std_error", e.std_error},
                            {"samples", e.samples},
                            {"batches", e.batches}};
            emit(g, mc_out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
        } else if (*c_verify) {
            VerifyOptions opt;
            opt.level = v_level == "full" ? VerifyLevel::full : VerifyLevel::quick;
            if (v_level != "full" && v_level != "quick") throw PreconditionError("--level must be quick or full");
            opt.seed = g.seed;
            opt.threads = g.threads;
            if (v_list) {
                for (const auto& n : verify_check_names(opt.level)) std::cout << n << '\n';
                return 0;
            }
            int failed = 0;
            if (v_only.empty()) {
                for (const auto& r : cmd_verify(opt, &std::cout)) failed += !r.passed;
            } else {
                for (const auto& n : v_only) {
                    const CheckResult r = run_check(n, opt);
                    std::cout << format_report_line(r) << std::endl;
                    failed += !r.passed;
                }
            }
            std::cout << (failed ? fmt::format("{} check(s) FAILED\n", failed) : std::string("all checks passed\n"));
            return failed ? 1 : 0;
        } else if (*c_export) {
            if (ex_kind == "coupling") {
                const CouplingEvaluator c0;
                emit(g, ex_out, [&](std::ostream& o) { write_coupling_csv(o, c0, ex_radius); });
                return 0;
            }
            if (ex_a.empty()) throw PreconditionError("export field|integral needs --a");
            const DiscreteDomain dom = d_export.load();
            const HalfPoint a = nearest_horizontal_midpoint(dom, parse_point(ex_a));
            const SpinorField f = solve_spinor(dom, a, g.tolerance);
            if (ex_kind == "field") {
                emit(g, ex_out, [&](std::ostream& o) { write_field_csv(o, f); });
            } else {
                const DiscreteIntegral I = discrete_integral(f, g.tolerance);
                emit(g, ex_out, [&](std::ostream& o) { write_integral_csv(o, I); });
            }
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
    return 0;
}
