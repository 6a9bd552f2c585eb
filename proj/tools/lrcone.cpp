// lrcone: light-cone bound engine for power-law lattice Hamiltonians with an
// exact-dynamics verifier on small systems.
//
// Exit codes: 0 success, 1 domain error, 2 config/usage error, 3 verification
// failure (the report is still written).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrcone/bounds.hpp"
#include "lrcone/dynamics.hpp"
#include "lrcone/errors.hpp"
#include "lrcone/fit.hpp"
#include "lrcone/hamiltonian.hpp"
#include "lrcone/io.hpp"
#include "lrcone/lattice.hpp"
#include "lrcone/pauli.hpp"
#include "lrcone/verify.hpp"

namespace fs = std::filesystem;
using namespace lrcone;

namespace {

// --out wins over LRCONE_OUT; default is the working directory
std::string resolve_out(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("LRCONE_OUT"); env && *env) return env;
    return ".";
}

std::string ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

struct BoundArgs {
    double alpha = 0.0;
    int d = 1;
    double eps = 0.05;
    std::string r_spec, t_spec;
    double C1 = 1.0, C2 = 1.0, c_valid = 1.0;
    double tau = 1.0, nu = 1.0, eta = 0.0;
    double rstar = 0.0; // 0: use max(e, largest r in the grid)
    std::string out;
};

int run_bound(const BoundArgs& a) {
    const std::vector<double> rs = parse_grid(a.r_spec);
    const std::vector<double> ts = parse_grid(a.t_spec);
    const std::string dir = ensure_dir(resolve_out(a.out));

    std::string csv = "r,t,envelope,valid\n";
    long rows = 0;
    for (double r : rs) {
        for (double t : ts) {
            const EnvelopeValue env =
                theorem_envelope(r, t, a.alpha, a.d, a.eps, a.C1, a.C2, a.c_valid);
            csv += format17(r);
            csv += ',';
            csv += format17(t);
            csv += ',';
            csv += format17(env.value);
            csv += ',';
            csv += env.valid ? '1' : '0';
            csv += '\n';
            ++rows;
        }
    }
    const std::string csv_path = dir + "/bound_envelope.csv";
    write_text_file(csv_path, csv);

    const double rstar = a.rstar > 0.0 ? a.rstar : std::max(kEuler, rs.back());
    const double xi = xi_constant(a.d);
    const double lambda = lambda_constant(a.eps, a.d);
    const ChosenL cl = choose_L(a.alpha, a.d, rstar, xi);

    json trace;
    trace["inputs"] = {{"alpha", a.alpha}, {"d", a.d},     {"eps", a.eps}, {"tau", a.tau},
                       {"nu", a.nu},       {"eta", a.eta}, {"rstar", rstar}};
    trace["xi"] = xi;
    trace["lambda"] = lambda;
    trace["choose_L"] = {{"L", cl.L}, {"degenerate", cl.degenerate}};
    if (!cl.degenerate) {
        const ChosenN cn = choose_n(rs.back(), ts.back(), a.alpha, a.d, a.eta, cl.L);
        trace["choose_n"] = {{"n", cn.n}, {"clamped", cn.clamped}, {"raw", cn.raw}};
        const RecursionTrace rt =
            run_recursion(a.tau, cl.L, cn.n, rstar, xi, a.nu, lambda, a.alpha, a.d);
        trace["recursion"] = recursion_trace_to_json(rt);
        std::printf("L = %s, n = %d, final velocity = %s\n", format17(cl.L).c_str(), cn.n,
                    format17(rt.final_velocity).c_str());
    } else {
        std::printf("L = %s is degenerate (xi log r* <= 1); recursion skipped\n",
                    format17(cl.L).c_str());
    }
    const std::string trace_path = dir + "/recursion_trace.json";
    write_text_file(trace_path, trace.dump(2) + "\n");

    std::printf("wrote %s (%ld rows)\n", csv_path.c_str(), rows);
    std::printf("wrote %s\n", trace_path.c_str());
    return 0;
}

struct FixpointArgs {
    double alpha = 0.0;
    int d = 1;
    double eta = 0.0;
    double tol = 1e-10;
    int max_iter = 10000;
};

int run_fixpoint(const FixpointArgs& a) {
    const FixpointTrace tr = fixpoint_gamma(a.alpha, a.d, a.eta, a.tol, a.max_iter);
    if (!tr.converged) {
        const auto& s = tr.steps;
        const double last = s.back().gamma;
        const double prev = s.size() > 1 ? s[s.size() - 2].gamma : last;
        throw DomainError("fixpoint did not converge in " + std::to_string(a.max_iter) +
                          " iterations; last iterates " + format17(prev) + ", " + format17(last));
    }
    std::printf("limit = %s\n", format17(tr.limit).c_str());
    std::printf("closed_form = %s\n", format17(tr.closed_form).c_str());
    std::printf("converged in %d iterations (tol %s)\n", tr.iterations, format17(tr.tol).c_str());
    return 0;
}

struct SimulateArgs {
    std::string config;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    const json j = read_json_file(a.config);
    validate_keys(j,
                  {"lattice", "alpha", "ensemble", "seed", "hamiltonian_file", "center",
                   "observable", "r_grid", "t_grid", "norm"},
                  "simulate config");
    for (const char* req : {"r_grid", "t_grid"})
        if (!j.contains(req))
            throw ConfigError(std::string("simulate config: missing key '") + req + "'");

    PowerLawHamiltonian ham;
    if (j.contains("hamiltonian_file")) {
        for (const char* k : {"lattice", "alpha", "ensemble", "seed"})
            if (j.contains(k))
                throw ConfigError(std::string("simulate config: '") + k +
                                  "' conflicts with 'hamiltonian_file'");
        fs::path p(j.at("hamiltonian_file").get<std::string>());
        if (p.is_relative()) p = fs::path(a.config).parent_path() / p;
        ham = hamiltonian_from_json(read_json_file(p.string()));
    } else {
        for (const char* k : {"lattice", "alpha", "seed"})
            if (!j.contains(k))
                throw ConfigError(std::string("simulate config: missing key '") + k + "'");
        const json& lj = j.at("lattice");
        validate_keys(lj, {"d", "extents", "metric"}, "simulate config.lattice");
        Metric metric = Metric::Euclidean;
        if (lj.contains("metric")) metric = metric_from_name(lj.at("metric").get<std::string>());
        Lattice lat;
        try {
            lat = build_lattice(lj.at("d").get<int>(), lj.at("extents").get<std::vector<int>>(),
                                metric);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("simulate config.lattice: ") + e.what());
        }
        const std::string ensemble =
            j.contains("ensemble") ? j.at("ensemble").get<std::string>() : "random_two_body";
        ham = sample_hamiltonian(lat, j.at("alpha").get<double>(), ensemble,
                                 j.at("seed").get<std::uint64_t>());
    }

    const int center = j.contains("center") ? j.at("center").get<int>() : 0;
    if (center < 0 || center >= ham.lattice.n_sites())
        throw ConfigError("simulate config: center out of range [0, " +
                          std::to_string(ham.lattice.n_sites()) + ")");
    PauliLetter letter = PauliLetter::X;
    if (j.contains("observable")) {
        const std::string o = j.at("observable").get<std::string>();
        if (o.size() != 1 || (o[0] != 'X' && o[0] != 'Y' && o[0] != 'Z'))
            throw ConfigError("simulate config: observable must be one of X, Y, Z");
        letter = letter_from_char(o[0]);
    }
    const NormKind norm =
        j.contains("norm") ? norm_from_name(j.at("norm").get<std::string>()) : NormKind::Operator;
    const std::vector<double> rs = detail::grid_from_json(j.at("r_grid"), "simulate r_grid", nullptr);
    const std::vector<double> ts = detail::grid_from_json(j.at("t_grid"), "simulate t_grid", nullptr);

    std::printf("seed = %llu\n", static_cast<unsigned long long>(ham.seed));
    std::printf("sites = %d, alpha = %s, ensemble = %s\n", ham.lattice.n_sites(),
                format17(ham.alpha).c_str(), ham.ensemble.c_str());

    const EvolutionContext ctx = make_context(ham);
    const LocalOperator obs = local_pauli(center, letter);
    const LeakageCurve curve = leakage_curve(ctx, obs, rs, ts, norm);

    std::vector<SweepRow> rows;
    rows.reserve(curve.points.size());
    for (const auto& pt : curve.points)
        rows.push_back({center, pt.r, pt.t, pt.value, norm_name(pt.kind), ham.seed, ham.alpha,
                        ham.ensemble});

    const std::string dir = ensure_dir(resolve_out(a.out));
    const std::string leak_path = dir + "/leakage.csv";
    write_text_file(leak_path, sweep_csv(rows));
    const std::string ham_path = dir + "/hamiltonian.json";
    write_text_file(ham_path, to_json(ham).dump(2) + "\n");
    std::printf("wrote %s (%zu rows)\n", leak_path.c_str(), rows.size());
    std::printf("wrote %s\n", ham_path.c_str());
    return 0;
}

struct VerifyArgs {
    std::string config;
    std::string out;
    int jobs = 1;
    bool list_checks = false;
};

int run_verify_cmd(const VerifyArgs& a) {
    if (a.list_checks) {
        for (const auto& name : known_checks()) std::printf("%s\n", name.c_str());
        return 0;
    }
    if (a.config.empty()) throw ConfigError("verify: --config is required");
    if (a.jobs < 1) throw ConfigError("verify: --jobs must be >= 1");

    const SweepConfig cfg = parse_sweep_config(read_json_file(a.config));
    const VerifyOutput out = run_verify(cfg, a.jobs);

    const std::string run_dir = ensure_dir(resolve_out(a.out) + "/" + out.run_name);
    write_text_file(run_dir + "/report.json", out.report.dump(2) + "\n");
    for (const auto& [name, content] : out.csv_files) write_text_file(run_dir + "/" + name, content);

    for (const auto& check : out.report.at("checks")) {
        std::printf("[%s] %s measured=%s tolerance=%s\n",
                    check.at("pass").get<bool>() ? "PASS" : "FAIL",
                    check.at("name").get<std::string>().c_str(),
                    format17(check.at("measured").get<double>()).c_str(),
                    format17(check.at("tolerance").get<double>()).c_str());
    }
    std::printf("report: %s/report.json\n", run_dir.c_str());

    if (!out.all_passed) {
        int failed = 0;
        for (const auto& check : out.report.at("checks"))
            if (!check.at("pass").get<bool>()) ++failed;
        throw VerificationFailure(std::to_string(failed) + " check(s) failed; see " + run_dir +
                                  "/report.json");
    }
    return 0;
}

struct CompareArgs {
    std::string alpha;
    int d = 1;
    std::string format = "text";
};

int run_compare(const CompareArgs& a) {
    const Rational alpha = rational_from_string(a.alpha);
    const BoundComparison cmp = compare_bounds(alpha, a.d);
    if (a.format == "json") {
        std::printf("%s\n", comparison_to_json(cmp).dump(2).c_str());
        return 0;
    }
    std::printf("alpha = %s, d = %d\n", rat_str(cmp.alpha).c_str(), cmp.d);
    std::printf("%-6s %-12s %-12s %-12s %-12s %-12s\n", "bound", "gamma", "beta", "gamma'",
                "beta'", "phi");
    const BoundRow* rows[3] = {&cmp.b1, &cmp.b2, &cmp.b3};
    const char* names[3] = {"B1", "B2", "B3"};
    for (int i = 0; i < 3; ++i)
        std::printf("%-6s %-12s %-12s %-12s %-12s %-12s\n", names[i],
                    rat_str(rows[i]->gamma).c_str(), rat_str(rows[i]->beta).c_str(),
                    rat_str(rows[i]->gamma_untrunc).c_str(),
                    rat_str(rows[i]->beta_untrunc).c_str(), rat_str(rows[i]->phi).c_str());
    std::printf("phi1 - phi2: direct %s, displayed formula %s%s\n",
                rat_str(cmp.phi12_direct).c_str(), rat_str(cmp.phi12_formula).c_str(),
                cmp.phi12_discrepancy ? " [DISCREPANCY]" : "");
    std::printf("phi1 - phi3: direct %s, displayed formula %s%s\n",
                rat_str(cmp.phi13_direct).c_str(), rat_str(cmp.phi13_formula).c_str(),
                cmp.phi13_discrepancy ? " [DISCREPANCY]" : "");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"light-cone bound engine with an exact-dynamics verifier"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    BoundArgs bound_args;
    CLI::App* bound_cmd = app.add_subcommand("bound", "evaluate the final envelope on a grid");
    bound_cmd->add_option("--alpha", bound_args.alpha, "interaction decay exponent")->required();
    bound_cmd->add_option("--d", bound_args.d, "lattice dimension")->default_val(1);
    bound_cmd->add_option("--eps", bound_args.eps, "cone-opening slack")->default_val(0.05);
    bound_cmd->add_option("--r", bound_args.r_spec, "radius grid [log:]start:stop:count")->required();
    bound_cmd->add_option("--t", bound_args.t_spec, "time grid [log:]start:stop:count")->required();
    bound_cmd->add_option("--C1", bound_args.C1, "front-term constant")->default_val(1.0);
    bound_cmd->add_option("--C2", bound_args.C2, "tail-term constant")->default_val(1.0);
    bound_cmd->add_option("--c", bound_args.c_valid, "validity-window constant")->default_val(1.0);
    bound_cmd->add_option("--tau", bound_args.tau, "interaction strength sum")->default_val(1.0);
    bound_cmd->add_option("--nu", bound_args.nu, "shell coupling scale")->default_val(1.0);
    bound_cmd->add_option("--eta", bound_args.eta, "shell-count tilt")->default_val(0.0);
    bound_cmd->add_option("--rstar", bound_args.rstar, "system diameter (0: from the r grid)")
        ->default_val(0.0);
    bound_cmd->add_option("--out", bound_args.out, "output directory (default LRCONE_OUT or .)");

    FixpointArgs fix_args;
    CLI::App* fix_cmd = app.add_subcommand("fixpoint", "iterate the tightening map to its limit");
    fix_cmd->add_option("--alpha", fix_args.alpha, "interaction decay exponent")->required();
    fix_cmd->add_option("--d", fix_args.d, "lattice dimension")->default_val(1);
    fix_cmd->add_option("--eta", fix_args.eta, "shell-count tilt")->default_val(0.0);
    fix_cmd->add_option("--tol", fix_args.tol, "convergence tolerance")->default_val(1e-10);
    fix_cmd->add_option("--max-iter", fix_args.max_iter, "iteration cap")->default_val(10000);

    SimulateArgs sim_args;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "exact leakage sweep on a small lattice");
    sim_cmd->add_option("--config", sim_args.config, "sweep config JSON")->required();
    sim_cmd->add_option("--out", sim_args.out, "output directory (default LRCONE_OUT or .)");

    VerifyArgs ver_args;
    CLI::App* ver_cmd = app.add_subcommand("verify", "run the verification checks");
    ver_cmd->add_option("--config", ver_args.config, "verification config JSON");
    ver_cmd->add_option("--out", ver_args.out, "output directory (default LRCONE_OUT or .)");
    ver_cmd->add_option("--jobs", ver_args.jobs, "worker threads")->default_val(1);
    ver_cmd->add_flag("--list-checks", ver_args.list_checks, "list known checks and exit");

    CompareArgs cmp_args;
    CLI::App* cmp_cmd = app.add_subcommand("compare", "exact exponent table for the bound families");
    cmp_cmd->add_option("--alpha", cmp_args.alpha, "decay exponent, rational or decimal string")
        ->required();
    cmp_cmd->add_option("--d", cmp_args.d, "lattice dimension")->default_val(1);
    cmp_cmd->add_option("--format", cmp_args.format, "text|json")
        ->default_val("text")
        ->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (bound_cmd->parsed()) return run_bound(bound_args);
        if (fix_cmd->parsed()) return run_fixpoint(fix_args);
        if (sim_cmd->parsed()) return run_simulate(sim_args);
        if (ver_cmd->parsed()) return run_verify_cmd(ver_args);
        if (cmp_cmd->parsed()) return run_compare(cmp_args);
    } catch (const VerificationFailure& e) {
        std::fprintf(stderr, "verification failure: %s\n", e.what());
        return 3;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
