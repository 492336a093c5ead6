// nambu: batch front-end for generalized (three-bracket) Hamiltonian systems.
//
//   nambu validate <file>              parse + type-check, report rank/kernel
//   nambu check    <file> [flags]      identity residual report (JSON)
//   nambu simulate <file> [flags]      integrate, write CSV + summary JSON
//   nambu kernel   <file>              Casimir basis and semi-Casimir pairs
//   nambu invert   <file> [--out f]    right inverse in tensor literal format
//
// The NAMBU_SEED environment variable overrides the file seed everywhere.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "nambu/canonical.hpp"
#include "nambu/system_file.hpp"

using namespace nambu;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitBadFile = 2;
constexpr int kExitIntegration = 3;

std::uint64_t effective_seed(const SystemFile& sf) {
    if (const char* env = std::getenv("NAMBU_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return static_cast<std::uint64_t>(v);
        std::cerr << "warning: ignoring malformed NAMBU_SEED '" << env << "'\n";
    }
    return sf.seed;
}

/// full content or nothing; no partial output files on failure
void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << content;
    if (!out.good()) throw std::runtime_error("failed writing " + path);
}

int cmd_validate(const std::string& path) {
    SystemFile sf = load_system_file(path);
    Json report{{"file", path}, {"label", sf.label}, {"dimension", sf.n}};

    if (const SkewTensor3* c = sf.tensor.as_constant()) {
        report["tensor"] = to_json(*c);
        int rank = flat_rank(flatten(*c));
        KernelBasis kb = casimir_space(*c);
        report["rank"] = rank;
        report["kernel_dim"] = kb.dimension();
        std::cout << dump_fixed(report);
        std::cout << "rank " << rank << ", kernel dim " << kb.dimension() << "\n";
    } else {
        Json entries = Json::array();
        for (const auto& tr : sf.tensor.support())
            entries.push_back(Json{{"i", tr[0] + 1},
                                   {"j", tr[1] + 1},
                                   {"k", tr[2] + 1},
                                   {"expr", sf.tensor.component_field(tr[0], tr[1], tr[2]).str()}});
        report["tensor"] = Json{{"kind", "field"}, {"entries", entries}};
        std::cout << dump_fixed(report);
        std::cout << "field-valued tensor, " << entries.size() << " canonical entries\n";
    }
    return 0;
}

struct CheckFlags {
    bool closure = false, ncj = false, jacobi = false, fi = false, axioms = false;
    int points = 100;
    int fi_tuples = 5;
    bool skip_pairing = false;
    double closure_tol = 1e-8, ncj_tol = 1e-8, jacobi_tol = 1e-8, fi_tol = 1e-8,
           axioms_tol = 1e-8;
};

int cmd_check(const std::string& path, CheckFlags fl) {
    SystemFile sf = load_system_file(path);
    std::uint64_t seed = effective_seed(sf);
    if (!(fl.closure || fl.ncj || fl.jacobi || fl.fi || fl.axioms))
        fl.closure = fl.ncj = fl.jacobi = fl.fi = fl.axioms = true;

    auto pts = sample_points(sf.sample_box, fl.points, seed);
    Json report{{"file", path}, {"label", sf.label}, {"seed", seed}, {"points", fl.points}};
    bool ok = true;

    auto run = [&](const char* name, double tol, auto&& body) {
        Json entry{{"threshold", tol}};
        try {
            ResidualReport r = body();
            entry["residual"] = to_json(r);
            entry["pass"] = r.max_abs <= tol;
            if (r.max_abs > tol) ok = false;
        } catch (const std::exception& e) {
            entry["error"] = e.what();
            entry["pass"] = false;
            ok = false;
        }
        report[name] = std::move(entry);
    };

    if (fl.closure)
        run("closure", fl.closure_tol, [&] { return closure_residual(form_from(sf), pts); });
    if (fl.ncj)
        run("ncj", fl.ncj_tol, [&] {
            NcjOptions opts;
            opts.check_pairing = !fl.skip_pairing;
            return jacobi_necessary_residual(operator_from(sf), form_from(sf), pts, opts);
        });
    if (fl.jacobi)
        run("jacobi_induced", fl.jacobi_tol, [&] {
            return classical_jacobi_residual(induced_operator(operator_from(sf), sf.g), pts);
        });
    if (fl.fi)
        run("fi", fl.fi_tol, [&] {
            PoissonOperator3 j = operator_from(sf);
            Rng rng(seed ^ 0xf1f1f1f1ull);
            ResidualReport worst;
            for (int t = 0; t < fl.fi_tuples; ++t) {
                std::array<ScalarField, 5> f = {
                    random_polynomial(sf.n, 3, rng), random_polynomial(sf.n, 3, rng),
                    random_polynomial(sf.n, 3, rng), random_polynomial(sf.n, 3, rng),
                    random_polynomial(sf.n, 3, rng)};
                ResidualReport r = fundamental_identity_residual(j, f, pts);
                int samples = worst.samples + r.samples;
                if (worst.samples == 0 || r.max_abs > worst.max_abs) {
                    r.argmax_indices = {t};
                    worst = r;
                }
                worst.samples = samples;
            }
            return worst;
        });
    if (fl.axioms)
        run("axioms", fl.axioms_tol, [&] {
            AxiomReport ar = axiom_residuals(operator_from(sf), pts, seed);
            ResidualReport merged = ar.trilinearity;
            if (ar.skew_symmetry.max_abs > merged.max_abs) merged = ar.skew_symmetry;
            if (ar.leibniz.max_abs > merged.max_abs) merged = ar.leibniz;
            return merged;
        });

    report["pass"] = ok;
    std::cout << dump_fixed(report);
    return ok ? 0 : kExitCheckFailed;
}

int cmd_simulate(const std::string& path, double t_end, const std::string& out_csv,
                 const std::string& out_json) {
    SystemFile sf = load_system_file(path);
    if (!sf.initial_state)
        throw SystemFileError("initial_state", "simulate needs an initial state");

    NambuSystem sys = to_nambu_system(sf);
    IntegratorConfig cfg = sf.integrator;
    if (!std::isnan(t_end)) cfg.t1 = t_end;

    std::vector<Covector> dirs;
    if (const SkewTensor3* c = sf.tensor.as_constant();
        c && c->variance() == Variance::contravariant)
        dirs = casimir_space(*c).basis;

    Trajectory traj;
    double det = std::numeric_limits<double>::quiet_NaN();
    try {
        traj = integrate(sys, *sf.initial_state, cfg, dirs);
        if (sys.J.is_constant())
            det = monodromy_determinant(sys, *sf.initial_state, cfg.t1, cfg);
    } catch (const IntegrateError& e) {
        Json err{{"file", path}, {"error", e.what()}, {"t", e.t}, {"state", e.x}};
        std::cout << dump_fixed(err);
        return kExitIntegration;
    }

    std::vector<ScalarField> fields = {sys.G, sys.H};
    auto drifts = conservation_report(traj, fields);

    Json summary{{"file", path},
                 {"label", sf.label},
                 {"t_end", cfg.t1},
                 {"samples", static_cast<int>(traj.times.size())},
                 {"G", to_json(drifts[0])},
                 {"H", to_json(drifts[1])}};
    if (!dirs.empty()) {
        Json cas = Json::array();
        for (std::size_t q = 0; q < dirs.size(); ++q) {
            double drift = 0.0;
            for (const auto& d : traj.diagnostics)
                drift = std::max(drift, std::abs(d.casimirs[q] - traj.diagnostics[0].casimirs[q]));
            cas.push_back(Json{{"direction", dirs[q]}, {"max_abs_drift", drift}});
        }
        summary["casimirs"] = cas;
    }
    double max_div = 0.0;
    for (const auto& d : traj.diagnostics) max_div = std::max(max_div, std::abs(d.div));
    summary["max_divergence"] = max_div;
    if (sys.J.is_constant()) summary["det_monodromy"] = det;

    if (!out_csv.empty()) {
        std::ostringstream os;
        write_trajectory_csv(os, traj);
        write_file(out_csv, os.str());
        summary["trajectory_file"] = out_csv;
    }
    if (!out_json.empty()) {
        std::ostringstream os;
        write_trajectory_json(os, traj);
        write_file(out_json, os.str());
        summary["trajectory_json_file"] = out_json;
    }
    std::cout << dump_fixed(summary);
    return 0;
}

int cmd_kernel(const std::string& path, int attempts) {
    SystemFile sf = load_system_file(path);
    const SkewTensor3* c = sf.tensor.as_constant();
    if (!c) {
        std::cerr << "kernel analysis requires constant operator\n";
        return kExitBadFile;
    }
    std::uint64_t seed = effective_seed(sf);
    KernelBasis kb = casimir_space(*c);
    auto pairs = find_semi_casimir_pairs(*c, attempts, seed);

    Json jp = Json::array();
    for (const auto& p : pairs) jp.push_back(to_json(p));
    Json report{{"file", path},
                {"label", sf.label},
                {"seed", seed},
                {"casimir_basis", to_json(kb)},
                {"semi_casimir_pairs", jp}};
    std::cout << dump_fixed(report);
    return 0;
}

int cmd_invert(const std::string& path, const std::string& out_path) {
    SystemFile sf = load_system_file(path);
    const SkewTensor3* c = sf.tensor.as_constant();
    if (!c || c->variance() != Variance::covariant) {
        std::cerr << "invert needs a constant covariant tensor\n";
        return kExitBadFile;
    }
    SkewTensor3 inv = right_inverse(*c);
    double residual = inverse_residual(*c, inv);

    write_file(out_path, dump_fixed(to_json(inv)));
    Json report{{"file", path},
                {"output", out_path},
                {"rank", flat_rank(flatten(*c))},
                {"verification_residual", residual}};
    std::cout << dump_fixed(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized Hamiltonian mechanics on a three-dimensional phase space"};
    app.require_subcommand(1);

    std::string path;
    CheckFlags fl;
    double t_end = std::numeric_limits<double>::quiet_NaN();
    std::string out_csv = "traj.csv";
    std::string out_json;
    std::string out_tensor = "inverse.json";
    int attempts = 120;

    auto* validate = app.add_subcommand("validate", "parse and type-check a system file");
    validate->add_option("file", path)->required();

    auto* check = app.add_subcommand("check", "run identity residual checks");
    check->add_option("file", path)->required();
    check->add_flag("--closure", fl.closure, "closure of the 3-form");
    check->add_flag("--ncj", fl.ncj, "necessary condition on the operator/form pair");
    check->add_flag("--jacobi-induced", fl.jacobi, "classical Jacobi identity for {.,G,.}");
    check->add_flag("--fi", fl.fi, "fundamental identity on random tuples");
    check->add_flag("--axioms", fl.axioms, "trilinearity, skew-symmetry, Leibniz");
    check->add_option("--points", fl.points, "sample point count");
    check->add_option("--fi-tuples", fl.fi_tuples, "random quintuples for --fi");
    check->add_flag("--ncj-skip-pairing", fl.skip_pairing,
                    "skip the inverse-pairing precheck (rank-deficient operators)");
    check->add_option("--closure-tol", fl.closure_tol, "default 1e-8");
    check->add_option("--ncj-tol", fl.ncj_tol, "default 1e-8");
    check->add_option("--jacobi-tol", fl.jacobi_tol, "default 1e-8");
    check->add_option("--fi-tol", fl.fi_tol, "default 1e-8");
    check->add_option("--axioms-tol", fl.axioms_tol, "default 1e-8");

    auto* simulate = app.add_subcommand("simulate", "integrate and report conservation");
    simulate->add_option("file", path)->required();
    simulate->add_option("--t-end", t_end, "override the end time");
    simulate->add_option("--out", out_csv, "trajectory CSV path (empty to skip)");
    simulate->add_option("--out-json", out_json, "also write the JSON trajectory variant");

    auto* kernel = app.add_subcommand("kernel", "Casimir and semi-Casimir analysis");
    kernel->add_option("file", path)->required();
    kernel->add_option("--attempts", attempts, "semi-Casimir search attempts");

    auto* invert = app.add_subcommand("invert", "right inverse of a covariant tensor");
    invert->add_option("file", path)->required();
    invert->add_option("--out", out_tensor, "output tensor path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(path);
        if (check->parsed()) return cmd_check(path, fl);
        if (simulate->parsed()) return cmd_simulate(path, t_end, out_csv, out_json);
        if (kernel->parsed()) return cmd_kernel(path, attempts);
        if (invert->parsed()) return cmd_invert(path, out_tensor);
    } catch (const SystemFileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadFile;
    } catch (const RankDeficiencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const NoSkewInverseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const IntegrateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIntegration;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadFile;
    }
    return 0;
}
