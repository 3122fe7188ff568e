// Command line front end: catalog listing, extremal data, destabilizer
// certificates, flow runs with trace output, invariant verification, and the
// run report.  Exit codes: 0 success, 1 usage, 2 certification or monitor
// failure, 3 numerical breakdown.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "torific/energies.hpp"
#include "torific/jsonio.hpp"
#include "torific/report.hpp"

namespace {

using namespace torific;

double parse_h(const std::string& s) {
    double v = 0.0;
    std::size_t pos = 0;
    try {
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            std::size_t p2 = 0;
            const double num = std::stod(s.substr(0, slash), &pos);
            const std::string den_s = s.substr(slash + 1);
            const double den = std::stod(den_s, &p2);
            if (pos != slash || p2 != den_s.size() || den == 0)
                throw UsageError("bad grid spacing: " + s);
            v = num / den;
        } else {
            v = std::stod(s, &pos);
            if (pos != s.size()) throw UsageError("bad grid spacing: " + s);
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        throw UsageError("bad grid spacing: " + s);
    }
    if (!(v > 0.0) || v > 0.125 + 1e-15)
        throw UsageError("grid spacing must lie in (0, 1/8], got " + s);
    return v;
}

LatticePolytope load_poly(const std::string& name, const std::string& file) {
    if (!file.empty()) return LatticePolytope::from_json_text(read_text_file(file));
    if (name.empty()) throw UsageError("provide --polytope NAME or --polytope-file PATH");
    return catalog_load(name);
}

void emit(const std::string& text, const std::string& out_path) {
    const std::string body =
        text.empty() || text.back() == '\n' ? text : text + "\n";
    if (out_path.empty())
        std::fputs(body.c_str(), stdout);
    else
        write_text_file(out_path, body);
}

Json aff_json(const AffineFn& a) {
    Json j;
    j["c0"] = a.c0;
    j["g"] = Json::array();
    for (int i = 0; i < a.dim; ++i) j["g"].push_back(a.g[i]);
    return j;
}

int cmd_list() {
    for (const auto& n : catalog_names()) std::printf("%s\n", n.c_str());
    return 0;
}

int cmd_extremal(const std::string& name, const std::string& file, const std::string& out) {
    const LatticePolytope P = load_poly(name, file);
    const ExtremalData ex = extremal_affine(P);
    Json j;
    j["polytope"] = P.name();
    j["dim"] = P.dim();
    j["volume"] = P.volume();
    j["barycenter"] = Json::array();
    for (int i = 0; i < P.dim(); ++i) j["barycenter"].push_back(P.barycenter()[i]);
    j["eta"] = Json::array();
    for (int i = 0; i < P.dim(); ++i) j["eta"].push_back(ex.eta[i]);
    j["e"] = aff_json(ex.e);
    j["ell"] = aff_json(ex.ell);
    j["min_ell"] = ex.min_ell;
    j["residual"] = ex.residual;
    emit(dump17(j), out);
    return 0;
}

int cmd_destabilize(const std::string& name, const std::string& file, const std::string& out,
                    uint64_t seed) {
    const LatticePolytope P = load_poly(name, file);
    SolveOptions opts;
    opts.seed = seed;
    const DestabilizerCertificate cert = solve_destabilizer(P, opts);
    emit(certificate_to_json(cert, P), out);
    if (!cert.certified) {
        std::fprintf(stderr, "destabilizer certificate for %s failed its gates\n",
                     P.name().c_str());
        return 2;
    }
    return 0;
}

struct FlowArgs {
    std::string polytope, file, h = "1/16", init = "zero", trace, state_out, cert;
    double tmax = 20.0, trace_dt = 0.01, plateau_tol = 1e-6, kappa = 0.2;
    long long max_steps = 2000000000;
    bool track_m = false;
    uint64_t seed = 42;
};

int cmd_flow(const FlowArgs& fa) {
    const LatticePolytope P = load_poly(fa.polytope, fa.file);
    const double h = parse_h(fa.h);
    const Grid grid(P, h);

    PLConvexFn limit;
    bool have_limit = false;
    if (!fa.cert.empty()) {
        const CertificateDoc doc = certificate_from_json(read_text_file(fa.cert));
        if (doc.cert.polytope != P.name())
            throw UsageError("certificate covers " + doc.cert.polytope + ", not " + P.name());
        limit = doc.cert.b;
        have_limit = true;
    }

    FlowOptions opts;
    opts.t_max = fa.tmax;
    opts.trace_dt = fa.trace_dt;
    opts.plateau_tol = fa.plateau_tol;
    opts.kappa = fa.kappa;
    opts.max_steps = fa.max_steps;
    opts.track_m_per_step = fa.track_m;

    const std::vector<double> v0 = init_state(grid, fa.init);
    const FlowResult res = run_flow(grid, v0, opts, have_limit ? &limit : nullptr);

    const char* status = res.status == FlowStatus::Plateau     ? "plateau"
                         : res.status == FlowStatus::TimeLimit ? "time_limit"
                         : res.status == FlowStatus::StepLimit ? "step_limit"
                                                               : "aborted";
    if (!fa.trace.empty()) {
        char hs[40];
        std::snprintf(hs, sizeof hs, "%.17g", h);
        std::vector<std::pair<std::string, std::string>> meta{
            {"polytope", P.name()},    {"h", hs},
            {"init", fa.init},         {"seed", std::to_string(fa.seed)},
            {"status", status},
        };
        write_trace_csv(fa.trace, res.trace, meta);
    }
    if (!fa.state_out.empty()) save_state(fa.state_out, grid, res.v, res.t_end);
    std::printf("status=%s t_end=%.17g R=%.17g steps=%lld rejections=%lld max_abs_v=%.17g\n",
                status, res.t_end, res.R_end, res.stats.steps, res.stats.rejections,
                res.max_abs_v);
    if (res.status == FlowStatus::Aborted) {
        std::fprintf(stderr, "flow aborted: %s\n", res.abort_reason.c_str());
        return 2;
    }
    return 0;
}

int cmd_verify(const std::string& name, const std::string& file, const std::string& h_s,
               uint64_t seed, const std::string& out) {
    const LatticePolytope P = load_poly(name, file);
    const double h = parse_h(h_s);
    Json checks = Json::array();
    bool all = true;
    auto push = [&](const std::string& nm, bool pass, double value, double tol) {
        Json c;
        c["name"] = nm;
        c["pass"] = pass;
        c["value"] = value;
        c["tol"] = tol;
        checks.push_back(c);
        all = all && pass;
    };

    const double V = P.volume();
    const ExtremalData ex = extremal_affine(P);
    push("extremal_residual", ex.residual <= 1e-12, ex.residual, 1e-12);

    const PLConvexFn ell_pl = to_pl(ex.ell);
    push("ell_mass", std::abs(int_pl(P, ell_pl) - V) <= 1e-9 * V,
         std::abs(int_pl(P, ell_pl) - V), 1e-9 * V);
    double mom = 0.0;
    for (int i = 0; i < P.dim(); ++i) {
        Polynomial xi(P.dim());
        xi.add_term(i == 0 ? 1 : 0, i == 1 ? 1 : 0, 1.0);
        mom = std::max(mom, std::abs(int_pl_poly(P, ell_pl, xi)));
    }
    push("ell_moment", mom <= 1e-9 * V, mom, 1e-9 * V);
    const double yao = std::abs(V * ex.e(Vec{0, 0}) -
                                int_pl_product(P, to_pl(ex.e), to_pl(ex.e)));
    push("yao_identity", yao <= 1e-9 * V, yao, 1e-9 * V);

    SolveOptions dopts;
    dopts.seed = seed;
    const DestabilizerCertificate cert = solve_destabilizer(P, dopts);
    push("destabilizer_certified", cert.certified, cert.certified ? 1.0 : 0.0, 1.0);
    push("balancing_residual", cert.residuals.max_abs(V) <= 1e-8,
         cert.residuals.max_abs(V), 1e-8);
    push("orthogonality", std::abs(cert.orthogonality) <= 1e-8, std::abs(cert.orthogonality),
         1e-8);
    push("limit_jensen", true, 0.0, 1e-9);
    {
        const double jv = verify_jensen(P, cert.b, 200, seed);
        checks.back()["value"] = jv;
        checks.back()["pass"] = jv <= 1e-9;
        all = all && jv <= 1e-9;
    }

    const Grid grid(P, h);
    double wsum = 0.0;
    for (double w : grid.weights()) wsum += w;
    push("grid_weight_sum", std::abs(wsum - V) <= 1e-9 * V, std::abs(wsum - V), 1e-9 * V);

    std::vector<double> v0(grid.size(), 0.0), sigma;
    const SigmaEval se = eval_sigma(grid, v0, sigma);
    push("sigma_positive", se.convex && se.sigma_min > 0, se.sigma_min, 0.0);
    double smom = 0.0;
    for (int i = 0; i < P.dim(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k)
            s += grid.weights()[k] * sigma[k] * grid.points()[k][i];
        smom = std::max(smom, std::abs(s));
    }
    const double smom_tol = 25.0 * h * h * (1.0 + V);
    push("sigma_moment", smom <= smom_tol, smom, smom_tol);

    const DingValue dv = ding_energy(grid, v0);
    const double d_primal = std::log(se.c_norm) - std::log(V) + grid.quad(grid.ucan()) / V;
    push("ding_dual_vs_primal", std::abs(dv.value - d_primal) <= 0.1,
         std::abs(dv.value - d_primal), 0.1);

    std::vector<double> u(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) u[i] = grid.ucan()[i];
    const std::vector<double> nu = normalize_grid(grid, u);
    double numin = 0.0;
    for (double x : nu) numin = std::min(numin, x);
    push("normalized_nonnegative", numin >= -1e-12, numin, 1e-12);

    const PLConvexFn lim_de = [&] {
        PLConvexFn f;
        f.dim = P.dim();
        for (const auto& p : cert.d.pieces) f.pieces.push_back(p + cert.e);
        if (f.pieces.empty()) f.pieces.push_back(cert.e);
        return f;
    }();
    const double lim_l2 = int_pl_product(P, lim_de, lim_de);
    if (lim_l2 > 1e-20) {
        const double gap = moment_weight_gap(P, se.R, lim_de);
        push("moment_weight_gap", gap >= -1e-6, gap, 1e-6);
    }

    Json j;
    j["polytope"] = P.name();
    j["h"] = h;
    j["seed"] = seed;
    j["checks"] = checks;
    j["pass"] = all;
    emit(dump17(j), out);
    return all ? 0 : 2;
}

int cmd_report(const std::vector<std::string>& traces, const std::vector<std::string>& certs,
               const std::string& out) {
    const Report rep = build_report(traces, certs);
    emit(format_report(rep), out);
    return rep.all_pass ? 0 : 2;
}

const char* kSchema = R"JSON({
  "trace_csv": {
    "metadata": "lines of the form '# key=value' before the header; keys include polytope, h, init, seed, status",
    "header": "t,E,D,R,H,M,ding_c,dist_to_limit,sigma_min,sigma_max,dt",
    "rows": "one comma separated record per sampled time, 11 numeric fields, %.17g"
  },
  "extremal": {
    "polytope": "string", "dim": "int", "volume": "number",
    "barycenter": "number[dim]", "eta": "number[dim]",
    "e": {"c0": "number", "g": "number[dim]"},
    "ell": {"c0": "number", "g": "number[dim]"},
    "min_ell": "number", "residual": "number"
  },
  "certificate": {
    "polytope": "string", "dim": "int", "volume": "number",
    "semistable": "bool", "certified": "bool",
    "a": "affine", "b_pieces": "affine[]", "d_pieces": "affine[]",
    "e": "affine", "ell": "affine", "min_ell": "number",
    "limit_norm": "number  (||d+e||_L2 / sqrt(V))",
    "residuals": {"mass": "number", "moment": "number[dim]", "min_value": "number"},
    "yao_normalization": "number", "orthogonality": "number",
    "w_ell_d": "number", "brute_min": "number", "brute_argmin": "affine",
    "minimizer_gap": "number", "semistability_margin": "number",
    "newton": {"fnorm": "number", "iters": "int"}
  },
  "verify": {
    "polytope": "string", "h": "number", "seed": "int",
    "checks": [{"name": "string", "pass": "bool", "value": "number", "tol": "number"}],
    "pass": "bool"
  },
  "state": {
    "polytope": "string", "h": "number", "t": "number", "v": "number[nodes]"
  }
})JSON";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toric inverse Monge-Ampere flow workbench"};
    app.require_subcommand(0, 1);
    // --h is a real option below, so the help flag keeps only its long form
    app.set_help_flag("--help", "print help and exit");
    bool schema = false;
    app.add_flag("--json-schema", schema, "print the output document schemas and exit");

    auto* c_list = app.add_subcommand("list-polytopes", "print the catalog names");
    c_list->set_help_flag("--help", "print help and exit");

    std::string x_name, x_file, x_out;
    auto* c_ext = app.add_subcommand("extremal", "extremal affine function and moments");
    c_ext->set_help_flag("--help", "print help and exit");
    c_ext->add_option("--polytope", x_name, "catalog polytope name");
    c_ext->add_option("--polytope-file", x_file, "polytope JSON document");
    c_ext->add_option("--out", x_out, "write JSON here instead of stdout");

    std::string d_name, d_file, d_out;
    uint64_t d_seed = 42;
    auto* c_dest = app.add_subcommand("destabilize", "optimal destabilizer certificate");
    c_dest->set_help_flag("--help", "print help and exit");
    c_dest->add_option("--polytope", d_name, "catalog polytope name");
    c_dest->add_option("--polytope-file", d_file, "polytope JSON document");
    c_dest->add_option("--out", d_out, "write JSON here instead of stdout");
    c_dest->add_option("--seed", d_seed, "sampling seed for the stability margin");

    FlowArgs fa;
    auto* c_flow = app.add_subcommand("flow", "run the flow in symplectic potential form");
    c_flow->set_help_flag("--help", "print help and exit");
    c_flow->add_option("--polytope", fa.polytope, "catalog polytope name");
    c_flow->add_option("--polytope-file", fa.file, "polytope JSON document");
    c_flow->add_option("--h", fa.h, "grid spacing, decimal or p/q, at most 1/8");
    c_flow->add_option("--tmax", fa.tmax, "time horizon");
    c_flow->add_option("--init", fa.init, "zero | bump:EPS | file:PATH");
    c_flow->add_option("--trace", fa.trace, "trace CSV output path");
    c_flow->add_option("--state-out", fa.state_out, "final state JSON output path");
    c_flow->add_option("--cert", fa.cert, "destabilizer certificate fixing the limit density");
    c_flow->add_option("--trace-dt", fa.trace_dt, "trace sampling interval");
    c_flow->add_option("--plateau-tol", fa.plateau_tol, "relative R plateau tolerance");
    c_flow->add_option("--kappa", fa.kappa, "parabolic step safety factor");
    c_flow->add_option("--max-steps", fa.max_steps, "hard step limit");
    c_flow->add_flag("--track-m", fa.track_m, "track per step entropy monotonicity");
    c_flow->add_option("--seed", fa.seed, "recorded in the trace metadata");

    std::string v_name, v_file, v_h = "1/16", v_out;
    uint64_t v_seed = 42;
    auto* c_ver = app.add_subcommand("verify", "invariant sweep for one polytope");
    c_ver->set_help_flag("--help", "print help and exit");
    c_ver->add_option("--polytope", v_name, "catalog polytope name");
    c_ver->add_option("--polytope-file", v_file, "polytope JSON document");
    c_ver->add_option("--h", v_h, "grid spacing for the grid checks");
    c_ver->add_option("--seed", v_seed, "sampling seed");
    c_ver->add_option("--out", v_out, "write JSON here instead of stdout");

    std::vector<std::string> r_traces, r_certs;
    std::string r_out;
    auto* c_rep = app.add_subcommand("report", "verify traces and summarize runs");
    c_rep->set_help_flag("--help", "print help and exit");
    c_rep->add_option("--trace", r_traces, "trace CSV files")->take_all();
    c_rep->add_option("--cert", r_certs, "certificate JSON files")->take_all();
    c_rep->add_option("--out", r_out, "write the table here instead of stdout");

    try {
        app.parse(argc, argv);
        if (schema) {
            std::printf("%s\n", kSchema);
            return 0;
        }
        if (c_list->parsed()) return cmd_list();
        if (c_ext->parsed()) return cmd_extremal(x_name, x_file, x_out);
        if (c_dest->parsed()) return cmd_destabilize(d_name, d_file, d_out, d_seed);
        if (c_flow->parsed()) return cmd_flow(fa);
        if (c_ver->parsed()) return cmd_verify(v_name, v_file, v_h, v_seed, v_out);
        if (c_rep->parsed()) return cmd_report(r_traces, r_certs, r_out);
        std::fputs(app.help().c_str(), stdout);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const CertificationError& e) {
        std::fprintf(stderr, "certification failure: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
}
