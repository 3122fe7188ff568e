#include "torific/flow.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>

#include "torific/ding.hpp"
#include "torific/jsonio.hpp"

namespace torific {

SigmaEval eval_sigma(const Grid& g, const std::vector<double>& v, std::vector<double>& sigma) {
    const size_t n = g.size();
    if (v.size() != n) throw UsageError("state has wrong length for this grid");
    sigma.resize(n);
    const int dim = g.dim();
    const auto& xs = g.points();
    const auto& w = g.weights();
    const auto& env = g.envelope();
    const auto& hxx = g.hcan_xx();
    const auto& hxy = g.hcan_xy();
    const auto& hyy = g.hcan_yy();

    SigmaEval out;
    double qraw = 0.0, smin = 1e300, smax = 0.0, ratio = 1e300;
    for (size_t k = 0; k < n; ++k) {
        double d5[Grid::kOps];
        g.derivatives(v, k, d5);
        const double axx = hxx[k] + d5[Grid::kDxx];
        double det, lam;
        if (dim == 1) {
            det = axx;
            lam = axx;
            if (!(det > 0.0)) {
                out.convex = false;
                out.bad_node = k;
                return out;
            }
        } else {
            const double ayy = hyy[k] + d5[Grid::kDyy];
            const double axy = hxy[k] + d5[Grid::kDxy];
            det = axx * ayy - axy * axy;
            if (!(axx > 0.0 && det > 0.0)) {
                out.convex = false;
                out.bad_node = k;
                return out;
            }
            const double disc = std::sqrt((axx - ayy) * (axx - ayy) + 4.0 * axy * axy);
            lam = 0.5 * (axx + ayy - disc);
        }
        const double waff = v[k] - (xs[k][0] * d5[Grid::kDx] + xs[k][1] * d5[Grid::kDy]);
        const double sraw = det * env[k] * std::exp(waff);
        sigma[k] = sraw;
        qraw += w[k] * sraw;
        if (sraw < smin) smin = sraw;
        if (sraw > smax) smax = sraw;
        const double r = lam / sraw;
        if (r < ratio) ratio = r;
    }
    const double V = g.polytope().volume();
    const double c = V / qraw;
    double rsum = 0.0;
    for (size_t k = 0; k < n; ++k) {
        sigma[k] *= c;
        const double d = sigma[k] - 1.0;
        rsum += w[k] * d * d;
    }
    out.c_norm = c;
    out.sigma_min = smin * c;
    out.sigma_max = smax * c;
    out.R = rsum / V;
    out.min_ratio = ratio / c;
    return out;
}

std::vector<double> init_state(const Grid& g, const std::string& spec) {
    if (spec == "zero") return std::vector<double>(g.size(), 0.0);
    if (spec.rfind("bump:", 0) == 0) {
        double eps;
        try {
            size_t used = 0;
            eps = std::stod(spec.substr(5), &used);
            if (used != spec.size() - 5) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw UsageError("bad bump amplitude in init spec: " + spec);
        }
        const auto& facets = g.polytope().facets();
        std::vector<double> v(g.size());
        for (size_t k = 0; k < g.size(); ++k) {
            double prod = 1.0;
            for (const auto& f : facets) {
                const double lf = to_double(f.offset) + f.normal[0] * g.points()[k][0] +
                                  f.normal[1] * g.points()[k][1];
                prod *= lf * lf;
            }
            v[k] = eps * prod;
        }
        return v;
    }
    if (spec.rfind("file:", 0) == 0) return load_state(spec.substr(5), g);
    throw UsageError("unknown init spec (expected zero | bump:EPS | file:PATH): " + spec);
}

FlowResult run_flow(const Grid& g, const std::vector<double>& v0, const FlowOptions& opts,
                    const PLConvexFn* limit_b) {
    const LatticePolytope& P = g.polytope();
    const double V = P.volume();
    const double logV = std::log(V);
    const size_t n = g.size();
    if (v0.size() != n) throw UsageError("initial state has wrong length for this grid");

    const PLConvexFn bfn = limit_b ? *limit_b : to_pl(extremal_affine(P).ell);
    const std::vector<double> b = g.sample(bfn);
    const auto& w = g.weights();
    const auto& xs = g.points();
    const auto& uc = g.ucan();

    const double Qucan = g.quad(uc);
    double Qucanb = 0.0;
    for (size_t k = 0; k < n; ++k) Qucanb += w[k] * uc[k] * b[k];
    std::vector<size_t> collar_nodes;
    for (size_t k = 0; k < n; ++k)
        if (g.collar()[k]) collar_nodes.push_back(k);

    FlowResult res;
    std::vector<double> v = v0, sigma, v2, sigma2;
    SigmaEval ev = eval_sigma(g, v, sigma);
    if (!ev.convex) {
        res.status = FlowStatus::Aborted;
        res.abort_reason =
            "initial potential is not convex at node " + std::to_string(ev.bad_node);
        res.v = std::move(v);
        return res;
    }

    double Qv = g.quad(v);
    double logc = std::log(ev.c_norm);
    double E = -(Qucan + Qv) / V;
    double D = logc - logV + (Qucan + Qv) / V;
    const double E0 = E;
    // flow normalization constant via the identity log c = D + E(0) + log V;
    // recording it this way keeps the raw normalization (which agrees within
    // the monitored E drift) from polluting the monotonicity monitor
    double ding = D + E0 + logV;
    double Qbv = 0.0, S2 = 0.0;
    for (size_t k = 0; k < n; ++k) {
        Qbv += w[k] * b[k] * v[k];
        const double d = sigma[k] - b[k];
        S2 += w[k] * d * d;
    }
    double Db = logc - logV + (Qucanb + Qbv) / V;

    auto entropy = [&](const std::vector<double>& s) {
        double acc = 0.0;
        for (size_t k = 0; k < n; ++k) acc += w[k] * std::log(s[k]);
        return -acc / V;
    };
    double Hcur = opts.track_m_per_step ? entropy(sigma) : 0.0;

    for (size_t k = 0; k < n; ++k) res.max_abs_v = std::max(res.max_abs_v, std::abs(v[k]));

    double t = 0.0;
    double dt = std::min(opts.kappa * g.h() * g.h() * ev.min_ratio, opts.trace_dt / 2);
    double next_row = opts.trace_dt;

    auto push_row = [&](double dt_used) {
        TraceRow row;
        row.t = t;
        row.E = E;
        row.D = D;
        row.R = ev.R;
        row.H = opts.track_m_per_step ? Hcur : entropy(sigma);
        row.M = D + row.H;
        row.ding_c = ding;
        row.dist_to_limit = std::sqrt(S2 / V);
        row.sigma_min = ev.sigma_min;
        row.sigma_max = ev.sigma_max;
        row.dt = dt_used;
        res.trace.push_back(row);
        for (size_t k : collar_nodes) {
            double d5[Grid::kOps];
            g.derivatives(v, k, d5);
            const double gn = std::sqrt(d5[Grid::kDx] * d5[Grid::kDx] +
                                        d5[Grid::kDy] * d5[Grid::kDy]);
            res.collar_grad_max = std::max(res.collar_grad_max, gn);
        }
    };
    push_row(0.0);

    std::deque<std::pair<double, double>> rwin;
    rwin.emplace_back(t, ev.R);

    StepStats& st = res.stats;
    res.status = FlowStatus::TimeLimit;
    bool done = false;
    double last_dt = 0.0;
    while (!done) {
        if (t >= opts.t_max - 1e-12) {
            res.status = FlowStatus::TimeLimit;
            break;
        }
        if (st.steps >= opts.max_steps) {
            res.status = FlowStatus::StepLimit;
            break;
        }
        if (dt > opts.t_max - t) dt = opts.t_max - t;

        v2.resize(n);
        for (size_t k = 0; k < n; ++k) v2[k] = v[k] + dt * (sigma[k] - 1.0);
        SigmaEval ev2 = eval_sigma(g, v2, sigma2);

        bool ok = ev2.convex;
        double Qv2 = 0.0, E2 = 0.0, D2 = 0.0, logc2 = 0.0;
        if (ok) {
            logc2 = std::log(ev2.c_norm);
            Qv2 = g.quad(v2);
            E2 = -(Qucan + Qv2) / V;
            D2 = logc2 - logV + (Qucan + Qv2) / V;
            if (std::abs(E2 - E) > opts.e_drift_tol * (1.0 + std::abs(E))) ok = false;
            if (D2 - D > opts.d_increase_tol) ok = false;
        }
        if (!ok) {
            ++st.rejections;
            dt /= 2;
            if (dt < opts.dt_min) {
                res.status = FlowStatus::Aborted;
                char buf[96];
                std::snprintf(buf, sizeof buf,
                              "time step collapsed below dt_min at t = %.6g (stiffness)", t);
                res.abort_reason = buf;
                break;
            }
            continue;
        }

        ++st.steps;
        const double ding2 = D2 + E0 + logV;
        double Qbv2 = 0.0;
        for (size_t k = 0; k < n; ++k) Qbv2 += w[k] * b[k] * v2[k];
        const double Db2 = logc2 - logV + (Qucanb + Qbv2) / V;

        st.e_drift_step = std::max(st.e_drift_step, std::abs(E2 - E));
        st.e_drift_total = std::max(st.e_drift_total, std::abs(E2 - E0));
        st.d_increase = std::max(st.d_increase, D2 - D);
        st.r_increase = std::max(st.r_increase, ev2.R - ev.R);
        st.ding_increase = std::max(st.ding_increase, ding2 - ding);
        st.key_slack = std::max(st.key_slack, ((Db2 - Db) / dt + S2 / V) / (1.0 + ev.R));
        st.slope_slack = std::max(st.slope_slack, ((D2 - D) / dt + ev.R) / (1.0 + ev.R));
        if (opts.track_m_per_step) {
            const double H2 = entropy(sigma2);
            st.m_increase = std::max(st.m_increase, (D2 + H2) - (D + Hcur));
            Hcur = H2;
        }

        t += dt;
        last_dt = dt;
        v.swap(v2);
        sigma.swap(sigma2);
        ev = ev2;
        E = E2;
        D = D2;
        ding = ding2;
        Db = Db2;
        Qv = Qv2;

        S2 = 0.0;
        double mx = 0.0, my = 0.0, vmax = res.max_abs_v;
        for (size_t k = 0; k < n; ++k) {
            const double d = sigma[k] - b[k];
            S2 += w[k] * d * d;
            mx += w[k] * sigma[k] * xs[k][0];
            my += w[k] * sigma[k] * xs[k][1];
            const double av = std::abs(v[k]);
            if (av > vmax) vmax = av;
        }
        res.max_abs_v = vmax;
        st.sigma_moment_max = std::max(st.sigma_moment_max, std::abs(mx));
        if (g.dim() == 2) st.sigma_moment_max = std::max(st.sigma_moment_max, std::abs(my));

        rwin.emplace_back(t, ev.R);
        bool have_ref = false;
        double rref = 0.0;
        while (!rwin.empty() && rwin.front().first <= t - opts.plateau_window) {
            rref = rwin.front().second;
            have_ref = true;
            rwin.pop_front();
        }
        if (have_ref && std::abs(ev.R - rref) < opts.plateau_tol * (1.0 + ev.R)) {
            res.status = FlowStatus::Plateau;
            done = true;
        }

        if (t >= next_row - 1e-12) {
            push_row(dt);
            while (next_row <= t + 1e-12) next_row += opts.trace_dt;
        }
        dt = std::min({opts.kappa * g.h() * g.h() * ev.min_ratio, opts.dt_growth * dt,
                       opts.trace_dt / 2});
    }

    if (res.trace.empty() || t > res.trace.back().t + 1e-12) push_row(last_dt);
    res.v = std::move(v);
    res.sigma = std::move(sigma);
    res.t_end = t;
    res.c_norm = ev.c_norm;
    res.R_end = ev.R;
    return res;
}

namespace {
const char* kTraceHeader = "t,E,D,R,H,M,ding_c,dist_to_limit,sigma_min,sigma_max,dt";
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows,
                     const std::vector<std::pair<std::string, std::string>>& metadata) {
    std::string out;
    for (const auto& [k, vv] : metadata) out += "# " + k + "=" + vv + "\n";
    out += kTraceHeader;
    out += "\n";
    char buf[64];
    for (const auto& r : rows) {
        const double vals[11] = {r.t,         r.E,           r.D,         r.R,
                                 r.H,         r.M,           r.ding_c,    r.dist_to_limit,
                                 r.sigma_min, r.sigma_max,   r.dt};
        for (int i = 0; i < 11; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
            out += buf;
            out += i == 10 ? '\n' : ',';
        }
    }
    write_text_file(path, out);
}

std::vector<TraceRow> read_trace_csv(const std::string& path,
                                     std::vector<std::pair<std::string, std::string>>* metadata) {
    const std::string text = read_text_file(path);
    std::vector<TraceRow> rows;
    size_t pos = 0;
    bool seen_header = false;
    int data_row = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(line.find_first_not_of("# "));
            size_t eq = body.find('=');
            if (metadata && eq != std::string::npos)
                metadata->emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        if (!seen_header) {
            if (line != kTraceHeader)
                throw UsageError("trace header mismatch in " + path + ": got '" + line + "'");
            seen_header = true;
            continue;
        }
        ++data_row;
        double vals[11];
        int field = 0;
        size_t fp = 0;
        while (field < 11) {
            size_t comma = line.find(',', fp);
            std::string tok = comma == std::string::npos ? line.substr(fp)
                                                         : line.substr(fp, comma - fp);
            char* end = nullptr;
            vals[field] = std::strtod(tok.c_str(), &end);
            if (tok.empty() || end != tok.c_str() + tok.size()) break;
            ++field;
            if (comma == std::string::npos) {
                fp = line.size();
                break;
            }
            fp = comma + 1;
        }
        if (field != 11)
            throw UsageError("trace row " + std::to_string(data_row) + " in " + path +
                             ": expected 11 numeric fields");
        TraceRow r;
        r.t = vals[0];
        r.E = vals[1];
        r.D = vals[2];
        r.R = vals[3];
        r.H = vals[4];
        r.M = vals[5];
        r.ding_c = vals[6];
        r.dist_to_limit = vals[7];
        r.sigma_min = vals[8];
        r.sigma_max = vals[9];
        r.dt = vals[10];
        rows.push_back(r);
    }
    if (!seen_header) throw UsageError("trace file has no header: " + path);
    return rows;
}

void save_state(const std::string& path, const Grid& g, const std::vector<double>& v, double t) {
    Json j;
    j["polytope"] = g.polytope().name();
    j["h"] = g.h();
    j["t"] = t;
    j["v"] = v;
    write_text_file(path, dump17(j));
}

std::vector<double> load_state(const std::string& path, const Grid& g) {
    Json j;
    try {
        j = Json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("cannot parse state file " + path + ": " + e.what());
    }
    if (!j.contains("polytope") || !j.contains("h") || !j.contains("v"))
        throw UsageError("state file missing fields: " + path);
    if (j["polytope"].get<std::string>() != g.polytope().name())
        throw UsageError("state file is for polytope " + j["polytope"].get<std::string>() +
                         ", grid is " + g.polytope().name());
    if (std::abs(j["h"].get<double>() - g.h()) > 1e-12)
        throw UsageError("state file grid spacing does not match");
    std::vector<double> v = j["v"].get<std::vector<double>>();
    if (v.size() != g.size()) throw UsageError("state file node count does not match grid");
    return v;
}

}  // namespace torific
