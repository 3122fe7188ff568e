#include "torific/energies.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace torific {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Upper envelope of the lines t -> x[k] t - u[k] at ascending query points.
// x must be strictly ascending (ties pre-reduced to the smallest u).
void envelope_1d(const std::vector<double>& x, const std::vector<double>& u,
                 const std::vector<double>& ts, std::vector<double>& out) {
    const std::size_t n = x.size();
    std::vector<std::size_t> hull;
    hull.reserve(n);
    for (std::size_t c = 0; c < n; ++c) {
        // b is dominated by a,c everywhere iff it sits on or below their crossing
        while (hull.size() >= 2) {
            std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            if ((u[b] - u[a]) * (x[c] - x[b]) >= (u[c] - u[b]) * (x[b] - x[a]))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(c);
    }
    out.resize(ts.size());
    std::size_t p = 0;
    for (std::size_t q = 0; q < ts.size(); ++q) {
        const double t = ts[q];
        while (p + 1 < hull.size() &&
               x[hull[p + 1]] * t - u[hull[p + 1]] >= x[hull[p]] * t - u[hull[p]])
            ++p;
        out[q] = x[hull[p]] * t - u[hull[p]];
    }
}

// strictly ascending abscissas, keeping the lowest value on ties
void reduce_column(std::vector<std::pair<double, double>>& col) {
    std::sort(col.begin(), col.end());
    std::size_t w = 0;
    for (std::size_t i = 0; i < col.size(); ++i) {
        if (w > 0 && col[i].first == col[w - 1].first) continue;
        col[w++] = col[i];
    }
    col.resize(w);
}

double support_radius(int dim, const std::vector<Vec>& xs) {
    double xmax = 0;
    for (const auto& x : xs) xmax = std::max(xmax, std::hypot(x[0], x[1]));
    if (dim == 1) {
        double lo = -1e300, hi = -1e300;
        for (const auto& x : xs) {
            hi = std::max(hi, x[0]);
            lo = std::max(lo, -x[0]);
        }
        return std::min(lo, hi);
    }
    const int nd = 1024;
    double r = 1e300;
    for (int m = 0; m < nd; ++m) {
        const double th = 2.0 * kPi * m / nd;
        const double c = std::cos(th), s = std::sin(th);
        double sup = -1e300;
        for (const auto& x : xs) sup = std::max(sup, c * x[0] + s * x[1]);
        r = std::min(r, sup);
    }
    // support functions are xmax-Lipschitz on the circle; cover the gaps
    return r - xmax * kPi / nd;
}

}  // namespace

DualGrid legendre(int dim, const std::vector<Vec>& xs, const std::vector<double>& u,
                  DualGridSpec spec) {
    if (dim != 1 && dim != 2) throw UsageError("legendre: dim must be 1 or 2");
    if (xs.empty() || xs.size() != u.size())
        throw UsageError("legendre: empty or mismatched sample cloud");

    double umax = u[0], umin = u[0];
    for (double v : u) {
        umax = std::max(umax, v);
        umin = std::min(umin, v);
    }
    const double r = support_radius(dim, xs);
    if (r <= 1e-9)
        throw NumericalError("legendre: origin is not interior to the sample support");

    DualGrid dg;
    dg.dim = dim;
    dg.h_xi = spec.h_xi > 0 ? spec.h_xi : (dim == 1 ? 0.02 : 0.15);
    double rho = spec.rho > 0 ? spec.rho : (46.0 + umax + std::max(0.0, -umin)) / r;
    rho = std::max(rho, 4 * dg.h_xi);
    dg.nx = 2 * static_cast<int>(std::ceil(rho / dg.h_xi)) + 1;
    dg.rho = dg.h_xi * (dg.nx - 1) / 2.0;

    std::vector<double> ts(dg.nx);
    for (int i = 0; i < dg.nx; ++i) ts[i] = -dg.rho + i * dg.h_xi;

    if (dim == 1) {
        std::vector<std::pair<double, double>> col(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) col[k] = {xs[k][0], u[k]};
        reduce_column(col);
        std::vector<double> cx(col.size()), cu(col.size());
        for (std::size_t k = 0; k < col.size(); ++k) {
            cx[k] = col[k].first;
            cu[k] = col[k].second;
        }
        envelope_1d(cx, cu, ts, dg.phi);
    } else {
        // separable two-pass transform: columns in x2 first, then rows in x1
        std::map<double, std::vector<std::pair<double, double>>> cols;
        for (std::size_t k = 0; k < xs.size(); ++k)
            cols[xs[k][0]].push_back({xs[k][1], u[k]});
        const std::size_t nc = cols.size();
        std::vector<double> colx(nc);
        std::vector<std::vector<double>> psi(nc);
        std::size_t ci = 0;
        std::vector<double> cx, cu;
        for (auto& [x1, col] : cols) {
            colx[ci] = x1;
            reduce_column(col);
            cx.resize(col.size());
            cu.resize(col.size());
            for (std::size_t k = 0; k < col.size(); ++k) {
                cx[k] = col[k].first;
                cu[k] = col[k].second;
            }
            envelope_1d(cx, cu, ts, psi[ci]);
            ++ci;
        }
        dg.phi.resize(static_cast<std::size_t>(dg.nx) * dg.nx);
        std::vector<double> negpsi(nc), row;
        for (int j = 0; j < dg.nx; ++j) {
            for (std::size_t c = 0; c < nc; ++c) negpsi[c] = -psi[c][j];
            envelope_1d(colx, negpsi, ts, row);
            std::copy(row.begin(), row.end(),
                      dg.phi.begin() + static_cast<std::size_t>(j) * dg.nx);
        }
    }

    dg.phi_min = *std::min_element(dg.phi.begin(), dg.phi.end());
    double isum = 0;
    for (double p : dg.phi) isum += std::exp(-(p - dg.phi_min));
    const double cell = dim == 1 ? dg.h_xi : dg.h_xi * dg.h_xi;
    // phi(xi) >= r|xi| - umax, so the exterior integral has a closed-form bound
    const double rr = r * dg.rho;
    const double tail =
        dim == 1 ? 2.0 * std::exp(umax + dg.phi_min - rr) / r
                 : 2.0 * kPi * std::exp(umax + dg.phi_min - rr) * (rr + 1.0) / (r * r);
    dg.tail_rel_bound = tail / (isum * cell);
    if (!(dg.tail_rel_bound <= spec.tail_rel))
        throw NumericalError("legendre: dual-grid tail bound " +
                             std::to_string(dg.tail_rel_bound) +
                             " exceeds the requested accuracy; increase rho");
    return dg;
}

double dual_log_integral(const DualGrid& dg) {
    double isum = 0;
    for (double p : dg.phi) isum += std::exp(-(p - dg.phi_min));
    return std::log(isum) + dg.dim * std::log(dg.h_xi);
}

namespace {

DingValue ding_impl(const Grid& g, const std::vector<double>& u,
                    const std::vector<double>& gvals, DualGridSpec spec) {
    const DualGrid dg = legendre(g.dim(), g.points(), u, spec);
    double avg = 0;
    for (std::size_t i = 0; i < g.size(); ++i) avg += g.weights()[i] * u[i] * gvals[i];
    avg /= g.polytope().volume();
    DingValue out;
    out.value = -dual_log_integral(dg) - u[g.origin()] + avg;
    out.tail_rel = dg.tail_rel_bound;
    out.rho = dg.rho;
    out.h_xi = dg.h_xi;
    if (!(out.tail_rel <= 1e-6 * std::max(1.0, std::abs(out.value))))
        throw NumericalError("ding energy: dual-integral error bar exceeds precision target");
    return out;
}

}  // namespace

DingValue ding_energy(const Grid& g, const std::vector<double>& v, DualGridSpec spec) {
    std::vector<double> u(g.size()), ones(g.size(), 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = g.ucan()[i] + v[i];
    return ding_impl(g, u, ones, spec);
}

DingValue modified_ding_energy(const Grid& g, const std::vector<double>& v,
                               const std::vector<double>& gvals, DualGridSpec spec) {
    if (gvals.size() != static_cast<std::size_t>(g.size()))
        throw UsageError("modified ding energy: weight vector size mismatch");
    std::vector<double> u(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = g.ucan()[i] + v[i];
    return ding_impl(g, u, gvals, spec);
}

double ricci_calabi(const Grid& g, const std::vector<double>& sigma) {
    if (sigma.size() != static_cast<std::size_t>(g.size()))
        throw UsageError("ricci_calabi: density size mismatch");
    double s = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = sigma[i] - 1.0;
        s += g.weights()[i] * d * d;
    }
    return s / g.polytope().volume();
}

double ricci_calabi(const LatticePolytope& P, const AffineFn& sigma) {
    const AffineFn d = sigma - affine_constant(P.dim(), 1.0);
    Moments2 m = mesh_moments2(P.dmesh());
    return m.int_affine_product(d.half(), d.half()) / P.volume();
}

double moment_weight_gap(const LatticePolytope& P, double ricci_calabi_value,
                         const PLConvexFn& f) {
    const double l2 = int_pl_product(P, f, f);
    if (!(l2 > 0)) throw UsageError("moment_weight_gap: test function has zero L2 norm");
    const double rhs = -dna(P, f) / std::sqrt(l2 / P.volume());
    return std::sqrt(std::max(0.0, ricci_calabi_value)) - rhs;
}

double moment_weight_gap(const Grid& g, const std::vector<double>& sigma,
                         const PLConvexFn& f) {
    return moment_weight_gap(g.polytope(), ricci_calabi(g, sigma), f);
}

PLConvexFn normalize(const PLConvexFn& f) {
    if (f.pieces.empty()) throw UsageError("normalize: empty function");
    const Vec zero{0, 0};
    const double f0 = f(zero);
    const Vec s = f.pieces[f.active_piece(zero)].g;
    PLConvexFn out;
    out.dim = f.dim;
    out.pieces.reserve(f.pieces.size());
    for (const auto& p : f.pieces)
        out.pieces.push_back(AffineFn{f.dim, p.c0 - f0, {p.g[0] - s[0], p.g[1] - s[1]}});
    return out;
}

namespace {

bool solve_dense(int n, double a[3][4]) {
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (std::abs(a[p][c]) < 1e-14) return false;
        if (p != c)
            for (int k = 0; k <= n; ++k) std::swap(a[p][k], a[c][k]);
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (int k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    for (int c = 0; c < n; ++c) a[c][n] /= a[c][c];
    return true;
}

// minimize psi(s) = max_k (<s, x_k> - b_k) by cutting planes over a working
// set, solving each small minimax subproblem by basis enumeration
Vec minimax_slope(int dim, const std::vector<Vec>& xs, const std::vector<double>& b,
                  std::size_t origin) {
    const std::size_t n = static_cast<std::size_t>(xs.size());
    auto psi_at = [&](const Vec& s, std::size_t* arg) {
        double best = -1e300;
        std::size_t bi = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = s[0] * xs[k][0] + s[1] * xs[k][1] - b[k];
            if (v > best) {
                best = v;
                bi = k;
            }
        }
        if (arg) *arg = bi;
        return best;
    };

    std::vector<std::size_t> ws{origin};
    auto add = [&](std::size_t k) {
        if (std::find(ws.begin(), ws.end(), k) == ws.end()) ws.push_back(k);
    };
    const Vec dirs[8] = {{1, 0}, {-1, 0}, {0, 1},  {0, -1},
                         {1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
    for (int m = 0; m < (dim == 1 ? 2 : 8); ++m) {
        std::size_t bi = 0;
        double best = -1e300;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = dirs[m][0] * xs[k][0] + dirs[m][1] * xs[k][1];
            if (v > best) {
                best = v;
                bi = k;
            }
        }
        add(bi);
    }

    const int nv = dim + 1;  // unknowns (s, tau)
    Vec sbest{0, 0};
    for (int round = 0; round < 120; ++round) {
        // exact solve over the working set: the optimum is at a vertex where
        // nv constraints are tight
        double tbest = 1e300;
        Vec scur{0, 0};
        const std::size_t m = ws.size();
        for (std::size_t i0 = 0; i0 < m; ++i0) {
            for (std::size_t i1 = i0 + 1; i1 < m; ++i1) {
                for (std::size_t i2 = (dim == 1 ? m : i1 + 1);
                     dim == 1 ? i2 == m : i2 < m; ++i2) {
                    double a[3][4] = {};
                    const std::size_t rows[3] = {i0, i1, dim == 1 ? i0 : i2};
                    for (int r = 0; r < nv; ++r) {
                        const std::size_t k = ws[rows[r]];
                        for (int d = 0; d < dim; ++d) a[r][d] = xs[k][d];
                        a[r][dim] = -1.0;
                        a[r][nv] = b[k];
                    }
                    if (!solve_dense(nv, a)) {
                        if (dim == 1) break;
                        continue;
                    }
                    Vec s{a[0][nv], dim == 2 ? a[1][nv] : 0.0};
                    const double tau = a[dim][nv];
                    if (tau >= tbest) {
                        if (dim == 1) break;
                        continue;
                    }
                    bool feas = true;
                    for (std::size_t j = 0; j < m && feas; ++j) {
                        const std::size_t k = ws[j];
                        const double v = s[0] * xs[k][0] + s[1] * xs[k][1] - b[k];
                        if (v > tau + 1e-12 * (1.0 + std::abs(tau))) feas = false;
                    }
                    if (feas) {
                        tbest = tau;
                        scur = s;
                    }
                    if (dim == 1) break;
                }
            }
        }
        if (tbest >= 1e300)
            throw NumericalError("normalize: degenerate subgradient system at the origin");
        std::size_t worst = 0;
        const double full = psi_at(scur, &worst);
        sbest = scur;
        if (full <= tbest + 1e-13 * (1.0 + std::abs(tbest))) return sbest;
        add(worst);
    }
    throw NumericalError("normalize: subgradient search did not converge");
}

}  // namespace

std::vector<double> normalize_grid(const Grid& g, const std::vector<double>& u_total) {
    if (u_total.size() != static_cast<std::size_t>(g.size()))
        throw UsageError("normalize_grid: value vector size mismatch");
    const double u0 = u_total[g.origin()];
    std::vector<double> du(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) du[i] = u_total[i] - u0;
    const Vec s = minimax_slope(g.dim(), g.points(), du, g.origin());
    double worst = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        du[i] -= s[0] * g.points()[i][0] + s[1] * g.points()[i][1];
        worst = std::min(worst, du[i]);
    }
    if (!(worst >= -1e-12))
        throw NumericalError("normalize_grid: normalized potential dips to " +
                             std::to_string(worst));
    return du;
}

double jt_proxy(const Grid& g, const std::vector<double>& v) {
    if (v.size() != static_cast<std::size_t>(g.size()))
        throw UsageError("jt_proxy: value vector size mismatch");
    std::vector<double> u(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = g.ucan()[i] + v[i];
    const std::vector<double> nu = normalize_grid(g, u);
    double q = 0;
    for (std::size_t i = 0; i < g.size(); ++i) q += g.weights()[i] * nu[i];
    return q / g.polytope().volume();
}

}  // namespace torific
