#include "torific/grid.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace torific {

namespace {

int64_t key_of(int ix, int iy) {
    return (static_cast<int64_t>(iy) << 24) + ix;  // coordinates stay far below 2^23
}

// one-directional first/second derivative stencils as (offset, weight/h-power)
// lists; weight scaling by 1/h or 1/h^2 happens at emission
struct Stencil1 {
    int n = 0;
    int off[4];
    double w[4];
};

const Stencil1 kD1Centered{2, {-1, 1, 0, 0}, {-0.5, 0.5}};
const Stencil1 kD1Forward{3, {0, 1, 2, 0}, {-1.5, 2.0, -0.5}};
const Stencil1 kD1Backward{3, {0, -1, -2, 0}, {1.5, -2.0, 0.5}};
// 2D one-sided second-difference closures are the interior operator shifted
// one node inward; the anti-diffusive own-node weight of the 4-point
// second-order stencil excites a sawtooth along diagonal facets through the
// cross-term feedback loop, so 2D collars trade one order of accuracy for
// damping.  1D has no cross term and keeps the second-order closure: the
// first-order one biases sigma at the collar enough to push the discrete
// Ding slope positive at coarse spacing.
const Stencil1 kD2Centered{3, {-1, 0, 1, 0}, {1.0, -2.0, 1.0}};
const Stencil1 kD2Forward{3, {0, 1, 2, 0}, {1.0, -2.0, 1.0}};
const Stencil1 kD2Backward{3, {0, -1, -2, 0}, {1.0, -2.0, 1.0}};
const Stencil1 kD2Forward4{4, {0, 1, 2, 3}, {2.0, -5.0, 4.0, -1.0}};
const Stencil1 kD2Backward4{4, {0, -1, -2, -3}, {2.0, -5.0, 4.0, -1.0}};

}  // namespace

double Grid::quad(const std::vector<double>& f) const {
    if (f.size() != xs_.size()) throw UsageError("grid function has wrong length");
    double acc = 0.0;
    for (size_t k = 0; k < f.size(); ++k) acc += w_[k] * f[k];
    return acc;
}

std::vector<double> Grid::sample(const PLConvexFn& f) const {
    std::vector<double> out(xs_.size());
    for (size_t k = 0; k < xs_.size(); ++k) out[k] = f(xs_[k]);
    return out;
}

std::vector<double> Grid::sample(const AffineFn& f) const {
    std::vector<double> out(xs_.size());
    for (size_t k = 0; k < xs_.size(); ++k) out[k] = f(xs_[k]);
    return out;
}

Grid::Grid(const LatticePolytope& P, double h) : P_(P), h_(h) {
    if (!(h > 0.0)) throw UsageError("grid spacing must be positive");
    const int dim = P_.dim();

    Vec lo{0.0, 0.0}, hi{0.0, 0.0};
    P_.bbox(lo, hi);
    const int ix0 = static_cast<int>(std::floor(lo[0] / h)) - 2;
    const int ix1 = static_cast<int>(std::ceil(hi[0] / h)) + 2;
    const int iy0 = dim == 2 ? static_cast<int>(std::floor(lo[1] / h)) - 2 : 0;
    const int iy1 = dim == 2 ? static_cast<int>(std::ceil(hi[1] / h)) + 2 : 0;

    std::unordered_map<int64_t, int32_t> id;
    std::vector<std::array<int32_t, 2>> coords;
    for (int iy = iy0; iy <= iy1; ++iy)
        for (int ix = ix0; ix <= ix1; ++ix) {
            Vec x{ix * h, iy * h};
            if (P_.boundary_distance(x) >= h * (1.0 - 1e-12)) {
                id.emplace(key_of(ix, iy), static_cast<int32_t>(coords.size()));
                coords.push_back({ix, iy});
            }
        }
    if (coords.empty()) throw UsageError("grid spacing too coarse: no interior nodes");

    std::vector<uint8_t> alive(coords.size(), 1);
    auto exists = [&](int ix, int iy) {
        auto it = id.find(key_of(ix, iy));
        return it != id.end() && alive[it->second];
    };

    // per-axis variant: 0 centered, 1 forward, 2 backward, -1 unsupported
    auto pick1 = [&](int ix, int iy, int axis) {
        auto at = [&](int o) { return axis == 0 ? exists(ix + o, iy) : exists(ix, iy + o); };
        if (at(-1) && at(1)) return 0;
        if (at(1) && at(2)) return 1;
        if (at(-1) && at(-2)) return 2;
        return -1;
    };
    auto pick2 = [&](int ix, int iy, int axis) {
        auto at = [&](int o) { return axis == 0 ? exists(ix + o, iy) : exists(ix, iy + o); };
        const bool deep = dim == 1;  // the 4-point closure reaches 3 nodes in
        if (at(-1) && at(1)) return 0;
        if (at(1) && at(2) && (!deep || at(3))) return 1;
        if (at(-1) && at(-2) && (!deep || at(-3))) return 2;
        return -1;
    };
    auto d1_of = [](int variant) -> const Stencil1& {
        return variant == 0 ? kD1Centered : variant == 1 ? kD1Forward : kD1Backward;
    };
    // cross derivative: tensor product of per-axis first-derivative stencils;
    // preference order keeps the most centered pair whose nodes all exist
    auto pick_cross = [&](int ix, int iy, int& vx, int& vy) {
        const int prefs[3] = {0, 1, 2};
        for (int a : prefs)
            for (int b : prefs) {
                const Stencil1 &sx = d1_of(a), &sy = d1_of(b);
                bool ok = true;
                for (int i = 0; i < sx.n && ok; ++i)
                    for (int j = 0; j < sy.n && ok; ++j)
                        if (!exists(ix + sx.off[i], iy + sy.off[j])) ok = false;
                if (ok) {
                    vx = a;
                    vy = b;
                    return true;
                }
            }
        return false;
    };

    auto supported = [&](size_t k) {
        const int ix = coords[k][0], iy = coords[k][1];
        if (pick1(ix, iy, 0) < 0 || pick2(ix, iy, 0) < 0) return false;
        if (dim == 2) {
            int vx, vy;
            if (pick1(ix, iy, 1) < 0 || pick2(ix, iy, 1) < 0) return false;
            if (!pick_cross(ix, iy, vx, vy)) return false;
        }
        return true;
    };

    // drop nodes that cannot host second-order stencils; removing one node can
    // strand a neighbour, so sweep to a fixed point
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<size_t> doomed;
        for (size_t k = 0; k < coords.size(); ++k)
            if (alive[k] && !supported(k)) doomed.push_back(k);
        for (size_t k : doomed) alive[k] = 0, changed = true;
    }

    // compact into final scan order
    id.clear();
    for (size_t k = 0; k < coords.size(); ++k) {
        if (!alive[k]) continue;
        id.emplace(key_of(coords[k][0], coords[k][1]), static_cast<int32_t>(coords_.size()));
        coords_.push_back(coords[k]);
        xs_.push_back(Vec{coords[k][0] * h, coords[k][1] * h});
    }
    if (coords_.empty()) throw UsageError("grid spacing too coarse: no supported nodes");
    {
        auto it = id.find(key_of(0, 0));
        if (it == id.end())
            throw UsageError("grid spacing too coarse: the origin is not a grid node");
        origin_ = static_cast<size_t>(it->second);
    }
    alive.assign(coords_.size(), 1);
    auto node_at = [&](int ix, int iy) -> int32_t {
        auto it = id.find(key_of(ix, iy));
        return it == id.end() ? -1 : it->second;
    };

    // emit stencil plans against final indices
    const size_t n = coords_.size();
    collar_.assign(n, 0);
    start_.assign(n * kOps + 1, 0);
    auto emit1 = [&](int ix, int iy, int axis, int variant, double scale) {
        const Stencil1& s = d1_of(variant);
        for (int i = 0; i < s.n; ++i) {
            pn_.push_back(axis == 0 ? node_at(ix + s.off[i], iy) : node_at(ix, iy + s.off[i]));
            pw_.push_back(s.w[i] * scale);
        }
    };
    for (size_t k = 0; k < n; ++k) {
        const int ix = coords_[k][0], iy = coords_[k][1];
        bool onesided = false;
        for (int op = 0; op < kOps; ++op) {
            start_[k * kOps + op] = static_cast<int32_t>(pn_.size());
            if (dim == 1 && op != kDx && op != kDxx) continue;
            switch (op) {
                case kDx: {
                    int v = pick1(ix, iy, 0);
                    emit1(ix, iy, 0, v, 1.0 / h);
                    onesided |= v != 0;
                    break;
                }
                case kDy: {
                    int v = pick1(ix, iy, 1);
                    emit1(ix, iy, 1, v, 1.0 / h);
                    onesided |= v != 0;
                    break;
                }
                case kDxx:
                case kDyy: {
                    int axis = op == kDxx ? 0 : 1;
                    int v = pick2(ix, iy, axis);
                    const Stencil1& s = v == 0   ? kD2Centered
                                        : v == 1 ? (dim == 1 ? kD2Forward4 : kD2Forward)
                                                 : (dim == 1 ? kD2Backward4 : kD2Backward);
                    for (int i = 0; i < s.n; ++i) {
                        pn_.push_back(axis == 0 ? node_at(ix + s.off[i], iy)
                                                : node_at(ix, iy + s.off[i]));
                        pw_.push_back(s.w[i] / (h * h));
                    }
                    onesided |= v != 0;
                    break;
                }
                case kDxy: {
                    int vx = 0, vy = 0;
                    pick_cross(ix, iy, vx, vy);
                    const Stencil1 &sx = d1_of(vx), &sy = d1_of(vy);
                    for (int i = 0; i < sx.n; ++i)
                        for (int j = 0; j < sy.n; ++j) {
                            pn_.push_back(node_at(ix + sx.off[i], iy + sy.off[j]));
                            pw_.push_back(sx.w[i] * sy.w[j] / (h * h));
                        }
                    onesided |= vx != 0 || vy != 0;
                    break;
                }
            }
        }
        collar_[k] = onesided ? 1 : 0;
    }
    start_[n * kOps] = static_cast<int32_t>(pn_.size());
    for (int32_t idx : pn_)
        if (idx < 0) throw NumericalError("stencil references a missing node");

    // quadrature: lattice cells clipped to P; cells without a surviving center
    // node lump their area into the nearest surviving node so that the weights
    // sum to the exact polytope volume
    w_.assign(n, 0.0);
    const double full = dim == 2 ? h * h : h;
    const double fast_radius = (dim == 2 ? 0.7072 : 0.51) * h;
    const auto& facets = P_.facets();
    std::vector<AffineFn> walls;
    for (const auto& f : facets) walls.push_back(f.fn(dim));

    auto cell_area = [&](double cx, double cy) -> double {
        if (dim == 1) {
            double a = cx - h / 2, b = cx + h / 2;
            for (const auto& wfn : walls) {
                // halfline {c0 + g0 x >= 0}
                double r = -wfn.c0 / wfn.g[0];
                if (wfn.g[0] > 0)
                    a = std::max(a, r);
                else
                    b = std::min(b, r);
            }
            return std::max(0.0, b - a);
        }
        Vec poly[2][20];
        int cnt[2];
        poly[0][0] = {cx - h / 2, cy - h / 2};
        poly[0][1] = {cx + h / 2, cy - h / 2};
        poly[0][2] = {cx + h / 2, cy + h / 2};
        poly[0][3] = {cx - h / 2, cy + h / 2};
        cnt[0] = 4;
        int cur = 0;
        for (const auto& wfn : walls) {
            int nxt = cur ^ 1;
            cnt[nxt] = 0;
            for (int i = 0; i < cnt[cur]; ++i) {
                const Vec& p = poly[cur][i];
                const Vec& q = poly[cur][(i + 1) % cnt[cur]];
                double fp = wfn(p), fq = wfn(q);
                if (fp >= 0) poly[nxt][cnt[nxt]++] = p;
                if ((fp > 0 && fq < 0) || (fp < 0 && fq > 0)) {
                    double t = fp / (fp - fq);
                    poly[nxt][cnt[nxt]++] = {p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])};
                }
            }
            cur = nxt;
            if (cnt[cur] == 0) return 0.0;
        }
        double area = 0.0;
        for (int i = 0; i < cnt[cur]; ++i) {
            const Vec& p = poly[cur][i];
            const Vec& q = poly[cur][(i + 1) % cnt[cur]];
            area += p[0] * q[1] - p[1] * q[0];
        }
        return std::abs(area) / 2;
    };

    auto nearest_node = [&](int ic, int jc) -> int32_t {
        const int rmax = std::max(ix1 - ix0, iy1 - iy0) + 4;
        for (int r = 1; r <= rmax; ++r) {
            int32_t best = -1;
            long long bestd = 0;
            for (int dy = dim == 2 ? -r : 0; dy <= (dim == 2 ? r : 0); ++dy) {
                const bool edge_row = dim == 1 || std::abs(dy) == r;
                for (int dx = -r; dx <= r; dx += edge_row ? 1 : 2 * r) {
                    int32_t cand = node_at(ic + dx, jc + dy);
                    if (cand < 0) continue;
                    long long d2 = static_cast<long long>(dx) * dx +
                                   static_cast<long long>(dy) * dy;
                    if (best < 0 || d2 < bestd) {
                        best = cand;
                        bestd = d2;
                    }
                }
            }
            if (best >= 0) return best;
        }
        throw NumericalError("no node found for orphan quadrature cell");
    };

    for (int jc = iy0 - 1; jc <= iy1 + 1; ++jc)
        for (int ic = ix0 - 1; ic <= ix1 + 1; ++ic) {
            const double cx = ic * h, cy = dim == 2 ? jc * h : 0.0;
            if (dim == 1 && jc != 0) continue;
            double area;
            if (P_.contains(Vec{cx, cy}) && P_.boundary_distance(Vec{cx, cy}) >= fast_radius)
                area = full;
            else
                area = cell_area(cx, cy);
            if (area <= 1e-14 * full) continue;
            int32_t node = node_at(ic, jc);
            if (node < 0) node = nearest_node(ic, jc);
            w_[node] += area;
        }

    double wsum = 0.0;
    for (double w : w_) wsum += w;
    if (std::abs(wsum - P_.volume()) > 1e-9 * P_.volume())
        throw NumericalError("quadrature weights do not sum to the polytope volume");

    // canonical potential data at the nodes
    ucan_.assign(n, 0.0);
    env_.assign(n, 0.0);
    hxx_.assign(n, 0.0);
    hxy_.assign(n, 0.0);
    hyy_.assign(n, 0.0);
    for (size_t k = 0; k < n; ++k) {
        double u = 0.0, logenv = 0.0, axx = 0.0, axy = 0.0, ayy = 0.0;
        for (const auto& f : facets) {
            const double c = to_double(f.offset);
            const double lf = c + f.normal[0] * xs_[k][0] + f.normal[1] * xs_[k][1];
            if (!(lf > 0.0)) throw NumericalError("node hit the boundary of the polytope");
            const double lg = std::log(lf);
            u += lf * lg;
            logenv += c * lg + (c - lf);
            axx += f.normal[0] * f.normal[0] / lf;
            axy += f.normal[0] * f.normal[1] / lf;
            ayy += f.normal[1] * f.normal[1] / lf;
        }
        ucan_[k] = u;
        env_[k] = std::exp(logenv);
        hxx_[k] = axx;
        hxy_[k] = axy;
        hyy_[k] = ayy;
    }
}

}  // namespace torific
