#include "torific/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "torific/catalog_data.hpp"

namespace torific {

using json = nlohmann::json;

namespace {

// exact CCW-around-origin comparator for integer/rational 2-vectors
template <class S>
int angle_half(const PointT<S>& v) {
    if (v[1] > 0 || (v[1] == 0 && v[0] > 0)) return 0;
    return 1;
}

template <class S>
S cross2(const PointT<S>& a, const PointT<S>& b) {
    return a[0] * b[1] - a[1] * b[0];
}

long long llgcd(long long a, long long b) { return std::gcd(std::llabs(a), std::llabs(b)); }

}  // namespace

double ClippedRegion::integrate(const Polynomial& q) const {
    if (q.degree() > 4) throw UsageError("integrate supports total degree <= 4");
    return q.integrate(mesh);
}

LatticePolytope LatticePolytope::from_vertices(std::string name, int dim,
                                               std::vector<RVec> vertices) {
    LatticePolytope p;
    p.name_ = std::move(name);
    p.dim_ = dim;
    p.vertices_ = std::move(vertices);
    p.finish();
    return p;
}

LatticePolytope LatticePolytope::from_rays(std::string name, int dim,
                                           std::vector<std::array<long long, 2>> rays) {
    LatticePolytope p;
    p.name_ = std::move(name);
    p.dim_ = dim;
    p.rays_given_ = true;
    p.given_rays_ = std::move(rays);

    if (dim == 1) {
        bool pos = false, neg = false;
        for (auto& r : p.given_rays_) {
            if (r[0] == 1) pos = true;
            else if (r[0] == -1) neg = true;
            else throw UsageError("1d rays must be [1] and [-1]");
        }
        if (!pos || !neg) throw UsageError("1d rays must include both directions");
        p.vertices_ = {{Rational(-1), Rational(0)}, {Rational(1), Rational(0)}};
        p.finish();
        return p;
    }

    // vertices of {x : <r, x> >= -1} from consecutive rays in CCW order
    auto rays2 = p.given_rays_;
    std::sort(rays2.begin(), rays2.end(), [](const auto& a, const auto& b) {
        PointT<long long> pa{a[0], a[1]}, pb{b[0], b[1]};
        int ha = angle_half(pa), hb = angle_half(pb);
        if (ha != hb) return ha < hb;
        return cross2(pa, pb) > 0;
    });
    const size_t k = rays2.size();
    if (k < 3) throw UsageError("need at least 3 rays in dimension 2");
    for (size_t i = 0; i < k; ++i) {
        const auto& a = rays2[i];
        const auto& b = rays2[(i + 1) % k];
        long long det = a[0] * b[1] - a[1] * b[0];
        if (det <= 0) throw UsageError("rays do not positively span the plane");
        // <a, v> = -1, <b, v> = -1
        p.vertices_.push_back({Rational(a[1] - b[1]) / det, Rational(b[0] - a[0]) / det});
    }
    p.finish();
    return p;
}

void LatticePolytope::finish() {
    if (dim_ != 1 && dim_ != 2)
        throw UsageError("polytope dimension must be 1 or 2");

    if (dim_ == 1) {
        if (vertices_.size() != 2) throw UsageError("1d polytope needs exactly 2 vertices");
        Rational lo = vertices_[0][0], hi = vertices_[1][0];
        if (lo > hi) std::swap(lo, hi);
        if (lo >= hi) throw UsageError("degenerate 1d polytope");
        vertices_ = {{lo, Rational(0)}, {hi, Rational(0)}};
        facets_ = {Facet{{1, 0}, -lo}, Facet{{-1, 0}, hi}};
        if (facets_[0].offset <= 0 || facets_[1].offset <= 0)
            throw UsageError("origin must be interior");
        reflexive_ = (lo == -1 && hi == 1);
        hub_ = {(lo + hi) / 2, Rational(0)};
        tri_ = {{0, 1, -1}};
        SimplexT<Rational> s;
        s.dim = 1;
        s.v[0] = vertices_[0];
        s.v[1] = vertices_[1];
        rmesh_.dim = 1;
        rmesh_.cells = {s};
    } else {
        const size_t k = vertices_.size();
        if (k < 3) throw UsageError("2d polytope needs at least 3 vertices");

        // order CCW around the vertex average
        RVec avg{};
        for (const auto& v : vertices_) {
            avg[0] += v[0];
            avg[1] += v[1];
        }
        avg[0] /= int(k);
        avg[1] /= int(k);
        std::sort(vertices_.begin(), vertices_.end(), [&](const RVec& a, const RVec& b) {
            RVec da{a[0] - avg[0], a[1] - avg[1]}, db{b[0] - avg[0], b[1] - avg[1]};
            int ha = angle_half(da), hb = angle_half(db);
            if (ha != hb) return ha < hb;
            Rational c = cross2(da, db);
            if (c != 0) return c > 0;
            throw UsageError("duplicate or collinear-with-hub vertices");
        });
        for (size_t i = 0; i < k; ++i) {
            const RVec& a = vertices_[i];
            const RVec& b = vertices_[(i + 1) % k];
            const RVec& c = vertices_[(i + 2) % k];
            RVec e1{b[0] - a[0], b[1] - a[1]}, e2{c[0] - b[0], c[1] - b[1]};
            if (cross2(e1, e2) <= 0)
                throw UsageError("vertices are not in strictly convex position");
        }
        hub_ = avg;

        // facets from edges; inward normal is the left-rotate of the edge
        facets_.clear();
        for (size_t i = 0; i < k; ++i) {
            const RVec& v = vertices_[i];
            const RVec& w = vertices_[(i + 1) % k];
            RVec d{w[0] - v[0], w[1] - v[1]};
            RVec nr{-d[1], d[0]};
            // scale to a primitive integer vector
            auto den = lcm(denominator(nr[0]), denominator(nr[1]));
            long long nx = Rational(nr[0] * den).convert_to<long long>();
            long long ny = Rational(nr[1] * den).convert_to<long long>();
            long long g = llgcd(nx, ny);
            if (g == 0) throw UsageError("degenerate edge");
            Facet f;
            f.normal = {nx / g, ny / g};
            f.offset = -(Rational(f.normal[0]) * v[0] + Rational(f.normal[1]) * v[1]);
            if (f.offset <= 0) throw UsageError("origin must be interior");
            facets_.push_back(f);
        }

        if (rays_given_) {
            auto key = [](const std::array<long long, 2>& r) { return r[0] * 1000 + r[1]; };
            std::vector<long long> got, want;
            for (const auto& f : facets_) got.push_back(key(f.normal));
            for (const auto& r : given_rays_) want.push_back(key(r));
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            if (got != want)
                throw UsageError("given rays disagree with facet normals of the vertex hull");
        }

        reflexive_ = std::all_of(facets_.begin(), facets_.end(),
                                 [](const Facet& f) { return f.offset == 1; });

        // fan triangulation from the hub (index k by convention)
        tri_.clear();
        rmesh_.dim = 2;
        rmesh_.cells.clear();
        for (size_t i = 0; i < k; ++i) {
            tri_.push_back({int(k), int(i), int((i + 1) % k)});
            SimplexT<Rational> s;
            s.dim = 2;
            s.v[0] = hub_;
            s.v[1] = vertices_[i];
            s.v[2] = vertices_[(i + 1) % k];
            rmesh_.cells.push_back(s);
        }
    }

    dmesh_.dim = rmesh_.dim;
    dmesh_.cells.clear();
    for (const auto& s : rmesh_.cells) {
        SimplexT<double> d;
        d.dim = s.dim;
        for (int i = 0; i < 3; ++i) d.v[i] = from_rational(s.v[i]);
        dmesh_.cells.push_back(d);
    }

    moments_.assign(25, Rational(0));
    for (int ax = 0; ax <= 4; ++ax)
        for (int ay = 0; ax + ay <= 4; ++ay) {
            if (dim_ == 1 && ay > 0) continue;
            moments_[ax * 5 + ay] = mesh_monomial(rmesh_, ax, ay);
        }
    volume_ = to_double(moments_[0]);
    if (!(volume_ > 0)) throw UsageError("polytope has zero volume");
}

Rational LatticePolytope::moment_rat(int ax, int ay) const {
    if (ax < 0 || ay < 0 || ax + ay > 4 || (dim_ == 1 && ay > 0))
        throw UsageError("moment table covers total degree <= 4");
    return moments_[ax * 5 + ay];
}

Vec LatticePolytope::barycenter() const {
    Rational v = moments_[0];
    return {to_double(moment_rat(1, 0) / v), dim_ == 2 ? to_double(moment_rat(0, 1) / v) : 0.0};
}

std::array<double, 3> LatticePolytope::covariance() const {
    Rational v = moments_[0];
    Rational cx = moment_rat(1, 0) / v;
    Rational cy = dim_ == 2 ? moment_rat(0, 1) / v : Rational(0);
    Rational xx = moment_rat(2, 0) / v - cx * cx;
    Rational xy = dim_ == 2 ? moment_rat(1, 1) / v - cx * cy : Rational(0);
    Rational yy = dim_ == 2 ? moment_rat(0, 2) / v - cy * cy : Rational(0);
    return {to_double(xx), to_double(xy), to_double(yy)};
}

double LatticePolytope::integrate_poly(const Polynomial& q) const {
    if (q.nvars() != dim_) throw UsageError("polynomial arity does not match dimension");
    if (q.degree() > 4) throw UsageError("integrate_poly supports total degree <= 4");
    double total = 0.0;
    for (const auto& [k, c] : q.terms()) total += c * moment(k.first, k.second);
    return total;
}

bool LatticePolytope::contains(const Vec& x, double tol) const {
    for (const auto& f : facets_)
        if (f.fn(dim_)(x) < -tol) return false;
    return true;
}

double LatticePolytope::boundary_distance(const Vec& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : facets_) {
        double nn = std::sqrt(double(f.normal[0] * f.normal[0] + f.normal[1] * f.normal[1]));
        best = std::min(best, f.fn(dim_)(x) / nn);
    }
    return best;
}

void LatticePolytope::bbox(Vec& lo, Vec& hi) const {
    lo = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    hi = {-lo[0], -lo[1]};
    for (const auto& v : vertices_) {
        Vec d = from_rational(v);
        for (int i = 0; i < 2; ++i) {
            lo[i] = std::min(lo[i], d[i]);
            hi[i] = std::max(hi[i], d[i]);
        }
    }
    if (dim_ == 1) lo[1] = hi[1] = 0.0;
}

ClippedRegion LatticePolytope::clip(const AffineFn& a) const {
    return ClippedRegion{clip_mesh(dmesh_, a.half())};
}

LatticePolytope LatticePolytope::from_json_text(const std::string& text) {
    json d;
    try {
        d = json::parse(text);
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad polytope document: ") + e.what());
    }
    if (!d.contains("name") || !d.contains("dimension"))
        throw UsageError("polytope document needs name and dimension");
    std::string name = d["name"].get<std::string>();
    int dim = d["dimension"].get<int>();
    bool has_v = d.contains("vertices"), has_r = d.contains("rays");
    if (!has_v && !has_r)
        throw UsageError("polytope document needs vertices or rays: " + name);

    std::vector<std::array<long long, 2>> rays;
    if (has_r) {
        for (const auto& r : d["rays"]) {
            if (!r.is_array() || int(r.size()) != dim)
                throw UsageError("ray arity mismatch in " + name);
            rays.push_back({r[0].get<long long>(), dim == 2 ? r[1].get<long long>() : 0});
        }
    }
    if (!has_v) return from_rays(name, dim, rays);

    std::vector<RVec> verts;
    for (const auto& row : d["vertices"]) {
        if (!row.is_array() || int(row.size()) != dim)
            throw UsageError("vertex arity mismatch in " + name);
        RVec v{};
        for (int i = 0; i < dim; ++i) {
            if (row[i].is_string())
                v[i] = parse_rational(row[i].get<std::string>());
            else if (row[i].is_number_integer())
                v[i] = Rational(row[i].get<long long>());
            else
                throw UsageError("vertex entries must be integers or \"p/q\" strings: " + name);
        }
        verts.push_back(v);
    }
    LatticePolytope p;
    p.name_ = name;
    p.dim_ = dim;
    p.vertices_ = std::move(verts);
    if (has_r) {
        p.rays_given_ = true;
        p.given_rays_ = std::move(rays);
    }
    p.finish();
    return p;
}

namespace {

std::vector<std::pair<std::string, std::string>> catalog_documents() {
    std::vector<std::pair<std::string, std::string>> docs;
    if (const char* dir = std::getenv("TORIFIC_CATALOG")) {
        namespace fs = std::filesystem;
        if (!fs::is_directory(dir))
            throw UsageError(std::string("TORIFIC_CATALOG is not a directory: ") + dir);
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f);
            if (!in) throw UsageError("cannot read catalog file " + f.string());
            std::stringstream ss;
            ss << in.rdbuf();
            std::string text = ss.str();
            std::string name = json::parse(text).value("name", f.stem().string());
            docs.emplace_back(name, text);
        }
        if (docs.empty())
            throw UsageError(std::string("no *.json documents in TORIFIC_CATALOG ") + dir);
        return docs;
    }
    for (int i = 0; i < kCatalogDocCount; ++i) {
        std::string text = kCatalogDocs[i];
        docs.emplace_back(json::parse(text)["name"].get<std::string>(), text);
    }
    return docs;
}

// accepted alternate spellings for catalog lookups
std::string resolve_alias(const std::string& name) {
    if (name == "BlpP2") return "Bl1P2";
    return name;
}

}  // namespace

std::vector<std::string> catalog_names() {
    std::vector<std::string> names;
    for (auto& [n, t] : catalog_documents()) names.push_back(n);
    return names;
}

LatticePolytope catalog_load(const std::string& name) {
    const std::string want = resolve_alias(name);
    auto docs = catalog_documents();
    for (auto& [n, text] : docs)
        if (n == want) return LatticePolytope::from_json_text(text);
    std::string msg = "unknown polytope '" + name + "'; available:";
    for (auto& [n, t] : docs) msg += " " + n;
    throw UsageError(msg);
}

LatticePolytope load_polytope_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read polytope file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return LatticePolytope::from_json_text(ss.str());
}

}  // namespace torific
