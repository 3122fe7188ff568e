#pragma once
// Sparse polynomials in 1 or 2 variables.  The public integration contract
// caps total degree at 4; internally products with affine factors (degree 5)
// still integrate exactly through the simplex monomial kernel.

#include <map>
#include <utility>
#include <vector>

#include "torific/common.hpp"
#include "torific/geometry.hpp"

namespace torific {

template <class S>
class PolynomialT {
  public:
    PolynomialT() = default;
    explicit PolynomialT(int nvars) : nvars_(nvars) {
        if (nvars < 1 || nvars > 2) throw UsageError("polynomial supports 1 or 2 variables");
    }

    static PolynomialT constant(int nvars, S c) {
        PolynomialT p(nvars);
        p.add_term(0, 0, c);
        return p;
    }
    static PolynomialT affine(int nvars, S c0, const PointT<S>& g) {
        PolynomialT p(nvars);
        p.add_term(0, 0, c0);
        p.add_term(1, 0, g[0]);
        if (nvars == 2) p.add_term(0, 1, g[1]);
        return p;
    }

    void add_term(int ax, int ay, S c) {
        if (ax < 0 || ay < 0 || (nvars_ == 1 && ay != 0))
            throw UsageError("bad monomial exponent");
        if (c == 0) return;
        auto [it, fresh] = terms_.try_emplace({ax, ay}, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    int nvars() const { return nvars_; }
    int degree() const {
        int d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
        return d;
    }
    bool empty() const { return terms_.empty(); }

    S eval(const PointT<S>& x) const {
        S total{};
        for (const auto& [k, c] : terms_) {
            S t = c;
            for (int i = 0; i < k.first; ++i) t *= x[0];
            for (int i = 0; i < k.second; ++i) t *= x[1];
            total += t;
        }
        return total;
    }

    PolynomialT operator+(const PolynomialT& o) const {
        check_same(o);
        PolynomialT r = *this;
        for (const auto& [k, c] : o.terms_) r.add_term(k.first, k.second, c);
        return r;
    }

    PolynomialT operator*(S c) const {
        PolynomialT r(nvars_);
        for (const auto& [k, cc] : terms_) r.add_term(k.first, k.second, cc * c);
        return r;
    }

    // product with an affine factor, used for modified integrals
    PolynomialT times_affine(S c0, const PointT<S>& g) const {
        PolynomialT r(nvars_);
        for (const auto& [k, c] : terms_) {
            r.add_term(k.first, k.second, c * c0);
            if (g[0] != 0) r.add_term(k.first + 1, k.second, c * g[0]);
            if (nvars_ == 2 && g[1] != 0) r.add_term(k.first, k.second + 1, c * g[1]);
        }
        return r;
    }

    // exact integral over a mesh; degree cap enforced by the caller
    S integrate(const MeshT<S>& m) const {
        S total{};
        for (const auto& [k, c] : terms_) total += c * mesh_monomial(m, k.first, k.second);
        return total;
    }

    const std::map<std::pair<int, int>, S>& terms() const { return terms_; }

  private:
    void check_same(const PolynomialT& o) const {
        if (nvars_ != o.nvars_) throw UsageError("mixing polynomials of different arity");
    }
    int nvars_ = 2;
    std::map<std::pair<int, int>, S> terms_;
};

using Polynomial = PolynomialT<double>;

}  // namespace torific
