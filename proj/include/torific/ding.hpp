#pragma once
// Non-Archimedean Ding invariants of PL convex test functions, the two norm
// conventions, the Futaki-Mabuchi pairing, and the extremal affine function.
//
// Norm conventions (both exposed because they only agree on average-zero f):
//   tc_norm_sq = (1/V) int f^2 - ((1/V) int f)^2   (variance; used in W, W_l)
//   l2_norm_sq = int f^2                            (raw; used in V*b(0) = int b^2)

#include "torific/affine.hpp"
#include "torific/polytope.hpp"
#include "torific/random.hpp"

namespace torific {

// exact integrals of PL convex functions by activity-region decomposition
double int_pl(const LatticePolytope& P, const PLConvexFn& f);
double int_pl_product(const LatticePolytope& P, const PLConvexFn& f, const PLConvexFn& g);
double int_pl_poly(const LatticePolytope& P, const PLConvexFn& f, const Polynomial& g);
// min of f over P (attained at a vertex of the activity decomposition)
double pl_min(const LatticePolytope& P, const PLConvexFn& f);

// D^NA(f) = -f(0) + (1/V) int f
double dna(const LatticePolytope& P, const PLConvexFn& f);
// D^NA_g(f) = -f(0) + (1/V) int f g
double dna_modified(const LatticePolytope& P, const PLConvexFn& f, const PLConvexFn& g);
double dna_modified(const LatticePolytope& P, const PLConvexFn& f, const Polynomial& g);
// quadrature path for grid-sampled g (weights w_k at points x_k)
double dna_modified_quad(const LatticePolytope& P, const PLConvexFn& f,
                         const std::vector<Vec>& xs, const std::vector<double>& ws,
                         const std::vector<double>& gvals);

double tc_norm_sq(const LatticePolytope& P, const PLConvexFn& f);
double l2_norm_sq(const LatticePolytope& P, const PLConvexFn& f);

// (1/V) int a_mu1 a_mu2 with a_mu = <mu, x> - avg <mu, x>
double fm_inner(const LatticePolytope& P, const Vec& mu1, const Vec& mu2);

struct ExtremalData {
    AffineFn e;      // zero-average extremal affine function
    AffineFn ell;    // e + 1
    Vec eta;         // gradient; solves Cov * eta = -barycenter (exact)
    double min_ell;  // exact min of ell over the vertices
    double residual; // max_mu |a_mu(0) - (1/V) int a_mu e|, recomputed in fp
};
ExtremalData extremal_affine(const LatticePolytope& P);

// W(f) = D^NA(f)/sqrt(tc_norm_sq), W_l(f) = D^NA_l(f)/sqrt(tc_norm_sq)
double w_ratio(const LatticePolytope& P, const PLConvexFn& f);
double w_ell_ratio(const LatticePolytope& P, const PLConvexFn& f);

// f_mu = -a_mu, the affine function of the product configuration along mu
PLConvexFn product_config_fn(const LatticePolytope& P, const Vec& mu);

// max of k <= 5 affine pieces, coefficients uniform in [-1, 1]
PLConvexFn random_pl_convex(int dim, Rng& rng);

}  // namespace torific
