#pragma once
// Legendre transform on a dual grid and the toric energy dictionary: Ding
// energy through the dual integral, modified Ding energies, Ricci-Calabi,
// moment-weight gap, normalization, and the J-type proxy.

#include "torific/ding.hpp"
#include "torific/grid.hpp"

namespace torific {

struct DualGridSpec {
    double rho = 0.0;        // 0: sized from the analytic tail bound
    double h_xi = 0.0;       // 0: 0.02 in 1D, 0.15 in 2D
    double tail_rel = 1e-8;  // admissible analytic tail relative to the integral
};

struct DualGrid {
    int dim = 1;
    double rho = 0.0, h_xi = 0.0;
    int nx = 0;               // nodes per axis; xi_i = -rho + i h_xi
    std::vector<double> phi;  // xi2-major in 2D
    double phi_min = 0.0;
    double tail_rel_bound = 0.0;  // analytic exterior bound / computed box integral
};

// phi(xi) = max_k <x_k, xi> - u_k over the sample cloud
DualGrid legendre(int dim, const std::vector<Vec>& xs, const std::vector<double>& u,
                  DualGridSpec spec = {});
// log int_box e^{-(phi - phi_min)} (midpoint rule)
double dual_log_integral(const DualGrid& dg);

struct DingValue {
    double value = 0.0;
    double tail_rel = 0.0;  // error bar carried by the dual integral
    double rho = 0.0, h_xi = 0.0;
};

// D(u) = -log int e^{-(phi - inf phi)} - u(0) + (1/V) int u with u = ucan + v
DingValue ding_energy(const Grid& g, const std::vector<double>& v, DualGridSpec spec = {});
// D_g(u) = -log int e^{-(phi - inf phi)} - u(0) + (1/V) int u g
DingValue modified_ding_energy(const Grid& g, const std::vector<double>& v,
                               const std::vector<double>& gvals, DualGridSpec spec = {});

double ricci_calabi(const Grid& g, const std::vector<double>& sigma);
double ricci_calabi(const LatticePolytope& P, const AffineFn& sigma);  // exact moments

// R^{1/2} - (-D^NA(f) / (V^{-1/2} ||f||_{L2}))
double moment_weight_gap(const LatticePolytope& P, double ricci_calabi_value,
                         const PLConvexFn& f);
double moment_weight_gap(const Grid& g, const std::vector<double>& sigma, const PLConvexFn& f);

// subtract value and a subgradient tangent at 0: result >= -1e-12, zero at 0
PLConvexFn normalize(const PLConvexFn& f);
std::vector<double> normalize_grid(const Grid& g, const std::vector<double>& u_total);

// (1/V) int of the normalized potential, u = ucan + v
double jt_proxy(const Grid& g, const std::vector<double>& v);

}  // namespace torific
