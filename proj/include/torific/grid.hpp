#pragma once
// Uniform lattice-aligned grid on the interior of a moment polytope.
//
// Nodes sit at x = h * (i, j) with Euclidean boundary distance >= h, so the
// canonical potential and its derivatives stay finite at every node.  All
// derivative stencils are second order: centered where both neighbours exist,
// one-sided inside the boundary collar.  Nodes that cannot support a full set
// of second-order stencils (isolated corner pockets) are dropped and their
// cell area is lumped into the nearest surviving node, which keeps the total
// quadrature weight exactly equal to the polytope volume.

#include <cstdint>
#include <vector>

#include "torific/affine.hpp"
#include "torific/polytope.hpp"

namespace torific {

class Grid {
  public:
    // ops indexing the stencil plans
    enum { kDx = 0, kDy = 1, kDxx = 2, kDyy = 3, kDxy = 4, kOps = 5 };

    Grid(const LatticePolytope& P, double h);

    const LatticePolytope& polytope() const { return P_; }
    int dim() const { return P_.dim(); }
    double h() const { return h_; }
    size_t size() const { return xs_.size(); }
    size_t origin() const { return origin_; }  // node index of x = 0

    const std::vector<Vec>& points() const { return xs_; }
    const std::vector<double>& weights() const { return w_; }
    const std::vector<uint8_t>& collar() const { return collar_; }
    const std::vector<std::array<int32_t, 2>>& lattice_coords() const { return coords_; }

    // canonical potential sum_F l_F log l_F sampled at the nodes, its Hessian,
    // and the positivity envelope prod l^{c_F} e^{sum_F (c_F - l_F)}
    const std::vector<double>& ucan() const { return ucan_; }
    const std::vector<double>& envelope() const { return env_; }
    const std::vector<double>& hcan_xx() const { return hxx_; }
    const std::vector<double>& hcan_xy() const { return hxy_; }
    const std::vector<double>& hcan_yy() const { return hyy_; }

    double quad(const std::vector<double>& f) const;

    // grad (dx, dy) and Hessian (xx, yy, xy) of grid data at node k
    void derivatives(const std::vector<double>& v, size_t k, double out[kOps]) const {
        for (int op = 0; op < kOps; ++op) {
            double acc = 0.0;
            const int32_t b = start_[k * kOps + op], e = start_[k * kOps + op + 1];
            for (int32_t i = b; i < e; ++i) acc += pw_[i] * v[pn_[i]];
            out[op] = acc;
        }
    }

    std::vector<double> sample(const PLConvexFn& f) const;
    std::vector<double> sample(const AffineFn& f) const;

  private:
    LatticePolytope P_;
    double h_ = 0.0;
    std::vector<Vec> xs_;
    std::vector<std::array<int32_t, 2>> coords_;
    std::vector<double> w_;
    std::vector<uint8_t> collar_;
    std::vector<double> ucan_, env_, hxx_, hxy_, hyy_;
    size_t origin_ = 0;

    std::vector<int32_t> start_;  // (size*kOps + 1) prefix offsets into pn_/pw_
    std::vector<int32_t> pn_;
    std::vector<double> pw_;
};

}  // namespace torific
