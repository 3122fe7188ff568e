#pragma once
// Lattice polytopes in dimension 1 and 2 with exact rational moment tables.
// Facets are stored as l_F(x) = <n_F, x> + c_F >= 0 with n_F primitive
// integer; the polytope is reflexive iff every c_F equals 1 (origin is then
// the unique interior lattice point).

#include <optional>
#include <string>
#include <vector>

#include "torific/affine.hpp"
#include "torific/common.hpp"
#include "torific/geometry.hpp"
#include "torific/polynomial.hpp"

namespace torific {

struct Facet {
    std::array<long long, 2> normal{0, 0};
    Rational offset = 0;

    AffineFn fn(int dim) const {
        return AffineFn{dim, to_double(offset),
                        {static_cast<double>(normal[0]), static_cast<double>(normal[1])}};
    }
};

// Region produced by clipping; keeps the exact triangulated geometry but no
// facet presentation (cut loci need not be rational).
struct ClippedRegion {
    Mesh mesh;
    double volume() const { return mesh_volume(mesh); }
    Moments2 moments2() const { return mesh_moments2(mesh); }
    double integrate(const Polynomial& q) const;
};

class LatticePolytope {
  public:
    // Build from a catalog-style document; either field may be omitted and is
    // then derived from the other, both present means both are validated.
    static LatticePolytope from_vertices(std::string name, int dim,
                                         std::vector<RVec> vertices);
    static LatticePolytope from_rays(std::string name, int dim,
                                     std::vector<std::array<long long, 2>> rays);
    static LatticePolytope from_json_text(const std::string& text);

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    const std::vector<RVec>& vertices() const { return vertices_; }
    const std::vector<Facet>& facets() const { return facets_; }
    bool reflexive() const { return reflexive_; }

    // triangulation fans out from the vertex average; index n_vertices()
    // denotes that hub point, and -1 marks the unused slot of 1d segments
    const std::vector<std::array<int, 3>>& triangulation() const { return tri_; }
    const RVec& hub() const { return hub_; }

    Rational volume_rat() const { return moment_rat(0, 0); }
    double volume() const { return volume_; }

    // exact moment table, total degree <= 4
    Rational moment_rat(int ax, int ay) const;
    double moment(int ax, int ay) const { return to_double(moment_rat(ax, ay)); }

    Vec barycenter() const;
    // covariance of the uniform probability measure: m2/V - c c^T
    std::array<double, 3> covariance() const;  // xx, xy, yy

    double integrate_poly(const Polynomial& q) const;

    bool contains(const Vec& x, double tol = 0.0) const;
    // Euclidean distance to the boundary for interior points (min over facets)
    double boundary_distance(const Vec& x) const;
    void bbox(Vec& lo, Vec& hi) const;

    const Mesh& dmesh() const { return dmesh_; }
    const MeshT<Rational>& rmesh() const { return rmesh_; }

    ClippedRegion clip(const AffineFn& a) const;

  private:
    LatticePolytope() = default;
    void finish();  // derive facets/triangulation/moments, validate

    std::string name_;
    int dim_ = 2;
    std::vector<RVec> vertices_;
    std::vector<Facet> facets_;
    bool rays_given_ = false;
    std::vector<std::array<long long, 2>> given_rays_;
    bool reflexive_ = false;
    RVec hub_{};
    std::vector<std::array<int, 3>> tri_;
    MeshT<Rational> rmesh_;
    Mesh dmesh_;
    std::vector<Rational> moments_;  // dense, index ax*5+ay, degree <= 4
    double volume_ = 0.0;
};

// Catalog: the embedded documents, overridable by the TORIFIC_CATALOG
// environment variable pointing at a directory of *.json documents.
std::vector<std::string> catalog_names();
LatticePolytope catalog_load(const std::string& name);
LatticePolytope load_polytope_file(const std::string& path);

}  // namespace torific
