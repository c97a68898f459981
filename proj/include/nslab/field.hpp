#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "nslab/grid.hpp"

namespace nslab {

/// Scalar samples on a Grid. boundary_layer counts the number of cells at
/// each face where one-sided finite-difference stencils have been used; norms
/// can optionally exclude that layer.
struct ScalarField3 {
    Grid grid;
    std::vector<double> values;
    int boundary_layer = 0;

    ScalarField3() = default;
    explicit ScalarField3(const Grid& g)
        : grid(g), values(g.size(), 0.0) {}

    double& at(int i, int j, int k) { return values[grid.index(i, j, k)]; }
    double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }

    bool all_finite() const;
};

struct VectorField3 {
    Grid grid;
    std::array<ScalarField3, 3> comp;
    VectorField3() = default;
    explicit VectorField3(const Grid& g)
        : grid(g), comp{ScalarField3(g), ScalarField3(g), ScalarField3(g)} {}

    bool all_finite() const {
        return comp[0].all_finite() && comp[1].all_finite() && comp[2].all_finite();
    }
    int boundary_layer() const {
        return std::max(comp[0].boundary_layer,
                        std::max(comp[1].boundary_layer, comp[2].boundary_layer));
    }
};

struct NormKind {
    enum class Tag { Cm, Hm, DecayEnvelope };
    Tag tag = Tag::Cm;
    int m = 0;           // derivative order for Cm/Hm, in {0,1,2,3}
    double order = 0.0;  // decay order q > 0

    static NormKind cm(int m) { return {Tag::Cm, m, 0.0}; }
    static NormKind hm(int m) { return {Tag::Hm, m, 0.0}; }
    static NormKind decay(double q) { return {Tag::DecayEnvelope, 0, q}; }

    std::string name() const;
};

struct NormOptions {
    bool exclude_boundary_layer = false;
    double exclude_origin_radius = 0.0;  // skip nodes with |x| < radius
};

Grid make_grid(double extent_R, int n);

ScalarField3 sample(const Grid& g, const std::function<double(const Vec3&)>& f);
VectorField3 sample_vector(const Grid& g,
                           const std::function<Vec3(const Vec3&)>& f);

/// Centered 2nd-order D^gamma, |gamma| <= 4; one-sided 2nd-order stencils in
/// the boundary layer.
ScalarField3 fd_derivative(const ScalarField3& f, const MultiIndex& gamma);

double discrete_norm(const ScalarField3& f, const NormKind& kind,
                     const NormOptions& opt = {});
double discrete_norm(const VectorField3& f, const NormKind& kind,
                     const NormOptions& opt = {});

/// max(Hm, Cm): the discrete H^m-cap-C^m norm used by the contraction tables.
double hm_cm_norm(const VectorField3& f, int m, const NormOptions& opt = {});

VectorField3 curl(const VectorField3& v);
ScalarField3 divergence(const VectorField3& v);

// linear algebra over fields on a shared grid
ScalarField3 axpy(double a, const ScalarField3& x, const ScalarField3& y);
VectorField3 axpy(double a, const VectorField3& x, const VectorField3& y);
void scale(ScalarField3& f, double a);
void scale(VectorField3& f, double a);

/// Snapshot file: raw little-endian float64 block in x-fastest order plus a
/// plain-text sidecar header (<path>.hdr).
void write_snapshot(const std::string& path, const VectorField3& f,
                    double time, double nu);
VectorField3 read_snapshot(const std::string& path);

}  // namespace nslab
