#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nslab/field.hpp"

namespace nslab {

/// Two implementations of the same spatial-convolution contract; the fast one
/// exploits axis-separability of the Gaussian kernel.
enum class ConvPath { DirectQuadrature, FastSeparable };

struct ConvStatus {
    double tail_mass = 0.0;  // kernel mass lost to grid truncation
    std::vector<std::string> warnings;
};

/// (f *_sp D^gamma G_nu)(x) tabulated over relative node offsets, |gamma| <= 1.
/// The gamma=0 table is normalized to unit discrete mass so constants are
/// preserved; derivative tables share the same normalization factor.
ScalarField3 conv_spatial(const ScalarField3& f, double nu, double t,
                          const MultiIndex& gamma, ConvPath path,
                          ConvStatus* status = nullptr);
VectorField3 conv_spatial(const VectorField3& f, double nu, double t,
                          const MultiIndex& gamma, ConvPath path,
                          ConvStatus* status = nullptr);

/// Time-indexed stack of vector fields on a shared grid, uniform in time.
struct TimeSlab {
    double t0 = 0.0, t1 = 0.0;
    std::vector<double> times;
    std::vector<VectorField3> slices;

    static TimeSlab uniform(const Grid& g, double t0, double t1, int n_t);
    double dt() const;
    int slice_at(double t) const;  // exact-match lookup, throws if absent
};

/// Duhamel integral int_{t0}^{t_eval} (slice(s) *_sp D^gamma G_nu(t_eval-s)) ds
/// by composite trapezoid over the slab's own time nodes. Endpoint rules:
/// gamma=0 uses the identity limit at s = t_eval; |gamma|=1 integrates the
/// (t-s)^{-1/2} model analytically over the last subinterval.
VectorField3 conv_spacetime(const TimeSlab& slab, double nu, double t_eval,
                            const MultiIndex& gamma,
                            ConvPath path = ConvPath::FastSeparable);

/// Linear (free-space) convolution of f with a radial-kernel table
/// K(offset)*h^3, evaluated by zero-padded FFT. self_weight replaces the
/// singular offset-zero entry.
ScalarField3 conv_kernel_table_fft(
    const ScalarField3& f, const std::function<double(const Vec3&)>& kernel,
    double self_weight);

/// Pressure-gradient term of the scheme: component i is the quadrature
/// sum_y (d/dx_i K)(x-y) S(y) h^3 with S = sum_{j,m} v_{m,j} v_{j,m} and a
/// zero self-cell (odd kernel over a symmetric cell).
VectorField3 leray_term(const VectorField3& v);
/// Reference triple-loop evaluation of the identical sum (small grids only).
VectorField3 leray_term_direct(const VectorField3& v);

/// Inverse of the composed centered-difference div(grad .) operator (the
/// wide 2h Laplacian, treated periodically on the grid) by FFT symbol
/// division; the k = 0 null mode is dropped.
ScalarField3 poisson_solve_fd(const ScalarField3& rho);

/// w - grad(Delta^{-1} div w) applied per Fourier mode with the exact
/// centered-difference symbols, so the discrete projector is idempotent to
/// roundoff and kills sampled gradients to O(h^2) away from the boundary.
VectorField3 leray_project(const VectorField3& w);

/// M_2 = int_0^t int_{y_i>=0} (4 y_i^2/(4 nu s)) G_nu(s,y) dy ds by quadrature.
double second_moment(double nu, double t, int axis);

}  // namespace nslab
