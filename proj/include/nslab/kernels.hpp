#pragma once

#include <array>
#include <utility>

#include "nslab/grid.hpp"

namespace nslab {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Heat Gaussian G_nu(t,x) = (4 pi nu t)^{-3/2} exp(-|x|^2/(4 nu t)) together
/// with a spatial derivative multi-index |gamma| <= 2.
struct HeatKernelSpec {
    double nu = 1.0;
    double t = 1.0;
    MultiIndex gamma{0, 0, 0};
};

/// Polynomial factor turning G into D^gamma G: degree |gamma| in x,
/// parameterized by nu*t.
struct HermiteFactor {
    MultiIndex gamma{0, 0, 0};
    double evaluate(double nu_t, const Vec3& x) const;
};

double gauss_eval(const HeatKernelSpec& spec, const Vec3& x);

/// The two values (D_i G)(x) and (D_i G)(x^{i,-}) with coordinate i flipped;
/// their sum vanishes by antisymmetry.
std::pair<double, double> gauss_antisymmetry_pair(const HeatKernelSpec& spec,
                                                  int axis, const Vec3& x);

/// Pointwise bound C_{|gamma|} / (nu^delta t^delta r^{3+|gamma|-2 delta}),
/// delta in (0,1). C_0, C_1 are cached 1-D maximizations.
double gauss_derivative_bound(const MultiIndex& gamma, double delta, double nu,
                              double t, double r);

/// Velocity kernel of the Biot-Savart law: (x cross h) / (4 pi |x|^3).
Vec3 biot_savart_apply(const Vec3& x, const Vec3& h);

/// Fundamental solution of the Laplacian with the convention Delta K = delta,
/// so K(x) = -1/(4 pi |x|).
double newtonian_potential(const Vec3& x);
Vec3 newtonian_gradient(const Vec3& x);
Mat3 newtonian_hessian(const Vec3& x);

}  // namespace nslab
