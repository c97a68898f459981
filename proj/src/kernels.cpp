#include "nslab/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace nslab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kOriginGuard = 1e-14;

double golden_max(double a, double b, const auto& f, double tol) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    while (b - a > tol) {
        if (f(c) > f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    return f(0.5 * (a + b));
}

// sup_{z>0, delta in (0,1)} z^{p - delta} exp(-z^2/4) is approached as
// delta -> 0, so maximize at the boundary exponent p.
double sup_constant(double p) {
    return golden_max(1e-6, 10.0,
                      [p](double z) { return std::pow(z, p) * std::exp(-z * z / 4.0); },
                      1e-10);
}

double cached_c(int order) {
    static const double c0 = sup_constant(1.5);
    static const double c1 = sup_constant(2.5);
    return order == 0 ? c0 : c1;
}

}  // namespace

double HermiteFactor::evaluate(double nu_t, const Vec3& x) const {
    const int m = order(gamma);
    if (m == 0) return 1.0;
    if (m == 1) {
        for (int k = 0; k < 3; ++k)
            if (gamma[k] == 1) return -x[k] / (2.0 * nu_t);
    }
    if (m == 2) {
        for (int k = 0; k < 3; ++k)
            if (gamma[k] == 2)
                return x[k] * x[k] / (4.0 * nu_t * nu_t) - 1.0 / (2.0 * nu_t);
        // mixed e_i + e_j
        int i = -1, j = -1;
        for (int k = 0; k < 3; ++k)
            if (gamma[k] == 1) (i < 0 ? i : j) = k;
        return x[i] * x[j] / (4.0 * nu_t * nu_t);
    }
    throw std::invalid_argument("HermiteFactor supports |gamma| <= 2");
}

double gauss_eval(const HeatKernelSpec& spec, const Vec3& x) {
    if (spec.nu <= 0.0 || spec.t <= 0.0)
        throw std::invalid_argument("gauss_eval needs nu > 0 and t > 0");
    const double nu_t = spec.nu * spec.t;
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    const double base =
        std::pow(4.0 * kPi * nu_t, -1.5) * std::exp(-r2 / (4.0 * nu_t));
    HermiteFactor hf{spec.gamma};
    return hf.evaluate(nu_t, x) * base;
}

std::pair<double, double> gauss_antisymmetry_pair(const HeatKernelSpec& spec,
                                                  int axis, const Vec3& x) {
    HeatKernelSpec s = spec;
    s.gamma = {0, 0, 0};
    s.gamma[axis] = 1;
    Vec3 xm = x;
    xm[axis] = -xm[axis];
    return {gauss_eval(s, x), gauss_eval(s, xm)};
}

double gauss_derivative_bound(const MultiIndex& gamma, double delta, double nu,
                              double t, double r) {
    if (r <= 0.0) throw std::invalid_argument("gauss_derivative_bound needs r > 0");
    if (delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("delta must lie in (0,1)");
    const int m = order(gamma);
    if (m > 1) throw std::invalid_argument("bound constants cached for |gamma| <= 1");
    const double c = cached_c(m);
    return c / (std::pow(nu, delta) * std::pow(t, delta) *
                std::pow(r, 3.0 + m - 2.0 * delta));
}

Vec3 biot_savart_apply(const Vec3& x, const Vec3& h) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (r < kOriginGuard)
        throw std::invalid_argument("biot_savart_apply: x too close to origin");
    const double s = 1.0 / (4.0 * kPi * r * r * r);
    return {s * (x[1] * h[2] - x[2] * h[1]),
            s * (x[2] * h[0] - x[0] * h[2]),
            s * (x[0] * h[1] - x[1] * h[0])};
}

double newtonian_potential(const Vec3& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (r < kOriginGuard)
        throw std::invalid_argument("newtonian_potential: x too close to origin");
    return -1.0 / (4.0 * kPi * r);
}

Vec3 newtonian_gradient(const Vec3& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (r < kOriginGuard)
        throw std::invalid_argument("newtonian_gradient: x too close to origin");
    const double s = 1.0 / (4.0 * kPi * r * r * r);
    return {s * x[0], s * x[1], s * x[2]};
}

Mat3 newtonian_hessian(const Vec3& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (r < kOriginGuard)
        throw std::invalid_argument("newtonian_hessian: x too close to origin");
    const double r3 = r * r * r;
    const double r5 = r3 * r * r;
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = -3.0 * x[i] * x[j] / (4.0 * kPi * r5);
            if (i == j) v += 1.0 / (4.0 * kPi * r3);
            out[i][j] = v;
        }
    return out;
}

}  // namespace nslab
