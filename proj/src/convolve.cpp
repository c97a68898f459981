#include "nslab/convolve.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nslab/kernels.hpp"

namespace nslab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------- 1-D tables

struct AxisTables {
    // offset d in [-(n-1), n-1] stored at index d + (n-1)
    std::vector<double> plain;  // normalized to unit discrete mass
    std::vector<double> deriv;  // same normalization factor as plain
    double raw_mass = 0.0;      // pre-normalization discrete mass
};

AxisTables make_axis_tables(const Grid& g, double nu, double t, bool want_deriv) {
    const int n = g.n;
    const double h = g.h;
    const double nut = nu * t;
    AxisTables tab;
    tab.plain.resize(2 * n - 1);
    if (want_deriv) tab.deriv.resize(2 * n - 1);
    double mass = 0.0;
    for (int d = -(n - 1); d <= n - 1; ++d) {
        const double x = d * h;
        const double g1 =
            std::pow(4.0 * kPi * nut, -0.5) * std::exp(-x * x / (4.0 * nut));
        tab.plain[d + n - 1] = g1 * h;
        mass += g1 * h;
        if (want_deriv) tab.deriv[d + n - 1] = (-x / (2.0 * nut)) * g1 * h;
    }
    tab.raw_mass = mass;
    for (double& v : tab.plain) v /= mass;
    for (double& v : tab.deriv) v /= mass;
    return tab;
}

// one separable pass: out(i) = sum_d f(i - d) tau(d) along `axis`
ScalarField3 axis_convolve(const ScalarField3& f, int axis,
                           const std::vector<double>& tau) {
    const Grid& g = f.grid;
    const int n = g.n;
    ScalarField3 out(g);
    out.boundary_layer = f.boundary_layer;
    const std::ptrdiff_t stride =
        axis == 0 ? 1
                  : (axis == 1 ? static_cast<std::ptrdiff_t>(n)
                               : static_cast<std::ptrdiff_t>(n) * n);
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            std::size_t base;
            if (axis == 0)
                base = g.index(0, a, b);
            else if (axis == 1)
                base = g.index(a, 0, b);
            else
                base = g.index(a, b, 0);
            const double* in = f.values.data() + base;
            double* o = out.values.data() + base;
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                // source index ip = i - d, d in [-(n-1), n-1] -> ip in [0, n)
                for (int ip = 0; ip < n; ++ip)
                    acc += in[ip * stride] * tau[i - ip + n - 1];
                o[i * stride] = acc;
            }
        }
    return out;
}

void check_kernel_support(const Grid& g, double nu, double t, double raw_mass,
                          ConvStatus* status) {
    if (!status) return;
    status->tail_mass = 1.0 - raw_mass;
    if (std::abs(status->tail_mass) > 1e-4)
        status->warnings.push_back("KernelOverflowsDomain: discrete kernel mass "
                                   "deviates from 1 by more than 1e-4");
    if (6.0 * std::sqrt(nu * t) > 0.5 * g.extent) {
        std::ostringstream os;
        os << "kernel support 6 sqrt(nu t) = " << 6.0 * std::sqrt(nu * t)
           << " exceeds R/2 = " << 0.5 * g.extent;
        status->warnings.push_back(os.str());
    }
}

}  // namespace

ScalarField3 conv_spatial(const ScalarField3& f, double nu, double t,
                          const MultiIndex& gamma, ConvPath path,
                          ConvStatus* status) {
    if (nu <= 0.0 || t <= 0.0)
        throw std::invalid_argument("conv_spatial needs nu > 0 and t > 0");
    if (order(gamma) > 1)
        throw std::invalid_argument("conv_spatial supports |gamma| <= 1");
    const Grid& g = f.grid;
    const int n = g.n;

    if (path == ConvPath::FastSeparable) {
        ScalarField3 cur = f;
        double raw = 1.0;
        for (int axis = 0; axis < 3; ++axis) {
            AxisTables tab = make_axis_tables(g, nu, t, gamma[axis] == 1);
            raw *= tab.raw_mass;
            cur = axis_convolve(cur, axis,
                                gamma[axis] == 1 ? tab.deriv : tab.plain);
        }
        check_kernel_support(g, nu, t, raw, status);
        return cur;
    }

    // DirectQuadrature: full 3-D offset table, closed-form kernel values,
    // normalized by the product of the 1-D axis masses so the two paths share
    // the exact same normalization.
    double raw = 1.0;
    for (int axis = 0; axis < 3; ++axis)
        raw *= make_axis_tables(g, nu, t, false).raw_mass;
    check_kernel_support(g, nu, t, raw, status);

    const double h = g.h, h3 = h * h * h;
    const int w = 2 * n - 1;
    std::vector<double> table(static_cast<std::size_t>(w) * w * w);
    HeatKernelSpec spec{nu, t, gamma};
    for (int dz = -(n - 1); dz <= n - 1; ++dz)
        for (int dy = -(n - 1); dy <= n - 1; ++dy)
            for (int dx = -(n - 1); dx <= n - 1; ++dx) {
                Vec3 x{dx * h, dy * h, dz * h};
                table[static_cast<std::size_t>(dx + n - 1) +
                      static_cast<std::size_t>(w) *
                          ((dy + n - 1) + static_cast<std::size_t>(w) * (dz + n - 1))] =
                    gauss_eval(spec, x) * h3 / raw;
            }

    ScalarField3 out(g);
    out.boundary_layer = f.boundary_layer;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int kp = 0; kp < n; ++kp)
                    for (int jp = 0; jp < n; ++jp)
                        for (int ip = 0; ip < n; ++ip)
                            acc += f.at(ip, jp, kp) *
                                   table[static_cast<std::size_t>(i - ip + n - 1) +
                                         static_cast<std::size_t>(w) *
                                             ((j - jp + n - 1) +
                                              static_cast<std::size_t>(w) *
                                                  (k - kp + n - 1))];
                out.at(i, j, k) = acc;
            }
    return out;
}

VectorField3 conv_spatial(const VectorField3& f, double nu, double t,
                          const MultiIndex& gamma, ConvPath path,
                          ConvStatus* status) {
    VectorField3 out(f.grid);
    for (int c = 0; c < 3; ++c)
        out.comp[c] = conv_spatial(f.comp[c], nu, t, gamma, path,
                                   c == 0 ? status : nullptr);
    return out;
}

// ------------------------------------------------------------------ TimeSlab

TimeSlab TimeSlab::uniform(const Grid& g, double t0, double t1, int n_t) {
    if (t1 <= t0 || t0 < 0.0) throw std::invalid_argument("TimeSlab: need t1 > t0 >= 0");
    if (n_t < 2) throw std::invalid_argument("TimeSlab: need n_t >= 2");
    TimeSlab s;
    s.t0 = t0;
    s.t1 = t1;
    const double dt = (t1 - t0) / n_t;
    for (int q = 0; q <= n_t; ++q) {
        s.times.push_back(t0 + q * dt);
        s.slices.emplace_back(g);
    }
    return s;
}

double TimeSlab::dt() const {
    if (times.size() < 2) throw std::invalid_argument("TimeSlab: too few slices");
    return times[1] - times[0];
}

int TimeSlab::slice_at(double t) const {
    for (std::size_t q = 0; q < times.size(); ++q)
        if (std::abs(times[q] - t) < 1e-12) return static_cast<int>(q);
    throw std::invalid_argument("TimeSlab: t is not a slice time");
}

VectorField3 conv_spacetime(const TimeSlab& slab, double nu, double t_eval,
                            const MultiIndex& gamma, ConvPath path) {
    const int m = slab.slice_at(t_eval);
    if (m < 1)
        throw std::invalid_argument("conv_spacetime: t_eval must exceed t0");
    const double ds = slab.dt();
    const Grid& g = slab.slices[0].grid;
    VectorField3 acc(g);

    auto add_scaled = [&](const VectorField3& f, double w) {
        for (int c = 0; c < 3; ++c)
            for (std::size_t q = 0; q < acc.comp[c].values.size(); ++q)
                acc.comp[c].values[q] += w * f.comp[c].values[q];
    };

    if (order(gamma) == 0) {
        for (int q = 0; q <= m; ++q) {
            const double w = ds * ((q == 0 || q == m) ? 0.5 : 1.0);
            if (q == m) {
                // s -> t_eval limit of the mass-1 kernel is the identity
                add_scaled(slab.slices[q], w);
            } else {
                add_scaled(conv_spatial(slab.slices[q], nu,
                                        t_eval - slab.times[q], gamma, path),
                           w);
            }
        }
        return acc;
    }

    // |gamma| = 1: integrand ~ (t-s)^{-1/2}; trapezoid up to s_{m-1}, then the
    // last subinterval uses the analytic integral of the (t-s)^{-1/2} model
    // anchored at F(s_{m-1}):  int = 2 ds F(s_{m-1}).
    VectorField3 f_last(g);
    for (int q = 0; q <= m - 1; ++q) {
        VectorField3 fq = conv_spatial(slab.slices[q], nu,
                                       t_eval - slab.times[q], gamma, path);
        if (m >= 2) {
            const double w = ds * ((q == 0 || q == m - 1) ? 0.5 : 1.0);
            add_scaled(fq, w);
        }
        if (q == m - 1) f_last = fq;
    }
    add_scaled(f_last, 2.0 * ds);
    return acc;
}

// ------------------------------------------------------- FFT linear convolve

namespace {

std::vector<std::complex<double>> fft_forward(std::vector<double>& in, int L) {
    const std::size_t nc =
        static_cast<std::size_t>(L) * L * (L / 2 + 1);
    std::vector<std::complex<double>> out(nc);
    fftw_plan plan = fftw_plan_dft_r2c_3d(
        L, L, L, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
        FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

std::vector<double> fft_backward(std::vector<std::complex<double>>& in, int L) {
    std::vector<double> out(static_cast<std::size_t>(L) * L * L);
    fftw_plan plan = fftw_plan_dft_c2r_3d(
        L, L, L, reinterpret_cast<fftw_complex*>(in.data()), out.data(),
        FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double scale = 1.0 / (static_cast<double>(L) * L * L);
    for (double& v : out) v *= scale;
    return out;
}

std::size_t pad_index(int i, int j, int k, int L) {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(L) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(L) * k);
}

// kernel table over offsets (-n, n) per axis, wrapped into an L^3 array
std::vector<double> padded_kernel(const Grid& g,
                                  const std::function<double(const Vec3&)>& ker,
                                  double self_weight) {
    const int n = g.n, L = 2 * n;
    const double h = g.h, h3 = h * h * h;
    std::vector<double> K(static_cast<std::size_t>(L) * L * L, 0.0);
    for (int dz = -(n - 1); dz <= n - 1; ++dz)
        for (int dy = -(n - 1); dy <= n - 1; ++dy)
            for (int dx = -(n - 1); dx <= n - 1; ++dx) {
                double val;
                if (dx == 0 && dy == 0 && dz == 0)
                    val = self_weight;
                else
                    val = ker({dx * h, dy * h, dz * h}) * h3;
                K[pad_index((dx + L) % L, (dy + L) % L, (dz + L) % L, L)] = val;
            }
    return K;
}

std::vector<std::complex<double>> forward_field(const ScalarField3& f, int L) {
    const int n = f.grid.n;
    std::vector<double> a(static_cast<std::size_t>(L) * L * L, 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                a[pad_index(i, j, k, L)] = f.at(i, j, k);
    return fft_forward(a, L);
}

ScalarField3 backward_crop(std::vector<std::complex<double>>& spec,
                           const Grid& g, int L) {
    std::vector<double> full = fft_backward(spec, L);
    ScalarField3 out(g);
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i)
                out.at(i, j, k) = full[pad_index(i, j, k, L)];
    return out;
}

}  // namespace

ScalarField3 conv_kernel_table_fft(
    const ScalarField3& f, const std::function<double(const Vec3&)>& kernel,
    double self_weight) {
    const Grid& g = f.grid;
    const int L = 2 * g.n;
    auto fa = forward_field(f, L);
    std::vector<double> K = padded_kernel(g, kernel, self_weight);
    auto ka = fft_forward(K, L);
    for (std::size_t q = 0; q < fa.size(); ++q) fa[q] *= ka[q];
    return backward_crop(fa, g, L);
}

namespace {

ScalarField3 leray_source(const VectorField3& v) {
    std::array<std::array<ScalarField3, 3>, 3> dv;
    for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j) {
            MultiIndex gamma{0, 0, 0};
            gamma[j] = 1;
            dv[m][j] = fd_derivative(v.comp[m], gamma);
        }
    ScalarField3 s(v.grid);
    s.boundary_layer = dv[0][0].boundary_layer;
    for (std::size_t q = 0; q < s.values.size(); ++q) {
        double acc = 0.0;
        for (int m = 0; m < 3; ++m)
            for (int j = 0; j < 3; ++j)
                acc += dv[m][j].values[q] * dv[j][m].values[q];
        s.values[q] = acc;
    }
    return s;
}

// ---------------------------------------------- grad-K quadrature weights
//
// Near the singularity the midpoint value of grad K = z/(4 pi |z|^3) is a
// poor cell representative; exact cell averages over the closest offsets
// restore a clean O(h^2) quadrature. grad K is (-2)-homogeneous, so the
// average over a unit cell at integer offset d gives the weight h * I(d)
// at spacing h. The self cell is 0 (odd kernel over a symmetric cell).
constexpr int kNearField = 3;

std::array<double, 3> near_cell_integral(int dx, int dy, int dz) {
    if (dx == 0 && dy == 0 && dz == 0) return {0.0, 0.0, 0.0};
    // composite 2-point Gauss-Legendre on a 12^3 subdivision of the cell
    constexpr int kSub = 12;
    constexpr double kNode = 0.28867513459481287;  // 1 / (2 sqrt 3)
    const double w = 1.0 / kSub;
    const double pw = w * w * w / 8.0;  // weight per Gauss point
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (int a = 0; a < kSub; ++a)
        for (int b = 0; b < kSub; ++b)
            for (int c = 0; c < kSub; ++c) {
                const double cx = dx - 0.5 + (a + 0.5) * w;
                const double cy = dy - 0.5 + (b + 0.5) * w;
                const double cz = dz - 0.5 + (c + 0.5) * w;
                for (int sa = -1; sa <= 1; sa += 2)
                    for (int sb = -1; sb <= 1; sb += 2)
                        for (int sc = -1; sc <= 1; sc += 2) {
                            const Vec3 u{cx + sa * kNode * w,
                                         cy + sb * kNode * w,
                                         cz + sc * kNode * w};
                            const Vec3 gk = newtonian_gradient(u);
                            for (int i = 0; i < 3; ++i) acc[i] += pw * gk[i];
                        }
            }
    return acc;
}

const std::array<double, 3>& grad_k_near(int dx, int dy, int dz) {
    constexpr int kW = 2 * kNearField + 1;
    static const std::vector<std::array<double, 3>> table = [] {
        std::vector<std::array<double, 3>> t(kW * kW * kW);
        for (int dz2 = -kNearField; dz2 <= kNearField; ++dz2)
            for (int dy2 = -kNearField; dy2 <= kNearField; ++dy2)
                for (int dx2 = -kNearField; dx2 <= kNearField; ++dx2)
                    t[((dz2 + kNearField) * kW + (dy2 + kNearField)) * kW +
                      (dx2 + kNearField)] = near_cell_integral(dx2, dy2, dz2);
        return t;
    }();
    return table[((dz + kNearField) * kW + (dy + kNearField)) * kW +
                 (dx + kNearField)];
}

// quadrature weight of the grad-K sum at offset (dx, dy, dz), component i
double grad_k_weight(int i, int dx, int dy, int dz, double h) {
    if (std::abs(dx) <= kNearField && std::abs(dy) <= kNearField &&
        std::abs(dz) <= kNearField)
        return grad_k_near(dx, dy, dz)[i] * h;
    return newtonian_gradient({dx * h, dy * h, dz * h})[i] * h * h * h;
}

// cached spectra of the three grad-K tables, keyed by (n, extent)
struct GradKCache {
    int n = -1;
    double extent = 0.0;
    std::array<std::vector<std::complex<double>>, 3> khat;
};

const GradKCache& grad_k_cache(const Grid& g) {
    static std::map<std::pair<int, double>, GradKCache> cache;
    auto key = std::make_pair(g.n, g.extent);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    GradKCache entry;
    entry.n = g.n;
    entry.extent = g.extent;
    const int n = g.n, L = 2 * g.n;
    for (int i = 0; i < 3; ++i) {
        std::vector<double> K(static_cast<std::size_t>(L) * L * L, 0.0);
        for (int dz = -(n - 1); dz <= n - 1; ++dz)
            for (int dy = -(n - 1); dy <= n - 1; ++dy)
                for (int dx = -(n - 1); dx <= n - 1; ++dx)
                    K[pad_index((dx + L) % L, (dy + L) % L, (dz + L) % L, L)] =
                        grad_k_weight(i, dx, dy, dz, g.h);
        entry.khat[i] = fft_forward(K, L);
    }
    return cache.emplace(key, std::move(entry)).first->second;
}

}  // namespace

VectorField3 leray_term(const VectorField3& v) {
    const Grid& g = v.grid;
    ScalarField3 s = leray_source(v);
    const int L = 2 * g.n;
    auto sa = forward_field(s, L);
    const GradKCache& kc = grad_k_cache(g);
    VectorField3 out(g);
    for (int i = 0; i < 3; ++i) {
        auto spec = sa;
        for (std::size_t q = 0; q < spec.size(); ++q) spec[q] *= kc.khat[i][q];
        out.comp[i] = backward_crop(spec, g, L);
        out.comp[i].boundary_layer = s.boundary_layer;
    }
    return out;
}

VectorField3 leray_term_direct(const VectorField3& v) {
    const Grid& g = v.grid;
    const int n = g.n;
    const double h = g.h;
    ScalarField3 s = leray_source(v);
    VectorField3 out(g);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                Vec3 acc{0.0, 0.0, 0.0};
                for (int kp = 0; kp < n; ++kp)
                    for (int jp = 0; jp < n; ++jp)
                        for (int ip = 0; ip < n; ++ip) {
                            if (ip == i && jp == j && kp == k) continue;
                            const double sv = s.at(ip, jp, kp);
                            for (int c = 0; c < 3; ++c)
                                acc[c] += grad_k_weight(c, i - ip, j - jp,
                                                        k - kp, h) * sv;
                        }
                for (int c = 0; c < 3; ++c) out.comp[c].at(i, j, k) = acc[c];
            }
    for (int c = 0; c < 3; ++c) out.comp[c].boundary_layer = s.boundary_layer;
    return out;
}

ScalarField3 poisson_solve_fd(const ScalarField3& rho) {
    const Grid& g = rho.grid;
    const int L = g.n;  // unpadded: the solve is periodic on the grid itself
    const double h = g.h;
    auto ra = forward_field(rho, L);
    const int nx = L / 2 + 1;
    for (int k = 0; k < L; ++k)
        for (int j = 0; j < L; ++j)
            for (int i = 0; i < nx; ++i) {
                const double sx = std::sin(2.0 * kPi * i / L);
                const double sy = std::sin(2.0 * kPi * j / L);
                const double sz = std::sin(2.0 * kPi * k / L);
                const double lam = -(sx * sx + sy * sy + sz * sz) / (h * h);
                auto& c = ra[static_cast<std::size_t>(i) +
                             static_cast<std::size_t>(nx) *
                                 (static_cast<std::size_t>(j) +
                                  static_cast<std::size_t>(L) * k)];
                if (std::abs(lam) < 1e-12)
                    c = 0.0;  // null modes of the wide Laplacian
                else
                    c /= lam;
            }
    ScalarField3 phi = backward_crop(ra, g, L);
    phi.boundary_layer = rho.boundary_layer;
    return phi;
}

VectorField3 leray_project(const VectorField3& w) {
    // One-shot spectral projector: for each mode apply
    //   P_jm = delta_jm - s_j s_m / |s|^2,  s_j = sin(2 pi k_j / n) / h,
    // the exact symbol of the centered-difference div/grad pair on the
    // (odd-n) grid treated periodically. Each per-mode matrix is an exact
    // algebraic projector, so P^2 = P holds to FFT roundoff; with n odd the
    // only null mode is k = 0, where the field is left untouched.
    const Grid& g = w.grid;
    const int L = g.n;
    const double h = g.h;
    const int nx = L / 2 + 1;
    std::array<std::vector<std::complex<double>>, 3> wa;
    for (int c = 0; c < 3; ++c) wa[c] = forward_field(w.comp[c], L);
    for (int k = 0; k < L; ++k)
        for (int j = 0; j < L; ++j)
            for (int i = 0; i < nx; ++i) {
                const double s0 = std::sin(2.0 * kPi * i / L) / h;
                const double s1 = std::sin(2.0 * kPi * j / L) / h;
                const double s2 = std::sin(2.0 * kPi * k / L) / h;
                const double s2n = s0 * s0 + s1 * s1 + s2 * s2;
                if (s2n < 1e-300) continue;
                const std::size_t q =
                    static_cast<std::size_t>(i) +
                    static_cast<std::size_t>(nx) *
                        (static_cast<std::size_t>(j) +
                         static_cast<std::size_t>(L) * k);
                const std::complex<double> dot =
                    (s0 * wa[0][q] + s1 * wa[1][q] + s2 * wa[2][q]) / s2n;
                wa[0][q] -= s0 * dot;
                wa[1][q] -= s1 * dot;
                wa[2][q] -= s2 * dot;
            }
    VectorField3 out(g);
    for (int c = 0; c < 3; ++c) {
        out.comp[c] = backward_crop(wa[c], g, L);
        out.comp[c].boundary_layer = w.comp[c].boundary_layer;
    }
    return out;
}

double second_moment(double nu, double t, int axis) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("second_moment: bad axis");
    if (nu <= 0.0 || t <= 0.0)
        throw std::invalid_argument("second_moment: need nu > 0 and t > 0");

    // inner half-space integral at elapsed time sigma (the two transverse axes
    // integrate to 1 by the mass of the 1-D Gaussian)
    auto inner = [&](double sigma) {
        const double nus = nu * sigma;
        const double ymax = 12.0 * std::sqrt(nus);
        const int m = 2000;  // composite Simpson, even count
        const double dy = ymax / m;
        double acc = 0.0;
        for (int q = 0; q <= m; ++q) {
            const double y = q * dy;
            const double f = (y * y / nus) * std::pow(4.0 * kPi * nus, -0.5) *
                             std::exp(-y * y / (4.0 * nus));
            const double w = (q == 0 || q == m) ? 1.0 : (q % 2 ? 4.0 : 2.0);
            acc += w * f;
        }
        return acc * dy / 3.0;
    };

    const double a = 1e-8 * t;
    const int m = 200;  // Simpson in sigma over [a, t]
    const double ds = (t - a) / m;
    double acc = 0.0;
    for (int q = 0; q <= m; ++q) {
        const double s = a + q * ds;
        const double w = (q == 0 || q == m) ? 1.0 : (q % 2 ? 4.0 : 2.0);
        acc += w * inner(s);
    }
    double integral = acc * ds / 3.0;
    integral += a * inner(a);  // sliver [0, a]; integrand -> 1 as sigma -> 0
    return integral;
}

}  // namespace nslab
