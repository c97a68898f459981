#include "nslab/field.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace nslab {

Grid Grid::make(double extent_R, int n) {
    if (extent_R <= 0.0) throw GridError("grid extent must be positive");
    if (n < 9) throw GridError("grid needs n >= 9 (stencil width)");
    if (n % 2 == 0) throw GridError("grid needs odd n (EvenN)");
    Grid g;
    g.extent = extent_R;
    g.n = n;
    g.h = 2.0 * extent_R / (n - 1);
    g.shift = 0.5 * g.h;
    return g;
}

Grid make_grid(double extent_R, int n) { return Grid::make(extent_R, n); }

bool ScalarField3::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string NormKind::name() const {
    std::ostringstream os;
    switch (tag) {
        case Tag::Cm: os << "C" << m; break;
        case Tag::Hm: os << "H" << m; break;
        case Tag::DecayEnvelope: os << "decay" << order; break;
    }
    return os.str();
}

ScalarField3 sample(const Grid& g, const std::function<double(const Vec3&)>& f) {
    ScalarField3 out(g);
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i)
                out.at(i, j, k) = f(g.point(i, j, k));
    return out;
}

VectorField3 sample_vector(const Grid& g,
                           const std::function<Vec3(const Vec3&)>& f) {
    VectorField3 out(g);
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                Vec3 v = f(g.point(i, j, k));
                out.comp[0].at(i, j, k) = v[0];
                out.comp[1].at(i, j, k) = v[1];
                out.comp[2].at(i, j, k) = v[2];
            }
    return out;
}

namespace {

// One derivative of order `ord` (1 or 2) along `axis`, 2nd-order accurate.
ScalarField3 axis_derivative(const ScalarField3& f, int axis, int ord) {
    const Grid& g = f.grid;
    const int n = g.n;
    const double h = g.h;
    ScalarField3 out(g);
    out.boundary_layer = std::min(n / 2, f.boundary_layer + 2);

    const std::ptrdiff_t stride =
        axis == 0 ? 1
                  : (axis == 1 ? static_cast<std::ptrdiff_t>(n)
                               : static_cast<std::ptrdiff_t>(n) * n);

    auto line = [&](std::size_t base) {
        const double* in = f.values.data();
        double* o = out.values.data();
        for (int q = 0; q < n; ++q) {
            const std::size_t idx = base + q * stride;
            double val;
            if (ord == 1) {
                if (q == 0)
                    val = (-3.0 * in[idx] + 4.0 * in[idx + stride] -
                           in[idx + 2 * stride]) /
                          (2.0 * h);
                else if (q == n - 1)
                    val = (3.0 * in[idx] - 4.0 * in[idx - stride] +
                           in[idx - 2 * stride]) /
                          (2.0 * h);
                else
                    val = (in[idx + stride] - in[idx - stride]) / (2.0 * h);
            } else {
                if (q == 0)
                    val = (2.0 * in[idx] - 5.0 * in[idx + stride] +
                           4.0 * in[idx + 2 * stride] - in[idx + 3 * stride]) /
                          (h * h);
                else if (q == n - 1)
                    val = (2.0 * in[idx] - 5.0 * in[idx - stride] +
                           4.0 * in[idx - 2 * stride] - in[idx - 3 * stride]) /
                          (h * h);
                else
                    val = (in[idx + stride] - 2.0 * in[idx] + in[idx - stride]) /
                          (h * h);
            }
            o[idx] = val;
        }
    };

    // iterate over all lines perpendicular to `axis`
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            std::size_t base;
            if (axis == 0)
                base = g.index(0, a, b);
            else if (axis == 1)
                base = g.index(a, 0, b);
            else
                base = g.index(a, b, 0);
            line(base);
        }
    return out;
}

}  // namespace

ScalarField3 fd_derivative(const ScalarField3& f, const MultiIndex& gamma) {
    if (order(gamma) > 4) throw GridError("fd_derivative supports |gamma| <= 4");
    ScalarField3 cur = f;
    for (int axis = 0; axis < 3; ++axis) {
        int p = gamma[axis];
        while (p >= 2) {
            cur = axis_derivative(cur, axis, 2);
            p -= 2;
        }
        if (p == 1) cur = axis_derivative(cur, axis, 1);
    }
    return cur;
}

namespace {

std::vector<MultiIndex> multi_indices_up_to(int m) {
    std::vector<MultiIndex> out;
    for (int a = 0; a <= m; ++a)
        for (int b = 0; a + b <= m; ++b)
            for (int c = 0; a + b + c <= m; ++c)
                out.push_back({a, b, c});
    return out;
}

struct NodeFilter {
    const Grid& g;
    int layer;
    double r_excl;
    bool keep(int i, int j, int k) const {
        if (layer > 0) {
            if (i < layer || j < layer || k < layer) return false;
            if (i >= g.n - layer || j >= g.n - layer || k >= g.n - layer)
                return false;
        }
        if (r_excl > 0.0) {
            Vec3 p = g.point(i, j, k);
            if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] < r_excl * r_excl)
                return false;
        }
        return true;
    }
};

double trap_weight_1d(const Grid& g, int i) {
    return (i == 0 || i == g.n - 1) ? 0.5 * g.h : g.h;
}

}  // namespace

double discrete_norm(const ScalarField3& f, const NormKind& kind,
                     const NormOptions& opt) {
    const Grid& g = f.grid;
    if (kind.tag == NormKind::Tag::DecayEnvelope) {
        NodeFilter filt{g, opt.exclude_boundary_layer ? f.boundary_layer : 0,
                        opt.exclude_origin_radius};
        double best = 0.0;
        for (int k = 0; k < g.n; ++k)
            for (int j = 0; j < g.n; ++j)
                for (int i = 0; i < g.n; ++i) {
                    if (!filt.keep(i, j, k)) continue;
                    Vec3 p = g.point(i, j, k);
                    double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                    if (r2 < 1.0) continue;
                    double w = 1.0 + std::pow(std::sqrt(r2), kind.order);
                    best = std::max(best, std::abs(f.at(i, j, k)) * w);
                }
        return best;
    }

    const auto gammas = multi_indices_up_to(kind.m);
    double cmax = 0.0, hsum = 0.0;
    for (const auto& gamma : gammas) {
        ScalarField3 d = order(gamma) == 0 ? f : fd_derivative(f, gamma);
        NodeFilter filt{g, opt.exclude_boundary_layer ? d.boundary_layer : 0,
                        opt.exclude_origin_radius};
        for (int k = 0; k < g.n; ++k)
            for (int j = 0; j < g.n; ++j)
                for (int i = 0; i < g.n; ++i) {
                    if (!filt.keep(i, j, k)) continue;
                    double v = d.at(i, j, k);
                    if (kind.tag == NormKind::Tag::Cm)
                        cmax = std::max(cmax, std::abs(v));
                    else
                        hsum += v * v * trap_weight_1d(g, i) *
                                trap_weight_1d(g, j) * trap_weight_1d(g, k);
                }
    }
    return kind.tag == NormKind::Tag::Cm ? cmax : std::sqrt(hsum);
}

double discrete_norm(const VectorField3& f, const NormKind& kind,
                     const NormOptions& opt) {
    if (kind.tag == NormKind::Tag::Hm) {
        double s = 0.0;
        for (const auto& c : f.comp) {
            double v = discrete_norm(c, kind, opt);
            s += v * v;
        }
        return std::sqrt(s);
    }
    double best = 0.0;
    for (const auto& c : f.comp)
        best = std::max(best, discrete_norm(c, kind, opt));
    return best;
}

double hm_cm_norm(const VectorField3& f, int m, const NormOptions& opt) {
    return std::max(discrete_norm(f, NormKind::hm(m), opt),
                    discrete_norm(f, NormKind::cm(m), opt));
}

VectorField3 curl(const VectorField3& v) {
    VectorField3 out(v.grid);
    auto d = [&](int c, int axis) {
        MultiIndex g{0, 0, 0};
        g[axis] = 1;
        return fd_derivative(v.comp[c], g);
    };
    out.comp[0] = axpy(-1.0, d(1, 2), d(2, 1));  // v3,2 - v2,3
    out.comp[1] = axpy(-1.0, d(2, 0), d(0, 2));  // v1,3 - v3,1
    out.comp[2] = axpy(-1.0, d(0, 1), d(1, 0));  // v2,1 - v1,2
    return out;
}

ScalarField3 divergence(const VectorField3& v) {
    ScalarField3 out(v.grid);
    for (int axis = 0; axis < 3; ++axis) {
        MultiIndex g{0, 0, 0};
        g[axis] = 1;
        ScalarField3 d = fd_derivative(v.comp[axis], g);
        out.boundary_layer = std::max(out.boundary_layer, d.boundary_layer);
        for (std::size_t q = 0; q < out.values.size(); ++q)
            out.values[q] += d.values[q];
    }
    return out;
}

ScalarField3 axpy(double a, const ScalarField3& x, const ScalarField3& y) {
    if (x.grid != y.grid) throw GridError("axpy: grid mismatch");
    ScalarField3 out(x.grid);
    out.boundary_layer = std::max(x.boundary_layer, y.boundary_layer);
    for (std::size_t q = 0; q < out.values.size(); ++q)
        out.values[q] = a * x.values[q] + y.values[q];
    return out;
}

VectorField3 axpy(double a, const VectorField3& x, const VectorField3& y) {
    VectorField3 out(x.grid);
    for (int c = 0; c < 3; ++c) out.comp[c] = axpy(a, x.comp[c], y.comp[c]);
    return out;
}

void scale(ScalarField3& f, double a) {
    for (double& v : f.values) v *= a;
}

void scale(VectorField3& f, double a) {
    for (auto& c : f.comp) scale(c, a);
}

void write_snapshot(const std::string& path, const VectorField3& f,
                    double time, double nu) {
    std::ofstream raw(path, std::ios::binary);
    if (!raw) throw GridError("cannot open snapshot file " + path);
    for (const auto& c : f.comp)
        raw.write(reinterpret_cast<const char*>(c.values.data()),
                  static_cast<std::streamsize>(c.values.size() * sizeof(double)));

    std::ofstream hdr(path + ".hdr");
    hdr << "format nslab-field-1 float64-le x-fastest\n"
        << "R " << f.grid.extent << "\n"
        << "n " << f.grid.n << "\n"
        << "shift " << f.grid.shift << "\n"
        << "components v1 v2 v3\n"
        << "time " << time << "\n"
        << "nu " << nu << "\n";
}

VectorField3 read_snapshot(const std::string& path) {
    std::ifstream hdr(path + ".hdr");
    if (!hdr) throw GridError("missing snapshot sidecar for " + path);
    double R = 0.0;
    int n = 0;
    std::string line;
    while (std::getline(hdr, line)) {
        std::istringstream is(line);
        std::string key;
        is >> key;
        if (key == "R") is >> R;
        if (key == "n") is >> n;
    }
    VectorField3 out(Grid::make(R, n));
    std::ifstream raw(path, std::ios::binary);
    if (!raw) throw GridError("cannot open snapshot file " + path);
    for (auto& c : out.comp)
        raw.read(reinterpret_cast<char*>(c.values.data()),
                 static_cast<std::streamsize>(c.values.size() * sizeof(double)));
    return out;
}

}  // namespace nslab
