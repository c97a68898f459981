#include "nslab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "nslab/convolve.hpp"

namespace nslab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// smoothstep ingredient s(u) = exp(-1/u) for u > 0
double s0(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
double s1(double u) { return u > 0.0 ? std::exp(-1.0 / u) / (u * u) : 0.0; }
double s2(double u) {
    return u > 0.0 ? std::exp(-1.0 / u) * (1.0 / (u * u * u * u) - 2.0 / (u * u * u))
                   : 0.0;
}

}  // namespace

double cutoff_phi1(double r) { return cutoff_phi1_deriv(r, 0); }

double cutoff_phi1_deriv(double r, int deriv) {
    if (r <= 1.0) return deriv == 0 ? 1.0 : 0.0;
    if (r >= 2.0) return 0.0;
    const double a = s0(2.0 - r), b = s0(r - 1.0);
    const double ap = -s1(2.0 - r), bp = s1(r - 1.0);
    const double app = s2(2.0 - r), bpp = s2(r - 1.0);
    const double den = a + b;
    switch (deriv) {
        case 0:
            return a / den;
        case 1:
            return (ap * b - a * bp) / (den * den);
        case 2:
            return (app * b - a * bpp) / (den * den) -
                   2.0 * (ap * b - a * bp) * (ap + bp) / (den * den * den);
        default:
            throw std::invalid_argument("cutoff_phi1_deriv: deriv in {0,1,2}");
    }
}

std::vector<std::string> ProfileParams::validate() const {
    std::vector<std::string> warn;
    auto w = [&](const std::string& m) { warn.push_back(m); };
    if (alpha0 <= 0.0 || alpha0 >= 0.5)
        w("alpha0 outside (0, 1/2)");
    if (k == 0) {
        if (beta0 <= 2.0 || beta0 > 2.0 + alpha0)
            w("beta0 outside (2, 2+alpha0] for k=0");
    } else if (k >= 2) {
        if (beta0 <= k + 1.0 || beta0 > k + 1.0 + alpha0) {
            std::ostringstream os;
            os << "beta0 outside (" << k + 1 << ", " << k + 1 << "+alpha0] for k="
               << k;
            w(os.str());
        }
    } else {
        w("kink order k=1 is not an admissible data family member");
    }
    return warn;
}

double RadialProfile::eval(double r, int deriv) const {
    if (deriv < 0 || deriv > 2)
        throw std::invalid_argument("RadialProfile: deriv in {0,1,2}");
    switch (kind) {
        case ProfileKind::Zero:
            return 0.0;
        case ProfileKind::SmoothSurrogate: {
            const double e = std::exp(-r * r);
            if (deriv == 0) return r * r * e;
            if (deriv == 1) return (2.0 * r - 2.0 * r * r * r) * e;
            return (2.0 - 10.0 * r * r + 4.0 * r * r * r * r) * e;
        }
        case ProfileKind::Singular:
            break;
    }
    const double a = params.alpha0, b = params.beta0;
    if (r == 0.0) {
        if (deriv == 0) return 0.0;
        throw std::domain_error("singular profile derivative at r=0");
    }
    if (r >= 2.0) return 0.0;
    const double psi = std::pow(r, -(1.0 + a));
    const double sn = std::sin(psi), cs = std::cos(psi);
    const double u = std::pow(r, b) * sn;
    const double u1 =
        b * std::pow(r, b - 1.0) * sn - (1.0 + a) * std::pow(r, b - 2.0 - a) * cs;
    const double u2 = b * (b - 1.0) * std::pow(r, b - 2.0) * sn -
                      (1.0 + a) * b * std::pow(r, b - 3.0 - a) * cs +
                      (1.0 + a) * (2.0 + a - b) * std::pow(r, b - 3.0 - a) * cs -
                      (1.0 + a) * (1.0 + a) * std::pow(r, b - 4.0 - 2.0 * a) * sn;
    if (r <= 1.0) {
        if (deriv == 0) return u;
        if (deriv == 1) return u1;
        return u2;
    }
    const double p0 = cutoff_phi1_deriv(r, 0);
    const double p1 = cutoff_phi1_deriv(r, 1);
    const double p2 = cutoff_phi1_deriv(r, 2);
    if (deriv == 0) return p0 * u;
    if (deriv == 1) return p1 * u + p0 * u1;
    return p2 * u + 2.0 * p1 * u1 + p0 * u2;
}

VectorField3 build_velocity_data(const DataSpec& spec, const Grid& grid) {
    if (spec.i0 < 0 || spec.i0 > 2)
        throw std::invalid_argument("DataSpec: i0 must be in {0,1,2}");
    VectorField3 out(grid);
    for (int k = 0; k < grid.n; ++k)
        for (int j = 0; j < grid.n; ++j)
            for (int i = 0; i < grid.n; ++i) {
                Vec3 p = grid.point(i, j, k);
                double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
                out.comp[spec.i0].at(i, j, k) = spec.profile.eval(r, 0);
            }
    if (spec.mode == CompletionMode::ProjectedDivFree)
        out = leray_project(out);
    return out;
}

VectorField3 build_vorticity_data(const VectorField3& v_f) { return curl(v_f); }

SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("loglog_fit needs >= 3 matched points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t q = 0; q < x.size(); ++q) {
        lx[q] = std::log(x[q]);
        ly[q] = std::log(y[q]);
        sx += lx[q];
        sy += ly[q];
        sxx += lx[q] * lx[q];
        sxy += lx[q] * ly[q];
    }
    SlopeFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - fit.slope * sx) / n;
    double r2 = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) {
        double e = ly[q] - (icpt + fit.slope * lx[q]);
        r2 += e * e;
    }
    fit.residual = std::sqrt(r2 / n);
    fit.points = static_cast<int>(x.size());
    return fit;
}

SlopeFit singularity_order_probe(const RadialProfile& p, int deriv) {
    if (deriv != 1 && deriv != 2)
        throw std::invalid_argument("singularity_order_probe: deriv in {1,2}");
    const double r_lo = 1e-4, r_hi = 1e-1;
    std::vector<double> radii;

    if (p.kind == ProfileKind::Singular) {
        // Sample at extrema of the dominant oscillatory factor so the fit sees
        // the pure power law: cos extrema (phase = m pi) for g', sin extrema
        // (phase = pi/2 + m pi) for g''.
        const double a = p.params.alpha0;
        const double off = deriv == 1 ? 0.0 : 0.5;
        std::set<long> picked;
        const int targets = 64;
        for (int q = 0; q < targets; ++q) {
            double r = r_lo * std::pow(r_hi / r_lo, q / double(targets - 1));
            double phase = std::pow(r, -(1.0 + a));
            long m = std::lround(phase / kPi - off);
            if (m < 1) m = 1;
            picked.insert(m);
        }
        for (long m : picked) {
            double r = std::pow((double(m) + off) * kPi, -1.0 / (1.0 + a));
            if (r >= r_lo && r <= r_hi) radii.push_back(r);
        }
    } else {
        for (int q = 0; q < 16; ++q)
            radii.push_back(r_lo * std::pow(r_hi / r_lo, q / 15.0));
    }
    if (radii.size() < 8)
        throw std::runtime_error("singularity_order_probe: fewer than 8 sample radii");

    std::vector<double> x, y;
    for (double r : radii) {
        double v = std::abs(p.eval(r, deriv));
        if (v > 0.0) {
            x.push_back(r);
            y.push_back(v);
        }
    }
    if (x.size() < 8)
        throw std::runtime_error("singularity_order_probe: degenerate samples");
    return loglog_fit(x, y);
}

}  // namespace nslab
