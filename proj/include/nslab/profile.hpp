#pragma once

#include <string>
#include <vector>

#include "nslab/field.hpp"

namespace nslab {

/// Parameters of the singular radial profile. Admissible intervals
/// (k = 0: beta0 in (2, 2+alpha0); k >= 2: beta0 in (k+1, k+1+alpha0))
/// are checked with warnings, not failures; the Lipschitz boundary case
/// beta0 = k+2+alpha0-... is a legitimate run configuration.
struct ProfileParams {
    int k = 0;
    double alpha0 = 0.25;
    double beta0 = 2.2;

    // returns human-readable warnings for out-of-interval parameters
    std::vector<std::string> validate() const;
};

enum class ProfileKind { Singular, SmoothSurrogate, Zero };

/// Radial profile g(r) with closed-form first and second derivatives.
/// Singular: phi1(r) r^beta0 sin(1/r^{1+alpha0}).
/// SmoothSurrogate: r^2 exp(-r^2).
struct RadialProfile {
    ProfileKind kind = ProfileKind::Singular;
    ProfileParams params;

    double eval(double r, int deriv) const;
};

/// Smooth cutoff: 1 on r <= 1, 0 on r >= 2, exp-based smoothstep between.
double cutoff_phi1(double r);
/// deriv in {0,1,2}
double cutoff_phi1_deriv(double r, int deriv);

enum class CompletionMode { ProjectedDivFree, LiteralSingleComponent };

struct DataSpec {
    int i0 = 2;  // 0-based singular component index
    CompletionMode mode = CompletionMode::ProjectedDivFree;
    RadialProfile profile;
};

VectorField3 build_velocity_data(const DataSpec& spec, const Grid& grid);
VectorField3 build_vorticity_data(const VectorField3& v_f);

struct SlopeFit {
    double slope = 0.0;
    double residual = 0.0;  // rms of log-log fit residuals
    int points = 0;
};

/// Fits log|g^(deriv)| vs log r on r in [1e-4, 1e-1], sampling at the
/// extremum radii of the dominant oscillatory factor (cos for g', sin for
/// g''). Throws if fewer than 8 such radii exist in range.
SlopeFit singularity_order_probe(const RadialProfile& p, int deriv);

/// Least-squares slope of log y vs log x.
SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nslab
