#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nslab/iterate.hpp"

namespace nslab {

/// r_k = |dv^{k+1}(t)| / |dv^k(t)| per stored t > 0, from the trace's norm
/// table. kind is a norm-table kind name ("C0", "H2capC2", "H3capC3").
/// Entries where the denominator is below 1e-14 are skipped.
std::map<int, std::vector<double>> contraction_ratios(
    const IterationTrace& trace, const std::string& kind,
    bool origin_excluded = false);

struct DecayRow {
    int k = 0;
    int gamma_order = 0;  // |gamma|, value is the max over that order
    double t = 0.0;
    double value = 0.0;
};

/// max_{|x|>=1} |D^gamma dv^k| (1+|x|^order) per (k, |gamma| <= max_order, t).
std::vector<DecayRow> decay_envelope_table(const IterationTrace& trace,
                                           double order = 8.0,
                                           int max_gamma = 3);

/// lhs = C0 norm of the Duhamel integral of the constant-in-time field F
/// against the derivative kernel; rhs = 4 L M_2(nu, t).
std::pair<double, double> moment_bound_check(const ScalarField3& F, double L,
                                             double nu, double t, int axis,
                                             int n_t = 16);

struct ViscositySweep {
    std::vector<double> nus;
    // M[p][q] = C1 distance between total increments at the final time
    std::vector<std::vector<double>> cauchy;
    // mean H2capC2 contraction ratio (k >= 3) per nu
    std::vector<double> h2c2_ratio;
};

ViscositySweep viscosity_sweep(IterationConfig cfg,
                               const std::vector<double>& nus);

struct DivRow {
    int k = 0;
    double t = 0.0;
    double value = 0.0;  // C0 norm of div v^k(t), boundary layer excluded
};

std::vector<DivRow> incompressibility_residual(const IterationTrace& trace);

struct BlowupResult {
    SlopeFit sup_fit;       // log sup|omega^f| vs log h
    std::vector<double> h_levels;
    std::vector<double> sup_values;
    int kink_order = 0;     // smallest m with unbounded m-th differences, 0 if none
};

/// Closed-form |curl(g(r) e_{i0})| sampled on 3+ refinement levels; for kink
/// profiles additionally runs the divided-difference boundedness probe.
BlowupResult blowup_indicator(const DataSpec& spec, double extent_R,
                              int base_n, int levels = 3);

struct ForceTerm {
    TimeSlab F;        // F_i(t) = -nu Laplacian omega_i(t)
    double time_l2 = 0.0;  // trapezoid in t of the squared L2 norm
};

ForceTerm force_term(const TimeSlab& omega, double nu);

struct Compactified {
    int n = 0;
    double dy = 0.0;                // spacing of the uniform y-grid
    std::vector<double> values;     // x-fastest, same layout convention
    double bound_fraction = 0.0;    // share of checked nodes satisfying the
                                    // |D_y f| <= c0 (1+|x|^2) |D_x f| bound
    double c0 = 2.0;
};

/// Resample f onto a uniform grid in y = arctan(x) per axis and check the
/// chain-rule derivative bound away from the poles.
Compactified compactify_field(const ScalarField3& f);

/// FNV-1a 64-bit fingerprint, hex-encoded; used to stamp every CSV.
std::string fingerprint(const std::string& text);

struct DiagnosticsReport {
    std::string config_fingerprint;
    std::vector<NormRow> norms;
    std::map<int, std::vector<double>> contraction_h2c2;
    std::map<int, std::vector<double>> contraction_h3c3;
    std::vector<DecayRow> decay;
    std::vector<DivRow> div_residuals;
    std::vector<std::string> summary_lines;  // "PASS ..." / "FAIL ..."
    bool all_pass = true;
};

void write_norm_csv(const std::string& path, const std::vector<NormRow>& rows,
                    const std::string& fp);
void write_decay_csv(const std::string& path, const std::vector<DecayRow>& rows,
                     const std::string& fp);
void write_div_csv(const std::string& path, const std::vector<DivRow>& rows,
                   const std::string& fp);

}  // namespace nslab
