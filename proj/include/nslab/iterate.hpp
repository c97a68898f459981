#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nslab/convolve.hpp"
#include "nslab/profile.hpp"

namespace nslab {

/// The scheme's two sign choices (the source displays differ between the
/// velocity and vorticity forms); defaults follow the velocity scheme
/// literally and are pinned by the manufactured-solution test.
struct SignPack {
    bool flip_burgers = false;
    bool flip_leray = false;
};

struct IterationConfig {
    double nu = 0.1;
    double T = 0.1;
    int n_steps = 16;
    int k_max = 8;
    DataSpec data;
    Grid grid;
    ConvPath path = ConvPath::FastSeparable;
    SignPack signs;
    double stop_c2 = 1e-10;
    bool with_vorticity = false;
    /// overrides build_velocity_data when set (manufactured solutions, tests)
    std::function<Vec3(const Vec3&)> initial_data;
    /// optional source q(t, x) added to the nonlinear integrand
    std::function<Vec3(double, const Vec3&)> forcing;
    /// optional precomputed source slices (same time nodes as the iteration)
    std::shared_ptr<const TimeSlab> forcing_slab;

    void validate() const;
};

struct IterationState {
    int k = 0;
    TimeSlab v;
};

struct VorticityState {
    int k = 0;
    TimeSlab w;
};

struct NormRow {
    int k = 0;
    double t = 0.0;
    std::string kind;
    double value = 0.0;
    bool origin_excluded = false;
};

struct IterationTrace {
    IterationConfig config;
    TimeSlab init;  // v^f *_sp G_nu on every slice (slice 0 = data itself)
    std::vector<IterationState> states;
    std::vector<VorticityState> vort;  // filled when with_vorticity
    std::vector<NormRow> norms;
    int stopped_at = -1;  // early-stop index, -1 if K_max reached

    /// delta v^k = v^k - v^{k-1}, k >= 1
    TimeSlab increment(int k) const;
    /// delta v^{init,k} = v^k - v^f *_sp G_nu
    TimeSlab init_increment(int k) const;
};

struct NonFiniteField : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// component i = sum_j v_j d(v_i)/dx_j
VectorField3 burgers_term(const VectorField3& v);

IterationState picard_init(const IterationConfig& cfg);
IterationState picard_step(const IterationState& prev, const IterationConfig& cfg,
                           const TimeSlab* init = nullptr);
IterationTrace run_picard(const IterationConfig& cfg);

VorticityState vorticity_init(const IterationConfig& cfg);
VorticityState vorticity_step(const VorticityState& prev_w,
                              const IterationState& prev_v,
                              const IterationConfig& cfg,
                              const TimeSlab* init = nullptr);

/// For each k >= 2 with stored vorticity states: C0 distance between the
/// directly differenced increment and the bilinear-decomposition recursion.
std::map<int, double> vorticity_increment_recursion(const IterationTrace& trace);

}  // namespace nslab
