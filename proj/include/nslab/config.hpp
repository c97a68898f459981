#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nslab/iterate.hpp"

namespace nslab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key=value experiment description ('#' comments). Unknown keys are
/// rejected; parameter-interval violations are downgraded to warnings.
struct ExperimentConfig {
    std::string name = "experiment";

    // grid
    double extent = 2.0;
    int n = 17;

    // data family
    int profile_k = 0;
    double alpha0 = 0.25;
    double beta0 = 2.2;
    int i0 = 3;                           // 1-based component index
    std::string profile = "singular";     // singular | smooth | zero
    std::string completion = "projected"; // projected | literal

    // iteration
    double nu = 0.1;
    double T = 0.1;
    int n_steps = 8;
    int k_max = 4;
    std::string conv_path = "fast";       // fast | direct
    bool flip_burgers = false;
    bool flip_leray = false;
    double stop_c2 = 1e-10;
    bool with_vorticity = false;

    // diagnostics toggles and knobs
    bool check_contraction = true;
    bool check_decay = false;
    bool check_div = true;
    bool check_moment = false;
    bool check_blowup = false;
    bool check_recursion = false;
    bool check_mms = false;
    bool check_sweep = false;
    double contraction_threshold = 0.9;
    double mms_tol = 0.02;
    int moment_trials = 20;
    std::vector<double> nus;  // viscosity sweep values

    // orchestration
    std::string output_dir = "out";
    int threads = 1;
    unsigned long long seed = 12345;

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string canonical_text() const;
    std::vector<std::string> warnings() const;
    IterationConfig iteration() const;
};

std::map<std::string, std::string> presets();

/// Relative C0 error at t = T of the Picard fixed point against a known
/// forced smooth solution; blows up when either scheme sign is flipped.
double manufactured_solution_error(const SignPack& signs, int n = 25,
                                   double extent = 3.0, int n_steps = 8,
                                   int k_max = 5);

/// exit 0 = all enabled contracts pass, 1 = contract failure,
/// 2 = config error, 3 = runtime fault
int run_experiment(const std::string& config_path);
int run_experiment_text(const std::string& text);

}  // namespace nslab
