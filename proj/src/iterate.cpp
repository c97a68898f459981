#include "nslab/iterate.hpp"

#include <cmath>
#include <sstream>

namespace nslab {

namespace {

VectorField3 initial_velocity(const IterationConfig& cfg) {
    if (cfg.initial_data) return sample_vector(cfg.grid, cfg.initial_data);
    return build_velocity_data(cfg.data, cfg.grid);
}

TimeSlab mollified_slab(const VectorField3& data, const IterationConfig& cfg) {
    TimeSlab slab = TimeSlab::uniform(cfg.grid, 0.0, cfg.T, cfg.n_steps);
    slab.slices[0] = data;
    for (std::size_t q = 1; q < slab.slices.size(); ++q)
        slab.slices[q] =
            conv_spatial(data, cfg.nu, slab.times[q], {0, 0, 0}, cfg.path);
    return slab;
}

void check_finite(const VectorField3& f, int k, double t) {
    if (!f.all_finite()) {
        std::ostringstream os;
        os << "non-finite field at k=" << k << ", t=" << t;
        throw NonFiniteField(os.str());
    }
}

// transport: component i = sum_j v_j d(w_i)/dx_j
VectorField3 transport_term(const VectorField3& v, const VectorField3& w) {
    VectorField3 out(v.grid);
    std::array<std::array<ScalarField3, 3>, 3> dw;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            MultiIndex gamma{0, 0, 0};
            gamma[j] = 1;
            dw[i][j] = fd_derivative(w.comp[i], gamma);
        }
    for (int i = 0; i < 3; ++i) {
        ScalarField3& o = out.comp[i];
        o.boundary_layer = dw[i][0].boundary_layer;
        for (std::size_t q = 0; q < o.values.size(); ++q) {
            double acc = 0.0;
            for (int j = 0; j < 3; ++j)
                acc += v.comp[j].values[q] * dw[i][j].values[q];
            o.values[q] = acc;
        }
    }
    return out;
}

// stretching: component i = sum_j (1/2)(d v_i/dx_j + d v_j/dx_i) w_j
VectorField3 stretch_term(const VectorField3& v, const VectorField3& w) {
    VectorField3 out(v.grid);
    std::array<std::array<ScalarField3, 3>, 3> dv;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            MultiIndex gamma{0, 0, 0};
            gamma[j] = 1;
            dv[i][j] = fd_derivative(v.comp[i], gamma);
        }
    for (int i = 0; i < 3; ++i) {
        ScalarField3& o = out.comp[i];
        o.boundary_layer = dv[i][0].boundary_layer;
        for (std::size_t q = 0; q < o.values.size(); ++q) {
            double acc = 0.0;
            for (int j = 0; j < 3; ++j)
                acc += 0.5 * (dv[i][j].values[q] + dv[j][i].values[q]) *
                       w.comp[j].values[q];
            o.values[q] = acc;
        }
    }
    return out;
}

}  // namespace

void IterationConfig::validate() const {
    if (nu <= 0.0) throw std::invalid_argument("IterationConfig: nu must be > 0");
    if (T <= 0.0) throw std::invalid_argument("IterationConfig: T must be > 0");
    if (n_steps < 2) throw std::invalid_argument("IterationConfig: n_steps >= 2");
    if (k_max < 3) throw std::invalid_argument("IterationConfig: k_max >= 3");
}

VectorField3 burgers_term(const VectorField3& v) { return transport_term(v, v); }

IterationState picard_init(const IterationConfig& cfg) {
    cfg.validate();
    IterationState st;
    st.k = 0;
    st.v = mollified_slab(initial_velocity(cfg), cfg);
    return st;
}

IterationState picard_step(const IterationState& prev, const IterationConfig& cfg,
                           const TimeSlab* init) {
    cfg.validate();
    TimeSlab init_local;
    if (!init) {
        init_local = mollified_slab(initial_velocity(cfg), cfg);
        init = &init_local;
    }

    const double sl = cfg.signs.flip_leray ? -1.0 : 1.0;

    // nonlinear integrand F(s) = +Burgers - Leray (+ forcing) on every slice
    TimeSlab F = TimeSlab::uniform(cfg.grid, 0.0, cfg.T, cfg.n_steps);
    for (std::size_t q = 0; q < F.slices.size(); ++q) {
        VectorField3 b = burgers_term(prev.v.slices[q]);
        VectorField3 l = leray_term(prev.v.slices[q]);
        F.slices[q] = axpy(-sl, l, b);
        if (cfg.signs.flip_burgers)
            F.slices[q] = axpy(-2.0, b, F.slices[q]);
        if (cfg.forcing) {
            const double s = F.times[q];
            VectorField3 fq = sample_vector(
                cfg.grid, [&](const Vec3& x) { return cfg.forcing(s, x); });
            F.slices[q] = axpy(1.0, fq, F.slices[q]);
        }
        if (cfg.forcing_slab)
            F.slices[q] = axpy(1.0, cfg.forcing_slab->slices[q], F.slices[q]);
    }

    IterationState next;
    next.k = prev.k + 1;
    next.v = TimeSlab::uniform(cfg.grid, 0.0, cfg.T, cfg.n_steps);
    next.v.slices[0] = init->slices[0];
    for (std::size_t m = 1; m < next.v.slices.size(); ++m) {
        VectorField3 duhamel =
            conv_spacetime(F, cfg.nu, next.v.times[m], {0, 0, 0}, cfg.path);
        next.v.slices[m] = axpy(1.0, duhamel, init->slices[m]);
        check_finite(next.v.slices[m], next.k, next.v.times[m]);
    }
    return next;
}

TimeSlab IterationTrace::increment(int k) const {
    if (k < 1 || k >= static_cast<int>(states.size()))
        throw std::invalid_argument("increment: k out of range");
    TimeSlab d = states[k].v;
    for (std::size_t q = 0; q < d.slices.size(); ++q)
        d.slices[q] = axpy(-1.0, states[k - 1].v.slices[q], states[k].v.slices[q]);
    return d;
}

TimeSlab IterationTrace::init_increment(int k) const {
    if (k < 0 || k >= static_cast<int>(states.size()))
        throw std::invalid_argument("init_increment: k out of range");
    TimeSlab d = states[k].v;
    for (std::size_t q = 0; q < d.slices.size(); ++q)
        d.slices[q] = axpy(-1.0, init.slices[q], states[k].v.slices[q]);
    return d;
}

IterationTrace run_picard(const IterationConfig& cfg) {
    cfg.validate();
    IterationTrace trace;
    trace.config = cfg;
    trace.init = mollified_slab(initial_velocity(cfg), cfg);
    trace.states.push_back(picard_init(cfg));
    if (cfg.with_vorticity) trace.vort.push_back(vorticity_init(cfg));

    const bool singular =
        !cfg.initial_data && cfg.data.profile.kind == ProfileKind::Singular;
    const double excl_radius = 5.0 * cfg.grid.h;

    for (int k = 1; k <= cfg.k_max; ++k) {
        trace.states.push_back(
            picard_step(trace.states.back(), cfg, &trace.init));
        if (cfg.with_vorticity)
            trace.vort.push_back(vorticity_step(
                trace.vort.back(), trace.states[trace.states.size() - 2], cfg));

        TimeSlab delta = trace.increment(k);
        double max_c2 = 0.0;
        for (std::size_t q = 0; q < delta.slices.size(); ++q) {
            const VectorField3& dv = delta.slices[q];
            const double t = delta.times[q];
            auto push = [&](const std::string& kind, double value, bool excl) {
                trace.norms.push_back({k, t, kind, value, excl});
            };
            NormOptions inc;
            push("C0", discrete_norm(dv, NormKind::cm(0), inc), false);
            push("H2capC2", hm_cm_norm(dv, 2, inc), false);
            push("H3capC3", hm_cm_norm(dv, 3, inc), false);
            max_c2 = std::max(max_c2, discrete_norm(dv, NormKind::cm(2), inc));
            if (singular) {
                NormOptions excl;
                excl.exclude_origin_radius = excl_radius;
                push("C0", discrete_norm(dv, NormKind::cm(0), excl), true);
                push("H2capC2", hm_cm_norm(dv, 2, excl), true);
                push("H3capC3", hm_cm_norm(dv, 3, excl), true);
            }
        }
        if (max_c2 < cfg.stop_c2) {
            trace.stopped_at = k;
            break;
        }
    }
    return trace;
}

VorticityState vorticity_init(const IterationConfig& cfg) {
    cfg.validate();
    VorticityState st;
    st.k = 0;
    st.w = mollified_slab(curl(initial_velocity(cfg)), cfg);
    return st;
}

VorticityState vorticity_step(const VorticityState& prev_w,
                              const IterationState& prev_v,
                              const IterationConfig& cfg, const TimeSlab* init) {
    cfg.validate();
    TimeSlab init_local;
    if (!init) {
        init_local = mollified_slab(curl(initial_velocity(cfg)), cfg);
        init = &init_local;
    }

    TimeSlab F = TimeSlab::uniform(cfg.grid, 0.0, cfg.T, cfg.n_steps);
    for (std::size_t q = 0; q < F.slices.size(); ++q) {
        VectorField3 tr = transport_term(prev_v.v.slices[q], prev_w.w.slices[q]);
        VectorField3 st = stretch_term(prev_v.v.slices[q], prev_w.w.slices[q]);
        F.slices[q] = axpy(-1.0, st, tr);
    }

    VorticityState next;
    next.k = prev_w.k + 1;
    next.w = TimeSlab::uniform(cfg.grid, 0.0, cfg.T, cfg.n_steps);
    next.w.slices[0] = init->slices[0];
    for (std::size_t m = 1; m < next.w.slices.size(); ++m) {
        VectorField3 duhamel =
            conv_spacetime(F, cfg.nu, next.w.times[m], {0, 0, 0}, cfg.path);
        next.w.slices[m] = axpy(1.0, duhamel, init->slices[m]);
        check_finite(next.w.slices[m], next.k, next.w.times[m]);
    }
    return next;
}

std::map<int, double> vorticity_increment_recursion(const IterationTrace& trace) {
    std::map<int, double> out;
    const int K = static_cast<int>(trace.vort.size()) - 1;
    if (K < 2) return out;
    const IterationConfig& cfg = trace.config;

    for (int k = 2; k <= K; ++k) {
        const TimeSlab& wk = trace.vort[k].w;
        const TimeSlab& wk1 = trace.vort[k - 1].w;
        const TimeSlab& wk2 = trace.vort[k - 2].w;
        const TimeSlab& vk1 = trace.states[k - 1].v;
        const TimeSlab& vk2 = trace.states[k - 2].v;

        // bilinear decomposition of the differenced scheme:
        // d w^k = C[ T(dv^{k-1}, w^{k-1}) + T(v^{k-2}, dw^{k-1})
        //          - S(dv^{k-1}, w^{k-1}) - S(v^{k-2}, dw^{k-1}) ]
        TimeSlab F = TimeSlab::uniform(cfg.grid, 0.0, cfg.T, cfg.n_steps);
        for (std::size_t q = 0; q < F.slices.size(); ++q) {
            VectorField3 dv = axpy(-1.0, vk2.slices[q], vk1.slices[q]);
            VectorField3 dw = axpy(-1.0, wk2.slices[q], wk1.slices[q]);
            VectorField3 acc = transport_term(dv, wk1.slices[q]);
            acc = axpy(1.0, transport_term(vk2.slices[q], dw), acc);
            acc = axpy(-1.0, stretch_term(dv, wk1.slices[q]), acc);
            acc = axpy(-1.0, stretch_term(vk2.slices[q], dw), acc);
            F.slices[q] = acc;
        }

        double worst = 0.0;
        for (std::size_t m = 1; m < wk.slices.size(); ++m) {
            VectorField3 rhs =
                conv_spacetime(F, cfg.nu, wk.times[m], {0, 0, 0}, cfg.path);
            VectorField3 direct = axpy(-1.0, wk1.slices[m], wk.slices[m]);
            VectorField3 res = axpy(-1.0, rhs, direct);
            worst = std::max(worst, discrete_norm(res, NormKind::cm(0)));
        }
        out[k] = worst;
    }
    return out;
}

}  // namespace nslab
