#include "swfem/timeint/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swfem {

namespace {

State advance(const State& base, const Tendency& k, double dt) {
    return {Field(base.u.space, base.u.coeffs + dt * k.du), Field(base.h.space, base.h.coeffs + dt * k.dh), base.t + dt};
}

}  // namespace

State rk4_step(const ShallowWaterModel& model, const State& state, double dt, WarmStart* warm, int* cg_iters_max) {
    const Tendency k1 = model.tendency(state, warm);
    const Tendency k2 = model.tendency(advance(state, k1, 0.5 * dt), warm);
    const Tendency k3 = model.tendency(advance(state, k2, 0.5 * dt), warm);
    const Tendency k4 = model.tendency(advance(state, k3, dt), warm);
    if (cg_iters_max) {
        for (const Tendency* k : {&k1, &k2, &k3, &k4}) *cg_iters_max = std::max(*cg_iters_max, k->cg_iterations);
    }
    const double w = dt / 6.0;
    State next{Field(state.u.space, state.u.coeffs + w * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du)),
               Field(state.h.space, state.h.coeffs + w * (k1.dh + 2.0 * k2.dh + 2.0 * k3.dh + k4.dh)), state.t + dt};
    return next;
}

Sample sample_state(const ShallowWaterModel& model, const State& state, int step) {
    SolverReport report;
    const Field q = model.diagnose_q(state, &report);
    Sample s;
    s.step = step;
    s.time = state.t;
    s.energy = model.energy(state);
    s.enstrophy = model.enstrophy(state, q);
    s.vorticity = model.total_vorticity(state, q);
    s.mass = model.total_mass(state);
    s.imbalance = model.geostrophic_imbalance(state);
    s.cg_iters_max = report.iterations;
    return s;
}

RunResult run(const ShallowWaterModel& model, const State& initial, const RunOptions& options) {
    if (!(options.dt > 0.0) || !std::isfinite(options.dt)) throw ConfigError("dt must be positive and finite");
    if (!(options.t_end >= initial.t) || !std::isfinite(options.t_end)) {
        throw ConfigError("t_end must be finite and not before the initial time");
    }
    if (options.sample_every < 1) throw ConfigError("sample_every must be at least 1");

    // Steps of dt, the last one shortened to land on t_end; a remainder
    // below 1e-9 dt is absorbed into the previous step.
    const double span = options.t_end - initial.t;
    const long steps = span == 0.0 ? 0 : static_cast<long>(std::ceil(span / options.dt - 1e-9));

    RunResult result{initial, {}};
    result.record.samples.push_back(sample_state(model, initial, 0));
    const double e0 = std::abs(result.record.samples.front().energy);

    WarmStart warm;
    int cg_max = 0;
    State& state = result.final_state;
    for (long n = 1; n <= steps; ++n) {
        const int step = static_cast<int>(n);
        const double t_next = n == steps ? options.t_end : initial.t + n * options.dt;
        try {
            State next = rk4_step(model, state, t_next - state.t, options.warm_start ? &warm : nullptr, &cg_max);
            next.t = t_next;
            state = std::move(next);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "step " << step << " (t = " << state.t << "): " << e.what();
            throw RunError(e.code(), os.str(), step);
        }
        if (options.on_step) options.on_step(state, step);

        const bool sample = n % options.sample_every == 0 || n == steps;
        const double energy = model.energy(state);
        if (!std::isfinite(energy) || std::abs(energy) > options.blowup_factor * e0) {
            std::ostringstream os;
            os << "step " << step << " (t = " << state.t << "): energy " << energy << " exceeds "
               << options.blowup_factor << " times the initial energy " << e0;
            throw RunError("blowup", os.str(), step);
        }
        if (sample) {
            try {
                Sample s = sample_state(model, state, step);
                s.cg_iters_max = std::max(s.cg_iters_max, cg_max);
                result.record.samples.push_back(s);
            } catch (const Error& e) {
                throw RunError(e.code(), "sampling after step " + std::to_string(step) + ": " + e.what(), step);
            }
            cg_max = 0;
        }
    }
    return result;
}

}  // namespace swfem
