#pragma once

#include <functional>
#include <vector>

#include "swfem/error.hpp"
#include "swfem/swe/model.hpp"

namespace swfem {

/// A run failed at `step` (1-based index of the step being taken). `code()`
/// is the underlying error's code, or "blowup" for the energy guard.
class RunError : public Error {
public:
    RunError(std::string code, const std::string& message, int step)
        : Error(std::move(code), message), step_(step) {}
    int step() const noexcept { return step_; }

private:
    int step_;
};

struct Sample {
    int step = 0;
    double time = 0.0;
    double energy = 0.0;
    double enstrophy = 0.0;
    double vorticity = 0.0;
    double mass = 0.0;
    double imbalance = 0.0;
    /// Largest CG iteration count of any solve since the previous sample.
    int cg_iters_max = 0;
};

struct RunRecord {
    std::vector<Sample> samples;
};

struct RunOptions {
    double dt = 0.0;
    double t_end = 0.0;
    /// Sample every this many steps; the initial and final states are always
    /// sampled.
    int sample_every = 1;
    /// Fail once |E| exceeds this multiple of the initial energy.
    double blowup_factor = 1e3;
    /// Reuse the previous stage's solutions as CG starting guesses.
    bool warm_start = true;
    /// Called after every completed step with the new state and step index.
    std::function<void(const State&, int)> on_step;
};

struct RunResult {
    State final_state;
    RunRecord record;
};

/// Classical four-stage Runge-Kutta step on the (u, h) coefficients. All
/// diagnostics are recomputed in each stage. `cg_iters_max`, when given, is
/// raised to the largest iteration count of the step's solves.
State rk4_step(const ShallowWaterModel& model, const State& state, double dt, WarmStart* warm = nullptr,
               int* cg_iters_max = nullptr);

/// Diagnostics of one state (solves for q and the imbalance residual).
Sample sample_state(const ShallowWaterModel& model, const State& state, int step);

/// Integrate from `initial.t` to `options.t_end` with steps of `options.dt`;
/// a shorter final step lands exactly on t_end. Throws ConfigError for
/// invalid options and RunError when a step fails or the energy blows up.
RunResult run(const ShallowWaterModel& model, const State& initial, const RunOptions& options);

}  // namespace swfem
