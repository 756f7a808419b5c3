#pragma once

#include <vector>

#include "ctilm/kernels.hpp"
#include "ctilm/rng.hpp"
#include "ctilm/types.hpp"

namespace ctilm {

// Simulation settings. `initial` optionally carries already-infected
// individuals (complete records); when empty a uniformly chosen individual is
// infected at time 0. tmax truncates the epidemic: no infection time exceeds
// it, but individuals infectious at tmax keep their drawn removal times.
struct SimConfig {
    PeriodSpec infectious;              // SIR
    PeriodSpec incubation, delay;       // SINR
    std::vector<Record> initial;
    double tmax = kInfinity;
};

// Event-driven simulation of the continuous-time ILM. Rates are constant
// between state transitions, so at every transition (infection, notification
// or removal) a fresh waiting time W_j ~ Exp(lambda_j(t)) is drawn for each
// susceptible, in ascending id order; the argmin (ties to the lowest id)
// becomes the next infective and receives gamma-distributed periods. The
// epidemic ends when no susceptible has a positive rate and no transition is
// pending, or when the next infection would exceed tmax.
//
// resume_time restarts a truncated epidemic at a later clock time than the
// last initial infection; rates are re-evaluated there, which by
// memorylessness preserves the law of the uninterrupted process.
EventHistory simulate(const Model& model, const ParameterState& params, const SimConfig& cfg,
                      Rng& rng, double resume_time = -kInfinity);

} // namespace ctilm
