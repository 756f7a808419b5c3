#pragma once

#include "ctilm/kernels.hpp"
#include "ctilm/likelihood.hpp"

namespace ctilm::testing {

// Independent log-likelihood route: instead of the closed-form wedge sums,
// integrate the total susceptible pressure numerically over the event grid
// (rates are piecewise constant between events, so midpoint evaluation is
// exact up to rounding) and evaluate the infection-pressure product via the
// public total_rate state function just before each infection. Shares only
// the elementary rate operations with the implementation it checks.
double oracle_log_likelihood(const Model& model, const EventHistory& history,
                             const ParameterState& params, const PeriodSet& periods);

} // namespace ctilm::testing
