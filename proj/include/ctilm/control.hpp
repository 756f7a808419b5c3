#pragma once

#include <span>
#include <vector>

#include "ctilm/epidemic.hpp"
#include "ctilm/networks.hpp"

namespace ctilm {

enum class ControlMechanism { CullBySusceptibilityZero };

// Ring-based control: at each checkpoint of time_grid, every individual that
// is still uninfected and lies within `radius` of an individual newly
// infected during the step has all of its susceptibility covariates zeroed.
struct ControlPolicy {
    double radius = 1.0;
    std::vector<double> time_grid; // strictly increasing, first entry > 0
    ControlMechanism mechanism = ControlMechanism::CullBySusceptibilityZero;

    void validate() const;
    static std::vector<double> unit_grid(double t_end); // 1, 2, ..., t_end
};

struct ControlOutcome {
    int n_infected = 0;
    int n_culled = 0; // culled and never infected
    double epidemic_length = 0.0;
    bool spark_warning = false; // culls cannot stop spark infections
};

// Stepwise simulation with culling: each step continues the accumulated
// history to the next checkpoint (the in-progress periods of initial
// individuals are preserved), then applies the ring culls for that step.
ControlOutcome ring_cull_run(const Model& model, const ParameterState& params,
                             const SimConfig& cfg, const Locations& loc,
                             const ControlPolicy& policy, Rng& rng);

struct SweepRow {
    double radius;
    double mean_infected, sd_infected;
    double mean_culled, sd_culled;
    double mean_length, sd_length;
};

// Replicate-averaged outcomes per radius. Replicates run on independent
// derived RNG streams and may execute concurrently.
std::vector<SweepRow> sweep(const Model& model, const ParameterState& params, const SimConfig& cfg,
                            const Locations& loc, std::span<const double> radii, int replicates,
                            const ControlPolicy& grid_template, std::uint64_t seed, int workers);

} // namespace ctilm
