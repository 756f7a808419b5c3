#pragma once

#include <vector>

#include "ctilm/kernels.hpp"
#include "ctilm/types.hpp"

namespace ctilm {

// Period distributions entering the likelihood. include_density = false drops
// the gamma density terms; they are constants in theta when the periods are
// treated as fixed (the known-epidemic datatype), and omitting them keeps the
// reported log-likelihood comparable across iterations.
struct PeriodSet {
    PeriodSpec infectious;        // SIR
    PeriodSpec incubation, delay; // SINR
    bool include_density = true;
};

// event_part: infection-pressure product, exposure integrals and spark term;
// period_part: sum of log gamma densities of the periods. Either may be -inf
// (spark-gated zero likelihood), which the sampler treats as a rejection.
struct LikelihoodParts {
    double event_part = 0.0;
    double period_part = 0.0;
    double total() const { return event_part + period_part; }
};

// Exact log-likelihood of an event history under the continuous-time ILM.
// Everything is computed in log space from the closed-form wedge expressions;
// for network-only kernels the pair sums run over the adjacency lists so
// zero-kernel pairs are skipped.
//
// An evaluator instance owns scratch buffers and is intended to be reused;
// it is not safe to share one instance across threads, but distinct
// instances over the same Model are.
class LikelihoodEvaluator {
public:
    explicit LikelihoodEvaluator(const Model& model);

    LikelihoodParts parts(const EventHistory& history, const ParameterState& params,
                          const PeriodSet& periods) const;

    double operator()(const EventHistory& history, const ParameterState& params,
                      const PeriodSet& periods) const {
        return parts(history, params, periods).total();
    }

    const Model& model() const { return *model_; }

private:
    LikelihoodParts sir_parts(const EventHistory& history, const ParameterState& params,
                              const PeriodSet& periods) const;
    LikelihoodParts sinr_parts(const EventHistory& history, const ParameterState& params,
                               const PeriodSet& periods) const;
    void load_times(const EventHistory& history) const;

    const Model* model_;
    // adjacency lists used for network-only kernels
    std::vector<std::vector<std::pair<int, double>>> out_adj_, in_adj_;
    mutable std::vector<double> omega_s_, omega_t_, inf_, not_, rem_;
};

double log_likelihood_sir(const Model& model, const EventHistory& history,
                          const ParameterState& params, const PeriodSet& periods);
double log_likelihood_sinr(const Model& model, const EventHistory& history,
                           const ParameterState& params, const PeriodSet& periods);
// dispatches on the model framework
double log_likelihood(const Model& model, const EventHistory& history,
                      const ParameterState& params, const PeriodSet& periods);

} // namespace ctilm
