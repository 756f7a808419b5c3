#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctilm/likelihood.hpp"
#include "ctilm/rng.hpp"

namespace ctilm {

enum class Datatype { KnownEpidemic, KnownRemoval, UnknownRemoval };
const char* datatype_name(Datatype d);
Datatype datatype_from_name(const std::string& name);

enum class PriorFamily { Gamma, HalfNormal, Uniform };

struct Prior {
    PriorFamily family = PriorFamily::Gamma;
    double a = 1.0; // gamma shape / half-normal mean / uniform lower
    double b = 1.0; // gamma rate / half-normal variance / uniform upper

    void validate() const;
    double log_density(double x) const; // -inf outside support
};

// Which scalar of ParameterState a sampled parameter refers to.
enum class ParamTarget { SusCoeff, SusPower, TransCoeff, TransPower, KernelBeta, KernelBeta2, Spark, Gamma };

double& param_ref(ParameterState& state, ParamTarget target, int index);

struct ParamSpec {
    ParamTarget target = ParamTarget::SusCoeff;
    int index = 0;
    std::string name;
    Prior prior;
    std::vector<double> init; // one value per chain, or a single broadcast value
    double proposal_var = 0.0; // 0 fixes the parameter at its initial value
    bool allow_zero = false;   // spark may sit at 0; everything else is > 0
};

enum class PeriodType { Infectious, Incubation, Delay };

// Gamma prior and initial value(s) for one period-distribution rate; the
// shape is fixed.
struct PeriodDelta {
    double shape = 1.0;
    std::vector<double> init; // rate, one per chain or broadcast
    double prior_a = 1.0;
    double prior_b = 1.0;
};

struct FitConfig {
    Datatype datatype = Datatype::KnownEpidemic;
    long nsim = 0;
    int nchains = 1;
    bool parallel = false;
    int first_known = 1; // event times of the first m0 infected are never updated
    int block_size = 1;
    int latent_thin = 10; // latent event-time draws stored every k-th iteration
    int workers = 0;      // 0: min(nchains, hardware threads)
    std::optional<PeriodDelta> delta_infectious;  // SIR
    std::optional<PeriodDelta> delta_incubation;  // SINR
    std::optional<PeriodDelta> delta_delay;       // SINR
    // independence-sampler proposals; default is the fixed shape with the
    // current Gibbs-updated rate
    std::optional<PeriodSpec> proposal_infectious, proposal_incubation, proposal_delay;
    bool validate_each_iteration = false; // test hook: recheck invariants every sweep
};

struct ChainSample {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> draws; // nsim+1 rows: initial state plus one per iteration
    // thinned latent event-time draws, ordered by observed history index
    std::vector<long> latent_iters;
    std::vector<int> latent_ids; // external ids, observed order
    std::vector<std::vector<double>> latent_inf;
    std::vector<std::vector<double>> latent_rem; // unknown-removal fits only
    std::vector<std::string> accept_names;
    std::vector<double> accept_rates;
    long latent_proposals = 0;
    long latent_accepts = 0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
};

struct PosteriorSample {
    std::vector<std::string> columns;
    std::vector<ChainSample> chains;
};

// One exact draw from the gamma full conditional of a period rate:
// Gamma(m * shape + a, M + b), with M the summed period lengths of the given
// type and shape the fixed shape of the period distribution (for exponential
// periods, shape 1, this is the familiar Gamma(m + a, M + b) form).
// Requesting a period type outside the framework throws WrongDatatype.
double gibbs_rate_update(Framework framework, const EventHistory& history, PeriodType period,
                         double shape, double prior_a, double prior_b, Rng& rng);

// Joint independence-sampler update of the event times of `block_ids`
// (external ids; all must be infected and beyond the first m0 in observed
// order, which the caller guarantees). Periods are redrawn from the gamma
// proposals and times reconstructed from the anchors: SIR infection times
// from removal, SINR infection times from notification, and additionally
// removal times from notification when update_removal is set. Returns true
// on acceptance, with history/ll updated in place and the history re-sorted.
bool independence_update_event_times(const LikelihoodEvaluator& loglik, EventHistory& history,
                                     LikelihoodParts& ll, const ParameterState& params,
                                     const PeriodSet& periods, const std::vector<int>& block_ids,
                                     const PeriodSpec& proposal_main,
                                     const PeriodSpec* proposal_delay, bool update_removal,
                                     Rng& rng);

// Random-walk Metropolis step for one scalar parameter; returns acceptance.
bool rw_mh_update(const LikelihoodEvaluator& loglik, const EventHistory& history,
                  ParameterState& params, LikelihoodParts& ll, const PeriodSet& periods,
                  const ParamSpec& spec, Rng& rng);

ChainSample run_chain(const Model& model, const EventHistory& observed,
                      const std::vector<ParamSpec>& param_specs, const ParameterState& base,
                      const FitConfig& fit, int chain_index, std::uint64_t chain_seed);

// Chains are independent given their derived seeds, so parallel and
// sequential execution produce identical results.
PosteriorSample run_chains(const Model& model, const EventHistory& observed,
                           const std::vector<ParamSpec>& param_specs, const ParameterState& base,
                           const FitConfig& fit, std::uint64_t master_seed);

} // namespace ctilm
