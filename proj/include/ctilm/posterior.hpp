#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctilm/epidemic.hpp"
#include "ctilm/mcmc.hpp"

namespace ctilm {

// Posterior summary per tracked quantity. Windowing keeps draws with
// iteration index >= start, then every thin-th of those. Quantiles are
// empirical with linear interpolation; the time-series SE uses
// non-overlapping batch means with floor(sqrt(n)) batches per chain,
// averaged across chains.
struct SummaryRow {
    std::string name;
    double mean, sd, naive_se, ts_se;
    double q025, q25, q50, q75, q975;
    std::optional<double> accept_rate;
};

struct SummaryTable {
    std::vector<SummaryRow> rows;
    long pooled_draws = 0;
    int chains = 0;
};

SummaryTable summarize(const PosteriorSample& sample, long start, long thin);

// Gelman-Rubin potential scale reduction factor with the coda-style upper
// confidence limit. Identical chains give the deterministic floor
// sqrt((n-1)/n); constant identical chains report exactly 1.
struct PsrfRow {
    std::string name;
    double point, upper;
};

std::vector<PsrfRow> gelman_rubin(const PosteriorSample& sample, long start, long thin);

enum class LatentKind { InfectionTimes, RemovalTimes };

struct LatentSummaryRow {
    int observed_index = 0; // 1-based position in the observed sorted history
    int id = 0;
    double mean, q025, q975;
};

// Latent event-time posterior summaries over the stored (thinned) draws,
// ordered by the observed history index.
std::vector<LatentSummaryRow> latent_time_summary(const PosteriorSample& sample, LatentKind kind,
                                                  long start, long thin);

// Posterior predictive replication: draw a parameter row uniformly from the
// windowed pooled sample, simulate conditioned on the first
// `condition_prefix` infected individuals of the observed history, and
// report the four checking statistics per replicate.
struct PredictiveConfig {
    int condition_prefix = 1;
    long n_rep = 1;
    long start = 0;
    long thin = 1;
    int workers = 0;
    double tmax = kInfinity;
};

std::vector<EpidemicStats> posterior_predictive(const PosteriorSample& sample, const Model& model,
                                                const ParameterState& base,
                                                const PeriodSet& period_template,
                                                const EventHistory& observed,
                                                const PredictiveConfig& cfg, std::uint64_t seed);

// Maps a draw column name back to the ParameterState scalar it tracks;
// returns false for period-rate and log-likelihood columns.
bool apply_draw_column(ParameterState& params, PeriodSet& periods, const std::string& name,
                       double value);

} // namespace ctilm
