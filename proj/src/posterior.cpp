#include "ctilm/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ctilm/errors.hpp"
#include "ctilm/stats.hpp"

namespace ctilm {

namespace {

// iteration k qualifies when k >= start and (k - start) % thin == 0
std::vector<std::size_t> window_indices(std::size_t nrows, long start, long thin) {
    if (start < 0 || thin < 1) throw Error(ErrorCode::InvalidConfig, "start must be >= 0 and thin >= 1");
    std::vector<std::size_t> keep;
    for (std::size_t k = start < 0 ? 0 : static_cast<std::size_t>(start); k < nrows;
         k += static_cast<std::size_t>(thin))
        keep.push_back(k);
    return keep;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

// empirical quantile with linear interpolation between order statistics
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// batch-means estimate of the asymptotic variance of one chain's series
double batch_means_asymptotic_var(const std::vector<double>& series) {
    const std::size_t n = series.size();
    const std::size_t nbatch = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    if (nbatch < 2) return var_of(series, mean_of(series));
    const std::size_t bsize = n / nbatch;
    std::vector<double> bmeans(nbatch);
    for (std::size_t b = 0; b < nbatch; ++b) {
        double s = 0.0;
        for (std::size_t k = 0; k < bsize; ++k) s += series[b * bsize + k];
        bmeans[b] = s / static_cast<double>(bsize);
    }
    return static_cast<double>(bsize) * var_of(bmeans, mean_of(bmeans));
}

} // namespace

SummaryTable summarize(const PosteriorSample& sample, long start, long thin) {
    if (sample.chains.empty()) throw Error(ErrorCode::EmptyWindow, "no chains to summarize");
    const std::size_t ncols = sample.columns.size();

    SummaryTable table;
    table.chains = static_cast<int>(sample.chains.size());

    std::vector<std::vector<std::size_t>> keep;
    std::size_t pooled = 0;
    for (const ChainSample& chain : sample.chains) {
        keep.push_back(window_indices(chain.draws.size(), start, thin));
        pooled += keep.back().size();
    }
    if (pooled == 0) throw Error(ErrorCode::EmptyWindow, "no draws remain after windowing");
    table.pooled_draws = static_cast<long>(pooled);

    for (std::size_t col = 0; col < ncols; ++col) {
        std::vector<double> all;
        all.reserve(pooled);
        double asym_sum = 0.0;
        for (std::size_t c = 0; c < sample.chains.size(); ++c) {
            std::vector<double> series;
            series.reserve(keep[c].size());
            for (std::size_t k : keep[c]) series.push_back(sample.chains[c].draws[k][col]);
            asym_sum += batch_means_asymptotic_var(series);
            all.insert(all.end(), series.begin(), series.end());
        }
        SummaryRow row;
        row.name = sample.columns[col];
        row.mean = mean_of(all);
        row.sd = std::sqrt(var_of(all, row.mean));
        row.naive_se = row.sd / std::sqrt(static_cast<double>(all.size()));
        row.ts_se = std::sqrt((asym_sum / static_cast<double>(sample.chains.size())) /
                              static_cast<double>(all.size()));
        std::sort(all.begin(), all.end());
        row.q025 = quantile_sorted(all, 0.025);
        row.q25 = quantile_sorted(all, 0.25);
        row.q50 = quantile_sorted(all, 0.50);
        row.q75 = quantile_sorted(all, 0.75);
        row.q975 = quantile_sorted(all, 0.975);

        double rate_sum = 0.0;
        int rate_count = 0;
        for (const ChainSample& chain : sample.chains)
            for (std::size_t a = 0; a < chain.accept_names.size(); ++a)
                if (chain.accept_names[a] == row.name) {
                    rate_sum += chain.accept_rates[a];
                    ++rate_count;
                }
        if (rate_count > 0) row.accept_rate = rate_sum / rate_count;
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<PsrfRow> gelman_rubin(const PosteriorSample& sample, long start, long thin) {
    const std::size_t nchains = sample.chains.size();
    if (nchains < 2)
        throw Error(ErrorCode::SingleChain, "the Gelman-Rubin diagnostic needs at least two chains");

    std::vector<std::vector<std::size_t>> keep;
    for (const ChainSample& chain : sample.chains)
        keep.push_back(window_indices(chain.draws.size(), start, thin));
    const std::size_t len = keep.front().size();
    for (const auto& k : keep)
        if (k.size() != len)
            throw Error(ErrorCode::EmptyWindow, "chains have unequal lengths after windowing");
    if (len < 2) throw Error(ErrorCode::EmptyWindow, "too few draws remain after windowing");

    const double L = static_cast<double>(len);
    const double J = static_cast<double>(nchains);

    std::vector<PsrfRow> rows;
    for (std::size_t col = 0; col < sample.columns.size(); ++col) {
        std::vector<double> chain_means(nchains), chain_vars(nchains);
        for (std::size_t c = 0; c < nchains; ++c) {
            std::vector<double> series;
            series.reserve(len);
            for (std::size_t k : keep[c]) series.push_back(sample.chains[c].draws[k][col]);
            chain_means[c] = mean_of(series);
            chain_vars[c] = var_of(series, chain_means[c]);
        }
        const double W = mean_of(chain_vars);
        const double B = L * var_of(chain_means, mean_of(chain_means));

        PsrfRow row;
        row.name = sample.columns[col];
        if (W == 0.0) {
            // constant chains: identical => 1, separated => divergent
            row.point = row.upper = B == 0.0 ? 1.0 : kInfinity;
        } else {
            const double r2_fixed = (L - 1.0) / L;
            const double r2_random = (1.0 + 1.0 / J) * B / (L * W);
            row.point = std::sqrt(r2_fixed + r2_random);
            const double var_s2 = var_of(chain_vars, W);
            const double df_w = var_s2 > 0.0 ? 2.0 * W * W / var_s2 : 1e6;
            const double q = f_quantile(0.975, J - 1.0, df_w);
            row.upper = std::sqrt(r2_fixed + q * r2_random);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<LatentSummaryRow> latent_time_summary(const PosteriorSample& sample, LatentKind kind,
                                                  long start, long thin) {
    std::vector<LatentSummaryRow> rows;
    const bool removal = kind == LatentKind::RemovalTimes;
    for (const ChainSample& chain : sample.chains) {
        const auto& store = removal ? chain.latent_rem : chain.latent_inf;
        if (store.empty())
            throw Error(ErrorCode::NotSampled, removal ? "removal times were not sampled in this fit"
                                                       : "infection times were not sampled in this fit");
    }

    const std::size_t m = sample.chains.front().latent_ids.size();
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<double> values;
        for (const ChainSample& chain : sample.chains) {
            const auto& store = removal ? chain.latent_rem : chain.latent_inf;
            for (std::size_t s = 0; s < chain.latent_iters.size(); ++s) {
                const long iter = chain.latent_iters[s];
                if (iter < start || (iter - start) % thin != 0) continue;
                values.push_back(store[s][k]);
            }
        }
        if (values.empty()) throw Error(ErrorCode::EmptyWindow, "no latent draws remain after windowing");
        LatentSummaryRow row;
        row.observed_index = static_cast<int>(k + 1);
        row.id = sample.chains.front().latent_ids[k];
        row.mean = mean_of(values);
        std::sort(values.begin(), values.end());
        row.q025 = quantile_sorted(values, 0.025);
        row.q975 = quantile_sorted(values, 0.975);
        rows.push_back(row);
    }
    return rows;
}

bool apply_draw_column(ParameterState& params, PeriodSet& periods, const std::string& name,
                       double value) {
    auto indexed = [&](const std::string& prefix, std::vector<double>& vec) -> bool {
        if (name.size() <= prefix.size() + 1 || name.compare(0, prefix.size(), prefix) != 0 ||
            name[prefix.size()] != '[' || name.back() != ']')
            return false;
        const int idx = std::stoi(name.substr(prefix.size() + 1, name.size() - prefix.size() - 2));
        if (idx < 1 || static_cast<std::size_t>(idx) > vec.size())
            throw Error(ErrorCode::DimensionMismatch,
                        "draw column '" + name + "' indexes past the model's parameter vector");
        vec[static_cast<std::size_t>(idx - 1)] = value;
        return true;
    };
    if (indexed("Alpha_s", params.sus_coeffs)) return true;
    if (indexed("Alpha_t", params.trans_coeffs)) return true;
    if (indexed("Phi_s", params.sus_powers)) return true;
    if (indexed("Phi_t", params.trans_powers)) return true;
    if (name == "Spatial parameter") {
        params.kernel.beta = value;
        return true;
    }
    if (name == "Network effect") {
        params.kernel.beta2 = value;
        return true;
    }
    if (name == "Spark") {
        params.spark = value;
        return true;
    }
    if (name == "Notification effect") {
        params.gamma = value;
        return true;
    }
    if (name == "Infectious period rate") {
        periods.infectious.rate = value;
        return true;
    }
    if (name == "Incubation period rate") {
        periods.incubation.rate = value;
        return true;
    }
    if (name == "Delay period rate") {
        periods.delay.rate = value;
        return true;
    }
    if (name == "Log-likelihood") return false;
    throw Error(ErrorCode::InvalidConfig, "unrecognized draw column '" + name + "'");
}

std::vector<EpidemicStats> posterior_predictive(const PosteriorSample& sample, const Model& model,
                                                const ParameterState& base,
                                                const PeriodSet& period_template,
                                                const EventHistory& observed,
                                                const PredictiveConfig& cfg, std::uint64_t seed) {
    if (cfg.n_rep < 1) throw Error(ErrorCode::InvalidConfig, "need at least one replicate");
    if (cfg.condition_prefix < 1 || cfg.condition_prefix > observed.infected_count())
        throw Error(ErrorCode::InvalidConfig,
                    "conditioning prefix must lie within the observed infected individuals");

    // pooled windowed draw rows
    std::vector<std::pair<std::size_t, std::size_t>> pool; // (chain, row)
    for (std::size_t c = 0; c < sample.chains.size(); ++c)
        for (std::size_t k : window_indices(sample.chains[c].draws.size(), cfg.start, cfg.thin))
            pool.emplace_back(c, k);
    if (pool.empty()) throw Error(ErrorCode::EmptyWindow, "no draws remain after windowing");

    std::vector<Record> prefix(observed.records.begin(),
                               observed.records.begin() + cfg.condition_prefix);

    std::vector<EpidemicStats> results(static_cast<std::size_t>(cfg.n_rep));
    auto run_rep = [&](long r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        const auto& [c, k] = pool[rng.uniform_int(pool.size())];
        ParameterState params = base;
        PeriodSet periods = period_template;
        for (std::size_t col = 0; col < sample.columns.size(); ++col)
            apply_draw_column(params, periods, sample.columns[col], sample.chains[c].draws[k][col]);
        SimConfig sim;
        sim.infectious = periods.infectious;
        sim.incubation = periods.incubation;
        sim.delay = periods.delay;
        sim.initial = prefix;
        sim.tmax = cfg.tmax;
        const EventHistory hist = simulate(model, params, sim, rng);
        results[static_cast<std::size_t>(r)] = epidemic_statistics(hist);
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned pool_size =
        std::min<unsigned>(cfg.workers > 0 ? static_cast<unsigned>(cfg.workers) : hw,
                           static_cast<unsigned>(cfg.n_rep));
    if (pool_size > 1) {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(pool_size);
        for (unsigned w = 0; w < pool_size; ++w) {
            threads.emplace_back([&, w]() {
                try {
                    for (long r = static_cast<long>(w); r < cfg.n_rep; r += static_cast<long>(pool_size))
                        run_rep(r);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (long r = 0; r < cfg.n_rep; ++r) run_rep(r);
    }
    return results;
}

} // namespace ctilm
