#include "ctilm/mcmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "ctilm/errors.hpp"
#include "ctilm/stats.hpp"

namespace ctilm {

const char* datatype_name(Datatype d) {
    switch (d) {
        case Datatype::KnownEpidemic: return "known-epidemic";
        case Datatype::KnownRemoval: return "known-removal";
        case Datatype::UnknownRemoval: return "unknown-removal";
    }
    return "?";
}

Datatype datatype_from_name(const std::string& name) {
    for (Datatype d : {Datatype::KnownEpidemic, Datatype::KnownRemoval, Datatype::UnknownRemoval})
        if (name == datatype_name(d)) return d;
    throw Error(ErrorCode::InvalidConfig, "unknown datatype '" + name + "'");
}

void Prior::validate() const {
    switch (family) {
        case PriorFamily::Gamma:
            if (!(a > 0.0) || !(b > 0.0))
                throw Error(ErrorCode::InvalidConfig, "gamma prior needs positive shape and rate");
            break;
        case PriorFamily::HalfNormal:
            if (!(b > 0.0))
                throw Error(ErrorCode::InvalidConfig, "half-normal prior needs positive variance");
            break;
        case PriorFamily::Uniform:
            if (!(a < b)) throw Error(ErrorCode::InvalidConfig, "uniform prior needs lower < upper");
            break;
    }
}

double Prior::log_density(double x) const {
    switch (family) {
        case PriorFamily::Gamma:
            return log_gamma_pdf(x, a, b);
        case PriorFamily::HalfNormal: {
            if (!(x >= 0.0)) return -kInfinity;
            const double d = x - a;
            return -0.5 * d * d / b;
        }
        case PriorFamily::Uniform:
            return (x >= a && x <= b) ? -std::log(b - a) : -kInfinity;
    }
    return -kInfinity;
}

double& param_ref(ParameterState& state, ParamTarget target, int index) {
    const std::size_t k = static_cast<std::size_t>(index);
    switch (target) {
        case ParamTarget::SusCoeff: return state.sus_coeffs.at(k);
        case ParamTarget::SusPower: return state.sus_powers.at(k);
        case ParamTarget::TransCoeff: return state.trans_coeffs.at(k);
        case ParamTarget::TransPower: return state.trans_powers.at(k);
        case ParamTarget::KernelBeta: return state.kernel.beta;
        case ParamTarget::KernelBeta2: return state.kernel.beta2;
        case ParamTarget::Spark: return state.spark;
        case ParamTarget::Gamma: return state.gamma;
    }
    throw Error(ErrorCode::InvalidConfig, "bad parameter target");
}

double gibbs_rate_update(Framework framework, const EventHistory& history, PeriodType period,
                         double shape, double prior_a, double prior_b, Rng& rng) {
    if (framework == Framework::SIR && period != PeriodType::Infectious)
        throw Error(ErrorCode::WrongDatatype, "SIR has only an infectious period");
    if (framework == Framework::SINR && period == PeriodType::Infectious)
        throw Error(ErrorCode::WrongDatatype, "SINR periods are incubation and delay");
    if (!(shape > 0.0) || !(prior_a > 0.0) || !(prior_b > 0.0))
        throw Error(ErrorCode::InvalidConfig, "gamma conditional needs positive parameters");

    const int m = history.infected_count();
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        const Record& r = history.records[static_cast<std::size_t>(k)];
        switch (period) {
            case PeriodType::Infectious: total += r.removal_time - r.infection_time; break;
            case PeriodType::Incubation: total += r.notify_time - r.infection_time; break;
            case PeriodType::Delay: total += r.removal_time - r.notify_time; break;
        }
    }
    return rng.gamma(static_cast<double>(m) * shape + prior_a, total + prior_b);
}

bool rw_mh_update(const LikelihoodEvaluator& loglik, const EventHistory& history,
                  ParameterState& params, LikelihoodParts& ll, const PeriodSet& periods,
                  const ParamSpec& spec, Rng& rng) {
    double& x = param_ref(params, spec.target, spec.index);
    const double old_value = x;
    const double proposal = rng.normal(old_value, std::sqrt(spec.proposal_var));

    const bool in_support = spec.allow_zero ? proposal >= 0.0 : proposal > 0.0;
    if (!in_support) return false;
    const double log_prior_new = spec.prior.log_density(proposal);
    if (log_prior_new == -kInfinity) return false;

    x = proposal;
    const LikelihoodParts prop_ll = loglik.parts(history, params, periods);
    if (prop_ll.event_part == -kInfinity) {
        x = old_value;
        return false;
    }
    const double log_ratio = (prop_ll.event_part - ll.event_part) +
                             (log_prior_new - spec.prior.log_density(old_value));
    if (log_ratio >= 0.0 || std::log(rng.uniform01_pos()) < log_ratio) {
        ll.event_part = prop_ll.event_part; // period part does not depend on theta
        return true;
    }
    x = old_value;
    return false;
}

bool independence_update_event_times(const LikelihoodEvaluator& loglik, EventHistory& history,
                                     LikelihoodParts& ll, const ParameterState& params,
                                     const PeriodSet& periods, const std::vector<int>& block_ids,
                                     const PeriodSpec& proposal_main,
                                     const PeriodSpec* proposal_delay, bool update_removal,
                                     Rng& rng) {
    EventHistory proposal = history;
    const bool sinr = history.framework == Framework::SINR;
    double log_q_correction = 0.0;

    for (int id : block_ids) {
        Record* rec = nullptr;
        for (Record& r : proposal.records)
            if (r.id == id) {
                rec = &r;
                break;
            }
        if (!rec || !rec->infected())
            throw Error(ErrorCode::InvalidHistory, "latent update targets a non-infected id");

        if (!sinr) {
            const double old_period = rec->removal_time - rec->infection_time;
            const double new_period = rng.gamma(proposal_main.shape, proposal_main.rate);
            rec->infection_time = rec->removal_time - new_period;
            log_q_correction += log_gamma_pdf(old_period, proposal_main.shape, proposal_main.rate) -
                                log_gamma_pdf(new_period, proposal_main.shape, proposal_main.rate);
        } else {
            const double old_inc = rec->notify_time - rec->infection_time;
            const double new_inc = rng.gamma(proposal_main.shape, proposal_main.rate);
            rec->infection_time = rec->notify_time - new_inc;
            log_q_correction += log_gamma_pdf(old_inc, proposal_main.shape, proposal_main.rate) -
                                log_gamma_pdf(new_inc, proposal_main.shape, proposal_main.rate);
            if (update_removal) {
                const PeriodSpec& pd = *proposal_delay;
                const double old_delay = rec->removal_time - rec->notify_time;
                const double new_delay = rng.gamma(pd.shape, pd.rate);
                rec->removal_time = rec->notify_time + new_delay;
                log_q_correction += log_gamma_pdf(old_delay, pd.shape, pd.rate) -
                                    log_gamma_pdf(new_delay, pd.shape, pd.rate);
            }
        }
    }

    proposal.sort_and_validate();
    const LikelihoodParts prop_ll = loglik.parts(proposal, params, periods);
    if (prop_ll.total() == -kInfinity) return false;

    const double log_ratio = (prop_ll.total() - ll.total()) + log_q_correction;
    if (log_ratio >= 0.0 || std::log(rng.uniform01_pos()) < log_ratio) {
        history = std::move(proposal);
        ll = prop_ll;
        return true;
    }
    return false;
}

namespace {

double resolve_init(const std::vector<double>& init, int chain_index, const char* what) {
    if (init.size() == 1) return init[0];
    if (chain_index < static_cast<int>(init.size())) return init[static_cast<std::size_t>(chain_index)];
    throw Error(ErrorCode::InvalidConfig,
                std::string(what) + " needs one initial value per chain (or a single shared value)");
}

void validate_fit(const Model& model, const EventHistory& observed,
                  const std::vector<ParamSpec>& specs, const ParameterState& base,
                  const FitConfig& fit) {
    model.validate();
    if (observed.size() != model.n)
        throw Error(ErrorCode::DimensionMismatch, "event history does not match the population size");
    if (observed.framework != model.framework)
        throw Error(ErrorCode::InvalidHistory, "event-history framework does not match the model");
    if (fit.nsim < 1) throw Error(ErrorCode::InvalidConfig, "nsim must be at least 1");
    if (fit.nchains < 1) throw Error(ErrorCode::InvalidConfig, "nchains must be at least 1");
    if (fit.first_known < 1) throw Error(ErrorCode::InvalidConfig, "first-known count must be at least 1");
    if (fit.block_size < 1) throw Error(ErrorCode::InvalidConfig, "block size must be at least 1");
    if (fit.latent_thin < 1) throw Error(ErrorCode::InvalidConfig, "latent thinning must be at least 1");
    if (fit.datatype == Datatype::UnknownRemoval && model.framework != Framework::SINR)
        throw Error(ErrorCode::InvalidConfig, "unknown-removal fits are only available for SINR models");

    if (fit.datatype == Datatype::KnownEpidemic) {
        if (fit.delta_infectious || fit.delta_incubation || fit.delta_delay)
            throw Error(ErrorCode::InvalidConfig,
                        "known-epidemic fits keep the periods fixed; remove the delta settings");
    } else if (model.framework == Framework::SIR) {
        if (!fit.delta_infectious)
            throw Error(ErrorCode::InvalidConfig, "SIR data-augmented fits need delta for the infectious period");
        if (fit.delta_incubation || fit.delta_delay)
            throw Error(ErrorCode::InvalidConfig, "SIR has only an infectious period");
    } else {
        if (!fit.delta_incubation || !fit.delta_delay)
            throw Error(ErrorCode::InvalidConfig,
                        "SINR data-augmented fits need delta for the incubation and delay periods");
        if (fit.delta_infectious)
            throw Error(ErrorCode::InvalidConfig, "SINR uses incubation and delay periods, not an infectious one");
    }
    for (const auto* d : {&fit.delta_infectious, &fit.delta_incubation, &fit.delta_delay}) {
        if (!*d) continue;
        const PeriodDelta& pd = **d;
        if (!(pd.shape > 0.0)) throw Error(ErrorCode::InvalidConfig, "period shape must be positive");
        if (!(pd.prior_a > 0.0) || !(pd.prior_b > 0.0))
            throw Error(ErrorCode::InvalidConfig, "period-rate prior needs positive parameters");
        if (pd.init.empty() ||
            (pd.init.size() != 1 && pd.init.size() != static_cast<std::size_t>(fit.nchains)))
            throw Error(ErrorCode::InvalidConfig, "period-rate initial values must be one or one per chain");
        for (double v : pd.init)
            if (!(v > 0.0)) throw Error(ErrorCode::InvalidConfig, "period-rate initial values must be positive");
    }

    if (!base.sus_coeffs.empty() && base.sus_coeffs.size() != model.sus_covariates.rows())
        throw Error(ErrorCode::DimensionMismatch, "susceptibility coefficients do not match covariate rows");
    if (base.sus_coeffs.empty() && !model.sus_covariates.empty())
        throw Error(ErrorCode::DimensionMismatch, "susceptibility covariates supplied without coefficients");
    if (!base.trans_coeffs.empty() && base.trans_coeffs.size() != model.trans_covariates.rows())
        throw Error(ErrorCode::DimensionMismatch, "transmissibility coefficients do not match covariate rows");
    if (base.trans_coeffs.empty() && !model.trans_covariates.empty())
        throw Error(ErrorCode::DimensionMismatch, "transmissibility covariates supplied without coefficients");

    std::vector<std::string> names;
    for (const ParamSpec& spec : specs) {
        spec.prior.validate();
        if (spec.name.empty()) throw Error(ErrorCode::InvalidConfig, "parameter without a name");
        if (std::find(names.begin(), names.end(), spec.name) != names.end())
            throw Error(ErrorCode::InvalidConfig, "duplicate parameter name '" + spec.name + "'");
        names.push_back(spec.name);
        if (!(spec.proposal_var >= 0.0) || !std::isfinite(spec.proposal_var))
            throw Error(ErrorCode::InvalidConfig, "proposal variance must be finite and nonnegative");
        if (spec.init.empty() ||
            (spec.init.size() != 1 && spec.init.size() != static_cast<std::size_t>(fit.nchains)))
            throw Error(ErrorCode::InvalidConfig,
                        "parameter '" + spec.name + "' needs one initial value or one per chain");
        auto check_index = [&](std::size_t bound, const char* what) {
            if (spec.index < 0 || static_cast<std::size_t>(spec.index) >= bound)
                throw Error(ErrorCode::InvalidConfig,
                            "parameter '" + spec.name + "' indexes past the " + what + " vector");
        };
        switch (spec.target) {
            case ParamTarget::SusCoeff: check_index(base.sus_coeffs.size(), "susceptibility"); break;
            case ParamTarget::SusPower: check_index(base.sus_powers.size(), "susceptibility-power"); break;
            case ParamTarget::TransCoeff: check_index(base.trans_coeffs.size(), "transmissibility"); break;
            case ParamTarget::TransPower: check_index(base.trans_powers.size(), "transmissibility-power"); break;
            case ParamTarget::KernelBeta:
            case ParamTarget::KernelBeta2:
                if (model.kernel.network_only())
                    throw Error(ErrorCode::InvalidConfig, "network kernels have no kernel parameter");
                if (spec.target == ParamTarget::KernelBeta2 && model.kernel.parameter_count() < 2)
                    throw Error(ErrorCode::InvalidConfig, "single-parameter kernel has no network effect");
                break;
            case ParamTarget::Spark: break;
            case ParamTarget::Gamma:
                if (model.framework != Framework::SINR)
                    throw Error(ErrorCode::InvalidConfig, "the notification effect exists only under SINR");
                break;
        }
    }
}

struct DeltaState {
    PeriodType type;
    std::string column;
    const PeriodDelta* spec;
    double rate; // current Gibbs-updated value
};

} // namespace

ChainSample run_chain(const Model& model, const EventHistory& observed,
                      const std::vector<ParamSpec>& param_specs, const ParameterState& base,
                      const FitConfig& fit, int chain_index, std::uint64_t chain_seed) {
    validate_fit(model, observed, param_specs, base, fit);
    const auto t_start = std::chrono::steady_clock::now();

    Rng rng(chain_seed);
    LikelihoodEvaluator loglik(model);

    ParameterState params = base;
    for (const ParamSpec& spec : param_specs)
        param_ref(params, spec.target, spec.index) = resolve_init(spec.init, chain_index, spec.name.c_str());

    const bool augmented = fit.datatype != Datatype::KnownEpidemic;
    const bool sinr = model.framework == Framework::SINR;

    std::vector<DeltaState> deltas;
    if (augmented) {
        if (!sinr) {
            deltas.push_back({PeriodType::Infectious, "Infectious period rate", &*fit.delta_infectious,
                              resolve_init(fit.delta_infectious->init, chain_index, "infectious rate")});
        } else {
            deltas.push_back({PeriodType::Incubation, "Incubation period rate", &*fit.delta_incubation,
                              resolve_init(fit.delta_incubation->init, chain_index, "incubation rate")});
            deltas.push_back({PeriodType::Delay, "Delay period rate", &*fit.delta_delay,
                              resolve_init(fit.delta_delay->init, chain_index, "delay rate")});
        }
    }

    auto current_periods = [&]() {
        PeriodSet p;
        p.include_density = augmented;
        for (const DeltaState& d : deltas) {
            PeriodSpec ps{d.spec->shape, d.rate};
            if (d.type == PeriodType::Infectious) p.infectious = ps;
            if (d.type == PeriodType::Incubation) p.incubation = ps;
            if (d.type == PeriodType::Delay) p.delay = ps;
        }
        return p;
    };
    PeriodSet periods = current_periods();

    // the first m0 infected individuals of the observed ordering keep their
    // event times; everyone after them is updatable
    const int m = observed.infected_count();
    std::vector<int> updatable;
    for (int k = fit.first_known; k < m; ++k)
        updatable.push_back(observed.records[static_cast<std::size_t>(k)].id);
    std::vector<int> latent_ids;
    for (int k = 0; k < m; ++k) latent_ids.push_back(observed.records[static_cast<std::size_t>(k)].id);

    // initial latent event times: periods drawn from the initial rates,
    // retried while the starting log-likelihood is degenerate
    EventHistory hist = observed;
    LikelihoodParts ll;
    bool feasible = false;
    const int max_attempts = augmented && !updatable.empty() ? 100 : 1;
    for (int attempt = 0; attempt < max_attempts && !feasible; ++attempt) {
        hist = observed;
        if (augmented) {
            for (Record& r : hist.records) {
                if (!r.infected()) continue;
                if (std::find(updatable.begin(), updatable.end(), r.id) == updatable.end()) continue;
                if (!sinr) {
                    r.infection_time = r.removal_time - rng.gamma(periods.infectious.shape, periods.infectious.rate);
                } else {
                    r.infection_time = r.notify_time - rng.gamma(periods.incubation.shape, periods.incubation.rate);
                    if (fit.datatype == Datatype::UnknownRemoval)
                        r.removal_time = r.notify_time + rng.gamma(periods.delay.shape, periods.delay.rate);
                }
            }
            hist.sort_and_validate();
        }
        ll = loglik.parts(hist, params, periods);
        feasible = ll.total() > -kInfinity;
    }
    if (!feasible)
        throw Error(ErrorCode::InitializationError,
                    "no feasible starting state found (log-likelihood stayed -inf)");

    ChainSample out;
    out.seed = chain_seed;
    for (const ParamSpec& spec : param_specs) out.columns.push_back(spec.name);
    for (const DeltaState& d : deltas) out.columns.push_back(d.column);
    out.columns.push_back("Log-likelihood");
    out.latent_ids = latent_ids;

    std::vector<long> accept_counts(param_specs.size(), 0);
    long latent_proposals = 0, latent_accepts = 0;

    auto record_row = [&]() {
        std::vector<double> row;
        row.reserve(out.columns.size());
        for (const ParamSpec& spec : param_specs)
            row.push_back(param_ref(params, spec.target, spec.index));
        for (const DeltaState& d : deltas) row.push_back(d.rate);
        row.push_back(ll.total());
        out.draws.push_back(std::move(row));
    };
    auto record_latent = [&](long iter) {
        if (!augmented) return;
        std::vector<double> inf_row, rem_row;
        inf_row.reserve(latent_ids.size());
        for (int id : latent_ids) {
            const Record& r = hist.record_of(id);
            inf_row.push_back(r.infection_time);
            if (fit.datatype == Datatype::UnknownRemoval) rem_row.push_back(r.removal_time);
        }
        out.latent_iters.push_back(iter);
        out.latent_inf.push_back(std::move(inf_row));
        if (fit.datatype == Datatype::UnknownRemoval) out.latent_rem.push_back(std::move(rem_row));
    };

    record_row();
    record_latent(0);

    std::vector<int> shuffled = updatable;
    for (long iter = 1; iter <= fit.nsim; ++iter) {
        // theta sweep: random-walk Metropolis per scalar
        for (std::size_t p = 0; p < param_specs.size(); ++p) {
            if (param_specs[p].proposal_var == 0.0) continue;
            if (rw_mh_update(loglik, hist, params, ll, periods, param_specs[p], rng))
                ++accept_counts[p];
        }

        if (augmented) {
            // Gibbs draws for the period rates, then refresh the density part
            for (DeltaState& d : deltas)
                d.rate = gibbs_rate_update(model.framework, hist, d.type, d.spec->shape,
                                           d.spec->prior_a, d.spec->prior_b, rng);
            periods = current_periods();
            ll.period_part = loglik.parts(hist, params, periods).period_part;

            // latent event times in random blocks
            if (!updatable.empty()) {
                for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
                    const std::size_t k = static_cast<std::size_t>(rng.uniform_int(i + 1));
                    std::swap(shuffled[i], shuffled[k]);
                }
                const PeriodSpec prop_main =
                    !sinr ? fit.proposal_infectious.value_or(periods.infectious)
                          : fit.proposal_incubation.value_or(periods.incubation);
                const PeriodSpec prop_delay = fit.proposal_delay.value_or(periods.delay);
                const bool update_removal = fit.datatype == Datatype::UnknownRemoval;
                std::vector<int> block;
                for (std::size_t pos = 0; pos < shuffled.size(); pos += fit.block_size) {
                    block.assign(shuffled.begin() + pos,
                                 shuffled.begin() +
                                     std::min(pos + fit.block_size, shuffled.size()));
                    ++latent_proposals;
                    if (independence_update_event_times(loglik, hist, ll, params, periods, block,
                                                        prop_main,
                                                        update_removal ? &prop_delay : nullptr,
                                                        update_removal, rng))
                        ++latent_accepts;
                }
            }
        }

        record_row();
        if (iter % fit.latent_thin == 0) record_latent(iter);

        if (fit.validate_each_iteration) {
            EventHistory check = hist;
            check.sort_and_validate();
            const LikelihoodParts fresh = loglik.parts(hist, params, periods);
            if (std::abs(fresh.total() - ll.total()) > 1e-10)
                throw Error(ErrorCode::InvalidHistory, "cached log-likelihood drifted from recomputation");
        }
    }

    for (std::size_t p = 0; p < param_specs.size(); ++p) {
        if (param_specs[p].proposal_var == 0.0) continue;
        out.accept_names.push_back(param_specs[p].name);
        out.accept_rates.push_back(static_cast<double>(accept_counts[p]) / static_cast<double>(fit.nsim));
    }
    if (augmented && !updatable.empty()) {
        out.accept_names.push_back("Event times");
        out.accept_rates.push_back(latent_proposals > 0
                                       ? static_cast<double>(latent_accepts) / static_cast<double>(latent_proposals)
                                       : 0.0);
    }
    out.latent_proposals = latent_proposals;
    out.latent_accepts = latent_accepts;
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

PosteriorSample run_chains(const Model& model, const EventHistory& observed,
                           const std::vector<ParamSpec>& param_specs, const ParameterState& base,
                           const FitConfig& fit, std::uint64_t master_seed) {
    validate_fit(model, observed, param_specs, base, fit);

    PosteriorSample out;
    out.chains.resize(static_cast<std::size_t>(fit.nchains));

    auto run_one = [&](int c) {
        out.chains[static_cast<std::size_t>(c)] =
            run_chain(model, observed, param_specs, base, fit, c, derive_seed(master_seed, static_cast<std::uint64_t>(c)));
    };

    if (fit.parallel && fit.nchains > 1) {
        const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        const unsigned requested = fit.workers > 0 ? static_cast<unsigned>(fit.workers) : hw;
        const unsigned pool = std::min(requested, static_cast<unsigned>(fit.nchains));
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(fit.nchains));
        for (unsigned w = 0; w < pool; ++w) {
            threads.emplace_back([&, w]() {
                for (int c = static_cast<int>(w); c < fit.nchains; c += static_cast<int>(pool)) {
                    try {
                        run_one(c);
                    } catch (...) {
                        errors[static_cast<std::size_t>(c)] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : threads) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (int c = 0; c < fit.nchains; ++c) run_one(c);
    }

    out.columns = out.chains.front().columns;
    return out;
}

} // namespace ctilm
