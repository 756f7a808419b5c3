#include "ctilm/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "ctilm/errors.hpp"
#include "ctilm/stats.hpp"

namespace ctilm {

LikelihoodEvaluator::LikelihoodEvaluator(const Model& model) : model_(&model) {
    model.validate();
    if (model.kernel.network_only()) {
        // out_adj_[i]: targets j with w(i,j) != 0; in_adj_[j]: sources i with
        // w(i,j) != 0. They differ for directed networks.
        const Matrix& w = *model.kernel.network;
        out_adj_.resize(model.n);
        in_adj_.resize(model.n);
        for (std::size_t i = 0; i < model.n; ++i)
            for (std::size_t j = 0; j < model.n; ++j)
                if (i != j && w(i, j) != 0.0) {
                    out_adj_[i].emplace_back(static_cast<int>(j), w(i, j));
                    in_adj_[j].emplace_back(static_cast<int>(i), w(i, j));
                }
    }
}

void LikelihoodEvaluator::load_times(const EventHistory& history) const {
    const std::size_t n = model_->n;
    if (history.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "event history size does not match the population");
    if (history.framework != model_->framework)
        throw Error(ErrorCode::InvalidHistory, "event-history framework does not match the model");
    if (history.infected_count() < 1 || !history.records[0].infected())
        throw Error(ErrorCode::InvalidHistory, "likelihood needs at least one infected individual");
    inf_.assign(n, kInfinity);
    not_.assign(n, kInfinity);
    rem_.assign(n, kInfinity);
    for (const Record& r : history.records) {
        const std::size_t i = static_cast<std::size_t>(r.id - 1);
        inf_[i] = r.infection_time;
        not_[i] = r.notify_time;
        rem_[i] = r.removal_time;
    }
}

LikelihoodParts LikelihoodEvaluator::parts(const EventHistory& history,
                                           const ParameterState& params,
                                           const PeriodSet& periods) const {
    return model_->framework == Framework::SIR ? sir_parts(history, params, periods)
                                               : sinr_parts(history, params, periods);
}

LikelihoodParts LikelihoodEvaluator::sir_parts(const EventHistory& history,
                                               const ParameterState& params,
                                               const PeriodSet& periods) const {
    load_times(history);
    const std::size_t n = model_->n;
    const int m = history.infected_count();
    const double eps = params.spark;
    const double t_obs = history.t_obs();
    const double first_inf = history.records[0].infection_time;

    susceptibility_all(params, model_->sus_covariates, n, omega_s_);
    transmissibility_all(params, model_->trans_covariates, n, omega_t_);

    const bool sparse = model_->kernel.network_only();
    double event_part = 0.0;

    // infection-pressure product over j = 2..m: sources i with I_i < I_j <= R_i
    for (int s = 1; s < m; ++s) {
        const Record& rec = history.records[static_cast<std::size_t>(s)];
        const int j = rec.id - 1;
        const double Ij = rec.infection_time;
        double pressure = 0.0;
        if (sparse) {
            for (const auto& [i, w] : in_adj_[static_cast<std::size_t>(j)])
                if (inf_[i] < Ij && Ij <= rem_[i]) pressure += omega_t_[static_cast<std::size_t>(i)] * w;
            pressure *= omega_s_[static_cast<std::size_t>(j)];
        } else {
            for (int r = 0; r < m; ++r) {
                const int i = history.records[static_cast<std::size_t>(r)].id - 1;
                if (i == j) continue;
                if (inf_[i] < Ij && Ij <= rem_[i])
                    pressure += omega_t_[static_cast<std::size_t>(i)] *
                                model_->kernel.eval(params.kernel, i, j);
            }
            pressure *= omega_s_[static_cast<std::size_t>(j)];
        }
        const double factor = eps + pressure;
        if (!(factor > 0.0)) return {-kInfinity, 0.0};
        event_part += std::log(factor);
    }

    // exposure: sum_i sum_j ((R_i ^ I_j) - (I_i ^ I_j)) lambda_ij
    double exposure = 0.0;
    for (int r = 0; r < m; ++r) {
        const int i = history.records[static_cast<std::size_t>(r)].id - 1;
        const double Ii = inf_[i];
        const double Ri = rem_[i];
        const double oti = omega_t_[static_cast<std::size_t>(i)];
        if (sparse) {
            for (const auto& [j, w] : out_adj_[static_cast<std::size_t>(i)]) {
                const double window = std::min(Ri, inf_[j]) - std::min(Ii, inf_[j]);
                if (window > 0.0) exposure += window * omega_s_[static_cast<std::size_t>(j)] * oti * w;
            }
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                if (static_cast<int>(j) == i) continue;
                const double window = std::min(Ri, inf_[j]) - std::min(Ii, inf_[j]);
                if (window > 0.0)
                    exposure += window * omega_s_[j] * oti *
                                model_->kernel.eval(params.kernel, i, static_cast<int>(j));
            }
        }
    }
    event_part -= exposure;

    // spark exposure: eps * sum_i ((t_obs ^ I_i) - I_1)
    if (eps > 0.0) {
        double spark_time = 0.0;
        for (std::size_t i = 0; i < n; ++i) spark_time += std::min(t_obs, inf_[i]) - first_inf;
        event_part -= eps * spark_time;
    }

    LikelihoodParts out;
    out.event_part = event_part;
    if (periods.include_density) {
        for (int r = 0; r < m; ++r) {
            const Record& rec = history.records[static_cast<std::size_t>(r)];
            out.period_part += log_gamma_pdf(rec.removal_time - rec.infection_time,
                                             periods.infectious.shape, periods.infectious.rate);
        }
    }
    return out;
}

LikelihoodParts LikelihoodEvaluator::sinr_parts(const EventHistory& history,
                                                const ParameterState& params,
                                                const PeriodSet& periods) const {
    load_times(history);
    const std::size_t n = model_->n;
    const int m = history.infected_count();
    const double eps = params.spark;
    const double gamma = params.gamma;
    const double t_obs = history.t_obs();
    const double first_inf = history.records[0].infection_time;

    susceptibility_all(params, model_->sus_covariates, n, omega_s_);
    transmissibility_all(params, model_->trans_covariates, n, omega_t_);

    const bool sparse = model_->kernel.network_only();
    double event_part = 0.0;

    // pressure product: pre-notification sources at lambda-, post at lambda+
    for (int s = 1; s < m; ++s) {
        const Record& rec = history.records[static_cast<std::size_t>(s)];
        const int j = rec.id - 1;
        const double Ij = rec.infection_time;
        double pressure = 0.0;
        auto source_factor = [&](int i) -> double {
            if (inf_[i] < Ij && Ij <= not_[i]) return 1.0;
            if (not_[i] < Ij && Ij <= rem_[i]) return gamma;
            return 0.0;
        };
        if (sparse) {
            for (const auto& [i, w] : in_adj_[static_cast<std::size_t>(j)]) {
                const double f = source_factor(i);
                if (f != 0.0) pressure += f * omega_t_[static_cast<std::size_t>(i)] * w;
            }
            pressure *= omega_s_[static_cast<std::size_t>(j)];
        } else {
            for (int r = 0; r < m; ++r) {
                const int i = history.records[static_cast<std::size_t>(r)].id - 1;
                if (i == j) continue;
                const double f = source_factor(i);
                if (f != 0.0)
                    pressure += f * omega_t_[static_cast<std::size_t>(i)] *
                                model_->kernel.eval(params.kernel, i, j);
            }
            pressure *= omega_s_[static_cast<std::size_t>(j)];
        }
        const double factor = eps + pressure;
        if (!(factor > 0.0)) return {-kInfinity, 0.0};
        event_part += std::log(factor);
    }

    // exposure: lambda- over (I_i, t_obs ^ N_i) and lambda+ over (N_i, t_obs ^ R_i),
    // both truncated by I_j
    double exposure = 0.0;
    for (int r = 0; r < m; ++r) {
        const int i = history.records[static_cast<std::size_t>(r)].id - 1;
        const double Ii = inf_[i];
        const double Ni = not_[i];
        const double Ri = rem_[i];
        const double oti = omega_t_[static_cast<std::size_t>(i)];
        auto window_weight = [&](double Ij) {
            const double pre = std::min({t_obs, Ni, Ij}) - std::min(Ii, Ij);
            const double post = std::min({t_obs, Ri, Ij}) - std::min({t_obs, Ni, Ij});
            return (pre > 0.0 ? pre : 0.0) + gamma * (post > 0.0 ? post : 0.0);
        };
        if (sparse) {
            for (const auto& [j, w] : out_adj_[static_cast<std::size_t>(i)]) {
                const double ww = window_weight(inf_[j]);
                if (ww != 0.0) exposure += ww * omega_s_[static_cast<std::size_t>(j)] * oti * w;
            }
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                if (static_cast<int>(j) == i) continue;
                const double ww = window_weight(inf_[j]);
                if (ww != 0.0)
                    exposure += ww * omega_s_[j] * oti *
                                model_->kernel.eval(params.kernel, i, static_cast<int>(j));
            }
        }
    }
    event_part -= exposure;

    if (eps > 0.0) {
        double spark_time = 0.0;
        for (std::size_t i = 0; i < n; ++i) spark_time += std::min(t_obs, inf_[i]) - first_inf;
        event_part -= eps * spark_time;
    }

    LikelihoodParts out;
    out.event_part = event_part;
    if (periods.include_density) {
        for (int r = 0; r < m; ++r) {
            const Record& rec = history.records[static_cast<std::size_t>(r)];
            out.period_part += log_gamma_pdf(rec.notify_time - rec.infection_time,
                                             periods.incubation.shape, periods.incubation.rate);
            out.period_part += log_gamma_pdf(rec.removal_time - rec.notify_time,
                                             periods.delay.shape, periods.delay.rate);
        }
    }
    return out;
}

double log_likelihood_sir(const Model& model, const EventHistory& history,
                          const ParameterState& params, const PeriodSet& periods) {
    if (model.framework != Framework::SIR)
        throw Error(ErrorCode::InvalidHistory, "model framework is not SIR");
    return LikelihoodEvaluator(model).parts(history, params, periods).total();
}

double log_likelihood_sinr(const Model& model, const EventHistory& history,
                           const ParameterState& params, const PeriodSet& periods) {
    if (model.framework != Framework::SINR)
        throw Error(ErrorCode::InvalidHistory, "model framework is not SINR");
    return LikelihoodEvaluator(model).parts(history, params, periods).total();
}

double log_likelihood(const Model& model, const EventHistory& history,
                      const ParameterState& params, const PeriodSet& periods) {
    return LikelihoodEvaluator(model).parts(history, params, periods).total();
}

} // namespace ctilm
