#include "ctilm/epidemic.hpp"

#include <algorithm>
#include <cmath>

#include "ctilm/errors.hpp"

namespace ctilm {

namespace {

void validate_periods(const Model& model, const SimConfig& cfg) {
    auto check = [](const PeriodSpec& p, const char* what) {
        if (!(p.shape > 0.0) || !(p.rate > 0.0))
            throw Error(ErrorCode::InvalidConfig, std::string(what) + " period needs positive shape and rate");
    };
    if (model.framework == Framework::SIR) {
        check(cfg.infectious, "infectious");
    } else {
        check(cfg.incubation, "incubation");
        check(cfg.delay, "delay");
    }
}

} // namespace

EventHistory simulate(const Model& model, const ParameterState& params, const SimConfig& cfg,
                      Rng& rng, double resume_time) {
    model.validate();
    validate_periods(model, cfg);
    const std::size_t n = model.n;

    std::vector<double> inf_t(n, kInfinity), not_t(n, kInfinity), rem_t(n, kInfinity);
    double t_cur;

    if (cfg.initial.empty()) {
        const int first = static_cast<int>(rng.uniform_int(n));
        inf_t[first] = 0.0;
        if (model.framework == Framework::SIR) {
            rem_t[first] = rng.gamma(cfg.infectious.shape, cfg.infectious.rate);
        } else {
            not_t[first] = rng.gamma(cfg.incubation.shape, cfg.incubation.rate);
            rem_t[first] = not_t[first] + rng.gamma(cfg.delay.shape, cfg.delay.rate);
        }
        t_cur = 0.0;
    } else {
        t_cur = -kInfinity;
        for (const Record& r : cfg.initial) {
            if (r.id < 1 || r.id > static_cast<int>(n))
                throw Error(ErrorCode::InconsistentDimensions, "initial record id outside 1..n");
            const std::size_t i = static_cast<std::size_t>(r.id - 1);
            if (inf_t[i] < kInfinity)
                throw Error(ErrorCode::DuplicateId, "duplicate initial record for id " + std::to_string(r.id));
            if (!r.infected())
                continue; // uninfected filler rows are allowed and ignored
            if (model.framework == Framework::SINR &&
                (r.notify_time < r.infection_time || r.removal_time < r.notify_time))
                throw Error(ErrorCode::OrderingViolation, "initial record violates I <= N <= R");
            if (model.framework == Framework::SIR && r.removal_time < r.infection_time)
                throw Error(ErrorCode::OrderingViolation, "initial record violates I <= R");
            inf_t[i] = r.infection_time;
            not_t[i] = r.notify_time;
            rem_t[i] = r.removal_time;
            t_cur = std::max(t_cur, r.infection_time);
        }
        if (t_cur == -kInfinity)
            throw Error(ErrorCode::NoInfected, "initial records contain no infected individual");
    }
    t_cur = std::max(t_cur, resume_time);

    // parameters are fixed for the whole run, so the pairwise rate factors
    // can be evaluated once up front
    std::vector<double> omega_s, omega_t;
    susceptibility_all(params, model.sus_covariates, n, omega_s);
    transmissibility_all(params, model.trans_covariates, n, omega_t);
    Matrix lambda0(n, n, 0.0); // lambda0(i,j) = Omega_S(j) Omega_T(i) kappa(i,j)
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            lambda0(i, j) = omega_s[j] * omega_t[i] *
                            model.kernel.eval(params.kernel, static_cast<int>(i), static_cast<int>(j));
        }

    std::vector<std::pair<std::size_t, double>> active; // infectious id index, gamma factor
    for (;;) {
        active.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (!(inf_t[i] <= t_cur && t_cur < rem_t[i])) continue;
            const bool notified = model.framework == Framework::SINR && t_cur >= not_t[i];
            active.emplace_back(i, notified ? params.gamma : 1.0);
        }
        // the epidemic ends once no infectives remain; the spark acts only
        // while the epidemic is alive
        if (active.empty()) break;

        // competing exponentials for every susceptible, ascending id
        double best_wait = kInfinity;
        int best_j = -1;
        bool any_susceptible = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (inf_t[j] < kInfinity) continue;
            any_susceptible = true;
            double rate = params.spark;
            for (const auto& [i, factor] : active) rate += factor * lambda0(i, j);
            if (rate > 0.0) {
                const double w = rng.exponential(rate);
                if (w < best_wait) {
                    best_wait = w;
                    best_j = static_cast<int>(j);
                }
            }
        }
        if (!any_susceptible) break;

        // next scheduled transition (notification or removal) after t_cur
        double next_transition = kInfinity;
        for (std::size_t i = 0; i < n; ++i) {
            if (inf_t[i] == kInfinity) continue;
            if (not_t[i] < kInfinity && not_t[i] > t_cur) next_transition = std::min(next_transition, not_t[i]);
            if (rem_t[i] > t_cur && rem_t[i] < kInfinity) next_transition = std::min(next_transition, rem_t[i]);
        }

        if (best_j < 0) {
            // all susceptible rates are zero; rates can only change at a
            // pending transition (the SINR notification effect may raise them)
            if (next_transition == kInfinity || next_transition > cfg.tmax) break;
            t_cur = next_transition;
            continue;
        }

        const double candidate = t_cur + best_wait;
        if (candidate > cfg.tmax) break;
        if (next_transition < candidate) {
            t_cur = next_transition;
            continue;
        }

        inf_t[best_j] = candidate;
        if (model.framework == Framework::SIR) {
            rem_t[best_j] = candidate + rng.gamma(cfg.infectious.shape, cfg.infectious.rate);
        } else {
            not_t[best_j] = candidate + rng.gamma(cfg.incubation.shape, cfg.incubation.rate);
            rem_t[best_j] = not_t[best_j] + rng.gamma(cfg.delay.shape, cfg.delay.rate);
        }
        t_cur = candidate;
    }

    EventHistory out;
    out.framework = model.framework;
    out.records.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Record& r = out.records[i];
        r.id = static_cast<int>(i + 1);
        r.infection_time = inf_t[i];
        r.notify_time = model.framework == Framework::SINR ? not_t[i] : kInfinity;
        r.removal_time = rem_t[i];
    }
    out.sort_and_validate();
    return out;
}

} // namespace ctilm
