#include "ctilm/control.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <thread>

#include "ctilm/errors.hpp"

namespace ctilm {

void ControlPolicy::validate() const {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "cull radius must be positive");
    if (time_grid.empty() || !(time_grid.front() > 0.0))
        throw Error(ErrorCode::InvalidConfig, "checkpoint grid must start after time 0");
    for (std::size_t k = 1; k < time_grid.size(); ++k)
        if (!(time_grid[k] > time_grid[k - 1]))
            throw Error(ErrorCode::InvalidConfig, "checkpoint grid must be strictly increasing");
}

std::vector<double> ControlPolicy::unit_grid(double t_end) {
    std::vector<double> grid;
    for (double t = 1.0; t <= t_end; t += 1.0) grid.push_back(t);
    return grid;
}

ControlOutcome ring_cull_run(const Model& model, const ParameterState& params,
                             const SimConfig& cfg, const Locations& loc,
                             const ControlPolicy& policy, Rng& rng) {
    policy.validate();
    model.validate();
    loc.validate();
    if (loc.size() != model.n)
        throw Error(ErrorCode::InconsistentDimensions, "locations do not match the population size");
    if (model.sus_covariates.empty())
        throw Error(ErrorCode::InvalidConfig,
                    "culling zeroes susceptibility covariates; the model must carry some");

    ControlOutcome outcome;
    if (params.spark > 0.0) {
        outcome.spark_warning = true;
        std::cerr << "warning: culling with a positive spark term; "
                     "culled individuals can still be infected\n";
    }

    // working copy so culls do not touch the caller's covariates
    Model work = model;
    std::vector<char> culled(model.n, 0);

    std::vector<Record> current = cfg.initial;
    if (current.empty())
        throw Error(ErrorCode::InvalidConfig, "ring-cull runs need explicit initial records");

    EventHistory hist;
    double prev = 0.0;
    for (double checkpoint : policy.time_grid) {
        SimConfig step = cfg;
        step.initial = current;
        step.tmax = checkpoint;
        hist = simulate(work, params, step, rng, prev);

        // cull around individuals newly infected in (prev, checkpoint]
        for (const Record& r : hist.records) {
            if (!(r.infection_time > prev && r.infection_time <= checkpoint)) continue;
            const std::size_t i = static_cast<std::size_t>(r.id - 1);
            for (const Record& other : hist.records) {
                if (other.infected()) continue;
                const std::size_t j = static_cast<std::size_t>(other.id - 1);
                const double dx = loc.x[i] - loc.x[j];
                const double dy = loc.y[i] - loc.y[j];
                if (std::sqrt(dx * dx + dy * dy) < policy.radius && !culled[j]) {
                    culled[j] = 1;
                    for (std::size_t k = 0; k < work.sus_covariates.rows(); ++k)
                        work.sus_covariates(k, j) = 0.0;
                }
            }
        }

        // carry everything infected so far into the next step
        current.clear();
        for (const Record& r : hist.records)
            if (r.infected() && r.infection_time <= checkpoint) current.push_back(r);
        prev = checkpoint;
    }

    outcome.n_infected = hist.infected_count();
    double min_inf = kInfinity, max_rem = -kInfinity;
    for (int k = 0; k < hist.infected_count(); ++k) {
        const Record& r = hist.records[static_cast<std::size_t>(k)];
        min_inf = std::min(min_inf, r.infection_time);
        max_rem = std::max(max_rem, r.removal_time);
    }
    outcome.epidemic_length = hist.infected_count() > 0 ? max_rem - min_inf : 0.0;
    for (std::size_t j = 0; j < model.n; ++j) {
        bool infected = false;
        for (const Record& r : hist.records)
            if (static_cast<std::size_t>(r.id - 1) == j && r.infected()) {
                infected = true;
                break;
            }
        if (culled[j] && !infected) ++outcome.n_culled;
    }
    return outcome;
}

std::vector<SweepRow> sweep(const Model& model, const ParameterState& params, const SimConfig& cfg,
                            const Locations& loc, std::span<const double> radii, int replicates,
                            const ControlPolicy& grid_template, std::uint64_t seed, int workers) {
    if (replicates < 1) throw Error(ErrorCode::InvalidConfig, "need at least one replicate");
    if (radii.empty()) throw Error(ErrorCode::InvalidConfig, "need at least one radius");

    const std::size_t cells = radii.size() * static_cast<std::size_t>(replicates);
    std::vector<ControlOutcome> outcomes(cells);

    auto run_cell = [&](std::size_t cell) {
        const std::size_t ri = cell / static_cast<std::size_t>(replicates);
        ControlPolicy policy = grid_template;
        policy.radius = radii[ri];
        Rng rng(derive_seed(seed, cell));
        outcomes[cell] = ring_cull_run(model, params, cfg, loc, policy, rng);
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned pool =
        std::min<unsigned>(workers > 0 ? static_cast<unsigned>(workers) : hw,
                           static_cast<unsigned>(cells));
    if (pool > 1) {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(pool);
        for (unsigned w = 0; w < pool; ++w) {
            threads.emplace_back([&, w]() {
                try {
                    for (std::size_t cell = w; cell < cells; cell += pool) run_cell(cell);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (std::size_t cell = 0; cell < cells; ++cell) run_cell(cell);
    }

    std::vector<SweepRow> rows;
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        auto stats = [&](auto getter) {
            double sum = 0.0;
            for (int r = 0; r < replicates; ++r)
                sum += getter(outcomes[ri * static_cast<std::size_t>(replicates) + static_cast<std::size_t>(r)]);
            const double mean = sum / replicates;
            double ss = 0.0;
            for (int r = 0; r < replicates; ++r) {
                const double d =
                    getter(outcomes[ri * static_cast<std::size_t>(replicates) + static_cast<std::size_t>(r)]) - mean;
                ss += d * d;
            }
            const double sd = replicates > 1 ? std::sqrt(ss / (replicates - 1)) : 0.0;
            return std::pair<double, double>(mean, sd);
        };
        SweepRow row;
        row.radius = radii[ri];
        std::tie(row.mean_infected, row.sd_infected) =
            stats([](const ControlOutcome& o) { return static_cast<double>(o.n_infected); });
        std::tie(row.mean_culled, row.sd_culled) =
            stats([](const ControlOutcome& o) { return static_cast<double>(o.n_culled); });
        std::tie(row.mean_length, row.sd_length) =
            stats([](const ControlOutcome& o) { return o.epidemic_length; });
        rows.push_back(row);
    }
    return rows;
}

} // namespace ctilm
