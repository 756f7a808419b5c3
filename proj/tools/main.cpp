#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctilm/config.hpp"
#include "ctilm/csvio.hpp"
#include "ctilm/errors.hpp"
#include "ctilm/posterior.hpp"

namespace {

using namespace ctilm;

int default_workers() {
    if (const char* env = std::getenv("CTILM_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return 0; // resolved to the hardware thread count downstream
}

std::uint64_t resolve_seed(const Study& study, const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (study.has_seed) return study.seed;
    throw Error(ErrorCode::InvalidConfig, "a seed is required (config key 'seed' or --seed)");
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        values.push_back(parse_double(item));
    }
    if (values.empty()) throw Error(ErrorCode::InvalidConfig, "empty list '" + text + "'");
    return values;
}

void write_rows(const std::string& out_path, const std::string& header,
                const std::vector<std::string>& rows) {
    std::ostringstream text;
    text << header << '\n';
    for (const auto& r : rows) text << r << '\n';
    if (out_path.empty())
        std::cout << text.str();
    else
        write_text_file(out_path, text.str());
}

SimConfig sim_config_of(const Study& study) {
    SimConfig sim;
    sim.infectious = study.periods.infectious;
    sim.incubation = study.periods.incubation;
    sim.delay = study.periods.delay;
    sim.initial = study.initial;
    sim.tmax = study.tmax;
    return sim;
}

int cmd_net_gen(const std::string& model_name, const std::string& locations_file, long n,
                double beta, double nu, std::uint64_t seed, const std::string& out) {
    const NetworkModel model = network_model_from_name(model_name);
    Locations loc;
    const bool spatial = model != NetworkModel::Random;
    if (spatial) {
        if (locations_file.empty())
            throw Error(ErrorCode::MissingLocations, "spatial network models need --locations");
        loc = read_locations(locations_file);
    } else if (n < 2) {
        throw Error(ErrorCode::InvalidConfig, "the random model needs --n >= 2");
    }
    Rng rng(seed);
    const ContactNetwork net =
        generate_network(model, spatial ? &loc : nullptr, static_cast<std::size_t>(n), beta, nu, rng);
    write_edge_list(out, net);
    return 0;
}

int cmd_simulate(const std::string& config, const std::optional<std::uint64_t>& seed_flag,
                 const std::string& out) {
    auto study = Study::load(config);
    study->require_simulation_inputs();
    Rng rng(resolve_seed(*study, seed_flag));
    const EventHistory hist = simulate(study->model, study->base, sim_config_of(*study), rng);
    write_event_history(out, hist);
    return 0;
}

int cmd_loglik(const std::string& config, bool no_period_density) {
    auto study = Study::load(config);
    study->require_events("loglik");
    PeriodSet periods = study->periods;
    periods.include_density = study->has_periods && !no_period_density;
    const double value = log_likelihood(study->model, study->observed, study->base, periods);
    std::cout << format_double(value) << "\n";
    return 0;
}

int cmd_fit(const std::string& config, const std::optional<std::uint64_t>& seed_flag,
            std::string out_dir, int workers) {
    auto study = Study::load(config);
    study->require_events("fit");
    study->require_fit();
    if (out_dir.empty()) out_dir = study->output;
    if (out_dir.empty())
        throw Error(ErrorCode::InvalidConfig, "fit needs an output directory (--out or config key 'output')");
    const std::uint64_t seed = resolve_seed(*study, seed_flag);
    study->fit.workers = workers;
    const PosteriorSample sample =
        run_chains(study->model, study->observed, study->param_specs, study->base, study->fit, seed);
    write_fit_outputs(out_dir, sample, study->config_text, seed);
    return 0;
}

int cmd_summarize(const std::string& draws, long start, long thin, const std::string& out) {
    const PosteriorSample sample = read_draws_dir(draws);
    const SummaryTable table = summarize(sample, start, thin);
    std::vector<std::string> rows;
    for (const SummaryRow& r : table.rows) {
        std::ostringstream line;
        line << r.name << ',' << format_double(r.mean) << ',' << format_double(r.sd) << ','
             << format_double(r.naive_se) << ',' << format_double(r.ts_se) << ','
             << format_double(r.q025) << ',' << format_double(r.q25) << ',' << format_double(r.q50)
             << ',' << format_double(r.q75) << ',' << format_double(r.q975) << ',';
        if (r.accept_rate) line << format_double(*r.accept_rate);
        rows.push_back(line.str());
    }
    write_rows(out, "name,mean,sd,naive_se,ts_se,q2.5,q25,q50,q75,q97.5,accept_rate", rows);
    return 0;
}

int cmd_diag(const std::string& draws, long start, long thin, const std::string& out) {
    const PosteriorSample sample = read_draws_dir(draws);
    std::vector<std::string> rows;
    for (const PsrfRow& r : gelman_rubin(sample, start, thin))
        rows.push_back(r.name + ',' + format_double(r.point) + ',' + format_double(r.upper));
    write_rows(out, "name,psrf,upper_ci", rows);
    return 0;
}

int cmd_latent(const std::string& draws, const std::string& which, long start, long thin,
               const std::string& out) {
    const PosteriorSample sample = read_draws_dir(draws);
    const LatentKind kind =
        which == "removal" ? LatentKind::RemovalTimes : LatentKind::InfectionTimes;
    std::vector<std::string> rows;
    for (const LatentSummaryRow& r : latent_time_summary(sample, kind, start, thin)) {
        std::ostringstream line;
        line << r.observed_index << ',' << r.id << ',' << format_double(r.mean) << ','
             << format_double(r.q025) << ',' << format_double(r.q975);
        rows.push_back(line.str());
    }
    write_rows(out, "index,id,mean,q2.5,q97.5", rows);
    return 0;
}

int cmd_predict(const std::string& config, const std::string& draws, int prefix, long reps,
                const std::optional<std::uint64_t>& seed_flag, long start, long thin,
                const std::string& out, int workers) {
    auto study = Study::load(config);
    study->require_events("predict");
    study->require_simulation_inputs();
    const PosteriorSample sample = read_draws_dir(draws);
    PredictiveConfig cfg;
    cfg.condition_prefix = prefix;
    cfg.n_rep = reps;
    cfg.start = start;
    cfg.thin = thin;
    cfg.workers = workers;
    const auto stats = posterior_predictive(sample, study->model, study->base, study->periods,
                                            study->observed, cfg, resolve_seed(*study, seed_flag));
    std::vector<std::string> rows;
    for (std::size_t r = 0; r < stats.size(); ++r) {
        std::ostringstream line;
        line << r + 1 << ',' << stats[r].infected << ',' << format_double(stats[r].mean_removal)
             << ',' << format_double(stats[r].var_removal) << ',' << format_double(stats[r].length);
        rows.push_back(line.str());
    }
    write_rows(out, "rep,T1,T2,T3,T4", rows);
    return 0;
}

int cmd_control(const std::string& config, const std::string& radii_text, int reps,
                const std::optional<std::uint64_t>& seed_flag, const std::string& out, int workers) {
    auto study = Study::load(config);
    study->require_simulation_inputs();
    if (!study->has_locations)
        throw Error(ErrorCode::MissingLocations, "control needs files.locations for the ring test");
    if (study->initial.empty())
        throw Error(ErrorCode::InvalidConfig, "control needs files.initial with the seeding records");
    ControlPolicy policy;
    policy.time_grid = study->has_control ? study->control_grid : ControlPolicy::unit_grid(30.0);
    const std::vector<double> radii = parse_list(radii_text);
    const auto sweep_rows =
        sweep(study->model, study->base, sim_config_of(*study), study->locations, radii, reps,
              policy, resolve_seed(*study, seed_flag), workers);
    std::vector<std::string> rows;
    for (const SweepRow& r : sweep_rows) {
        std::ostringstream line;
        line << format_double(r.radius) << ',' << format_double(r.mean_infected) << ','
             << format_double(r.sd_infected) << ',' << format_double(r.mean_culled) << ','
             << format_double(r.sd_culled) << ',' << format_double(r.mean_length) << ','
             << format_double(r.sd_length);
        rows.push_back(line.str());
    }
    write_rows(out, "radius,mean_infected,sd_infected,mean_culled,sd_culled,mean_length,sd_length",
               rows);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuous-time individual-level epidemic models: simulation and Bayesian fitting"};
    app.require_subcommand(1);

    std::string config, out, draws, model_name, locations_file, radii_text, which = "infection";
    long n = 0, start = 0, thin = 1, reps = 1;
    int prefix = 1, workers = default_workers();
    double beta = 1.0, nu = 1.0;
    std::optional<std::uint64_t> seed_flag;
    bool no_period_density = false;

    auto add_seed = [&](CLI::App* cmd, bool required) {
        auto* opt = cmd->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t s) { seed_flag = s; }, "RNG seed");
        if (required) opt->required();
    };

    auto* net = app.add_subcommand("net-gen", "generate a contact network (edge-list CSV)");
    net->add_option("--model", model_name, "powerlaw | cauchy | random")->required();
    net->add_option("--locations", locations_file, "XY coordinates CSV (spatial models)");
    net->add_option("--n", n, "population size (random model)");
    net->add_option("--beta", beta, "spatial parameter / Bernoulli probability")->required();
    net->add_option("--nu", nu, "power-law scale parameter");
    add_seed(net, true);
    net->add_option("--out", out, "output edge-list file")->required();

    auto* sim = app.add_subcommand("simulate", "simulate an epidemic (event-history CSV)");
    sim->add_option("--config", config, "study config (JSON)")->required();
    add_seed(sim, false);
    sim->add_option("--out", out, "output event-history file")->required();

    auto* ll = app.add_subcommand("loglik", "log-likelihood of an event history");
    ll->add_option("--config", config, "study config (JSON)")->required();
    ll->add_flag("--no-period-density", no_period_density, "drop the period density terms");

    auto* fit = app.add_subcommand("fit", "data-augmented MCMC fit (draw CSVs + metadata)");
    fit->add_option("--config", config, "study config (JSON)")->required();
    add_seed(fit, false);
    fit->add_option("--out", out, "output directory (defaults to config key 'output')");
    fit->add_option("--workers", workers, "parallel chain workers (default: CTILM_WORKERS or cores)");

    auto* summ = app.add_subcommand("summarize", "posterior summary table");
    summ->add_option("--draws", draws, "fit output directory")->required();
    summ->add_option("--start", start, "burn-in: discard draws with iteration < start");
    summ->add_option("--thin", thin, "thinning interval");
    summ->add_option("--out", out, "output CSV (default: stdout)");

    auto* diag = app.add_subcommand("diag", "Gelman-Rubin diagnostics (needs >= 2 chains)");
    diag->add_option("--draws", draws, "fit output directory")->required();
    diag->add_option("--start", start, "burn-in");
    diag->add_option("--thin", thin, "thinning interval");
    diag->add_option("--out", out, "output CSV (default: stdout)");

    auto* latent = app.add_subcommand("latent", "latent event-time posterior summaries");
    latent->add_option("--draws", draws, "fit output directory")->required();
    latent->add_option("--which", which, "infection | removal");
    latent->add_option("--start", start, "burn-in");
    latent->add_option("--thin", thin, "thinning interval");
    latent->add_option("--out", out, "output CSV (default: stdout)");

    auto* pred = app.add_subcommand("predict", "posterior predictive statistics T1..T4");
    pred->add_option("--config", config, "study config (JSON)")->required();
    pred->add_option("--draws", draws, "fit output directory")->required();
    pred->add_option("--prefix", prefix, "condition on the first k infected individuals")->required();
    pred->add_option("--reps", reps, "number of predictive replicates")->required();
    add_seed(pred, false);
    pred->add_option("--start", start, "burn-in for the parameter draws");
    pred->add_option("--thin", thin, "thinning interval");
    pred->add_option("--out", out, "output CSV (default: stdout)");
    pred->add_option("--workers", workers, "parallel replicate workers");

    auto* ctl = app.add_subcommand("control", "ring-culling sweep over radii");
    ctl->add_option("--config", config, "study config (JSON)")->required();
    ctl->add_option("--radii", radii_text, "comma-separated cull radii")->required();
    ctl->add_option("--reps", reps, "replicates per radius")->required();
    add_seed(ctl, false);
    ctl->add_option("--out", out, "output CSV (default: stdout)");
    ctl->add_option("--workers", workers, "parallel replicate workers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (net->parsed())
            return cmd_net_gen(model_name, locations_file, n, beta, nu, *seed_flag, out);
        if (sim->parsed()) return cmd_simulate(config, seed_flag, out);
        if (ll->parsed()) return cmd_loglik(config, no_period_density);
        if (fit->parsed()) return cmd_fit(config, seed_flag, out, workers);
        if (summ->parsed()) return cmd_summarize(draws, start, thin, out);
        if (diag->parsed()) return cmd_diag(draws, start, thin, out);
        if (latent->parsed()) return cmd_latent(draws, which, start, thin, out);
        if (pred->parsed())
            return cmd_predict(config, draws, prefix, reps, seed_flag, start, thin, out, workers);
        if (ctl->parsed()) return cmd_control(config, radii_text, static_cast<int>(reps), seed_flag, out, workers);
    } catch (const ctilm::Error& e) {
        std::cerr << "error[" << error_code_name(e.code()) << "]: " << e.message() << "\n";
        return e.runtime_numeric() ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error[Internal]: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
