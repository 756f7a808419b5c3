#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ctilm/control.hpp"
#include "ctilm/likelihood.hpp"
#include "ctilm/mcmc.hpp"
#include "ctilm/networks.hpp"

namespace ctilm {

// One JSON config document drives simulate, loglik, fit, predict and
// control, so a whole study reproduces from the config plus a seed. The
// schema is validated strictly (unknown keys are rejected) before any file
// is loaded; see the README for the full key reference.
class Study {
public:
    static std::unique_ptr<Study> load(const std::string& config_path);

    Model model; // kernel points into the matrices owned below

    Locations locations;
    bool has_locations = false;
    Matrix distances;        // owned storage referenced by model.kernel
    ContactNetwork network;  // owned storage referenced by model.kernel

    ParameterState base;
    PeriodSet periods;
    bool has_periods = false;

    EventHistory observed;
    bool has_events = false;
    std::vector<Record> initial;

    double tmax = kInfinity;

    FitConfig fit;
    std::vector<ParamSpec> param_specs;
    bool has_fit = false;

    std::vector<double> control_grid;
    bool has_control = false;

    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string output;
    std::string config_text; // raw document, echoed into run metadata

    // per-command requirement checks (throw InvalidConfig)
    void require_simulation_inputs() const;
    void require_events(const char* command) const;
    void require_fit() const;

    Study() = default;
    Study(const Study&) = delete;
    Study& operator=(const Study&) = delete;
};

// Initial-record ingestion: event-history CSV rows for a subset of
// individuals (the datagen initialepi role); no permutation requirement.
std::vector<Record> read_initial_records(const std::string& path, Framework framework);

// Fit outputs: per-chain draw CSVs (iter plus one column per tracked
// quantity), thinned latent event-time CSVs, and metadata.json carrying the
// config echo, seeds, acceptance rates and wall time. The draw and latent
// files are byte-reproducible given config and seed; metadata records wall
// time and is not.
void write_fit_outputs(const std::string& dir, const PosteriorSample& sample,
                       const std::string& config_echo, std::uint64_t master_seed);

PosteriorSample read_draws_dir(const std::string& dir);

} // namespace ctilm
