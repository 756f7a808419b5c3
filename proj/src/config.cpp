#include "ctilm/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ctilm/csvio.hpp"
#include "ctilm/errors.hpp"

namespace ctilm {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, where + " must be an object");
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw Error(ErrorCode::InvalidConfig, "unknown key '" + it.key() + "' in " + where);
    }
}

double as_double(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "Inf") return kInfinity;
        if (s == "-Inf") return -kInfinity;
    }
    throw Error(ErrorCode::InvalidConfig, where + " must be a number");
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw Error(ErrorCode::InvalidConfig, where + " must be a string");
    return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) throw Error(ErrorCode::InvalidConfig, where + " must be a boolean");
    return j.get<bool>();
}

long as_long(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw Error(ErrorCode::InvalidConfig, where + " must be an integer");
    return j.get<long>();
}

std::vector<double> as_double_vector(const json& j, const std::string& where) {
    if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, where + " must be an array");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k)
        out.push_back(as_double(j[k], where + "[" + std::to_string(k) + "]"));
    return out;
}

PriorFamily prior_family_from_name(const std::string& name) {
    if (name == "gamma") return PriorFamily::Gamma;
    if (name == "halfnormal") return PriorFamily::HalfNormal;
    if (name == "uniform") return PriorFamily::Uniform;
    throw Error(ErrorCode::InvalidConfig, "unknown prior family '" + name + "'");
}

ParamSpec parse_param_spec(const json& j, const std::string& where) {
    require_object(j, where);
    reject_unknown_keys(j, where, {"family", "pars", "init", "proposal_var"});
    for (const char* k : {"family", "pars", "init", "proposal_var"})
        if (!j.contains(k))
            throw Error(ErrorCode::InvalidConfig, where + " needs key '" + std::string(k) + "'");
    ParamSpec spec;
    spec.prior.family = prior_family_from_name(as_string(j["family"], where + ".family"));
    const auto pars = as_double_vector(j["pars"], where + ".pars");
    if (pars.size() != 2) throw Error(ErrorCode::InvalidConfig, where + ".pars needs two entries");
    spec.prior.a = pars[0];
    spec.prior.b = pars[1];
    spec.init = as_double_vector(j["init"], where + ".init");
    spec.proposal_var = as_double(j["proposal_var"], where + ".proposal_var");
    return spec;
}

PeriodSpec parse_period_spec(const json& j, const std::string& where) {
    require_object(j, where);
    reject_unknown_keys(j, where, {"shape", "rate"});
    if (!j.contains("shape") || !j.contains("rate"))
        throw Error(ErrorCode::InvalidConfig, where + " needs shape and rate");
    return {as_double(j["shape"], where + ".shape"), as_double(j["rate"], where + ".rate")};
}

PeriodDelta parse_period_delta(const json& j, const std::string& where) {
    require_object(j, where);
    reject_unknown_keys(j, where, {"shape", "init", "prior"});
    for (const char* k : {"shape", "init", "prior"})
        if (!j.contains(k))
            throw Error(ErrorCode::InvalidConfig, where + " needs key '" + std::string(k) + "'");
    PeriodDelta delta;
    delta.shape = as_double(j["shape"], where + ".shape");
    delta.init = as_double_vector(j["init"], where + ".init");
    const auto prior = as_double_vector(j["prior"], where + ".prior");
    if (prior.size() != 2) throw Error(ErrorCode::InvalidConfig, where + ".prior needs two entries");
    delta.prior_a = prior[0];
    delta.prior_b = prior[1];
    return delta;
}

// resolves a path in the config relative to the config file's directory
std::string resolve_path(const std::string& base_dir, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_dir) / p).string();
}

} // namespace

std::vector<Record> read_initial_records(const std::string& path, Framework framework) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::Io, "empty initial-records file");
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    const std::string sir_header = "id,rem.time,inf.period,inf.time";
    const std::string sinr_header = "id,rem.time,delay.period,not.time,inc.period,inf.time";
    const std::string& expected = framework == Framework::SIR ? sir_header : sinr_header;
    if (line != expected)
        throw Error(ErrorCode::Io, "initial-records header must be '" + expected + "'");
    std::vector<Record> records;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != (framework == Framework::SIR ? 4u : 6u))
            throw Error(ErrorCode::Io, "initial-records row has wrong field count");
        Record r;
        r.id = static_cast<int>(parse_double(fields[0]));
        r.removal_time = parse_double(fields[1]);
        if (framework == Framework::SIR) {
            r.infection_time = parse_double(fields[3]);
        } else {
            r.notify_time = parse_double(fields[3]);
            r.infection_time = parse_double(fields[5]);
        }
        records.push_back(r);
    }
    return records;
}

std::unique_ptr<Study> Study::load(const std::string& config_path) {
    auto study = std::make_unique<Study>();
    study->config_text = read_text_file(config_path);

    json doc;
    try {
        doc = json::parse(study->config_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
    }
    require_object(doc, "config");
    reject_unknown_keys(doc, "config",
                        {"framework", "population", "kernel", "files", "parameters", "periods",
                         "simulate", "fit", "control", "seed", "output"});

    // ---- schema validation happens fully before any data file is read ----
    if (!doc.contains("framework"))
        throw Error(ErrorCode::InvalidConfig, "config needs key 'framework'");
    const std::string fw = as_string(doc["framework"], "framework");
    if (fw != "SIR" && fw != "SINR")
        throw Error(ErrorCode::InvalidConfig, "framework must be SIR or SINR");
    study->model.framework = fw == "SIR" ? Framework::SIR : Framework::SINR;

    if (!doc.contains("kernel")) throw Error(ErrorCode::InvalidConfig, "config needs key 'kernel'");
    study->model.kernel.kind = kernel_kind_from_name(as_string(doc["kernel"], "kernel"));

    std::string loc_file, dist_file, net_file, sus_file, trans_file, events_file, initial_file;
    if (doc.contains("files")) {
        const json& files = doc["files"];
        require_object(files, "files");
        reject_unknown_keys(files, "files",
                            {"locations", "distances", "network", "sus_covariates",
                             "trans_covariates", "events", "initial"});
        const std::string dir = fs::path(config_path).parent_path().string();
        auto path_of = [&](const char* key) -> std::string {
            if (!files.contains(key)) return {};
            return resolve_path(dir, as_string(files[key], std::string("files.") + key));
        };
        loc_file = path_of("locations");
        dist_file = path_of("distances");
        net_file = path_of("network");
        sus_file = path_of("sus_covariates");
        trans_file = path_of("trans_covariates");
        events_file = path_of("events");
        initial_file = path_of("initial");
    }

    if (doc.contains("parameters")) {
        const json& pars = doc["parameters"];
        require_object(pars, "parameters");
        reject_unknown_keys(pars, "parameters",
                            {"sus_coeffs", "sus_powers", "trans_coeffs", "trans_powers",
                             "kernel_beta", "kernel_beta2", "spark", "gamma"});
        if (pars.contains("sus_coeffs"))
            study->base.sus_coeffs = as_double_vector(pars["sus_coeffs"], "parameters.sus_coeffs");
        if (pars.contains("sus_powers"))
            study->base.sus_powers = as_double_vector(pars["sus_powers"], "parameters.sus_powers");
        if (pars.contains("trans_coeffs"))
            study->base.trans_coeffs = as_double_vector(pars["trans_coeffs"], "parameters.trans_coeffs");
        if (pars.contains("trans_powers"))
            study->base.trans_powers = as_double_vector(pars["trans_powers"], "parameters.trans_powers");
        if (pars.contains("kernel_beta"))
            study->base.kernel.beta = as_double(pars["kernel_beta"], "parameters.kernel_beta");
        if (pars.contains("kernel_beta2"))
            study->base.kernel.beta2 = as_double(pars["kernel_beta2"], "parameters.kernel_beta2");
        if (pars.contains("spark")) study->base.spark = as_double(pars["spark"], "parameters.spark");
        if (pars.contains("gamma")) study->base.gamma = as_double(pars["gamma"], "parameters.gamma");
    }

    if (doc.contains("periods")) {
        const json& p = doc["periods"];
        require_object(p, "periods");
        reject_unknown_keys(p, "periods", {"infectious", "incubation", "delay"});
        if (p.contains("infectious"))
            study->periods.infectious = parse_period_spec(p["infectious"], "periods.infectious");
        if (p.contains("incubation"))
            study->periods.incubation = parse_period_spec(p["incubation"], "periods.incubation");
        if (p.contains("delay")) study->periods.delay = parse_period_spec(p["delay"], "periods.delay");
        study->has_periods = true;
    }

    if (doc.contains("simulate")) {
        const json& s = doc["simulate"];
        require_object(s, "simulate");
        reject_unknown_keys(s, "simulate", {"tmax"});
        if (s.contains("tmax")) study->tmax = as_double(s["tmax"], "simulate.tmax");
    }

    if (doc.contains("fit")) {
        study->has_fit = true;
        const json& f = doc["fit"];
        require_object(f, "fit");
        reject_unknown_keys(f, "fit",
                            {"datatype", "nsim", "nchains", "parallel", "block", "latent_thin",
                             "priors", "delta", "period_proposal"});
        for (const char* k : {"datatype", "nsim", "priors"})
            if (!f.contains(k))
                throw Error(ErrorCode::InvalidConfig, "fit needs key '" + std::string(k) + "'");
        study->fit.datatype = datatype_from_name(as_string(f["datatype"], "fit.datatype"));
        study->fit.nsim = as_long(f["nsim"], "fit.nsim");
        if (f.contains("nchains"))
            study->fit.nchains = static_cast<int>(as_long(f["nchains"], "fit.nchains"));
        if (f.contains("parallel")) study->fit.parallel = as_bool(f["parallel"], "fit.parallel");
        if (f.contains("latent_thin"))
            study->fit.latent_thin = static_cast<int>(as_long(f["latent_thin"], "fit.latent_thin"));
        if (f.contains("block")) {
            const json& b = f["block"];
            require_object(b, "fit.block");
            reject_unknown_keys(b, "fit.block", {"first_known", "size"});
            if (b.contains("first_known"))
                study->fit.first_known = static_cast<int>(as_long(b["first_known"], "fit.block.first_known"));
            if (b.contains("size"))
                study->fit.block_size = static_cast<int>(as_long(b["size"], "fit.block.size"));
        }
        if (f.contains("delta")) {
            const json& d = f["delta"];
            require_object(d, "fit.delta");
            reject_unknown_keys(d, "fit.delta", {"infectious", "incubation", "delay"});
            if (d.contains("infectious"))
                study->fit.delta_infectious = parse_period_delta(d["infectious"], "fit.delta.infectious");
            if (d.contains("incubation"))
                study->fit.delta_incubation = parse_period_delta(d["incubation"], "fit.delta.incubation");
            if (d.contains("delay"))
                study->fit.delta_delay = parse_period_delta(d["delay"], "fit.delta.delay");
        }
        if (f.contains("period_proposal")) {
            const json& pp = f["period_proposal"];
            require_object(pp, "fit.period_proposal");
            reject_unknown_keys(pp, "fit.period_proposal", {"infectious", "incubation", "delay"});
            auto parse_pp = [&](const char* key) -> std::optional<PeriodSpec> {
                if (!pp.contains(key)) return std::nullopt;
                const auto v = as_double_vector(pp[key], std::string("fit.period_proposal.") + key);
                if (v.size() != 2)
                    throw Error(ErrorCode::InvalidConfig, "period proposal needs [shape, rate]");
                return PeriodSpec{v[0], v[1]};
            };
            study->fit.proposal_infectious = parse_pp("infectious");
            study->fit.proposal_incubation = parse_pp("incubation");
            study->fit.proposal_delay = parse_pp("delay");
        }

        const json& priors = f["priors"];
        require_object(priors, "fit.priors");
        reject_unknown_keys(priors, "fit.priors",
                            {"sus_coeffs", "sus_powers", "trans_coeffs", "trans_powers", "kernel",
                             "spark", "gamma"});
        auto parse_vector_specs = [&](const char* key, ParamTarget target, const char* name_prefix,
                                      std::vector<double>& base_vec) {
            if (!priors.contains(key)) return;
            const json& arr = priors[key];
            if (!arr.is_array())
                throw Error(ErrorCode::InvalidConfig, std::string("fit.priors.") + key + " must be an array");
            if (base_vec.empty()) base_vec.assign(arr.size(), 1.0);
            if (arr.size() != base_vec.size())
                throw Error(ErrorCode::InvalidConfig,
                            std::string("fit.priors.") + key + " does not match parameters." + key);
            for (std::size_t k = 0; k < arr.size(); ++k) {
                ParamSpec spec = parse_param_spec(arr[k], std::string("fit.priors.") + key + "[" +
                                                              std::to_string(k) + "]");
                spec.target = target;
                spec.index = static_cast<int>(k);
                spec.name = std::string(name_prefix) + "[" + std::to_string(k + 1) + "]";
                study->param_specs.push_back(std::move(spec));
            }
        };
        parse_vector_specs("sus_coeffs", ParamTarget::SusCoeff, "Alpha_s", study->base.sus_coeffs);
        parse_vector_specs("sus_powers", ParamTarget::SusPower, "Phi_s", study->base.sus_powers);
        parse_vector_specs("trans_coeffs", ParamTarget::TransCoeff, "Alpha_t", study->base.trans_coeffs);
        parse_vector_specs("trans_powers", ParamTarget::TransPower, "Phi_t", study->base.trans_powers);
        if (priors.contains("kernel")) {
            const json& arr = priors["kernel"];
            if (!arr.is_array())
                throw Error(ErrorCode::InvalidConfig, "fit.priors.kernel must be an array");
            const int expected = study->model.kernel.parameter_count();
            if (static_cast<int>(arr.size()) > expected)
                throw Error(ErrorCode::InvalidConfig,
                            "fit.priors.kernel has more entries than the kernel has parameters");
            for (std::size_t k = 0; k < arr.size(); ++k) {
                ParamSpec spec =
                    parse_param_spec(arr[k], "fit.priors.kernel[" + std::to_string(k) + "]");
                spec.target = k == 0 ? ParamTarget::KernelBeta : ParamTarget::KernelBeta2;
                spec.index = 0;
                spec.name = k == 0 ? "Spatial parameter" : "Network effect";
                study->param_specs.push_back(std::move(spec));
            }
        }
        if (priors.contains("spark")) {
            ParamSpec spec = parse_param_spec(priors["spark"], "fit.priors.spark");
            spec.target = ParamTarget::Spark;
            spec.name = "Spark";
            spec.allow_zero = true;
            study->param_specs.push_back(std::move(spec));
        }
        if (priors.contains("gamma")) {
            ParamSpec spec = parse_param_spec(priors["gamma"], "fit.priors.gamma");
            spec.target = ParamTarget::Gamma;
            spec.name = "Notification effect";
            study->param_specs.push_back(std::move(spec));
        }
    }

    if (doc.contains("control")) {
        study->has_control = true;
        const json& c = doc["control"];
        require_object(c, "control");
        reject_unknown_keys(c, "control", {"grid", "t_end", "time_step"});
        if (c.contains("grid")) {
            study->control_grid = as_double_vector(c["grid"], "control.grid");
        } else {
            const double t_end = c.contains("t_end") ? as_double(c["t_end"], "control.t_end") : 30.0;
            const double step =
                c.contains("time_step") ? as_double(c["time_step"], "control.time_step") : 1.0;
            if (!(step > 0.0) || !(t_end >= step))
                throw Error(ErrorCode::InvalidConfig, "control grid needs 0 < time_step <= t_end");
            for (double t = step; t <= t_end + 1e-12; t += step) study->control_grid.push_back(t);
        }
    }

    if (doc.contains("seed")) {
        study->seed = static_cast<std::uint64_t>(as_long(doc["seed"], "seed"));
        study->has_seed = true;
    }
    if (doc.contains("output")) study->output = as_string(doc["output"], "output");

    std::size_t population = 0;
    if (doc.contains("population")) {
        const long n = as_long(doc["population"], "population");
        if (n < 1) throw Error(ErrorCode::InvalidConfig, "population must be positive");
        population = static_cast<std::size_t>(n);
    }

    // ---- load the data files ----
    if (!loc_file.empty()) {
        study->locations = read_locations(loc_file);
        study->has_locations = true;
        if (population == 0) population = study->locations.size();
        if (population != study->locations.size())
            throw Error(ErrorCode::InconsistentDimensions, "population does not match the locations file");
    }
    if (!dist_file.empty()) {
        study->distances = read_dense_matrix(dist_file);
        if (!study->distances.square() || !study->distances.symmetric(1e-12) ||
            !study->distances.zero_diagonal() || !study->distances.nonnegative())
            throw Error(ErrorCode::InconsistentDimensions,
                        "distance matrix must be square, symmetric, nonnegative with zero diagonal");
        if (population == 0) population = study->distances.rows();
    } else if (study->has_locations && study->model.kernel.needs_distances()) {
        study->distances = euclidean_distances(study->locations);
    }
    if (!net_file.empty()) {
        // peek the first line: an edge list starts with the from,to,weight header
        std::ifstream probe(net_file);
        if (!probe) throw Error(ErrorCode::Io, "cannot open '" + net_file + "'");
        std::string first_line;
        std::getline(probe, first_line);
        while (!first_line.empty() && (first_line.back() == '\r' || first_line.back() == '\n'))
            first_line.pop_back();
        if (first_line == "from,to,weight") {
            if (population == 0)
                throw Error(ErrorCode::InvalidConfig,
                            "edge-list networks need the population size (or a locations file)");
            study->network = read_edge_list(net_file, population);
        } else {
            Matrix w = read_dense_matrix(net_file);
            study->network.weights = std::move(w);
            study->network.kind = classify_network(study->network.weights);
            study->network.validate();
            if (population == 0) population = study->network.weights.rows();
        }
    }
    if (population == 0)
        throw Error(ErrorCode::InvalidConfig,
                    "population size is required (key 'population', a locations file, or a matrix file)");
    study->model.n = population;

    if (!study->distances.empty()) study->model.kernel.distances = &study->distances;
    if (!study->network.weights.empty()) study->model.kernel.network = &study->network.weights;

    auto load_covariates = [&](const std::string& path, std::vector<double>& coeffs,
                               std::vector<double>& powers, Matrix& target, const char* side) {
        if (!path.empty()) {
            // row-per-individual on disk, transposed to column-per-individual
            Matrix raw = read_dense_matrix(path);
            if (raw.rows() != population)
                throw Error(ErrorCode::InconsistentDimensions,
                            std::string(side) + " covariate file must have one row per individual");
            target = Matrix(raw.cols(), raw.rows());
            for (std::size_t i = 0; i < raw.rows(); ++i)
                for (std::size_t k = 0; k < raw.cols(); ++k) target(k, i) = raw(i, k);
        } else if (coeffs.size() == 1) {
            // single coefficient without a file: implicit intercept column
            target = Matrix(1, population, 1.0);
        } else if (!coeffs.empty()) {
            throw Error(ErrorCode::InvalidConfig,
                        std::string(side) + " coefficients need a covariate file (only a single "
                                            "intercept coefficient can omit it)");
        }
        if (!target.empty() && coeffs.empty())
            throw Error(ErrorCode::InvalidConfig,
                        std::string(side) + " covariates supplied without coefficients or priors");
        if (!powers.empty() && powers.size() != coeffs.size())
            throw Error(ErrorCode::InvalidConfig,
                        std::string(side) + " powers must match the coefficient count");
        if (powers.empty() && !coeffs.empty()) powers.assign(coeffs.size(), 1.0);
    };
    load_covariates(sus_file, study->base.sus_coeffs, study->base.sus_powers,
                    study->model.sus_covariates, "susceptibility");
    load_covariates(trans_file, study->base.trans_coeffs, study->base.trans_powers,
                    study->model.trans_covariates, "transmissibility");

    study->model.validate();

    if (!events_file.empty()) {
        study->observed = read_event_history(events_file);
        study->has_events = true;
        if (study->observed.size() != population)
            throw Error(ErrorCode::InconsistentDimensions, "event history does not match the population size");
        if (study->observed.framework != study->model.framework)
            throw Error(ErrorCode::InvalidConfig, "event-history framework does not match the config");
    }
    if (!initial_file.empty())
        study->initial = read_initial_records(initial_file, study->model.framework);

    return study;
}

void Study::require_simulation_inputs() const {
    if (!has_periods)
        throw Error(ErrorCode::InvalidConfig, "simulation needs the 'periods' block");
    if (model.framework == Framework::SIR) {
        if (!(periods.infectious.shape > 0.0) || !(periods.infectious.rate > 0.0))
            throw Error(ErrorCode::InvalidConfig, "periods.infectious needs positive shape and rate");
    } else {
        if (!(periods.incubation.shape > 0.0) || !(periods.incubation.rate > 0.0) ||
            !(periods.delay.shape > 0.0) || !(periods.delay.rate > 0.0))
            throw Error(ErrorCode::InvalidConfig,
                        "periods.incubation and periods.delay need positive shape and rate");
    }
}

void Study::require_events(const char* command) const {
    if (!has_events)
        throw Error(ErrorCode::InvalidConfig,
                    std::string(command) + " needs files.events in the config");
}

void Study::require_fit() const {
    if (!has_fit) throw Error(ErrorCode::InvalidConfig, "this command needs the 'fit' block");
}

namespace {

std::string draws_path(const std::string& dir, int chain) {
    return (fs::path(dir) / ("chain" + std::to_string(chain) + ".csv")).string();
}
std::string latent_path(const std::string& dir, int chain, bool removal) {
    return (fs::path(dir) /
            ("chain" + std::to_string(chain) + (removal ? "_rem_times.csv" : "_inf_times.csv")))
        .string();
}

} // namespace

void write_fit_outputs(const std::string& dir, const PosteriorSample& sample,
                       const std::string& config_echo, std::uint64_t master_seed) {
    fs::create_directories(dir);
    for (std::size_t c = 0; c < sample.chains.size(); ++c) {
        const ChainSample& chain = sample.chains[c];
        {
            std::ofstream out(draws_path(dir, static_cast<int>(c) + 1));
            if (!out) throw Error(ErrorCode::Io, "cannot write draw file");
            out << "iter";
            for (const auto& name : chain.columns) out << ',' << name;
            out << '\n';
            for (std::size_t row = 0; row < chain.draws.size(); ++row) {
                out << row;
                for (double v : chain.draws[row]) out << ',' << format_double(v);
                out << '\n';
            }
        }
        auto write_latent = [&](const std::vector<std::vector<double>>& store, bool removal) {
            if (store.empty()) return;
            std::ofstream out(latent_path(dir, static_cast<int>(c) + 1, removal));
            if (!out) throw Error(ErrorCode::Io, "cannot write latent draw file");
            out << "iter";
            for (int id : chain.latent_ids) out << ",id." << id;
            out << '\n';
            for (std::size_t s = 0; s < store.size(); ++s) {
                out << chain.latent_iters[s];
                for (double v : store[s]) out << ',' << format_double(v);
                out << '\n';
            }
        };
        write_latent(chain.latent_inf, false);
        write_latent(chain.latent_rem, true);
    }

    nlohmann::json meta;
    meta["columns"] = sample.columns;
    meta["chains"] = sample.chains.size();
    meta["master_seed"] = master_seed;
    nlohmann::json chains = nlohmann::json::array();
    double total_wall = 0.0;
    for (const ChainSample& chain : sample.chains) {
        nlohmann::json cj;
        cj["seed"] = chain.seed;
        cj["rows"] = chain.draws.size();
        cj["wall_seconds"] = chain.wall_seconds;
        nlohmann::json rates = nlohmann::json::object();
        for (std::size_t a = 0; a < chain.accept_names.size(); ++a)
            rates[chain.accept_names[a]] = chain.accept_rates[a];
        cj["acceptance_rates"] = rates;
        chains.push_back(cj);
        total_wall += chain.wall_seconds;
    }
    meta["chain_info"] = chains;
    meta["total_wall_seconds"] = total_wall;
    try {
        meta["config"] = nlohmann::json::parse(config_echo);
    } catch (...) {
        meta["config"] = config_echo;
    }
    write_text_file((fs::path(dir) / "metadata.json").string(), meta.dump(2) + "\n");
}

PosteriorSample read_draws_dir(const std::string& dir) {
    PosteriorSample sample;
    for (int c = 1;; ++c) {
        const std::string path = draws_path(dir, c);
        if (!fs::exists(path)) break;
        CsvTable table = read_csv(path, true);
        if (table.header.size() < 2 || table.header[0] != "iter")
            throw Error(ErrorCode::Io, "draw file must start with an iter column");
        ChainSample chain;
        chain.columns.assign(table.header.begin() + 1, table.header.end());
        for (auto& row : table.rows)
            chain.draws.emplace_back(row.begin() + 1, row.end());

        auto read_latent = [&](bool removal, std::vector<std::vector<double>>& store) {
            const std::string lpath = latent_path(dir, c, removal);
            if (!fs::exists(lpath)) return;
            CsvTable lt = read_csv(lpath, true);
            if (lt.header.empty() || lt.header[0] != "iter")
                throw Error(ErrorCode::Io, "latent draw file must start with an iter column");
            if (chain.latent_ids.empty()) {
                for (std::size_t k = 1; k < lt.header.size(); ++k) {
                    const std::string& h = lt.header[k];
                    if (h.rfind("id.", 0) != 0)
                        throw Error(ErrorCode::Io, "latent column names must look like id.<k>");
                    chain.latent_ids.push_back(std::stoi(h.substr(3)));
                }
            }
            const bool record_iters = chain.latent_iters.empty();
            for (auto& row : lt.rows) {
                if (record_iters) chain.latent_iters.push_back(static_cast<long>(row[0]));
                store.emplace_back(row.begin() + 1, row.end());
            }
        };
        read_latent(false, chain.latent_inf);
        read_latent(true, chain.latent_rem);
        sample.chains.push_back(std::move(chain));
    }
    if (sample.chains.empty())
        throw Error(ErrorCode::Io, "no chain CSV files found in '" + dir + "'");
    sample.columns = sample.chains.front().columns;

    const std::string meta_path = (fs::path(dir) / "metadata.json").string();
    if (fs::exists(meta_path)) {
        try {
            const nlohmann::json meta = nlohmann::json::parse(read_text_file(meta_path));
            if (meta.contains("chain_info")) {
                const auto& infos = meta["chain_info"];
                for (std::size_t c = 0; c < sample.chains.size() && c < infos.size(); ++c) {
                    const auto& rates = infos[c]["acceptance_rates"];
                    for (auto it = rates.begin(); it != rates.end(); ++it) {
                        sample.chains[c].accept_names.push_back(it.key());
                        sample.chains[c].accept_rates.push_back(it.value().get<double>());
                    }
                }
            }
        } catch (const Error&) {
            throw;
        } catch (...) {
            // metadata is advisory for summaries; a malformed file only loses
            // the acceptance-rate column
        }
    }
    return sample;
}

} // namespace ctilm
