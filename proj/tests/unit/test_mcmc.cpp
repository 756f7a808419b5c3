#include <cmath>

#include <doctest.h>

#include "ctilm/errors.hpp"
#include "ctilm/mcmc.hpp"
#include "ctilm/stats.hpp"
#include "support/builders.hpp"
#include "support/teststats.hpp"

using namespace ctilm;
using namespace ctilm::testing;

namespace {

// chain of three: edges 1-3 and 3-2, nothing between 1 and 2
std::unique_ptr<TestModel> chain_model(int n = 3) {
    auto tm = std::make_unique<TestModel>();
    tm->model.framework = Framework::SIR;
    tm->model.kernel.kind = KernelKind::NetworkBinary;
    tm->model.n = static_cast<std::size_t>(n);
    tm->network = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n), 0.0);
    tm->network(0, 2) = tm->network(2, 0) = 1.0;
    tm->network(2, 1) = tm->network(1, 2) = 1.0;
    tm->finalize();
    return tm;
}

} // namespace

TEST_SUITE_BEGIN("mcmc");

TEST_CASE("gibbs conditional draws") {
    Rng rng(77);
    // m = 5 infected with total infectious time 10: draws from Gamma(6, 11)
    EventHistory h = build_event_history(
        Framework::SIR, {1, 2, 3, 4, 5, 6}, {0.0, 0.1, 0.2, 0.3, 0.4, kInfinity},
        {2.0, 2.1, 2.2, 2.3, 2.4, kInfinity});
    const int n_draws = 4000;
    std::vector<double> draws;
    for (int k = 0; k < n_draws; ++k)
        draws.push_back(gibbs_rate_update(Framework::SIR, h, PeriodType::Infectious, 1.0, 1.0, 1.0, rng));
    const double p =
        ks_test_pvalue(draws, [](double x) { return gamma_cdf(x, 6.0, 11.0); });
    CHECK(p > 0.01);

    // degenerate m = 0: the conditional collapses to the prior
    EventHistory empty;
    empty.framework = Framework::SIR;
    empty.records = {{1, kInfinity, kInfinity, kInfinity}, {2, kInfinity, kInfinity, kInfinity}};
    empty.sort_and_validate();
    std::vector<double> prior_draws;
    for (int k = 0; k < n_draws; ++k)
        prior_draws.push_back(
            gibbs_rate_update(Framework::SIR, empty, PeriodType::Infectious, 1.0, 3.0, 2.0, rng));
    CHECK(ks_test_pvalue(prior_draws, [](double x) { return gamma_cdf(x, 3.0, 2.0); }) > 0.01);

    // fixed shape 4: the conditional picks up the m * shape term
    std::vector<double> shaped;
    for (int k = 0; k < n_draws; ++k)
        shaped.push_back(
            gibbs_rate_update(Framework::SIR, h, PeriodType::Infectious, 4.0, 1.0, 1.0, rng));
    CHECK(ks_test_pvalue(shaped, [](double x) { return gamma_cdf(x, 21.0, 11.0); }) > 0.01);

    // period type must belong to the framework
    CHECK_THROWS_AS(gibbs_rate_update(Framework::SIR, h, PeriodType::Delay, 1.0, 1.0, 1.0, rng), Error);
    CHECK_THROWS_AS(gibbs_rate_update(Framework::SINR, h, PeriodType::Infectious, 1.0, 1.0, 1.0, rng),
                    Error);
}

TEST_CASE("random-walk update: support rejection and flat-likelihood acceptance rate") {
    // single individual, flat event likelihood in the parameter
    auto tm = std::make_unique<TestModel>();
    tm->model.framework = Framework::SIR;
    tm->model.kernel.kind = KernelKind::NetworkBinary;
    tm->model.n = 1;
    tm->network = Matrix(1, 1, 0.0);
    tm->finalize();
    tm->model.sus_covariates = Matrix(1, 1, 1.0);
    LikelihoodEvaluator eval(tm->model);

    EventHistory h;
    h.framework = Framework::SIR;
    h.records = {{1, 0.0, kInfinity, 2.0}};
    h.sort_and_validate();

    PeriodSet periods;
    periods.include_density = false;

    ParamSpec spec;
    spec.target = ParamTarget::SusCoeff;
    spec.index = 0;
    spec.name = "Alpha_s[1]";
    spec.prior = {PriorFamily::Uniform, 0.0, 1.0};
    spec.proposal_var = 0.1;

    ParameterState params;
    params.sus_coeffs = {0.5};
    LikelihoodParts ll = eval.parts(h, params, periods);

    Rng rng(101);
    long accepts = 0;
    const long iters = 20000;
    for (long k = 0; k < iters; ++k)
        accepts += rw_mh_update(eval, h, params, ll, periods, spec, rng);
    const double rate = static_cast<double>(accepts) / static_cast<double>(iters);

    // oracle: theta ~ U(0,1), theta* ~ N(theta, 0.1); acceptance = P(theta* in (0,1))
    Rng oracle_rng(999);
    long in_support = 0;
    const long oracle_n = 200000;
    for (long k = 0; k < oracle_n; ++k) {
        const double t = oracle_rng.uniform01();
        const double prop = oracle_rng.normal(t, std::sqrt(0.1));
        in_support += prop > 0.0 && prop < 1.0;
    }
    const double expected = static_cast<double>(in_support) / static_cast<double>(oracle_n);
    const double se = std::sqrt(expected * (1.0 - expected) / static_cast<double>(iters));
    CHECK(std::abs(rate - expected) < 4.0 * se);

    // a proposal outside the support never moves the state
    ParamSpec hard = spec;
    hard.prior = {PriorFamily::Gamma, 1.0, 1.0};
    params.sus_coeffs = {1e-9};
    hard.proposal_var = 1.0; // nearly every proposal lands below zero
    ll = eval.parts(h, params, periods);
    Rng rng2(5);
    for (int k = 0; k < 50; ++k) {
        rw_mh_update(eval, h, params, ll, periods, hard, rng2);
        CHECK(params.sus_coeffs[0] > 0.0);
    }
}

TEST_CASE("independence sampler accepts every proposal when the ratio cancels") {
    auto tm = std::make_unique<TestModel>();
    tm->model.framework = Framework::SIR;
    tm->model.kernel.kind = KernelKind::NetworkBinary;
    tm->model.n = 1;
    tm->network = Matrix(1, 1, 0.0);
    tm->finalize();
    LikelihoodEvaluator eval(tm->model);

    EventHistory h;
    h.framework = Framework::SIR;
    h.records = {{1, 0.0, kInfinity, 2.0}};
    h.sort_and_validate();

    PeriodSet periods;
    periods.infectious = {2.0, 1.0};
    ParameterState params; // Omega_S = Omega_T = 1, spark 0
    LikelihoodParts ll = eval.parts(h, params, periods);

    // proposal equals the period distribution and the event part is flat,
    // so the Metropolis-Hastings ratio cancels exactly
    Rng rng(42);
    for (int k = 0; k < 100; ++k)
        CHECK(independence_update_event_times(eval, h, ll, params, periods, {1},
                                              periods.infectious, nullptr, false, rng));
}

TEST_CASE("independence sampler rejects proposals that orphan an infection") {
    auto tm = chain_model();
    LikelihoodEvaluator eval(tm->model);

    EventHistory h = build_event_history(Framework::SIR, {1, 3, 2}, {0.0, 1.0, 2.0},
                                         {5.0, 4.0, 6.0});
    PeriodSet periods;
    periods.infectious = {2.0, 1.0};
    ParameterState params; // spark 0
    LikelihoodParts ll = eval.parts(h, params, periods);
    REQUIRE(ll.total() > -kInfinity);

    // proposal concentrated around D* = 9, so I* = R - D* = -3 < I_1 = 0:
    // individual 2 then precedes everyone and individual 1 loses its only
    // source (1 and 2 are not connected)
    const PeriodSpec far{40000.0, 40000.0 / 9.0};
    Rng rng(13);
    for (int k = 0; k < 50; ++k) {
        CHECK_FALSE(independence_update_event_times(eval, h, ll, params, periods, {2}, far, nullptr,
                                                    false, rng));
        CHECK(h.record_of(2).infection_time == doctest::Approx(2.0));
    }
}

TEST_CASE("independence sampler reaches the grid-quadrature posterior (SIR)") {
    auto tm = std::make_unique<TestModel>();
    tm->model.framework = Framework::SIR;
    tm->model.kernel.kind = KernelKind::NetworkBinary;
    tm->model.n = 2;
    tm->network = Matrix(2, 2, 0.0);
    tm->network(0, 1) = tm->network(1, 0) = 1.0;
    tm->finalize();
    LikelihoodEvaluator eval(tm->model);

    EventHistory h = build_event_history(Framework::SIR, {1, 2}, {0.0, 1.0}, {3.0, 4.0});
    PeriodSet periods;
    periods.infectious = {2.0, 1.0};
    ParameterState params;
    LikelihoodParts ll = eval.parts(h, params, periods);

    Rng rng(321);
    std::vector<double> period_draws;
    const int iters = 100000;
    for (int k = 0; k < iters; ++k) {
        independence_update_event_times(eval, h, ll, params, periods, {2}, periods.infectious,
                                        nullptr, false, rng);
        const Record& r = h.record_of(2);
        period_draws.push_back(r.removal_time - r.infection_time);
    }

    // exact conditional density of D_2 on a grid
    auto log_density = [&](double period) {
        EventHistory g = h;
        for (Record& r : g.records)
            if (r.id == 2) r.infection_time = r.removal_time - period;
        g.sort_and_validate();
        const double v = eval.parts(g, params, periods).total();
        return v;
    };
    const double tv = tv_distance_to_density(period_draws, log_density, 1e-6, 25.0, 60);
    CHECK(tv <= 0.05);
}

TEST_CASE("independence sampler reaches the grid-quadrature posterior (SINR removal update)") {
    auto tm = std::make_unique<TestModel>();
    tm->model.framework = Framework::SINR;
    tm->model.kernel.kind = KernelKind::NetworkBinary;
    tm->model.n = 2;
    tm->network = Matrix(2, 2, 0.0);
    tm->network(0, 1) = tm->network(1, 0) = 1.0;
    tm->finalize();
    LikelihoodEvaluator eval(tm->model);

    EventHistory h = build_event_history(Framework::SINR, {1, 2}, {0.0, 1.0}, {3.0, 4.0},
                                         {0.5, 2.0});
    PeriodSet periods;
    periods.incubation = {2.0, 2.0};
    periods.delay = {3.0, 1.5};
    ParameterState params;
    params.gamma = 0.7;
    LikelihoodParts ll = eval.parts(h, params, periods);
    REQUIRE(ll.total() > -kInfinity);

    Rng rng(555);
    std::vector<double> inc_draws, delay_draws;
    const int iters = 100000;
    for (int k = 0; k < iters; ++k) {
        independence_update_event_times(eval, h, ll, params, periods, {2}, periods.incubation,
                                        &periods.delay, true, rng);
        const Record& r = h.record_of(2);
        inc_draws.push_back(r.notify_time - r.infection_time);
        delay_draws.push_back(r.removal_time - r.notify_time);
    }

    // with no further susceptibles and zero spark, the delay period is
    // conditionally independent with its prior gamma law
    auto delay_log_density = [&](double d) { return log_gamma_pdf(d, 3.0, 1.5); };
    CHECK(tv_distance_to_density(delay_draws, delay_log_density, 1e-6, 15.0, 50) <= 0.05);

    auto inc_log_density = [&](double d) {
        EventHistory g = h;
        for (Record& r : g.records)
            if (r.id == 2) r.infection_time = r.notify_time - d;
        g.sort_and_validate();
        return eval.parts(g, params, periods).total() -
               log_gamma_pdf(g.record_of(2).removal_time - g.record_of(2).notify_time, 3.0, 1.5);
    };
    CHECK(tv_distance_to_density(inc_draws, inc_log_density, 1e-6, 12.0, 50) <= 0.05);
}

TEST_CASE("run_chain bookkeeping: rows, columns, fixed parameters, latent thinning") {
    auto tm = chain_model();
    EventHistory h = build_event_history(Framework::SIR, {1, 3, 2}, {0.0, 1.0, 2.0},
                                         {5.0, 4.0, 6.0});
    tm->model.sus_covariates = Matrix(1, 3, 1.0);

    ParamSpec alpha;
    alpha.target = ParamTarget::SusCoeff;
    alpha.index = 0;
    alpha.name = "Alpha_s[1]";
    alpha.prior = {PriorFamily::Gamma, 1.0, 1.0};
    alpha.init = {0.4};
    alpha.proposal_var = 0.2;

    ParamSpec frozen = alpha;
    frozen.name = "Spark";
    frozen.target = ParamTarget::Spark;
    frozen.init = {0.125};
    frozen.proposal_var = 0.0; // fixed at its initial value
    frozen.allow_zero = true;

    ParameterState base;
    base.sus_coeffs = {0.4};

    FitConfig fit;
    fit.datatype = Datatype::KnownEpidemic;
    fit.nsim = 1;
    ChainSample one = run_chain(tm->model, h, {alpha, frozen}, base, fit, 0, 9);
    CHECK(one.draws.size() == 2); // initial state plus one iteration
    CHECK(one.columns == std::vector<std::string>{"Alpha_s[1]", "Spark", "Log-likelihood"});
    CHECK(one.latent_iters.empty()); // known epidemic: nothing augmented
    // fixed parameter is not acceptance-counted
    CHECK(one.accept_names == std::vector<std::string>{"Alpha_s[1]"});

    fit.nsim = 200;
    fit.datatype = Datatype::KnownRemoval;
    fit.delta_infectious = PeriodDelta{2.0, {1.0}, 2.0, 1.0};
    fit.latent_thin = 10;
    fit.validate_each_iteration = true; // invariants + cached loglik recheck
    ChainSample aug = run_chain(tm->model, h, {alpha, frozen}, base, fit, 0, 10);
    CHECK(aug.draws.size() == 201);
    CHECK(aug.columns == std::vector<std::string>{"Alpha_s[1]", "Spark", "Infectious period rate",
                                                  "Log-likelihood"});
    CHECK(aug.latent_iters.size() == 21); // 0, 10, ..., 200
    CHECK(aug.latent_ids.size() == 3);
    for (const auto& row : aug.draws) CHECK(row[1] == 0.125); // spark never moves
    // first-known individual's infection time never moves
    for (const auto& inf_row : aug.latent_inf) CHECK(inf_row[0] == 0.0);
    // single-site updates: updatable = m - 1 = 2 proposals per iteration
    CHECK(aug.latent_proposals == 2 * 200);
}

TEST_CASE("parallel chains reproduce the sequential results bitwise") {
    auto tm = chain_model();
    tm->model.sus_covariates = Matrix(1, 3, 1.0);
    EventHistory h = build_event_history(Framework::SIR, {1, 3, 2}, {0.0, 1.0, 2.0},
                                         {5.0, 4.0, 6.0});

    ParamSpec alpha;
    alpha.target = ParamTarget::SusCoeff;
    alpha.index = 0;
    alpha.name = "Alpha_s[1]";
    alpha.prior = {PriorFamily::Gamma, 1.0, 1.0};
    alpha.init = {0.2, 0.4, 0.8, 1.6};
    alpha.proposal_var = 0.2;

    ParameterState base;
    base.sus_coeffs = {0.4};

    FitConfig fit;
    fit.datatype = Datatype::KnownRemoval;
    fit.delta_infectious = PeriodDelta{2.0, {1.0}, 2.0, 1.0};
    fit.nsim = 150;
    fit.nchains = 4;

    fit.parallel = false;
    const PosteriorSample seq = run_chains(tm->model, h, {alpha}, base, fit, 2024);
    fit.parallel = true;
    const PosteriorSample par = run_chains(tm->model, h, {alpha}, base, fit, 2024);

    REQUIRE(seq.chains.size() == par.chains.size());
    for (std::size_t c = 0; c < seq.chains.size(); ++c) {
        CHECK(seq.chains[c].seed == par.chains[c].seed);
        CHECK(seq.chains[c].draws == par.chains[c].draws);
        CHECK(seq.chains[c].latent_inf == par.chains[c].latent_inf);
    }
    // single chain equals run_chain with the derived seed
    const ChainSample direct =
        run_chain(tm->model, h, {alpha}, base, fit, 0, derive_seed(2024, 0));
    CHECK(direct.draws == seq.chains[0].draws);
}

TEST_CASE("config validation catches inconsistent fits") {
    auto tm = chain_model();
    tm->model.sus_covariates = Matrix(1, 3, 1.0);
    EventHistory h = build_event_history(Framework::SIR, {1, 3, 2}, {0.0, 1.0, 2.0},
                                         {5.0, 4.0, 6.0});
    ParamSpec alpha;
    alpha.target = ParamTarget::SusCoeff;
    alpha.index = 0;
    alpha.name = "Alpha_s[1]";
    alpha.prior = {PriorFamily::Gamma, 1.0, 1.0};
    alpha.init = {0.4};
    ParameterState base;
    base.sus_coeffs = {0.4};

    FitConfig fit;
    fit.datatype = Datatype::UnknownRemoval; // needs SINR
    fit.nsim = 10;
    CHECK_THROWS_AS(run_chains(tm->model, h, {alpha}, base, fit, 1), Error);

    fit.datatype = Datatype::KnownRemoval; // missing delta
    CHECK_THROWS_AS(run_chains(tm->model, h, {alpha}, base, fit, 1), Error);

    fit.datatype = Datatype::KnownEpidemic;
    fit.delta_infectious = PeriodDelta{2.0, {1.0}, 2.0, 1.0}; // deltas with fixed periods
    CHECK_THROWS_AS(run_chains(tm->model, h, {alpha}, base, fit, 1), Error);

    fit.delta_infectious.reset();
    fit.nchains = 3;
    ParamSpec two_inits = alpha;
    two_inits.init = {0.1, 0.2}; // neither 1 nor nchains
    CHECK_THROWS_AS(run_chains(tm->model, h, {two_inits}, base, fit, 1), Error);
}

TEST_CASE("theta sweep reaches the grid-quadrature posterior") {
    auto tm = chain_model();
    tm->model.sus_covariates = Matrix(1, 3, 1.0);
    EventHistory h = build_event_history(Framework::SIR, {1, 3, 2}, {0.0, 1.0, 2.0},
                                         {5.0, 4.0, 6.0});

    ParamSpec alpha;
    alpha.target = ParamTarget::SusCoeff;
    alpha.index = 0;
    alpha.name = "Alpha_s[1]";
    alpha.prior = {PriorFamily::Gamma, 1.0, 1.0};
    alpha.init = {0.5};
    alpha.proposal_var = 0.35;

    ParameterState base;
    base.sus_coeffs = {0.5};

    FitConfig fit;
    fit.datatype = Datatype::KnownEpidemic;
    fit.nsim = 100000;
    const ChainSample chain = run_chain(tm->model, h, {alpha}, base, fit, 0, 31);

    std::vector<double> draws;
    draws.reserve(chain.draws.size());
    for (const auto& row : chain.draws) draws.push_back(row[0]);

    LikelihoodEvaluator eval(tm->model);
    PeriodSet periods;
    periods.include_density = false;
    auto log_posterior = [&](double a) {
        ParameterState p = base;
        p.sus_coeffs[0] = a;
        return eval.parts(h, p, periods).total() + log_gamma_pdf(a, 1.0, 1.0);
    };
    CHECK(tv_distance_to_density(draws, log_posterior, 1e-6, 6.0, 60) <= 0.05);
}

TEST_SUITE_END();
