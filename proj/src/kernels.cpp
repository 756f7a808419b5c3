#include "ctilm/kernels.hpp"

#include <cmath>

#include "ctilm/errors.hpp"

namespace ctilm {

const char* kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::DistancePowerLaw: return "distance-powerlaw";
        case KernelKind::DistanceCauchy: return "distance-cauchy";
        case KernelKind::NetworkBinary: return "network-binary";
        case KernelKind::NetworkWeighted: return "network-weighted";
        case KernelKind::BothPowerLaw: return "both-powerlaw";
        case KernelKind::BothCauchy: return "both-cauchy";
    }
    return "?";
}

KernelKind kernel_kind_from_name(const std::string& name) {
    for (KernelKind k : {KernelKind::DistancePowerLaw, KernelKind::DistanceCauchy,
                         KernelKind::NetworkBinary, KernelKind::NetworkWeighted,
                         KernelKind::BothPowerLaw, KernelKind::BothCauchy})
        if (name == kernel_kind_name(k)) return k;
    throw Error(ErrorCode::InvalidConfig, "unknown kernel kind '" + name + "'");
}

void Kernel::validate(std::size_t n) const {
    if (needs_distances()) {
        if (!distances)
            throw Error(ErrorCode::MissingMatrix,
                        std::string(kernel_kind_name(kind)) + " kernel requires a distance matrix");
        if (distances->rows() != n || distances->cols() != n)
            throw Error(ErrorCode::DimensionMismatch, "distance matrix is not n x n");
    }
    if (needs_network()) {
        if (!network)
            throw Error(ErrorCode::MissingMatrix,
                        std::string(kernel_kind_name(kind)) + " kernel requires a contact network");
        if (network->rows() != n || network->cols() != n)
            throw Error(ErrorCode::DimensionMismatch, "contact network is not n x n");
    }
}

double Kernel::eval(const KernelParams& params, int i, int j) const {
    switch (kind) {
        case KernelKind::DistancePowerLaw: {
            const double d = (*distances)(i, j);
            if (d == 0.0)
                throw Error(ErrorCode::ZeroDistanceWithPowerLaw,
                            "zero distance under a power-law kernel; jitter co-located individuals");
            return std::pow(d, -params.beta);
        }
        case KernelKind::DistanceCauchy: {
            const double d = (*distances)(i, j);
            return params.beta / (d * d + params.beta * params.beta);
        }
        case KernelKind::NetworkBinary:
        case KernelKind::NetworkWeighted:
            return (*network)(i, j);
        case KernelKind::BothPowerLaw: {
            const double d = (*distances)(i, j);
            if (d == 0.0)
                throw Error(ErrorCode::ZeroDistanceWithPowerLaw,
                            "zero distance under a power-law kernel; jitter co-located individuals");
            return std::pow(d, -params.beta) + params.beta2 * (*network)(i, j);
        }
        case KernelKind::BothCauchy: {
            const double d = (*distances)(i, j);
            return params.beta / (d * d + params.beta * params.beta) +
                   params.beta2 * (*network)(i, j);
        }
    }
    return 0.0;
}

void Model::validate() const {
    if (n < 1) throw Error(ErrorCode::InconsistentDimensions, "population size must be positive");
    kernel.validate(n);
    if (!sus_covariates.empty()) {
        if (sus_covariates.cols() != n)
            throw Error(ErrorCode::DimensionMismatch, "susceptibility covariates must have one column per individual");
        if (!sus_covariates.nonnegative())
            throw Error(ErrorCode::NegativeCovariate, "susceptibility covariates must be nonnegative");
    }
    if (!trans_covariates.empty()) {
        if (trans_covariates.cols() != n)
            throw Error(ErrorCode::DimensionMismatch, "transmissibility covariates must have one column per individual");
        if (!trans_covariates.nonnegative())
            throw Error(ErrorCode::NegativeCovariate, "transmissibility covariates must be nonnegative");
    }
}

namespace {

double powered_sum(const std::vector<double>& coeffs, const std::vector<double>& powers,
                   const Matrix& cov, int col) {
    double sum = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const double x = cov(k, static_cast<std::size_t>(col));
        if (x < 0.0) throw Error(ErrorCode::NegativeCovariate, "covariate entries must be nonnegative");
        const double p = powers.empty() ? 1.0 : powers[k];
        sum += coeffs[k] * (p == 1.0 ? x : std::pow(x, p));
    }
    return sum;
}

} // namespace

double susceptibility(const ParameterState& params, const Matrix& X, int j) {
    if (params.sus_coeffs.empty()) return 1.0;
    if (X.rows() != params.sus_coeffs.size())
        throw Error(ErrorCode::DimensionMismatch, "susceptibility coefficient count does not match covariate rows");
    return powered_sum(params.sus_coeffs, params.sus_powers, X, j);
}

double transmissibility(const ParameterState& params, const Matrix& Z, int i) {
    if (params.trans_coeffs.empty()) return 1.0;
    if (Z.rows() != params.trans_coeffs.size())
        throw Error(ErrorCode::DimensionMismatch, "transmissibility coefficient count does not match covariate rows");
    return powered_sum(params.trans_coeffs, params.trans_powers, Z, i);
}

void susceptibility_all(const ParameterState& params, const Matrix& X, std::size_t n,
                        std::vector<double>& out) {
    out.assign(n, 1.0);
    if (params.sus_coeffs.empty()) return;
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < params.sus_coeffs.size(); ++k) {
            const double x = X(k, j);
            const double p = params.sus_powers.empty() ? 1.0 : params.sus_powers[k];
            sum += params.sus_coeffs[k] * (p == 1.0 ? x : std::pow(x, p));
        }
        out[j] = sum;
    }
}

void transmissibility_all(const ParameterState& params, const Matrix& Z, std::size_t n,
                          std::vector<double>& out) {
    out.assign(n, 1.0);
    if (params.trans_coeffs.empty()) return;
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < params.trans_coeffs.size(); ++k) {
            const double z = Z(k, i);
            const double p = params.trans_powers.empty() ? 1.0 : params.trans_powers[k];
            sum += params.trans_coeffs[k] * (p == 1.0 ? z : std::pow(z, p));
        }
        out[i] = sum;
    }
}

double pair_rate(const Model& model, const ParameterState& params, int i, int j, bool notified) {
    const double rate = susceptibility(params, model.sus_covariates, j) *
                        transmissibility(params, model.trans_covariates, i) *
                        model.kernel.eval(params.kernel, i, j);
    return notified ? params.gamma * rate : rate;
}

double total_rate(const Model& model, const ParameterState& params, int j,
                  const EventHistory& history, double t) {
    double sum = params.spark;
    const int m = history.infected_count();
    for (int k = 0; k < m; ++k) {
        const Record& r = history.records[static_cast<std::size_t>(k)];
        const int i = r.id - 1;
        if (i == j) continue;
        if (!(r.infection_time <= t && t < r.removal_time)) continue;
        const bool notified = model.framework == Framework::SINR && t >= r.notify_time;
        sum += pair_rate(model, params, i, j, notified);
    }
    return sum;
}

} // namespace ctilm
