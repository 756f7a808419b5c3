#pragma once

#include <string>
#include <vector>

#include "ctilm/matrix.hpp"
#include "ctilm/types.hpp"

namespace ctilm {

// The six kernel forms: power-law and Cauchy in distance, binary and weighted
// network contact, and the two linear combinations of both.
enum class KernelKind {
    DistancePowerLaw,
    DistanceCauchy,
    NetworkBinary,
    NetworkWeighted,
    BothPowerLaw,
    BothCauchy,
};

const char* kernel_kind_name(KernelKind k);
KernelKind kernel_kind_from_name(const std::string& name);

struct KernelParams {
    double beta = 1.0;  // spatial parameter; beta1 for the combined kernels
    double beta2 = 0.0; // network effect, combined kernels only
};

// Kernel specification: which form plus non-owning references to the pairwise
// matrices it needs. Distance kinds require distances, network kinds a
// contact matrix, combined kinds both.
struct Kernel {
    KernelKind kind = KernelKind::DistancePowerLaw;
    const Matrix* distances = nullptr;
    const Matrix* network = nullptr;

    bool needs_distances() const {
        return kind != KernelKind::NetworkBinary && kind != KernelKind::NetworkWeighted;
    }
    bool needs_network() const {
        return kind != KernelKind::DistancePowerLaw && kind != KernelKind::DistanceCauchy;
    }
    bool network_only() const { return !needs_distances(); }
    // number of kernel parameters: 0 network, 1 distance, 2 combined
    int parameter_count() const {
        if (network_only()) return 0;
        return needs_network() ? 2 : 1;
    }

    void validate(std::size_t n) const; // MissingMatrix / DimensionMismatch

    double eval(const KernelParams& params, int i, int j) const;
};

// Full parameter vector theta of the infectivity rate plus spark and the
// notification effect. Powers default to 1; empty coefficient vectors mean
// Omega == 1 (no covariates on that side).
struct ParameterState {
    std::vector<double> sus_coeffs;   // S
    std::vector<double> sus_powers;   // phi, same size as S (empty => all 1)
    std::vector<double> trans_coeffs; // T
    std::vector<double> trans_powers; // xi
    KernelParams kernel;
    double spark = 0.0; // epsilon >= 0
    double gamma = 1.0; // SINR notification effect, > 0
};

// Model context shared by the simulator, likelihood and sampler: framework,
// kernel and the covariate matrices (stored column-per-individual, p x n).
struct Model {
    Framework framework = Framework::SIR;
    Kernel kernel;
    Matrix sus_covariates;   // p_S x n; empty => Omega_S == 1
    Matrix trans_covariates; // p_T x n; empty => Omega_T == 1
    std::size_t n = 0;

    void validate() const;
};

// Omega_S(j) = sum_k S_k * X(k,j)^phi_k
double susceptibility(const ParameterState& params, const Matrix& X, int j);
// Omega_T(i) = sum_k T_k * Z(k,i)^xi_k
double transmissibility(const ParameterState& params, const Matrix& Z, int i);

// lambda_ij: Omega_S(j) * Omega_T(i) * kappa(i,j), scaled by gamma when the
// source is notified.
double pair_rate(const Model& model, const ParameterState& params, int i, int j, bool notified);

// Total infectivity rate of susceptible j at time t given the epidemic state
// carried by the history: sum of pair rates over the infectious individuals
// (split into pre- and post-notification sets under SINR) plus the spark.
// Individual i is infectious at t when I_i <= t < R_i, pre-notification when
// additionally t < N_i.
double total_rate(const Model& model, const ParameterState& params, int j,
                  const EventHistory& history, double t);

// Fills out[j] = Omega for every individual; used by the hot loops.
void susceptibility_all(const ParameterState& params, const Matrix& X, std::size_t n,
                        std::vector<double>& out);
void transmissibility_all(const ParameterState& params, const Matrix& Z, std::size_t n,
                          std::vector<double>& out);

} // namespace ctilm
