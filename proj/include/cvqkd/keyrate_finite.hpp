#pragma once

// Finite-size key rate for heterodyne coherent-state CV-QKD: worst-case
// parameter-estimation bounds on T and xi_ch, the AEP correction, and the
// collective-to-general attack reduction.

#include <optional>

#include "cvqkd/keyrate_asymptotic.hpp"

namespace cvqkd {

struct SecurityBudget {
    double epsilon;  // total failure probability
    double eps_ec;
    double eps_s;
    double eps_pa;
    double eps_pe;
    std::optional<double> eps_prime;  // set when derived from a general-attack target

    /// Collective-attack budget for a general-attack target eps_prime with
    /// kappa ~ n.
    static SecurityBudget for_general_attacks(double eps_prime, double n);
};

/// Equal split eps_EC = eps_s = eps_PA = eps_PE = eps / 5.
SecurityBudget split_epsilon(double epsilon);

/// eps = 50 eps' / n^4 (kappa ~ n), evaluated in log space.
double collective_epsilon_for_general(double eps_prime, double n);

/// eps = 50 eps' / kappa^4 for an explicitly computed kappa.
double collective_epsilon_for_kappa(double eps_prime, double kappa);

/// Full de Finetti kappa; d_A, d_B are mean photon numbers of Alice's and
/// Bob's modes and k the number of modes.
double kappa_exact(double n, double d_A, double d_B, double k, double epsilon);

struct FiniteBlock {
    double N;        // symbols sent
    double n_e;      // symbols sacrificed for parameter estimation
    int d = 5;       // discretization bits per symbol

    double n() const noexcept { return N - n_e; }
    void validate() const;

    /// n = n_e, so n/N = 1/2.
    static FiniteBlock symmetric(double n, int d = 5) { return {2.0 * n, n, d}; }
};

struct EstimatorExpectations {
    double t_hat;
    double sigma2_hat;
};

struct EstimatorBounds {
    double t_hat;
    double sigma2_hat;
    double z;
    double T_min;     // lower bound on eta_d T
    double xi_max;    // upper bound on xi_ch
    bool transmissivity_unresolved = false;  // t_hat within z sigma of 0
    bool xi_max_negative = false;
};

/// z with 1 - erf(z / sqrt 2) = eps_PE, accurate down to eps_PE ~ 1e-300.
double tail_quantile(double eps_pe);

/// E[t_hat] = sqrt(eta_d T), E[sigma^2_hat] = T eta_d xi_ch + 1 + xi_d.
EstimatorExpectations estimator_expectations(const LinkParams& p, const NoiseBudget& budget);

EstimatorBounds worst_case_bounds(double t_hat, double sigma2_hat, double V_A, double n_e,
                                  double eps_pe, double xi_d);

double delta_aep(double n, int d, double epsilon, double eps_s);

struct FiniteKeyRateResult {
    KeyRateResult rate;        // holevo field holds the worst-case S_BE
    EstimatorBounds bounds;
    double holevo_true;        // S_BE at the true T, xi_ch
    double delta_aep;
    double key_fraction;       // n / N
};

/// Heterodyne only; throws UnsupportedProtocol for homodyne.
FiniteKeyRateResult key_rate_finite(const LinkParams& p, const NoiseBudget& budget,
                                    const FiniteBlock& block, const SecurityBudget& sec);

/// As key_rate_finite, but empty when parameter estimation cannot bound T
/// away from zero (no key can be certified).
std::optional<FiniteKeyRateResult> key_rate_finite_if_resolved(const LinkParams& p,
                                                               const NoiseBudget& budget,
                                                               const FiniteBlock& block,
                                                               const SecurityBudget& sec);

}  // namespace cvqkd
