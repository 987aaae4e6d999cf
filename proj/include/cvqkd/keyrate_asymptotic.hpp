#pragma once

// Asymptotic reverse-reconciliation key rate of Gaussian-modulated
// coherent-state CV-QKD (homodyne or heterodyne detection), trusted-detector
// noise model: the eavesdropper controls only the channel noise chi_ch.

#include <array>

#include "cvqkd/noise_budget.hpp"

namespace cvqkd {

struct LinkParams {
    double V_A = 5.0;     // modulation variance, SNU
    double T = 1.0;       // channel transmissivity
    double eta_d = 0.95;  // detector efficiency
    double beta = 0.95;   // reconciliation efficiency
    ProtocolKind protocol = ProtocolKind::heterodyne;

    int mu() const noexcept { return multiplier(protocol); }
    /// Throws DomainError unless V_A > 0 and T, eta_d, beta lie in (0, 1].
    void validate() const;
};

struct ChiTerms {
    double chi_ch;
    double chi_d;
    double chi;
};

ChiTerms chi_terms(const LinkParams& p, double xi_ch, double xi_d);

struct CovarianceCoeffs {
    double a;
    double b;
    double c;
};

struct KeyRateResult {
    double mutual_info = 0.0;   // I_AB, bits/pulse
    double holevo = 0.0;        // S_BE, bits/pulse
    double key_rate_raw = 0.0;  // beta I_AB - S_BE (or finite-size equivalent)
    double key_rate = 0.0;      // max(0, key_rate_raw)
    std::array<double, 5> eigenvalues{};  // lambda_1 .. lambda_5
};

/// G(x) = (x+1) log2(x+1) - x log2(x), G(0) = 0.
double g_von_neumann(double x);

CovarianceCoeffs covariance_coefficients(const LinkParams& p, double chi);

/// (mu/2) log2[(V_A + 1 + chi)/(1 + chi)].
double mutual_information(const LinkParams& p, double chi);

/// Same quantity written in terms of xi_ch and xi_d:
/// (mu/2) log2{[(eta_d T/mu)(V_A + xi_ch) + xi_d + 1] / [(eta_d T/mu) xi_ch + xi_d + 1]}.
double mutual_information_xi(const LinkParams& p, double xi_ch, double xi_d);

struct SymplecticPair {
    double first;   // larger
    double second;  // smaller
};

/// Symplectic eigenvalues lambda_{1,2} of the Alice-Bob state after the channel.
SymplecticPair symplectic_ab(double V_A, double T, double chi_ch);

struct ConditionalEigenvalues {
    double lambda3;
    double lambda4;
    double lambda5;  // always 1
};

/// Symplectic eigenvalues of the state held by Alice and the trusted detector
/// modes, conditioned on Bob's measurement.
ConditionalEigenvalues symplectic_conditional(ProtocolKind protocol, double V_A, double T,
                                              double chi_ch, double chi_d, double chi);

struct HolevoResult {
    double s_e;          // S(E) = S(AB)
    double s_e_given_b;  // S(E|B)
    double bound;        // S_BE = S(E) - S(E|B)
    std::array<double, 5> eigenvalues;
};

HolevoResult holevo_bound_detailed(const LinkParams& p, const ChiTerms& chi);
double holevo_bound(const LinkParams& p, double chi_ch, double chi_d, double chi);

KeyRateResult key_rate_asymptotic(const LinkParams& p, const NoiseBudget& budget);

}  // namespace cvqkd
