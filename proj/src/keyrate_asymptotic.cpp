#include "cvqkd/keyrate_asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cvqkd/errors.hpp"

namespace cvqkd {

using detail::require;

namespace {

constexpr double discriminant_rel_tol = 1e-12;
constexpr double eigenvalue_floor_tol = 1e-9;
// Nearly equal roots lose half their digits through the square root of the
// discriminant; values this close below 1 are rounding, not physics.
constexpr double degenerate_root_tol = 1e-7;

// Roots of x^2 - s x + q = 0 (s = sum, q = product), returned as square
// roots, larger first. The smaller root comes from q / larger to avoid
// cancellation when the two differ by orders of magnitude.
SymplecticPair symplectic_roots(double s, double q, const char* who) {
    double disc = s * s - 4.0 * q;
    if (disc < 0.0) {
        if (disc >= -discriminant_rel_tol * s * s) {
            disc = 0.0;
        } else {
            throw NumericalError(std::string(who) + ": negative discriminant", disc);
        }
    }
    const double big = 0.5 * (s + std::sqrt(disc));
    if (!(big > 0.0)) throw NumericalError(std::string(who) + ": non-positive eigenvalue", big);
    const double small = q / big;
    auto snap = [](double x) { return x < 1.0 && x > 1.0 - degenerate_root_tol ? 1.0 : x; };
    return {snap(std::sqrt(big)), snap(std::sqrt(std::max(small, 0.0)))};
}

double entropy_term(double lambda) {
    if (lambda < 1.0 - eigenvalue_floor_tol)
        throw NumericalError("symplectic eigenvalue below 1: unphysical state", lambda);
    return g_von_neumann(std::max(0.0, 0.5 * (lambda - 1.0)));
}

}  // namespace

void LinkParams::validate() const {
    require(V_A > 0.0, "LinkParams: V_A must be positive");
    require(T > 0.0 && T <= 1.0, "LinkParams: T must lie in (0, 1]");
    require(eta_d > 0.0 && eta_d <= 1.0, "LinkParams: eta_d must lie in (0, 1]");
    require(beta > 0.0 && beta <= 1.0, "LinkParams: beta must lie in (0, 1]");
}

ChiTerms chi_terms(const LinkParams& p, double xi_ch, double xi_d) {
    const double ch = chi_channel(p.T, xi_ch);
    const double d = chi_detector(p.mu(), p.eta_d, xi_d);
    return {ch, d, chi_total(ch, d, p.T)};
}

double g_von_neumann(double x) {
    require(x >= 0.0, "g_von_neumann: x must be >= 0");
    if (x == 0.0) return 0.0;
    return ((x + 1.0) * std::log1p(x) - x * std::log(x)) / std::numbers::ln2;
}

CovarianceCoeffs covariance_coefficients(const LinkParams& p, double chi) {
    const double gain = p.eta_d * p.T / p.mu();
    return {p.V_A + 1.0, gain * (p.V_A + chi + 1.0),
            std::sqrt(gain) * std::sqrt(p.V_A * p.V_A + 2.0 * p.V_A)};
}

double mutual_information(const LinkParams& p, double chi) {
    require(chi >= 0.0, "mutual_information: chi must be >= 0");
    return 0.5 * p.mu() * std::log1p(p.V_A / (1.0 + chi)) / std::numbers::ln2;
}

double mutual_information_xi(const LinkParams& p, double xi_ch, double xi_d) {
    const double gain = p.eta_d * p.T / p.mu();
    const double denominator = gain * xi_ch + xi_d + 1.0;
    return 0.5 * p.mu() * std::log1p(gain * p.V_A / denominator) / std::numbers::ln2;
}

SymplecticPair symplectic_ab(double V_A, double T, double chi_ch) {
    require(V_A >= 0.0, "symplectic_ab: V_A must be >= 0");
    require(T > 0.0 && T <= 1.0, "symplectic_ab: T must lie in (0, 1]");
    const double V = V_A + 1.0;
    const double tv = T * (V + chi_ch);
    const double A = V * V * (1.0 - 2.0 * T) + 2.0 * T + tv * tv;
    const double root_B = T * (V * chi_ch + 1.0);
    return symplectic_roots(A, root_B * root_B, "symplectic_ab");
}

ConditionalEigenvalues symplectic_conditional(ProtocolKind protocol, double V_A, double T,
                                              double chi_ch, double chi_d, double chi) {
    require(V_A >= 0.0, "symplectic_conditional: V_A must be >= 0");
    require(T > 0.0 && T <= 1.0, "symplectic_conditional: T must lie in (0, 1]");
    const double V = V_A + 1.0;
    const double tv = T * (V + chi_ch);
    const double A = V * V * (1.0 - 2.0 * T) + 2.0 * T + tv * tv;
    const double root_B = T * (V * chi_ch + 1.0);
    const double B = root_B * root_B;
    const double total = T * (V + chi);

    double C = 0.0;
    double D = 0.0;
    if (protocol == ProtocolKind::homodyne) {
        C = (A * chi_d + V * root_B + tv) / total;
        D = root_B * (V + root_B * chi_d) / total;
    } else {
        C = (A * chi_d * chi_d + B + 1.0 + 2.0 * chi_d * (V * root_B + tv) +
             2.0 * T * (V_A * V_A + 2.0 * V_A)) /
            (total * total);
        const double r = (V + root_B * chi_d) / total;
        D = r * r;
    }
    const auto roots = symplectic_roots(C, D, "symplectic_conditional");
    return {roots.first, roots.second, 1.0};
}

HolevoResult holevo_bound_detailed(const LinkParams& p, const ChiTerms& chi) {
    const auto ab = symplectic_ab(p.V_A, p.T, chi.chi_ch);
    const auto cond =
        symplectic_conditional(p.protocol, p.V_A, p.T, chi.chi_ch, chi.chi_d, chi.chi);
    const double s_e = entropy_term(ab.first) + entropy_term(ab.second);
    const double s_eb =
        entropy_term(cond.lambda3) + entropy_term(cond.lambda4) + entropy_term(cond.lambda5);
    return {s_e, s_eb, s_e - s_eb,
            {ab.first, ab.second, cond.lambda3, cond.lambda4, cond.lambda5}};
}

double holevo_bound(const LinkParams& p, double chi_ch, double chi_d, double chi) {
    return holevo_bound_detailed(p, {chi_ch, chi_d, chi}).bound;
}

KeyRateResult key_rate_asymptotic(const LinkParams& p, const NoiseBudget& budget) {
    p.validate();
    const auto chi = chi_terms(p, budget.xi_ch(), budget.xi_d());
    const auto holevo = holevo_bound_detailed(p, chi);

    KeyRateResult r;
    r.mutual_info = mutual_information(p, chi.chi);
    r.holevo = holevo.bound;
    r.key_rate_raw = p.beta * r.mutual_info - r.holevo;
    r.key_rate = std::max(0.0, r.key_rate_raw);
    r.eigenvalues = holevo.eigenvalues;
    return r;
}

}  // namespace cvqkd
