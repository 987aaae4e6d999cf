#include "cvqkd/keyrate_finite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cvqkd/errors.hpp"

namespace cvqkd {

using detail::require;

namespace {

void check_probability(double p, const char* message) { require(p > 0.0 && p < 1.0, message); }

double log2(double x) { return std::log2(x); }

// log erfc(x) for x >= 0. Past x = 25 erfc drops into the subnormal range,
// so the asymptotic series takes over.
double log_erfc(double x) {
    if (x < 25.0) return std::log(std::erfc(x));
    const double inv2 = 1.0 / (2.0 * x * x);
    // 1 - 1/(2x^2) + 3/(2x^2)^2 - 15/(2x^2)^3 + 105/(2x^2)^4
    const double series = 1.0 + inv2 * (-1.0 + inv2 * (3.0 + inv2 * (-15.0 + inv2 * 105.0)));
    return -x * x - std::log(x * std::sqrt(std::numbers::pi)) + std::log(series);
}

}  // namespace

SecurityBudget split_epsilon(double epsilon) {
    check_probability(epsilon, "split_epsilon: epsilon must lie in (0, 1)");
    const double part = epsilon / 5.0;
    return {epsilon, part, part, part, part, std::nullopt};
}

double collective_epsilon_for_general(double eps_prime, double n) {
    check_probability(eps_prime, "collective_epsilon_for_general: eps' must lie in (0, 1)");
    require(n > 0.0, "collective_epsilon_for_general: n must be positive");
    return collective_epsilon_for_kappa(eps_prime, n);
}

double collective_epsilon_for_kappa(double eps_prime, double kappa) {
    check_probability(eps_prime, "collective_epsilon_for_kappa: eps' must lie in (0, 1)");
    require(kappa >= 1.0, "collective_epsilon_for_kappa: kappa must be >= 1");
    const double log_eps = std::log(50.0) + std::log(eps_prime) - 4.0 * std::log(kappa);
    const double eps = std::exp(log_eps);
    if (!(eps > std::numeric_limits<double>::min()))
        throw NumericalError("collective epsilon underflows double precision", log_eps);
    return std::min(eps, 1.0);
}

double kappa_exact(double n, double d_A, double d_B, double k, double epsilon) {
    require(n > 0.0 && k > 0.0, "kappa_exact: n and k must be positive");
    require(d_A >= 0.0 && d_B >= 0.0, "kappa_exact: photon numbers must be >= 0");
    check_probability(epsilon, "kappa_exact: epsilon must lie in (0, 1)");
    const double l = std::log(8.0 / epsilon);
    const double value = n * (d_A + d_B) * (1.0 + 2.0 * std::sqrt(l / (2.0 * n))) +
                         (l / n) * (1.0 - 2.0 * std::sqrt(l / (2.0 * k)));
    return std::max(1.0, value);
}

SecurityBudget SecurityBudget::for_general_attacks(double eps_prime, double n) {
    SecurityBudget s = split_epsilon(collective_epsilon_for_general(eps_prime, n));
    s.eps_prime = eps_prime;
    return s;
}

void FiniteBlock::validate() const {
    require(n_e > 0.0 && n_e < N, "FiniteBlock: require 0 < n_e < N");
    require(d >= 1, "FiniteBlock: discretization d must be >= 1");
}

double tail_quantile(double eps_pe) {
    check_probability(eps_pe, "tail_quantile: eps_PE must lie in (0, 1)");
    const double target = std::log(eps_pe);
    const double root2 = std::numbers::sqrt2;

    // f(z) = log erfc(z/sqrt2) - log eps is strictly decreasing; f(0) > 0.
    auto f = [&](double z) { return log_erfc(z / root2) - target; };
    auto df = [&](double z) {
        const double x = z / root2;
        // d/dz log erfc(x) = -(2/sqrt(pi)) exp(-x^2 - log erfc x) / sqrt2
        return -std::numbers::inv_sqrtpi * root2 * std::exp(-x * x - log_erfc(x));
    };

    double lo = 0.0;
    double hi = 60.0;
    double z = std::sqrt(std::max(0.0, -2.0 * target));
    z = std::clamp(z, lo, hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double fz = f(z);
        if (fz > 0.0) lo = z; else hi = z;
        double next = z - fz / df(z);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - z) <= 1e-15 * std::max(1.0, z)) return next;
        z = next;
    }
    throw NumericalError("tail_quantile: Newton iteration did not converge", z);
}

EstimatorExpectations estimator_expectations(const LinkParams& p, const NoiseBudget& budget) {
    require(p.T >= 0.0 && p.T <= 1.0, "estimator_expectations: T must lie in [0, 1]");
    require(p.eta_d > 0.0 && p.eta_d <= 1.0, "estimator_expectations: eta_d must lie in (0, 1]");
    return {std::sqrt(p.eta_d * p.T), p.T * p.eta_d * budget.xi_ch() + 1.0 + budget.xi_d()};
}

EstimatorBounds worst_case_bounds(double t_hat, double sigma2_hat, double V_A, double n_e,
                                  double eps_pe, double xi_d) {
    require(n_e > 0.0, "worst_case_bounds: n_e must be positive");
    require(V_A > 0.0, "worst_case_bounds: V_A must be positive");
    require(t_hat > 0.0, "worst_case_bounds: t_hat must be positive to bound xi_ch");
    const double z = tail_quantile(eps_pe);

    EstimatorBounds b{};
    b.t_hat = t_hat;
    b.sigma2_hat = sigma2_hat;
    b.z = z;
    const double t_low = t_hat - z * std::sqrt(sigma2_hat / (n_e * V_A));
    b.transmissivity_unresolved = t_low <= 0.0;
    b.T_min = t_low > 0.0 ? t_low * t_low : 0.0;
    b.xi_max = (sigma2_hat + z * sigma2_hat * std::numbers::sqrt2 / std::sqrt(n_e) - 1.0 - xi_d) /
               (t_hat * t_hat);
    b.xi_max_negative = b.xi_max < 0.0;
    return b;
}

double delta_aep(double n, int d, double epsilon, double eps_s) {
    require(n > 0.0, "delta_aep: n must be positive");
    require(d >= 1, "delta_aep: d must be >= 1");
    check_probability(epsilon, "delta_aep: epsilon must lie in (0, 1)");
    check_probability(eps_s, "delta_aep: eps_s must lie in (0, 1)");
    const double dp1 = d + 1.0;
    // log2(2 / (eps^2 eps_s)) split so eps^2 cannot underflow.
    const double log_term = 1.0 - 2.0 * log2(epsilon) - log2(eps_s);
    return dp1 * dp1 + 4.0 * dp1 * std::sqrt(log2(2.0 / eps_s)) + 2.0 * log_term +
           4.0 * eps_s * d / (epsilon * std::sqrt(n));
}

FiniteKeyRateResult key_rate_finite(const LinkParams& p, const NoiseBudget& budget,
                                    const FiniteBlock& block, const SecurityBudget& sec) {
    if (p.protocol != ProtocolKind::heterodyne)
        throw UnsupportedProtocol("finite-size key rate is only available for heterodyne detection");
    p.validate();
    block.validate();

    const double n = block.n();
    const double N = block.N;

    const auto truth = chi_terms(p, budget.xi_ch(), budget.xi_d());
    const double mutual = mutual_information(p, truth.chi);
    const double holevo_true = holevo_bound_detailed(p, truth).bound;

    const auto expect = estimator_expectations(p, budget);
    const auto bounds = worst_case_bounds(expect.t_hat, expect.sigma2_hat, p.V_A, block.n_e,
                                          sec.eps_pe, budget.xi_d());
    if (bounds.transmissivity_unresolved)
        throw DomainError("key_rate_finite: parameter estimation cannot bound T away from 0");

    // T_min bounds eta_d T; the Holevo pipeline applies eta_d itself.
    LinkParams worst = p;
    worst.T = std::min(1.0, bounds.T_min / p.eta_d);
    const double xi_worst = std::max(0.0, bounds.xi_max);
    const auto worst_chi = chi_terms(worst, xi_worst, budget.xi_d());
    const auto holevo_worst = holevo_bound_detailed(worst, worst_chi);

    const double aep = delta_aep(n, block.d, sec.epsilon, sec.eps_s);
    const double key_fraction = n / N;

    FiniteKeyRateResult r{};
    r.rate.mutual_info = mutual;
    r.rate.holevo = holevo_worst.bound;
    r.rate.key_rate_raw = key_fraction * (p.beta * mutual - holevo_worst.bound) -
                          std::sqrt(n) / N * aep -
                          2.0 / N * log2(1.0 / (2.0 * sec.epsilon));
    r.rate.key_rate = std::max(0.0, r.rate.key_rate_raw);
    r.rate.eigenvalues = holevo_worst.eigenvalues;
    r.bounds = bounds;
    r.holevo_true = holevo_true;
    r.delta_aep = aep;
    r.key_fraction = key_fraction;
    return r;
}

std::optional<FiniteKeyRateResult> key_rate_finite_if_resolved(const LinkParams& p,
                                                               const NoiseBudget& budget,
                                                               const FiniteBlock& block,
                                                               const SecurityBudget& sec) {
    if (p.protocol != ProtocolKind::heterodyne)
        throw UnsupportedProtocol("finite-size key rate is only available for heterodyne detection");
    p.validate();
    block.validate();
    const auto expect = estimator_expectations(p, budget);
    const auto bounds = worst_case_bounds(expect.t_hat, expect.sigma2_hat, p.V_A, block.n_e,
                                          sec.eps_pe, budget.xi_d());
    if (bounds.transmissivity_unresolved) return std::nullopt;
    return key_rate_finite(p, budget, block, sec);
}

}  // namespace cvqkd
