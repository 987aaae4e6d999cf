#pragma once

// Parameter sweeps and the tabulated data sets built from them: noise
// breakdown, per-term impact on the finite-size rate, and figure data.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cvqkd/scenario.hpp"
#include "cvqkd/table_output.hpp"

namespace cvqkd {

/// Copy of base with one axis set. Units follow sweep_axes(). Throws
/// ValidationError for an unknown axis name.
Scenario apply_axis(const Scenario& base, const std::string& axis, double value);

struct SweepPoint {
    double axis_value;
    double T;
    double xi_ch;
    double xi_d;
    double xi_total;
    double sigma_si2;
    KeyRateResult asymptotic;
    // Empty for homodyne, or when the estimator cannot resolve T.
    std::optional<FiniteKeyRateResult> finite_collective;
    std::optional<FiniteKeyRateResult> finite_general;
};

struct SweepResult {
    std::string axis;
    std::string unit;
    std::vector<SweepPoint> points;
};

/// Evaluates every grid point; threads > 1 evaluates points concurrently but
/// the result is identical to the serial run.
SweepResult run_sweep(const Scenario& base, const SweepAxisSpec& axis, int threads = 1);

Table sweep_table(const SweepResult& r);

/// Component table with the source of each value and the modeled value
/// alongside.
Table noise_breakdown_table(const Scenario& s);

/// Components, their contribution to xi at T = 1, eta_d = 1, mu = 1 and the
/// percentage shares.
Table noise_budget_table(const ScenarioEvaluation& e);

struct ImpactRow {
    std::string parameter;
    double value;
    std::array<double, 3> key_rate_raw;  // finite collective, one per loss
    std::array<double, 3> ratio;         // clamped K / clamped K0; 0 when K0 = 0
};

struct ImpactResult {
    std::array<double, 3> losses_db{10.0, 20.0, 30.0};
    std::array<double, 3> ideal_key_rate_raw;  // K0
    std::vector<ImpactRow> rows;
};

/// Finite-size collective heterodyne rate with a single nonideality switched
/// on (eta_d = 1 and every other xi = 0), relative to the ideal link. Values
/// for the nonidealities, V_A, beta, n, n_e and epsilon come from s.
ImpactResult impact_analysis(const Scenario& s);
Table impact_table(const ImpactResult& r);

/// sigma_SI^2 over receiver apertures for each zenith angle (long format).
Table figure_scintillation(const Scenario& s, const std::vector<double>& apertures_m,
                           const std::vector<double>& zeniths_deg, int threads = 1);

/// Broadening ratio tau0/tau1 over pulse widths for each zenith angle.
Table figure_broadening(const Scenario& s, const std::vector<double>& tau0_ps,
                        const std::vector<double>& zeniths_deg);

/// Asymptotic homodyne and heterodyne rates with xi_ch = 0 and with the
/// scenario's noise.
Table figure_keyrate_asymptotic(const Scenario& s, const std::vector<double>& losses_db);

/// Heterodyne rates: asymptotic, and finite collective / general for each
/// block size (n = n_e).
Table figure_keyrate_finite(const Scenario& s, const std::vector<double>& losses_db,
                            const std::vector<double>& block_sizes, int threads = 1);

/// 0 to 35 dB in 0.5 dB steps.
std::vector<double> default_loss_grid();

}  // namespace cvqkd
