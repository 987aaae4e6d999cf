#pragma once

// Scenario configuration (JSON, unit-suffixed keys), its validation, and the
// evaluation of a single scenario into noise budget and key rates.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cvqkd/keyrate_finite.hpp"
#include "cvqkd/turbulence_noise.hpp"

namespace cvqkd {

enum class NoiseSource {
    table,  // every component pinned to the reference daylight constants
    model,  // xi_ta, xi_RIN,Atmos, xi_RIN,LO computed from the turbulence models
};

/// Optional per-component pins; applied on top of either noise source.
struct NoiseOverrides {
    std::optional<double> xi_ta, xi_rin_atmos, xi_rin_lo, xi_mod, xi_background, xi_rin_signal;
    std::optional<double> v_el, xi_adc, xi_overlap, xi_lo, xi_leak;

    bool operator==(const NoiseOverrides&) const = default;
};

enum class SweepScale { linear, log };

struct SweepAxisSpec {
    std::string axis;  // loss_dB | D_R | zenith | tau0 | V_A | n
    double min = 0.0;
    double max = 35.0;
    int points = 71;
    SweepScale scale = SweepScale::linear;

    std::vector<double> grid() const;
    bool operator==(const SweepAxisSpec&) const = default;
};

/// Axis names accepted by SweepAxisSpec, with their units.
const std::vector<std::pair<std::string, std::string>>& sweep_axes();

struct Scenario {
    // link
    double V_A = 5.0;
    double eta_d = 0.95;
    double beta = 0.95;
    ProtocolKind protocol = ProtocolKind::heterodyne;
    double loss_db = 20.0;

    // optics
    double carrier_frequency_thz = 200.0;  // omega0 = 2 pi f
    double tau0_ps = 130.0;
    double rep_rate_mhz = 100.0;
    double D_T_m = 0.3;  // beam waist W0 = D_T / 2
    double D_R_m = 1.0;

    // geometry
    double H_km = 500.0;
    double zenith_deg = 60.0;

    AtmosphereModel atmosphere;  // ground_altitude doubles as receiver altitude h0

    // noise
    NoiseSource noise_source = NoiseSource::table;
    bool night = false;
    LoRinSpec lo_rin;
    double rho_ta_deficit = 1e-13;  // 1 - rho_ta
    ApertureRange aperture_range = ApertureRange::slant;
    NoiseOverrides overrides;

    // security
    double epsilon = 1e-9;    // collective-attack target
    double eps_prime = 1e-9;  // general-attack target
    double n = 1e12;
    double n_e = 1e12;
    int d = 5;

    std::optional<SweepAxisSpec> sweep;

    double transmissivity() const;
    double omega0() const;
    double wavenumber() const;
    SlantPath path() const;
    OpticalPulse pulse() const;
    LinkParams link() const;
    FiniteBlock block() const;

    /// Throws ValidationError listing every out-of-range field.
    void validate() const;
};

/// Parses a scenario, rejecting unknown keys, wrong types, mutually exclusive
/// pairs (loss_db/transmissivity, carrier_frequency_thz/wavelength_nm) and
/// out-of-range values. Missing keys keep their defaults.
Scenario scenario_from_json(const nlohmann::json& config);
Scenario load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& s);

/// Values produced by the turbulence models for the scenario geometry,
/// whether or not they are used in the budget.
struct ModeledNoise {
    double sigma_si2;
    double sigma_si2_error;
    double xi_rin_atmos;
    double xi_rin_lo;
    BroadeningResult broadening;
    double xi_ta;
    double fresnel;
    double fried_parameter;
};

ModeledNoise model_noise(const Scenario& s);

/// Budget according to the scenario's noise source, night flag and overrides.
NoiseBudget build_noise_budget(const Scenario& s, const ModeledNoise& modeled);

struct ScenarioEvaluation {
    Scenario scenario;
    ModeledNoise modeled;
    NoiseBudget budget;
    LinkParams link;
    ChiTerms chi;
    double xi_total;
    std::vector<NoiseShare> shares;  // reference convention T = 1, eta_d = 1, mu = 1
    KeyRateResult asymptotic;
    std::optional<FiniteKeyRateResult> finite_collective;  // heterodyne with T resolved only
    std::optional<FiniteKeyRateResult> finite_general;     // heterodyne with T resolved only
    double block_duration_s;  // N / f_rep
};

ScenarioEvaluation evaluate(const Scenario& s);

nlohmann::json report_to_json(const ScenarioEvaluation& e);

}  // namespace cvqkd
