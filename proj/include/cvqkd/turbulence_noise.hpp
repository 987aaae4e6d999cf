#pragma once

// Turbulence-driven excess-noise terms: aperture-averaged scintillation, LO
// intensity noise, pulse broadening and time-of-arrival jitter.

#include "cvqkd/atmosphere.hpp"

namespace cvqkd {

class OpticalPulse {
public:
    /// omega0 [rad/s], tau0 [s], beam waist W0 [m], repetition rate [Hz].
    OpticalPulse(double carrier_angular_frequency, double pulse_width, double beam_waist,
                 double repetition_rate);

    double carrier_angular_frequency() const noexcept { return omega0_; }
    double pulse_width() const noexcept { return tau0_; }
    double beam_waist() const noexcept { return waist_; }
    double repetition_rate() const noexcept { return rep_rate_; }
    double wavenumber() const noexcept;

    /// omega0 * tau0 < 1e3 leaves the quasi-monochromatic regime the
    /// broadening results assume. Checked, not enforced.
    bool quasi_monochromatic() const noexcept { return omega0_ * tau0_ >= 1e3; }

    bool operator==(const OpticalPulse&) const = default;

private:
    double omega0_;
    double tau0_;
    double waist_;
    double rep_rate_;
};

struct BroadeningResult {
    double alpha;   // s^2
    double nu1;     // int C_n^2 L0^(5/3) dh, m^2
    double tau1;    // broadened width, s
    double ratio;   // tau0 / tau1
};

struct LoRinSpec {
    double rin_density = 1.4e-7;  // 1/Hz
    double bandwidth = 1e4;       // Hz
};

/// 1 - rho_ta kept separately so that values like rho = 1 - 1e-13 survive
/// double rounding.
class TimingCorrelation {
public:
    static TimingCorrelation from_rho(double rho);
    static TimingCorrelation from_deficit(double one_minus_rho);

    double rho() const noexcept { return 1.0 - deficit_; }
    double deficit() const noexcept { return deficit_; }

private:
    explicit TimingCorrelation(double deficit) : deficit_(deficit) {}
    double deficit_;
};

/// How the aperture term kD^2/(16 L) measures the propagation length.
enum class ApertureRange {
    slant,     // L = (H - h0) sec(zeta), line-of-sight distance
    vertical,  // L = H, satellite altitude
};

struct ScintillationResult {
    double index;        // sigma_SI^2
    double abs_error;    // propagated quadrature error bound
};

/// Aperture-averaged scintillation index sigma_SI^2(D_R) for a weak-turbulence
/// downlink. The bracket [(a + i x)^(5/6) - a^(5/6)] is evaluated on the
/// principal branch; only its real part enters, computed in a form free of
/// the cancellation that the direct complex power suffers at large apertures.
ScintillationResult scintillation_index_detailed(
    double aperture_diameter, const SlantPath& path, double wavenumber,
    const AtmosphereModel& model = {}, double rel_tol = default_altitude_rel_tol,
    ApertureRange range = ApertureRange::slant);

double scintillation_index(double aperture_diameter, const SlantPath& path, double wavenumber,
                           const AtmosphereModel& model = {},
                           ApertureRange range = ApertureRange::slant);

/// Real part of (a + i x)^(5/6) - a^(5/6) for a > 0, without cancellation.
double aperture_bracket_real(double a, double x);

double xi_rin_atmos(double sigma_si2, double modulation_variance);

/// (1/4) RIN_LO B_LO V_A.
double xi_rin_lo(const LoRinSpec& spec, double modulation_variance);

/// tau1 = sqrt(tau0^2 + 8 alpha).
double broadened_width(double tau0, double alpha);

BroadeningResult pulse_broadening(const OpticalPulse& pulse, const SlantPath& path,
                                  const AtmosphereModel& model = {});

/// xi_ta = 2 V_A omega0^2 (1 - rho_ta) sigma_ta^2 with sigma_ta^2 = tau1^2 / 4.
double xi_time_of_arrival(double modulation_variance, double omega0, TimingCorrelation rho_ta,
                          double tau1);

/// Omega = omega0 W0^2 / (2 L c); far field requires Omega << 1.
double fresnel_parameter(const OpticalPulse& pulse, double distance);

/// Mean far-field intensity <I(r, L, t')> of a broadened Gaussian pulse, up
/// to a constant normalisation.
double mean_intensity_far_field(double r, double distance, double time, const OpticalPulse& pulse,
                                double tau1);

}  // namespace cvqkd
