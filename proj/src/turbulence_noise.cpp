#include "cvqkd/turbulence_noise.hpp"

#include <cmath>

#include "cvqkd/constants.hpp"

namespace cvqkd {

using constants::speed_of_light;
using detail::require;

OpticalPulse::OpticalPulse(double omega0, double tau0, double waist, double rep_rate)
    : omega0_(omega0), tau0_(tau0), waist_(waist), rep_rate_(rep_rate) {
    require(omega0 > 0.0, "OpticalPulse: carrier frequency must be positive");
    require(tau0 > 0.0, "OpticalPulse: pulse width must be positive");
    require(waist > 0.0, "OpticalPulse: beam waist must be positive");
    require(rep_rate > 0.0, "OpticalPulse: repetition rate must be positive");
}

double OpticalPulse::wavenumber() const noexcept { return omega0_ / speed_of_light; }

TimingCorrelation TimingCorrelation::from_rho(double rho) {
    require(rho >= 0.0 && rho <= 1.0, "TimingCorrelation: rho must lie in [0, 1]");
    return TimingCorrelation(1.0 - rho);
}

TimingCorrelation TimingCorrelation::from_deficit(double one_minus_rho) {
    require(one_minus_rho >= 0.0 && one_minus_rho <= 1.0,
            "TimingCorrelation: 1 - rho must lie in [0, 1]");
    return TimingCorrelation(one_minus_rho);
}

double aperture_bracket_real(double a, double x) {
    // (a + i x)^(5/6) = a^(5/6) (1 + y^2)^(5/12) exp(i (5/6) atan y), y = x/a.
    // Re[...] - a^(5/6) = a^(5/6) [(m - 1) - m (1 - cos theta)].
    const double y = x / a;
    const double m_minus_1 = std::expm1((5.0 / 12.0) * std::log1p(y * y));
    const double theta = (5.0 / 6.0) * std::atan(y);
    const double s = std::sin(0.5 * theta);
    const double one_minus_cos = 2.0 * s * s;
    return std::pow(a, 5.0 / 6.0) * (m_minus_1 - (1.0 + m_minus_1) * one_minus_cos);
}

ScintillationResult scintillation_index_detailed(double D, const SlantPath& path, double k,
                                                 const AtmosphereModel& model, double rel_tol,
                                                 ApertureRange range) {
    require(D > 0.0, "scintillation_index: aperture diameter must be positive");
    require(k > 0.0, "scintillation_index: wavenumber must be positive");

    const double h0 = path.receiver_altitude();
    const double H = path.satellite_altitude();
    const double length = range == ApertureRange::slant ? path.slant_range() : H;
    const double a = k * D * D / (16.0 * length);

    auto integrand = [&](double h) {
        return cn2_hv(h, model) * aperture_bracket_real(a, (h - h0) / (H - h0));
    };
    const auto quad = integrate_altitude(integrand, h0, H, rel_tol);

    const double prefactor = 8.70 * std::pow(k, 7.0 / 6.0) * std::pow(H - h0, 5.0 / 6.0) *
                             std::pow(path.sec_zenith(), 11.0 / 6.0);
    return {prefactor * quad.value, prefactor * quad.abs_error};
}

double scintillation_index(double D, const SlantPath& path, double k,
                           const AtmosphereModel& model, ApertureRange range) {
    return scintillation_index_detailed(D, path, k, model, default_altitude_rel_tol, range).index;
}

double xi_rin_atmos(double sigma_si2, double V_A) {
    require(sigma_si2 >= 0.0, "xi_rin_atmos: scintillation index must be >= 0");
    require(V_A >= 0.0, "xi_rin_atmos: modulation variance must be >= 0");
    return sigma_si2 * V_A;
}

double xi_rin_lo(const LoRinSpec& spec, double V_A) {
    require(spec.rin_density > 0.0 && spec.bandwidth > 0.0,
            "xi_rin_lo: RIN density and bandwidth must be positive");
    require(V_A >= 0.0, "xi_rin_lo: modulation variance must be >= 0");
    return 0.25 * spec.rin_density * spec.bandwidth * V_A;
}

double broadened_width(double tau0, double alpha) {
    require(tau0 >= 0.0 && alpha >= 0.0, "broadened_width: tau0 and alpha must be >= 0");
    return std::sqrt(tau0 * tau0 + 8.0 * alpha);
}

BroadeningResult pulse_broadening(const OpticalPulse& pulse, const SlantPath& path,
                                  const AtmosphereModel& model) {
    auto integrand = [&](double h) {
        return cn2_hv(h, model) * std::pow(outer_scale(h), 5.0 / 3.0);
    };
    const double nu1 =
        integrate_altitude(integrand, path.receiver_altitude(), path.satellite_altitude()).value;

    // Scale ratio l0/L0; altitude independent because l0 is proportional to L0.
    const double delta = model.inner_outer_ratio();
    const double scale_factor =
        1.0 + 0.171 * delta * delta - 0.287 * std::pow(delta, 5.0 / 3.0);
    const double alpha =
        0.391 * scale_factor * nu1 * path.sec_zenith() / (speed_of_light * speed_of_light);

    const double tau0 = pulse.pulse_width();
    const double tau1 = broadened_width(tau0, alpha);
    return {alpha, nu1, tau1, tau0 / tau1};
}

double xi_time_of_arrival(double V_A, double omega0, TimingCorrelation rho_ta, double tau1) {
    require(V_A >= 0.0, "xi_time_of_arrival: modulation variance must be >= 0");
    require(tau1 >= 0.0, "xi_time_of_arrival: tau1 must be >= 0");
    const double sigma_ta2 = 0.25 * tau1 * tau1;
    return 2.0 * V_A * omega0 * omega0 * rho_ta.deficit() * sigma_ta2;
}

double fresnel_parameter(const OpticalPulse& pulse, double L) {
    require(L > 0.0, "fresnel_parameter: distance must be positive");
    const double w0 = pulse.beam_waist();
    return pulse.carrier_angular_frequency() * w0 * w0 / (2.0 * L * speed_of_light);
}

double mean_intensity_far_field(double r, double L, double t, const OpticalPulse& pulse,
                                double tau1) {
    require(L > 0.0, "mean_intensity_far_field: distance must be positive");
    require(tau1 > 0.0, "mean_intensity_far_field: tau1 must be positive");
    const double c = speed_of_light;
    const double tau0 = pulse.pulse_width();
    const double w0 = pulse.beam_waist();
    const double omega0 = pulse.carrier_angular_frequency();

    const double spread = w0 * r / (L * c);
    const double spread2 = spread * spread;
    const double tau02 = tau0 * tau0;
    const double geometric = w0 * w0 / (2.0 * L * c);

    const double amplitude = (tau02 / tau1) * geometric * geometric * tau02 *
                             ((1.0 + omega0 * omega0 * tau02) + spread2) /
                             (tau1 * std::pow(tau02 + spread2, 2.5));
    const double radial = std::exp(-omega0 * omega0 * tau02 * spread2 / (2.0 * (tau02 + spread2)));
    const double delay = t - L / c - r * r / (2.0 * L * c);
    const double temporal = std::exp(-2.0 * delay * delay / (tau1 * tau1));
    return amplitude * radial * temporal;
}

}  // namespace cvqkd
