#include "cvqkd/atmosphere.hpp"

#include <cmath>

#include "cvqkd/constants.hpp"

namespace cvqkd {

using detail::require;

AtmosphereModel::AtmosphereModel(double wind_rms, double ground_cn2, double inner_outer_ratio,
                                 double ground_altitude)
    : wind_rms_(wind_rms),
      ground_cn2_(ground_cn2),
      inner_outer_ratio_(inner_outer_ratio),
      ground_altitude_(ground_altitude) {
    require(wind_rms > 0.0, "AtmosphereModel: wind_rms must be positive");
    require(ground_cn2 > 0.0, "AtmosphereModel: ground_cn2 must be positive");
    require(inner_outer_ratio > 0.0 && inner_outer_ratio < 1.0,
            "AtmosphereModel: inner_outer_ratio must lie in (0, 1)");
    require(ground_altitude >= 0.0, "AtmosphereModel: ground_altitude must be >= 0");
}

SlantPath::SlantPath(double receiver_altitude, double satellite_altitude, double zenith_angle)
    : h0_(receiver_altitude), H_(satellite_altitude), zenith_(zenith_angle) {
    require(receiver_altitude >= 0.0, "SlantPath: receiver altitude must be >= 0");
    require(receiver_altitude < satellite_altitude,
            "SlantPath: satellite must be above the receiver");
    require(zenith_angle >= 0.0 && zenith_angle < constants::pi / 2,
            "SlantPath: zenith angle must lie in [0, pi/2)");
}

double SlantPath::sec_zenith() const noexcept { return 1.0 / std::cos(zenith_); }

double SlantPath::slant_range() const noexcept { return (H_ - h0_) * sec_zenith(); }

double cn2_hv(double h, const AtmosphereModel& model) {
    require(h >= 0.0, "cn2_hv: altitude must be >= 0");
    const double wind = model.wind_rms() / 27.0;
    const double upper = 0.00594 * wind * wind * std::pow(1e-5 * h, 10) * std::exp(-h / 1000.0);
    const double middle = 2.7e-16 * std::exp(-h / 1500.0);
    const double ground = model.ground_cn2() * std::exp(-h / 100.0);
    return upper + middle + ground;
}

double outer_scale(double h) {
    require(h >= 0.0, "outer_scale: altitude must be >= 0");
    const double x = (h - 8500.0) / 2500.0;
    return 4.0 / (1.0 + x * x);
}

double inner_scale(double h, const AtmosphereModel& model) {
    return model.inner_outer_ratio() * outer_scale(h);
}

double cn2_path_integral(const SlantPath& path, const AtmosphereModel& model, double rel_tol) {
    auto f = [&](double h) { return cn2_hv(h, model); };
    return integrate_altitude(f, path.receiver_altitude(), path.satellite_altitude(), rel_tol)
        .value;
}

double fried_parameter(const SlantPath& path, double k, const AtmosphereModel& model) {
    require(k > 0.0, "fried_parameter: wavenumber must be positive");
    const double integral = cn2_path_integral(path, model);
    return std::pow(0.423 * k * k * path.sec_zenith() * integral, -3.0 / 5.0);
}

double phase_psd(double kappa, double r0, double l0, double L0) {
    require(kappa >= 0.0, "phase_psd: spatial frequency must be >= 0");
    require(r0 > 0.0, "phase_psd: Fried parameter must be positive");
    require(l0 > 0.0 && l0 < L0, "phase_psd: require 0 < inner scale < outer scale");
    const double kappa_m = 5.92 / l0;
    const double kappa_0 = 2.0 * constants::pi / L0;
    return 0.49 * std::pow(r0, -5.0 / 3.0) * std::exp(-(kappa * kappa) / (kappa_m * kappa_m)) /
           std::pow(kappa * kappa + kappa_0 * kappa_0, 11.0 / 6.0);
}

}  // namespace cvqkd
