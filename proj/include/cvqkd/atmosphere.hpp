#pragma once

// Vertical turbulence profile (Hufnagel-Valley C_n^2, Coulman-Vernin outer
// scale) and slant-path integrals built on it. All altitudes are in metres.

#include <functional>

#include "cvqkd/quadrature.hpp"

namespace cvqkd {

class AtmosphereModel {
public:
    /// Defaults: v = 21 m/s, A = 1.7e-14 m^-2/3, l0/L0 = 0.005, ground at 0 m.
    AtmosphereModel() = default;
    AtmosphereModel(double wind_rms, double ground_cn2, double inner_outer_ratio,
                    double ground_altitude = 0.0);

    double wind_rms() const noexcept { return wind_rms_; }
    double ground_cn2() const noexcept { return ground_cn2_; }
    double inner_outer_ratio() const noexcept { return inner_outer_ratio_; }
    double ground_altitude() const noexcept { return ground_altitude_; }

    bool operator==(const AtmosphereModel&) const = default;

private:
    double wind_rms_ = 21.0;
    double ground_cn2_ = 1.7e-14;
    double inner_outer_ratio_ = 0.005;
    double ground_altitude_ = 0.0;
};

class SlantPath {
public:
    /// receiver altitude h0 [m], satellite altitude H [m], zenith angle [rad].
    SlantPath(double receiver_altitude, double satellite_altitude, double zenith_angle);

    double receiver_altitude() const noexcept { return h0_; }
    double satellite_altitude() const noexcept { return H_; }
    double zenith_angle() const noexcept { return zenith_; }
    double sec_zenith() const noexcept;
    /// Line-of-sight distance between receiver and satellite, (H - h0) sec(zeta).
    double slant_range() const noexcept;

    bool operator==(const SlantPath&) const = default;

private:
    double h0_;
    double H_;
    double zenith_;
};

/// Hufnagel-Valley refractive-index structure parameter C_n^2(h).
double cn2_hv(double altitude, const AtmosphereModel& model = {});

/// Coulman-Vernin outer scale L0(h) = 4 / (1 + ((h - 8500)/2500)^2), metres.
double outer_scale(double altitude);

/// Inner scale l0(h) = (l0/L0 ratio) * L0(h), metres.
double inner_scale(double altitude, const AtmosphereModel& model = {});

inline constexpr double default_altitude_rel_tol = 1e-9;

/// Adaptive quadrature of an altitude profile over [h0, H]. The integrand may
/// be real or complex valued.
template <class F>
auto integrate_altitude(F&& integrand, double h0, double H,
                        double rel_tol = default_altitude_rel_tol) {
    if (!(h0 < H)) throw DomainError("integrate_altitude: require h0 < H");
    if (!(rel_tol > 0.0)) throw DomainError("integrate_altitude: rel_tol must be positive");
    QuadratureOptions opts;
    opts.rel_tol = rel_tol;
    return integrate_adaptive(std::forward<F>(integrand), h0, H, opts);
}

/// Integral of C_n^2 along the vertical extent of the path, m^(1/3).
double cn2_path_integral(const SlantPath& path, const AtmosphereModel& model = {},
                         double rel_tol = default_altitude_rel_tol);

/// Fried parameter r0 = (0.423 k^2 sec(zeta) int C_n^2 dh)^(-3/5), metres.
double fried_parameter(const SlantPath& path, double wavenumber,
                       const AtmosphereModel& model = {});

/// Phase power spectral density with Gaussian inner-scale cutoff and von Karman
/// outer scale. Not consumed elsewhere in the library; provided as a leaf
/// utility for callers building phase screens or phase-noise estimates.
double phase_psd(double spatial_frequency, double fried, double inner, double outer);

}  // namespace cvqkd
