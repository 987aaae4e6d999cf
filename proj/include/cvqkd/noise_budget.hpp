#pragma once

// Excess-noise bookkeeping in shot-noise units: channel (input-referred) and
// detector (output-referred) components, and the chi terms built from them.

#include <string>
#include <vector>

namespace cvqkd {

enum class ProtocolKind { homodyne, heterodyne };

/// mu = 1 for homodyne, 2 for heterodyne.
constexpr int multiplier(ProtocolKind p) noexcept { return p == ProtocolKind::homodyne ? 1 : 2; }

const char* to_string(ProtocolKind p) noexcept;

struct ChannelNoiseComponents {
    double xi_ta = 0.0;
    double xi_rin_atmos = 0.0;
    double xi_rin_lo = 0.0;
    double xi_mod = 0.0;
    double xi_background = 0.0;
    double xi_rin_signal = 0.0;

    /// Daylight values of the reference satellite downlink (D_R = 1 m).
    static ChannelNoiseComponents reference_daylight();
};

struct DetectorNoiseComponents {
    double v_el = 0.0;
    double xi_adc = 0.0;
    double xi_overlap = 0.0;
    double xi_lo = 0.0;
    double xi_leak = 0.0;

    static DetectorNoiseComponents reference();
};

/// Night-time background level replacing the daylight xi_Background.
inline constexpr double night_background = 1e-7;

double assemble_channel_noise(const ChannelNoiseComponents& c);
double assemble_detector_noise(const DetectorNoiseComponents& d);

class NoiseBudget {
public:
    NoiseBudget(ChannelNoiseComponents channel, DetectorNoiseComponents detector);

    /// Aggregates only, e.g. for parameter sweeps that pin xi_ch and xi_d.
    static NoiseBudget from_totals(double xi_ch, double xi_d);

    double xi_ch() const noexcept { return xi_ch_; }
    double xi_d() const noexcept { return xi_d_; }
    const ChannelNoiseComponents& channel() const noexcept { return channel_; }
    const DetectorNoiseComponents& detector() const noexcept { return detector_; }
    /// False for budgets built from aggregates; components are then zero.
    bool itemised() const noexcept { return itemised_; }

private:
    ChannelNoiseComponents channel_;
    DetectorNoiseComponents detector_;
    double xi_ch_;
    double xi_d_;
    bool itemised_ = true;
};

/// xi = xi_ch + mu xi_d / (eta_d T).
double total_excess_noise(double xi_ch, double xi_d, int mu, double eta_d, double T);

/// chi_ch = (1 - T)/T + xi_ch.
double chi_channel(double T, double xi_ch);

/// chi_d = (mu - eta_d)/eta_d + mu xi_d / eta_d.
double chi_detector(int mu, double eta_d, double xi_d);

/// chi = chi_ch + chi_d / T.
double chi_total(double chi_ch, double chi_d, double T);

/// Bob's quadrature variance (eta_d T / mu)(V_A + xi) + 1.
double bob_variance(double V_A, double xi_ch, double xi_d, int mu, double eta_d, double T);

double loss_db_from_transmissivity(double T);
double transmissivity_from_loss_db(double loss_db);

struct NoiseShare {
    std::string name;
    double value;     // contribution to xi, SNU
    double percent;   // share of xi
};

/// Contribution of every component to xi = xi_ch + mu xi_d/(eta_d T),
/// detector terms scaled by mu/(eta_d T).
std::vector<NoiseShare> noise_shares(const NoiseBudget& budget, int mu, double eta_d, double T);

}  // namespace cvqkd
