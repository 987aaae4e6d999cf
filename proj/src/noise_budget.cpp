#include "cvqkd/noise_budget.hpp"

#include <cmath>

#include "cvqkd/errors.hpp"

namespace cvqkd {

using detail::require;

const char* to_string(ProtocolKind p) noexcept {
    return p == ProtocolKind::homodyne ? "homodyne" : "heterodyne";
}

ChannelNoiseComponents ChannelNoiseComponents::reference_daylight() {
    // Upper bound 1e-4 used for the "<0.0001" signal RIN entry.
    return {0.006, 0.01, 0.0018, 0.0005, 0.0002, 0.0001};
}

DetectorNoiseComponents DetectorNoiseComponents::reference() {
    // Overlap, LO subtraction and leakage are each bounded by 1e-4 and
    // together contribute 1e-4; split evenly.
    const double small = 1e-4 / 3.0;
    return {0.013, 0.0002, small, small, small};
}

namespace {

void check_channel(const ChannelNoiseComponents& c) {
    require(c.xi_ta >= 0.0 && c.xi_rin_atmos >= 0.0 && c.xi_rin_lo >= 0.0 && c.xi_mod >= 0.0 &&
                c.xi_background >= 0.0 && c.xi_rin_signal >= 0.0,
            "channel noise components must be >= 0");
}

void check_detector(const DetectorNoiseComponents& d) {
    require(d.v_el >= 0.0 && d.xi_adc >= 0.0 && d.xi_overlap >= 0.0 && d.xi_lo >= 0.0 &&
                d.xi_leak >= 0.0,
            "detector noise components must be >= 0");
}

void check_mu(int mu) { require(mu == 1 || mu == 2, "protocol multiplier must be 1 or 2"); }

}  // namespace

double assemble_channel_noise(const ChannelNoiseComponents& c) {
    check_channel(c);
    return c.xi_ta + c.xi_rin_atmos + c.xi_rin_lo + c.xi_mod + c.xi_background + c.xi_rin_signal;
}

double assemble_detector_noise(const DetectorNoiseComponents& d) {
    check_detector(d);
    return d.v_el + d.xi_adc + d.xi_overlap + d.xi_lo + d.xi_leak;
}

NoiseBudget::NoiseBudget(ChannelNoiseComponents channel, DetectorNoiseComponents detector)
    : channel_(channel),
      detector_(detector),
      xi_ch_(assemble_channel_noise(channel)),
      xi_d_(assemble_detector_noise(detector)) {}

NoiseBudget NoiseBudget::from_totals(double xi_ch, double xi_d) {
    require(xi_ch >= 0.0 && xi_d >= 0.0, "NoiseBudget: aggregates must be >= 0");
    NoiseBudget b(ChannelNoiseComponents{}, DetectorNoiseComponents{});
    b.xi_ch_ = xi_ch;
    b.xi_d_ = xi_d;
    b.itemised_ = false;
    return b;
}

double total_excess_noise(double xi_ch, double xi_d, int mu, double eta_d, double T) {
    check_mu(mu);
    require(eta_d > 0.0 && eta_d <= 1.0, "total_excess_noise: eta_d must lie in (0, 1]");
    require(T > 0.0 && T <= 1.0, "total_excess_noise: T must lie in (0, 1]");
    return xi_ch + mu * xi_d / (eta_d * T);
}

double chi_channel(double T, double xi_ch) {
    require(T > 0.0 && T <= 1.0, "chi_channel: T must lie in (0, 1]");
    return (1.0 - T) / T + xi_ch;
}

double chi_detector(int mu, double eta_d, double xi_d) {
    check_mu(mu);
    require(eta_d > 0.0 && eta_d <= 1.0, "chi_detector: eta_d must lie in (0, 1]");
    return (mu - eta_d) / eta_d + mu * xi_d / eta_d;
}

double chi_total(double chi_ch, double chi_d, double T) {
    require(T > 0.0 && T <= 1.0, "chi_total: T must lie in (0, 1]");
    return chi_ch + chi_d / T;
}

double bob_variance(double V_A, double xi_ch, double xi_d, int mu, double eta_d, double T) {
    check_mu(mu);
    return eta_d * T / mu * (V_A + xi_ch) + xi_d + 1.0;
}

double loss_db_from_transmissivity(double T) {
    require(T > 0.0 && T <= 1.0, "loss_db: T must lie in (0, 1]");
    return -10.0 * std::log10(T);
}

double transmissivity_from_loss_db(double loss_db) {
    require(loss_db >= 0.0 && std::isfinite(loss_db), "transmissivity: loss must be finite and >= 0");
    return std::pow(10.0, -loss_db / 10.0);
}

std::vector<NoiseShare> noise_shares(const NoiseBudget& budget, int mu, double eta_d, double T) {
    const double scale = mu / (eta_d * T);
    const double total = total_excess_noise(budget.xi_ch(), budget.xi_d(), mu, eta_d, T);
    auto finish = [total](std::vector<NoiseShare> shares) {
        for (auto& s : shares) s.percent = total > 0.0 ? 100.0 * s.value / total : 0.0;
        return shares;
    };
    if (!budget.itemised()) {
        return finish({{"xi_ch", budget.xi_ch(), 0.0}, {"xi_d", scale * budget.xi_d(), 0.0}});
    }
    const auto& c = budget.channel();
    const auto& d = budget.detector();
    return finish({
        {"xi_ta", c.xi_ta, 0.0},
        {"xi_rin_atmos", c.xi_rin_atmos, 0.0},
        {"xi_rin_lo", c.xi_rin_lo, 0.0},
        {"xi_mod", c.xi_mod, 0.0},
        {"xi_background", c.xi_background, 0.0},
        {"xi_rin_signal", c.xi_rin_signal, 0.0},
        {"v_el", scale * d.v_el, 0.0},
        {"xi_adc", scale * d.xi_adc, 0.0},
        {"xi_overlap", scale * d.xi_overlap, 0.0},
        {"xi_lo", scale * d.xi_lo, 0.0},
        {"xi_leak", scale * d.xi_leak, 0.0},
    });
}

}  // namespace cvqkd
