#include "cvqkd/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "cvqkd/constants.hpp"
#include "cvqkd/errors.hpp"

namespace cvqkd {

using nlohmann::json;

namespace {

// Walks one JSON object, recording problems instead of throwing so that a
// single validation pass can report every offending key.
class SectionReader {
public:
    SectionReader(const json& root, std::string section, std::vector<std::string>& problems)
        : problems_(problems), section_(std::move(section)) {
        if (!root.contains(section_)) return;
        const json& node = root.at(section_);
        if (!node.is_object()) {
            problems_.push_back(section_ + ": expected an object");
            return;
        }
        node_ = &node;
    }

    bool present() const { return node_ != nullptr; }
    bool has(const std::string& key) const { return node_ && node_->contains(key); }

    void number(const std::string& key, double& out) {
        if (!claim(key)) return;
        const json& v = node_->at(key);
        if (!v.is_number()) {
            problems_.push_back(path(key) + ": expected a number");
            return;
        }
        out = v.get<double>();
        if (!std::isfinite(out)) problems_.push_back(path(key) + ": must be finite");
    }

    void number(const std::string& key, std::optional<double>& out) {
        if (!has(key)) return;
        double value = 0.0;
        number(key, value);
        out = value;
    }

    void integer(const std::string& key, int& out) {
        if (!claim(key)) return;
        const json& v = node_->at(key);
        if (!v.is_number_integer()) {
            problems_.push_back(path(key) + ": expected an integer");
            return;
        }
        out = v.get<int>();
    }

    void boolean(const std::string& key, bool& out) {
        if (!claim(key)) return;
        const json& v = node_->at(key);
        if (!v.is_boolean()) {
            problems_.push_back(path(key) + ": expected true or false");
            return;
        }
        out = v.get<bool>();
    }

    template <class Enum>
    void choice(const std::string& key, Enum& out, const std::map<std::string, Enum>& options) {
        if (!claim(key)) return;
        const json& v = node_->at(key);
        if (v.is_string()) {
            auto it = options.find(v.get<std::string>());
            if (it != options.end()) {
                out = it->second;
                return;
            }
        }
        std::string names;
        for (const auto& [name, value] : options) names += (names.empty() ? "" : "|") + name;
        problems_.push_back(path(key) + ": expected one of " + names);
    }

    void string(const std::string& key, std::string& out) {
        if (!claim(key)) return;
        const json& v = node_->at(key);
        if (!v.is_string()) {
            problems_.push_back(path(key) + ": expected a string");
            return;
        }
        out = v.get<std::string>();
    }

    void exclusive(const std::string& a, const std::string& b) {
        if (has(a) && has(b))
            problems_.push_back(path(a) + " and " + path(b) + " are mutually exclusive");
    }

    SectionReader child(const std::string& key) {
        claim(key);
        return node_ ? SectionReader(*node_, key, problems_, section_) : SectionReader(problems_);
    }

    /// Reports keys present in the object but never read.
    void finish() {
        if (!node_) return;
        for (const auto& [key, value] : node_->items())
            if (!seen_.count(key)) problems_.push_back(path(key) + ": unknown key");
    }

private:
    SectionReader(const json& parent, const std::string& key, std::vector<std::string>& problems,
                  const std::string& prefix)
        : SectionReader(parent, key, problems) {
        section_ = prefix + "." + key;
    }
    explicit SectionReader(std::vector<std::string>& problems) : problems_(problems) {}

    bool claim(const std::string& key) {
        if (!has(key)) return false;
        seen_.insert(key);
        return true;
    }
    std::string path(const std::string& key) const { return section_ + "." + key; }

    std::vector<std::string>& problems_;
    std::string section_;
    const json* node_ = nullptr;
    std::set<std::string> seen_;
};

const std::map<std::string, ProtocolKind> protocol_names = {
    {"homodyne", ProtocolKind::homodyne}, {"heterodyne", ProtocolKind::heterodyne}};
const std::map<std::string, NoiseSource> source_names = {{"table", NoiseSource::table},
                                                         {"model", NoiseSource::model}};
const std::map<std::string, ApertureRange> range_names = {{"slant", ApertureRange::slant},
                                                          {"vertical", ApertureRange::vertical}};
const std::map<std::string, SweepScale> scale_names = {{"linear", SweepScale::linear},
                                                       {"log", SweepScale::log}};

template <class Enum>
std::string name_of(Enum value, const std::map<std::string, Enum>& options) {
    for (const auto& [name, v] : options)
        if (v == value) return name;
    return "?";
}

// Override keys in a fixed order, shared by parsing and serialization.
std::vector<std::pair<const char*, std::optional<double> NoiseOverrides::*>> override_fields() {
    return {{"xi_ta", &NoiseOverrides::xi_ta},
            {"xi_rin_atmos", &NoiseOverrides::xi_rin_atmos},
            {"xi_rin_lo", &NoiseOverrides::xi_rin_lo},
            {"xi_mod", &NoiseOverrides::xi_mod},
            {"xi_background", &NoiseOverrides::xi_background},
            {"xi_rin_signal", &NoiseOverrides::xi_rin_signal},
            {"v_el", &NoiseOverrides::v_el},
            {"xi_adc", &NoiseOverrides::xi_adc},
            {"xi_overlap", &NoiseOverrides::xi_overlap},
            {"xi_lo", &NoiseOverrides::xi_lo},
            {"xi_leak", &NoiseOverrides::xi_leak}};
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& sweep_axes() {
    static const std::vector<std::pair<std::string, std::string>> axes = {
        {"loss_dB", "dB"}, {"D_R", "m"}, {"zenith", "deg"},
        {"tau0", "ps"},    {"V_A", "SNU"}, {"n", "symbols"}};
    return axes;
}

std::vector<double> SweepAxisSpec::grid() const {
    std::vector<double> out(static_cast<std::size_t>(points));
    if (points == 1) {
        out[0] = min;
        return out;
    }
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        if (scale == SweepScale::linear) {
            out[i] = min + t * (max - min);
        } else {
            out[i] = std::exp(std::log(min) + t * (std::log(max) - std::log(min)));
        }
    }
    out.back() = max;
    return out;
}

double Scenario::transmissivity() const { return transmissivity_from_loss_db(loss_db); }

double Scenario::omega0() const {
    return 2.0 * std::numbers::pi * carrier_frequency_thz * 1e12;
}

double Scenario::wavenumber() const { return omega0() / constants::speed_of_light; }

SlantPath Scenario::path() const {
    return SlantPath(atmosphere.ground_altitude(), H_km * 1e3,
                     constants::deg_to_rad(zenith_deg));
}

OpticalPulse Scenario::pulse() const {
    return OpticalPulse(omega0(), tau0_ps * 1e-12, 0.5 * D_T_m, rep_rate_mhz * 1e6);
}

LinkParams Scenario::link() const { return {V_A, transmissivity(), eta_d, beta, protocol}; }

FiniteBlock Scenario::block() const { return {n + n_e, n_e, d}; }

void Scenario::validate() const {
    std::vector<std::string> problems;
    auto check = [&](bool ok, const char* message) {
        if (!ok) problems.emplace_back(message);
    };
    check(V_A > 0.0, "link.V_A: must be positive");
    check(eta_d > 0.0 && eta_d <= 1.0, "link.eta_d: must lie in (0, 1]");
    check(beta > 0.0 && beta <= 1.0, "link.beta: must lie in (0, 1]");
    check(loss_db >= 0.0 && std::isfinite(loss_db) && std::pow(10.0, -loss_db / 10.0) > 0.0,
          "link.loss_db: must be >= 0 and give T > 0");
    check(carrier_frequency_thz > 0.0, "optics.carrier_frequency_thz: must be positive");
    check(tau0_ps > 0.0, "optics.tau0_ps: must be positive");
    check(rep_rate_mhz > 0.0, "optics.rep_rate_mhz: must be positive");
    check(D_T_m > 0.0, "optics.D_T_m: must be positive");
    check(D_R_m > 0.0, "optics.D_R_m: must be positive");
    check(H_km * 1e3 > atmosphere.ground_altitude(),
          "geometry.H_km: must exceed atmosphere.ground_altitude_m");
    check(zenith_deg >= 0.0 && zenith_deg < 90.0, "geometry.zenith_deg: must lie in [0, 90)");
    check(lo_rin.rin_density >= 0.0, "noise.rin_lo_per_hz: must be >= 0");
    check(lo_rin.bandwidth >= 0.0, "noise.lo_bandwidth_hz: must be >= 0");
    check(rho_ta_deficit >= 0.0 && rho_ta_deficit <= 2.0,
          "noise.rho_ta_deficit: must lie in [0, 2]");
    for (const auto& [key, field] : override_fields()) {
        const auto& v = overrides.*field;
        if (v && !(*v >= 0.0)) problems.push_back(std::string("noise.overrides.") + key +
                                                  ": must be >= 0");
    }
    check(epsilon > 0.0 && epsilon < 1.0, "security.epsilon: must lie in (0, 1)");
    check(eps_prime > 0.0 && eps_prime < 1.0, "security.eps_prime: must lie in (0, 1)");
    check(n >= 1.0, "security.n: must be >= 1");
    check(n_e >= 1.0, "security.n_e: must be >= 1");
    check(d >= 1, "security.d: must be >= 1");
    if (sweep) {
        bool known = false;
        for (const auto& [name, unit] : sweep_axes()) known = known || name == sweep->axis;
        if (!known) problems.push_back("sweep.axis: unknown axis '" + sweep->axis + "'");
        check(sweep->points >= 1, "sweep.points: must be >= 1");
        check(sweep->min <= sweep->max, "sweep: min must not exceed max");
        check(sweep->scale == SweepScale::linear || sweep->min > 0.0,
              "sweep.min: log scale needs a positive range");
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
}

Scenario scenario_from_json(const json& config) {
    std::vector<std::string> problems;
    if (!config.is_object()) throw ValidationError({"config: expected a JSON object"});

    Scenario s;
    static const std::set<std::string> sections = {"link",  "optics",   "geometry", "atmosphere",
                                                   "noise", "security", "sweep"};
    for (const auto& [key, value] : config.items())
        if (!sections.count(key)) problems.push_back(key + ": unknown section");

    SectionReader link(config, "link", problems);
    link.number("V_A", s.V_A);
    link.number("eta_d", s.eta_d);
    link.number("beta", s.beta);
    link.choice("protocol", s.protocol, protocol_names);
    link.exclusive("loss_db", "transmissivity");
    link.number("loss_db", s.loss_db);
    if (link.has("transmissivity") && !link.has("loss_db")) {
        double T = 1.0;
        link.number("transmissivity", T);
        if (T > 0.0 && T <= 1.0) {
            s.loss_db = loss_db_from_transmissivity(T);
        } else {
            problems.emplace_back("link.transmissivity: must lie in (0, 1]");
        }
    } else if (link.has("transmissivity")) {
        double ignored = 0.0;
        link.number("transmissivity", ignored);
    }
    link.finish();

    SectionReader optics(config, "optics", problems);
    optics.exclusive("carrier_frequency_thz", "wavelength_nm");
    optics.number("carrier_frequency_thz", s.carrier_frequency_thz);
    if (optics.has("wavelength_nm")) {
        double nm = 0.0;
        optics.number("wavelength_nm", nm);
        if (nm > 0.0) {
            if (!optics.has("carrier_frequency_thz"))
                s.carrier_frequency_thz = constants::speed_of_light / (nm * 1e-9) / 1e12;
        } else {
            problems.emplace_back("optics.wavelength_nm: must be positive");
        }
    }
    optics.number("tau0_ps", s.tau0_ps);
    optics.number("rep_rate_mhz", s.rep_rate_mhz);
    optics.number("D_T_m", s.D_T_m);
    optics.number("D_R_m", s.D_R_m);
    optics.finish();

    SectionReader geometry(config, "geometry", problems);
    geometry.number("H_km", s.H_km);
    geometry.number("zenith_deg", s.zenith_deg);
    geometry.finish();

    SectionReader atmosphere(config, "atmosphere", problems);
    double wind = s.atmosphere.wind_rms();
    double cn2 = s.atmosphere.ground_cn2();
    double ratio = s.atmosphere.inner_outer_ratio();
    double ground = s.atmosphere.ground_altitude();
    atmosphere.number("wind_rms_m_per_s", wind);
    atmosphere.number("ground_cn2_m-2/3", cn2);
    atmosphere.number("inner_outer_ratio", ratio);
    atmosphere.number("ground_altitude_m", ground);
    atmosphere.finish();
    try {
        s.atmosphere = AtmosphereModel(wind, cn2, ratio, ground);
    } catch (const DomainError& e) {
        problems.push_back(std::string("atmosphere: ") + e.what());
    }

    SectionReader noise(config, "noise", problems);
    noise.choice("source", s.noise_source, source_names);
    noise.boolean("night", s.night);
    noise.number("rin_lo_per_hz", s.lo_rin.rin_density);
    noise.number("lo_bandwidth_hz", s.lo_rin.bandwidth);
    noise.number("rho_ta_deficit", s.rho_ta_deficit);
    noise.choice("aperture_range", s.aperture_range, range_names);
    {
        SectionReader ov = noise.child("overrides");
        for (const auto& [key, field] : override_fields()) ov.number(key, s.overrides.*field);
        ov.finish();
    }
    noise.finish();

    SectionReader security(config, "security", problems);
    security.number("epsilon", s.epsilon);
    security.number("eps_prime", s.eps_prime);
    security.number("n", s.n);
    security.number("n_e", s.n_e);
    security.integer("d", s.d);
    security.finish();

    SectionReader sweep(config, "sweep", problems);
    if (sweep.present()) {
        SweepAxisSpec spec;
        if (!sweep.has("axis")) problems.emplace_back("sweep.axis: required");
        sweep.string("axis", spec.axis);
        sweep.number("min", spec.min);
        sweep.number("max", spec.max);
        sweep.integer("points", spec.points);
        sweep.choice("scale", spec.scale, scale_names);
        sweep.finish();
        s.sweep = spec;
    }

    // Range checks run on whatever parsed, so one pass reports everything.
    try {
        s.validate();
    } catch (const ValidationError& e) {
        problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError({"cannot open config file '" + path + "'"});
    json config;
    try {
        config = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ValidationError({std::string("config is not valid JSON: ") + e.what()});
    }
    return scenario_from_json(config);
}

json scenario_to_json(const Scenario& s) {
    json overrides = json::object();
    for (const auto& [key, field] : override_fields()) {
        const auto& v = s.overrides.*field;
        if (v) overrides[key] = *v;
    }
    json out = {
        {"link",
         {{"V_A", s.V_A},
          {"eta_d", s.eta_d},
          {"beta", s.beta},
          {"protocol", name_of(s.protocol, protocol_names)},
          {"loss_db", s.loss_db}}},
        {"optics",
         {{"carrier_frequency_thz", s.carrier_frequency_thz},
          {"tau0_ps", s.tau0_ps},
          {"rep_rate_mhz", s.rep_rate_mhz},
          {"D_T_m", s.D_T_m},
          {"D_R_m", s.D_R_m}}},
        {"geometry", {{"H_km", s.H_km}, {"zenith_deg", s.zenith_deg}}},
        {"atmosphere",
         {{"wind_rms_m_per_s", s.atmosphere.wind_rms()},
          {"ground_cn2_m-2/3", s.atmosphere.ground_cn2()},
          {"inner_outer_ratio", s.atmosphere.inner_outer_ratio()},
          {"ground_altitude_m", s.atmosphere.ground_altitude()}}},
        {"noise",
         {{"source", name_of(s.noise_source, source_names)},
          {"night", s.night},
          {"rin_lo_per_hz", s.lo_rin.rin_density},
          {"lo_bandwidth_hz", s.lo_rin.bandwidth},
          {"rho_ta_deficit", s.rho_ta_deficit},
          {"aperture_range", name_of(s.aperture_range, range_names)},
          {"overrides", overrides}}},
        {"security",
         {{"epsilon", s.epsilon},
          {"eps_prime", s.eps_prime},
          {"n", s.n},
          {"n_e", s.n_e},
          {"d", s.d}}},
    };
    if (s.sweep) {
        out["sweep"] = {{"axis", s.sweep->axis},
                        {"min", s.sweep->min},
                        {"max", s.sweep->max},
                        {"points", s.sweep->points},
                        {"scale", name_of(s.sweep->scale, scale_names)}};
    }
    return out;
}

ModeledNoise model_noise(const Scenario& s) {
    const SlantPath path = s.path();
    const OpticalPulse pulse = s.pulse();
    const double k = s.wavenumber();

    const ScintillationResult si = scintillation_index_detailed(
        s.D_R_m, path, k, s.atmosphere, default_altitude_rel_tol, s.aperture_range);
    const BroadeningResult br = pulse_broadening(pulse, path, s.atmosphere);

    ModeledNoise m{};
    m.sigma_si2 = si.index;
    m.sigma_si2_error = si.abs_error;
    m.xi_rin_atmos = xi_rin_atmos(si.index, s.V_A);
    m.xi_rin_lo = xi_rin_lo(s.lo_rin, s.V_A);
    m.broadening = br;
    m.xi_ta = xi_time_of_arrival(s.V_A, pulse.carrier_angular_frequency(),
                                 TimingCorrelation::from_deficit(s.rho_ta_deficit), br.tau1);
    m.fresnel = fresnel_parameter(pulse, path.slant_range());
    m.fried_parameter = fried_parameter(path, k, s.atmosphere);
    return m;
}

NoiseBudget build_noise_budget(const Scenario& s, const ModeledNoise& modeled) {
    ChannelNoiseComponents ch = ChannelNoiseComponents::reference_daylight();
    DetectorNoiseComponents det = DetectorNoiseComponents::reference();
    if (s.noise_source == NoiseSource::model) {
        ch.xi_ta = modeled.xi_ta;
        ch.xi_rin_atmos = modeled.xi_rin_atmos;
        ch.xi_rin_lo = modeled.xi_rin_lo;
    }
    if (s.night) ch.xi_background = night_background;

    const NoiseOverrides& o = s.overrides;
    auto apply = [](double& target, const std::optional<double>& v) {
        if (v) target = *v;
    };
    apply(ch.xi_ta, o.xi_ta);
    apply(ch.xi_rin_atmos, o.xi_rin_atmos);
    apply(ch.xi_rin_lo, o.xi_rin_lo);
    apply(ch.xi_mod, o.xi_mod);
    apply(ch.xi_background, o.xi_background);
    apply(ch.xi_rin_signal, o.xi_rin_signal);
    apply(det.v_el, o.v_el);
    apply(det.xi_adc, o.xi_adc);
    apply(det.xi_overlap, o.xi_overlap);
    apply(det.xi_lo, o.xi_lo);
    apply(det.xi_leak, o.xi_leak);
    return NoiseBudget(ch, det);
}

ScenarioEvaluation evaluate(const Scenario& s) {
    s.validate();
    ScenarioEvaluation e{s,
                         model_noise(s),
                         NoiseBudget::from_totals(0.0, 0.0),
                         s.link(),
                         {},
                         0.0,
                         {},
                         {},
                         std::nullopt,
                         std::nullopt,
                         0.0};
    e.budget = build_noise_budget(s, e.modeled);
    e.link.validate();
    e.chi = chi_terms(e.link, e.budget.xi_ch(), e.budget.xi_d());
    e.xi_total = total_excess_noise(e.budget.xi_ch(), e.budget.xi_d(), e.link.mu(), e.link.eta_d,
                                    e.link.T);
    e.shares = noise_shares(e.budget, 1, 1.0, 1.0);
    e.asymptotic = key_rate_asymptotic(e.link, e.budget);
    if (s.protocol == ProtocolKind::heterodyne) {
        const FiniteBlock block = s.block();
        e.finite_collective =
            key_rate_finite_if_resolved(e.link, e.budget, block, split_epsilon(s.epsilon));
        e.finite_general = key_rate_finite_if_resolved(
            e.link, e.budget, block, SecurityBudget::for_general_attacks(s.eps_prime, s.n));
    }
    e.block_duration_s = s.block().N / (s.rep_rate_mhz * 1e6);
    return e;
}

namespace {

json rate_json(const KeyRateResult& r) {
    return {{"mutual_info_bits", r.mutual_info},
            {"holevo_bits", r.holevo},
            {"key_rate_raw_bits_per_pulse", r.key_rate_raw},
            {"key_rate_bits_per_pulse", r.key_rate},
            {"symplectic_eigenvalues", r.eigenvalues}};
}

json finite_json(const FiniteKeyRateResult& f) {
    json out = rate_json(f.rate);
    out["holevo_true_bits"] = f.holevo_true;
    out["delta_aep"] = f.delta_aep;
    out["key_fraction"] = f.key_fraction;
    out["estimators"] = {{"t_hat", f.bounds.t_hat},
                         {"sigma2_hat", f.bounds.sigma2_hat},
                         {"z", f.bounds.z},
                         {"T_min", f.bounds.T_min},
                         {"xi_max", f.bounds.xi_max}};
    return out;
}

}  // namespace

json report_to_json(const ScenarioEvaluation& e) {
    const auto& c = e.budget.channel();
    const auto& d = e.budget.detector();
    json shares = json::array();
    for (const auto& s : e.shares)
        shares.push_back({{"name", s.name}, {"value", s.value}, {"percent", s.percent}});

    json report = {
        {"scenario", scenario_to_json(e.scenario)},
        {"transmissivity", e.link.T},
        {"noise_budget",
         {{"channel",
           {{"xi_ta", c.xi_ta},
            {"xi_rin_atmos", c.xi_rin_atmos},
            {"xi_rin_lo", c.xi_rin_lo},
            {"xi_mod", c.xi_mod},
            {"xi_background", c.xi_background},
            {"xi_rin_signal", c.xi_rin_signal}}},
          {"detector",
           {{"v_el", d.v_el},
            {"xi_adc", d.xi_adc},
            {"xi_overlap", d.xi_overlap},
            {"xi_lo", d.xi_lo},
            {"xi_leak", d.xi_leak}}},
          {"xi_ch", e.budget.xi_ch()},
          {"xi_d", e.budget.xi_d()},
          {"xi_total", e.xi_total},
          {"shares_at_T1_eta1_mu1", shares}}},
        {"chi", {{"chi_ch", e.chi.chi_ch}, {"chi_d", e.chi.chi_d}, {"chi", e.chi.chi}}},
        {"modeled_noise",
         {{"sigma_si2", e.modeled.sigma_si2},
          {"sigma_si2_error", e.modeled.sigma_si2_error},
          {"xi_rin_atmos", e.modeled.xi_rin_atmos},
          {"xi_rin_lo", e.modeled.xi_rin_lo},
          {"xi_ta", e.modeled.xi_ta},
          {"broadening_alpha_s2", e.modeled.broadening.alpha},
          {"broadening_nu1_m2", e.modeled.broadening.nu1},
          {"tau1_ps", e.modeled.broadening.tau1 * 1e12},
          {"broadening_ratio", e.modeled.broadening.ratio},
          {"fresnel_parameter", e.modeled.fresnel},
          {"fried_parameter_m", e.modeled.fried_parameter}}},
        {"key_rates",
         {{"asymptotic", rate_json(e.asymptotic)},
          {"finite_collective",
           e.finite_collective ? finite_json(*e.finite_collective) : json(nullptr)},
          {"finite_general", e.finite_general ? finite_json(*e.finite_general) : json(nullptr)}}},
        {"block_duration_s", e.block_duration_s},
    };
    return report;
}

}  // namespace cvqkd
