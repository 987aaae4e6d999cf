#include "cvqkd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include "cvqkd/errors.hpp"

namespace cvqkd {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// out[i] = f(i) for i < count, spread over up to `threads` workers. The
// exception of the lowest failing index is rethrown so that failures do not
// depend on scheduling.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, int threads, F f) {
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

std::optional<FiniteKeyRateResult> finite_or_empty(const LinkParams& link,
                                                   const NoiseBudget& budget,
                                                   const FiniteBlock& block,
                                                   const SecurityBudget& sec) {
    if (link.protocol != ProtocolKind::heterodyne) return std::nullopt;
    return key_rate_finite_if_resolved(link, budget, block, sec);
}

double clamped(const std::optional<FiniteKeyRateResult>& r) { return r ? r->rate.key_rate : 0.0; }
double raw(const std::optional<FiniteKeyRateResult>& r) { return r ? r->rate.key_rate_raw : nan; }

std::string source_of(const Scenario& s, const std::string& name,
                      const std::optional<double>& override_value, bool modeled) {
    if (override_value) return "override";
    if (name == "xi_background" && s.night) return "night";
    if (modeled && s.noise_source == NoiseSource::model) return "model";
    return "table";
}

}  // namespace

std::vector<double> default_loss_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 70; ++i) grid.push_back(0.5 * i);
    return grid;
}

Scenario apply_axis(const Scenario& base, const std::string& axis, double value) {
    Scenario s = base;
    if (axis == "loss_dB") {
        s.loss_db = value;
    } else if (axis == "D_R") {
        s.D_R_m = value;
    } else if (axis == "zenith") {
        s.zenith_deg = value;
    } else if (axis == "tau0") {
        s.tau0_ps = value;
    } else if (axis == "V_A") {
        s.V_A = value;
    } else if (axis == "n") {
        s.n = value;
        s.n_e = value;
    } else {
        throw ValidationError({"sweep.axis: unknown axis '" + axis + "'"});
    }
    s.sweep.reset();
    return s;
}

SweepResult run_sweep(const Scenario& base, const SweepAxisSpec& axis, int threads) {
    SweepResult result;
    result.axis = axis.axis;
    for (const auto& [name, unit] : sweep_axes())
        if (name == axis.axis) result.unit = unit;
    Scenario probe = base;
    probe.sweep = axis;
    probe.validate();

    const std::vector<double> grid = axis.grid();
    result.points = parallel_map<SweepPoint>(grid.size(), threads, [&](std::size_t i) {
        const Scenario s = apply_axis(base, axis.axis, grid[i]);
        s.validate();
        const ModeledNoise modeled = model_noise(s);
        const NoiseBudget budget = build_noise_budget(s, modeled);
        const LinkParams link = s.link();
        SweepPoint p{grid[i],
                     link.T,
                     budget.xi_ch(),
                     budget.xi_d(),
                     total_excess_noise(budget.xi_ch(), budget.xi_d(), link.mu(), link.eta_d,
                                        link.T),
                     modeled.sigma_si2,
                     key_rate_asymptotic(link, budget),
                     std::nullopt,
                     std::nullopt};
        p.finite_collective = finite_or_empty(link, budget, s.block(), split_epsilon(s.epsilon));
        p.finite_general = finite_or_empty(link, budget, s.block(),
                                           SecurityBudget::for_general_attacks(s.eps_prime, s.n));
        return p;
    });
    return result;
}

Table sweep_table(const SweepResult& r) {
    Table t;
    t.title = "sweep over " + r.axis;
    t.columns = {{r.axis, r.unit},
                 {"T", ""},
                 {"xi_ch", "SNU"},
                 {"xi_d", "SNU"},
                 {"xi_total", "SNU"},
                 {"sigma_si2", ""},
                 {"I_AB", "bits/pulse"},
                 {"S_BE", "bits/pulse"},
                 {"K_asym", "bits/pulse"},
                 {"K_asym_raw", "bits/pulse"},
                 {"K_collective", "bits/pulse"},
                 {"K_collective_raw", "bits/pulse"},
                 {"K_general", "bits/pulse"},
                 {"K_general_raw", "bits/pulse"}};
    for (const auto& p : r.points) {
        t.add_row({p.axis_value, p.T, p.xi_ch, p.xi_d, p.xi_total, p.sigma_si2,
                   p.asymptotic.mutual_info, p.asymptotic.holevo, p.asymptotic.key_rate,
                   p.asymptotic.key_rate_raw, clamped(p.finite_collective),
                   raw(p.finite_collective), clamped(p.finite_general), raw(p.finite_general)});
    }
    return t;
}

Table noise_breakdown_table(const Scenario& s) {
    const ModeledNoise m = model_noise(s);
    const NoiseBudget b = build_noise_budget(s, m);
    const auto& c = b.channel();
    const auto& d = b.detector();
    const auto& o = s.overrides;

    Table t;
    t.title = "excess noise break-down";
    t.columns = {{"component", ""}, {"group", ""}, {"value", "SNU"}, {"source", ""},
                 {"modeled", "SNU"}};
    auto row = [&](const std::string& name, const char* group, double value,
                   const std::optional<double>& ov, double modeled_value) {
        const bool has_model = !std::isnan(modeled_value);
        t.add_row({name, std::string(group), value, source_of(s, name, ov, has_model),
                   modeled_value});
    };
    row("xi_ta", "channel", c.xi_ta, o.xi_ta, m.xi_ta);
    row("xi_rin_atmos", "channel", c.xi_rin_atmos, o.xi_rin_atmos, m.xi_rin_atmos);
    row("xi_rin_lo", "channel", c.xi_rin_lo, o.xi_rin_lo, m.xi_rin_lo);
    row("xi_mod", "channel", c.xi_mod, o.xi_mod, nan);
    row("xi_background", "channel", c.xi_background, o.xi_background, nan);
    row("xi_rin_signal", "channel", c.xi_rin_signal, o.xi_rin_signal, nan);
    row("v_el", "detector", d.v_el, o.v_el, nan);
    row("xi_adc", "detector", d.xi_adc, o.xi_adc, nan);
    row("xi_overlap", "detector", d.xi_overlap, o.xi_overlap, nan);
    row("xi_lo", "detector", d.xi_lo, o.xi_lo, nan);
    row("xi_leak", "detector", d.xi_leak, o.xi_leak, nan);
    t.add_row({std::string("xi_ch"), std::string("total"), b.xi_ch(), std::string("sum"), nan});
    t.add_row({std::string("xi_d"), std::string("total"), b.xi_d(), std::string("sum"), nan});
    return t;
}

Table noise_budget_table(const ScenarioEvaluation& e) {
    const auto& c = e.budget.channel();
    const auto& d = e.budget.detector();
    const std::map<std::string, double> values = {
        {"xi_ta", c.xi_ta},         {"xi_rin_atmos", c.xi_rin_atmos},
        {"xi_rin_lo", c.xi_rin_lo}, {"xi_mod", c.xi_mod},
        {"xi_background", c.xi_background}, {"xi_rin_signal", c.xi_rin_signal},
        {"v_el", d.v_el},           {"xi_adc", d.xi_adc},
        {"xi_overlap", d.xi_overlap}, {"xi_lo", d.xi_lo},
        {"xi_leak", d.xi_leak},     {"xi_ch", e.budget.xi_ch()},
        {"xi_d", e.budget.xi_d()}};

    Table t;
    t.title = "noise contributions at T = 1, eta_d = 1, mu = 1";
    t.columns = {{"component", ""}, {"value", "SNU"}, {"contribution", "SNU"}, {"share", "%"}};
    double total = 0.0;
    for (const auto& s : e.shares) {
        t.add_row({s.name, values.at(s.name), s.value, s.percent});
        total += s.value;
    }
    t.add_row({std::string("total"), nan, total, 100.0});
    return t;
}

ImpactResult impact_analysis(const Scenario& s) {
    const NoiseBudget base = build_noise_budget(s, model_noise(s));
    const FiniteBlock block = s.block();
    const SecurityBudget sec = split_epsilon(s.epsilon);

    struct Case {
        std::string name;
        double value;
        double xi_ch;
        double xi_d;
        double eta_d;
    };
    const std::vector<Case> cases = {
        {"xi_ch", base.xi_ch(), base.xi_ch(), 0.0, 1.0},
        {"xi_ta", base.channel().xi_ta, base.channel().xi_ta, 0.0, 1.0},
        {"xi_rin_atmos", base.channel().xi_rin_atmos, base.channel().xi_rin_atmos, 0.0, 1.0},
        {"xi_background", base.channel().xi_background, base.channel().xi_background, 0.0, 1.0},
        {"eta_d", s.eta_d, 0.0, 0.0, s.eta_d},
        {"v_el", base.detector().v_el, 0.0, base.detector().v_el, 1.0},
    };

    auto rate = [&](double loss, double xi_ch, double xi_d, double eta_d) {
        const LinkParams link{s.V_A, transmissivity_from_loss_db(loss), eta_d, s.beta,
                              ProtocolKind::heterodyne};
        return key_rate_finite(link, NoiseBudget::from_totals(xi_ch, xi_d), block, sec)
            .rate.key_rate_raw;
    };

    ImpactResult r;
    for (std::size_t j = 0; j < 3; ++j) r.ideal_key_rate_raw[j] = rate(r.losses_db[j], 0, 0, 1);
    for (const auto& c : cases) {
        ImpactRow row{c.name, c.value, {}, {}};
        for (std::size_t j = 0; j < 3; ++j) {
            row.key_rate_raw[j] = rate(r.losses_db[j], c.xi_ch, c.xi_d, c.eta_d);
            const double k0 = std::max(0.0, r.ideal_key_rate_raw[j]);
            const double k = std::max(0.0, row.key_rate_raw[j]);
            row.ratio[j] = k0 > 0.0 ? k / k0 : 0.0;
        }
        r.rows.push_back(row);
    }
    return r;
}

Table impact_table(const ImpactResult& r) {
    Table t;
    t.title = "individual impact of each noise term, K/K0 (finite size, collective, heterodyne)";
    t.columns = {{"parameter", ""}, {"value", ""}};
    for (double loss : r.losses_db) t.columns.push_back({"ratio_" + format_number(loss) + "dB", ""});
    for (const auto& row : r.rows) {
        std::vector<Cell> cells{row.parameter, row.value};
        for (double q : row.ratio) cells.emplace_back(q);
        t.add_row(std::move(cells));
    }
    return t;
}

Table figure_scintillation(const Scenario& s, const std::vector<double>& apertures_m,
                           const std::vector<double>& zeniths_deg, int threads) {
    struct Job {
        double zenith;
        double aperture;
    };
    std::vector<Job> jobs;
    for (double z : zeniths_deg)
        for (double dr : apertures_m) jobs.push_back({z, dr});

    const auto results = parallel_map<ScintillationResult>(jobs.size(), threads, [&](std::size_t i) {
        Scenario point = s;
        point.zenith_deg = jobs[i].zenith;
        point.D_R_m = jobs[i].aperture;
        point.validate();
        return scintillation_index_detailed(point.D_R_m, point.path(), point.wavenumber(),
                                            point.atmosphere, default_altitude_rel_tol,
                                            point.aperture_range);
    });

    Table t;
    t.title = "aperture-averaged scintillation index";
    t.columns = {{"zenith", "deg"}, {"D_R", "m"}, {"sigma_si2", ""}, {"abs_error", ""},
                 {"xi_rin_atmos", "SNU"}};
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        t.add_row({jobs[i].zenith, jobs[i].aperture, results[i].index, results[i].abs_error,
                   xi_rin_atmos(results[i].index, s.V_A)});
    }
    return t;
}

Table figure_broadening(const Scenario& s, const std::vector<double>& tau0_ps,
                        const std::vector<double>& zeniths_deg) {
    Table t;
    t.title = "pulse broadening ratio tau0/tau1";
    t.columns = {{"zenith", "deg"}, {"tau0", "ps"}, {"tau1", "ps"}, {"ratio", ""},
                 {"alpha", "s^2"}};
    for (double z : zeniths_deg) {
        for (double tau : tau0_ps) {
            Scenario point = s;
            point.zenith_deg = z;
            point.tau0_ps = tau;
            point.validate();
            const BroadeningResult b = pulse_broadening(point.pulse(), point.path(),
                                                        point.atmosphere);
            t.add_row({z, tau, b.tau1 * 1e12, b.ratio, b.alpha});
        }
    }
    return t;
}

Table figure_keyrate_asymptotic(const Scenario& s, const std::vector<double>& losses_db) {
    const NoiseBudget noisy = build_noise_budget(s, model_noise(s));
    const NoiseBudget quiet = NoiseBudget::from_totals(0.0, noisy.xi_d());

    Table t;
    t.title = "asymptotic key rate";
    t.columns = {{"loss", "dB"}, {"T", ""}};
    const std::array<std::pair<const char*, ProtocolKind>, 2> protocols = {
        std::pair{"hom", ProtocolKind::homodyne}, std::pair{"het", ProtocolKind::heterodyne}};
    for (const auto& [tag, kind] : protocols) {
        for (const char* noise : {"xi0", "xi"}) {
            const std::string base = std::string("K_") + tag + "_" + noise;
            t.columns.push_back({base, "bits/pulse"});
            t.columns.push_back({base + "_raw", "bits/pulse"});
        }
    }
    for (double loss : losses_db) {
        Scenario point = s;
        point.loss_db = loss;
        point.validate();
        std::vector<Cell> row{loss, point.transmissivity()};
        for (const auto& [tag, kind] : protocols) {
            LinkParams link = point.link();
            link.protocol = kind;
            for (const NoiseBudget* budget : {&quiet, &noisy}) {
                const KeyRateResult k = key_rate_asymptotic(link, *budget);
                row.emplace_back(k.key_rate);
                row.emplace_back(k.key_rate_raw);
            }
        }
        t.add_row(std::move(row));
    }
    return t;
}

Table figure_keyrate_finite(const Scenario& s, const std::vector<double>& losses_db,
                            const std::vector<double>& block_sizes, int threads) {
    const NoiseBudget budget = build_noise_budget(s, model_noise(s));

    Table t;
    t.title = "finite-size heterodyne key rate";
    t.columns = {{"loss", "dB"}, {"K_asym", "bits/pulse"}, {"K_asym_raw", "bits/pulse"}};
    for (double n : block_sizes) {
        const std::string tag = "_n" + format_number(n);
        for (const char* attack : {"K_collective", "K_general"}) {
            t.columns.push_back({attack + tag, "bits/pulse"});
            t.columns.push_back({attack + tag + "_raw", "bits/pulse"});
        }
    }

    const auto rows = parallel_map<std::vector<Cell>>(losses_db.size(), threads, [&](std::size_t i) {
        Scenario point = s;
        point.loss_db = losses_db[i];
        point.protocol = ProtocolKind::heterodyne;
        point.validate();
        const LinkParams link = point.link();
        const KeyRateResult asym = key_rate_asymptotic(link, budget);
        std::vector<Cell> row{losses_db[i], asym.key_rate, asym.key_rate_raw};
        for (double n : block_sizes) {
            const FiniteBlock block{2.0 * n, n, s.d};
            const auto coll = finite_or_empty(link, budget, block, split_epsilon(s.epsilon));
            const auto gen = finite_or_empty(link, budget, block,
                                             SecurityBudget::for_general_attacks(s.eps_prime, n));
            row.emplace_back(clamped(coll));
            row.emplace_back(raw(coll));
            row.emplace_back(clamped(gen));
            row.emplace_back(raw(gen));
        }
        return row;
    });
    for (auto row : rows) t.add_row(std::move(row));
    return t;
}

}  // namespace cvqkd
