// Command-line front end: scenario runs, sweeps, noise tables and figure data.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cvqkd/errors.hpp"
#include "cvqkd/experiments.hpp"

namespace {

using namespace cvqkd;
using nlohmann::json;

enum class Format { csv, json, text };

struct Common {
    std::string config_path;
    Format format = Format::csv;
    std::string output_path;
    int threads = 1;
};

Scenario load(const Common& c) {
    return c.config_path.empty() ? scenario_from_json(json::object())
                                 : load_scenario(c.config_path);
}

void emit(const Common& c, const std::string& text) {
    if (c.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(c.output_path);
    if (!out) throw ValidationError({"cannot write output file '" + c.output_path + "'"});
    out << text;
}

void emit_table(const Common& c, const Table& t) {
    switch (c.format) {
        case Format::csv: emit(c, to_csv(t)); break;
        case Format::json: emit(c, to_json(t).dump(2) + "\n"); break;
        case Format::text: emit(c, to_text(t)); break;
    }
}

void flatten(const json& j, const std::string& prefix, Table& t) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items())
            flatten(value, prefix.empty() ? key : prefix + "." + key, t);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "[" + std::to_string(i) + "]", t);
    } else if (j.is_number()) {
        t.add_row({prefix, j.get<double>()});
    } else if (j.is_null()) {
        t.add_row({prefix, std::string("")});
    } else {
        t.add_row({prefix, j.is_string() ? j.get<std::string>() : j.dump()});
    }
}

void emit_json_document(const Common& c, const json& doc, const std::string& title) {
    if (c.format == Format::json) {
        emit(c, doc.dump(2) + "\n");
        return;
    }
    Table t;
    t.title = title;
    t.columns = {{"quantity", ""}, {"value", ""}};
    flatten(doc, "", t);
    emit_table(c, t);
}

std::vector<double> linear_grid(double lo, double hi, double step) {
    std::vector<double> out;
    const int count = static_cast<int>(std::lround((hi - lo) / step));
    for (int i = 0; i <= count; ++i) out.push_back(lo + step * i);
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Excess-noise budget and secret key rates of a CV-QKD satellite downlink"};
    app.require_subcommand(1);

    Common common;
    const std::map<std::string, Format> formats = {
        {"csv", Format::csv}, {"json", Format::json}, {"text", Format::text}};
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", common.config_path, "scenario file (JSON)")
            ->check(CLI::ExistingFile);
        sub->add_option("-f,--format", common.format, "output format")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
        sub->add_option("-o,--output", common.output_path, "write to file instead of stdout");
    };
    auto add_threads = [&](CLI::App* sub) {
        sub->add_option("-j,--threads", common.threads, "worker threads")
            ->check(CLI::Range(1, 256));
    };

    auto* cmd_run = app.add_subcommand("run", "evaluate one scenario");
    add_common(cmd_run);

    auto* cmd_config = app.add_subcommand("config", "print the effective scenario");
    add_common(cmd_config);

    SweepAxisSpec axis;
    std::optional<std::string> axis_name;
    std::optional<double> axis_min, axis_max;
    std::optional<int> axis_points;
    std::optional<std::string> axis_scale;
    auto* cmd_sweep = app.add_subcommand("sweep", "sweep one parameter");
    add_common(cmd_sweep);
    add_threads(cmd_sweep);
    cmd_sweep->add_option("--axis", axis_name, "loss_dB | D_R | zenith | tau0 | V_A | n");
    cmd_sweep->add_option("--min", axis_min, "first grid value");
    cmd_sweep->add_option("--max", axis_max, "last grid value");
    cmd_sweep->add_option("--points", axis_points, "number of grid points")
        ->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--scale", axis_scale, "linear | log")
        ->check(CLI::IsMember({"linear", "log"}));

    auto* cmd_budget = app.add_subcommand("noise-budget", "noise components and their shares");
    add_common(cmd_budget);

    std::string table_name;
    auto* cmd_table = app.add_subcommand("table", "noise-breakdown | impact");
    add_common(cmd_table);
    cmd_table->add_option("name", table_name, "table to produce")
        ->required()
        ->check(CLI::IsMember({"noise-breakdown", "impact"}));

    std::string figure_name;
    std::vector<double> apertures = linear_grid(0.5, 5.0, 0.25);
    std::vector<double> zeniths = {0.0, 30.0, 60.0};
    std::vector<double> pulse_widths = {1, 2, 5, 10, 20, 50, 100, 130, 200, 260, 500, 1000};
    std::vector<double> losses = default_loss_grid();
    std::vector<double> block_sizes = {1e10, 1e12};
    auto* cmd_figure =
        app.add_subcommand("figure", "scintillation | broadening | keyrate-asym | keyrate-finite");
    add_common(cmd_figure);
    add_threads(cmd_figure);
    cmd_figure->add_option("name", figure_name, "data set to produce")
        ->required()
        ->check(CLI::IsMember({"scintillation", "broadening", "keyrate-asym", "keyrate-finite"}));
    cmd_figure->add_option("--apertures-m", apertures, "receiver diameters")->delimiter(',');
    cmd_figure->add_option("--zeniths-deg", zeniths, "zenith angles")->delimiter(',');
    cmd_figure->add_option("--tau0-ps", pulse_widths, "pulse widths")->delimiter(',');
    cmd_figure->add_option("--losses-db", losses, "channel losses")->delimiter(',');
    cmd_figure->add_option("--block-sizes", block_sizes, "n = n_e values")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const Scenario scenario = load(common);

    if (cmd_run->parsed()) {
        emit_json_document(common, report_to_json(evaluate(scenario)), "scenario report");
    } else if (cmd_config->parsed()) {
        emit_json_document(common, scenario_to_json(scenario), "scenario");
    } else if (cmd_sweep->parsed()) {
        if (scenario.sweep) axis = *scenario.sweep;
        if (axis_name) axis.axis = *axis_name;
        if (axis_min) axis.min = *axis_min;
        if (axis_max) axis.max = *axis_max;
        if (axis_points) axis.points = *axis_points;
        if (axis_scale) axis.scale = *axis_scale == "log" ? SweepScale::log : SweepScale::linear;
        if (axis.axis.empty())
            throw ValidationError({"sweep: no axis given (--axis or a sweep block in the config)"});
        emit_table(common, sweep_table(run_sweep(scenario, axis, common.threads)));
    } else if (cmd_budget->parsed()) {
        emit_table(common, noise_budget_table(evaluate(scenario)));
    } else if (cmd_table->parsed()) {
        emit_table(common, table_name == "impact" ? impact_table(impact_analysis(scenario))
                                                  : noise_breakdown_table(scenario));
    } else if (cmd_figure->parsed()) {
        if (figure_name == "scintillation") {
            emit_table(common, figure_scintillation(scenario, apertures, zeniths, common.threads));
        } else if (figure_name == "broadening") {
            emit_table(common, figure_broadening(scenario, pulse_widths, zeniths));
        } else if (figure_name == "keyrate-asym") {
            emit_table(common, figure_keyrate_asymptotic(scenario, losses));
        } else {
            emit_table(common,
                       figure_keyrate_finite(scenario, losses, block_sizes, common.threads));
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const cvqkd::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const cvqkd::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << " (best estimate " << e.best_estimate()
                  << ", error bound " << e.error_bound() << ")\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        // DomainError and UnsupportedProtocol
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
