// Copyright 2026 The rabisim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rabisim/experiment.hpp"
#include "rabisim/trace_io.hpp"

namespace fs = std::filesystem;
using namespace rabisim;

namespace {

struct CliOverrides {
    std::optional<std::string> config_path;
    std::optional<std::string> mode;
    std::optional<std::size_t> spins;
    std::optional<double> concentration;
    std::optional<double> gamma_g;
    std::optional<double> gamma_mw;
    std::optional<std::string> hp;
    std::optional<std::size_t> realizations;
    std::optional<std::uint64_t> seed;
    std::optional<double> tmax;
    std::optional<double> dt;
    std::optional<double> stride;
    std::optional<double> xi0;
    std::optional<double> zeta0;
    std::optional<bool> dipolar;
    std::optional<std::string> out;
    std::optional<std::size_t> workers;
    std::optional<std::string> g_axes;
    std::optional<std::string> t1;
    std::optional<std::string> t2;
    std::optional<std::string> oracle_kind;
    bool allow_large = false;
    bool dump_realizations = false;
    bool dump_couplings = false;
};

void add_common_options(CLI::App* sub, CliOverrides& o) {
    sub->add_option("--config", o.config_path, "Config file (key = value lines)");
    sub->add_option("--spins", o.spins, "Number of spins L");
    sub->add_option("--concentration", o.concentration,
                    "Fraction of occupied lattice sites (1e-4 = 0.01%)");
    sub->add_option("--gamma-g", o.gamma_g, "Lorentzian width of the g-factor disorder");
    sub->add_option("--gamma-mw", o.gamma_mw, "Lorentzian width of the microwave disorder");
    sub->add_option("--hp", o.hp, "Microwave amplitude h_p (comma list for sweeps)");
    sub->add_option("--realizations", o.realizations, "Disorder realizations R");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--tmax", o.tmax, "Time horizon in us");
    sub->add_option("--dt", o.dt, "Time step in us (default 1e-5 with halving check)");
    sub->add_option("--stride", o.stride, "Observable sampling stride in us");
    sub->add_option("--xi0", o.xi0, "g-factor cutoff (default 10*Gamma)");
    sub->add_option("--zeta0", o.zeta0, "Microwave cutoff (default 10*gamma)");
    sub->add_option("--dipolar", o.dipolar, "Enable dipolar couplings (true/false)");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--workers", o.workers, "Worker threads (0 = hardware)");
    sub->add_option("--g-axes", o.g_axes, "Which xi components are drawn: xyz, z or xy");
    sub->add_option("--t1", o.t1, "Bloch T1 in us ('inf' allowed)");
    sub->add_option("--t2", o.t2, "Bloch T2 in us ('inf' allowed)");
    sub->add_option("--oracle-kind", o.oracle_kind,
                    "ideal | mw | gxy | gz-sz | gz-sy | gz-sx (+ -nocutoff variants)");
    sub->add_flag("--allow-large", o.allow_large, "Opt in to L > 24");
    sub->add_flag("--dump-realizations", o.dump_realizations,
                  "Write replayable disorder records (realizations.txt)");
    sub->add_flag("--dump-couplings", o.dump_couplings,
                  "Write realization 0's coupling table (couplings.txt)");
}

double parse_time_flag(const std::string& v) {
    return v == "inf" ? std::numeric_limits<double>::infinity() : std::stod(v);
}

ExperimentConfig build_config(const CliOverrides& o, RunMode default_mode) {
    ExperimentConfig config;
    if (o.config_path)
        config = parse_config_file(*o.config_path);
    else
        config.mode = default_mode;

    if (o.mode) config.mode = parse_config_text("mode = " + *o.mode).mode;
    if (o.spins) config.num_spins = *o.spins;
    if (o.concentration) config.concentration = *o.concentration;
    if (o.gamma_g) config.gamma_g = *o.gamma_g;
    if (o.gamma_mw) config.gamma_mw = *o.gamma_mw;
    if (o.hp) {
        config.h_p_list.clear();
        std::istringstream in(*o.hp);
        std::string item;
        while (std::getline(in, item, ','))
            if (!item.empty())
                config.h_p_list.push_back(std::stod(item));
    }
    if (o.realizations) config.realizations = *o.realizations;
    if (o.seed) config.master_seed = *o.seed;
    if (o.tmax) config.t_max = *o.tmax;
    if (o.dt) config.dt = *o.dt;
    if (o.stride) config.sample_stride = *o.stride;
    if (o.xi0) config.xi0 = *o.xi0;
    if (o.zeta0) config.zeta0 = *o.zeta0;
    if (o.dipolar) config.dipolar_enabled = *o.dipolar;
    if (o.out) config.output_dir = *o.out;
    if (o.workers) config.workers = *o.workers;
    if (o.g_axes) config.g_axes = *o.g_axes;
    if (o.t1) config.t1_us = parse_time_flag(*o.t1);
    if (o.t2) config.t2_us = parse_time_flag(*o.t2);
    if (o.oracle_kind) config.oracle_kind = *o.oracle_kind;
    if (o.allow_large) config.allow_large = true;
    if (o.dump_realizations) config.dump_realizations = true;
    if (o.dump_couplings) config.dump_couplings = true;
    config.validate();
    return config;
}

fs::path prepare_output_dir(const ExperimentConfig& config) {
    const fs::path dir = config.output_dir.empty() ? fs::path("rabisim_out")
                                                   : fs::path(config.output_dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

constexpr const char* kPlotScript = R"(#!/usr/bin/env python3
"""Plots the CSV artifacts living next to this script."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))

def read_csv(name):
    path = os.path.join(here, name)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in rows[0]} if rows else None

drawn = False
for name in sorted(os.listdir(here)):
    if name.startswith("trace") and name.endswith(".csv"):
        data = read_csv(name)
        if data:
            plt.plot(data["t_us"], data["mz"], lw=0.8, label=name)
            drawn = True
if drawn:
    plt.xlabel("t [us]")
    plt.ylabel("<M^z>")
    plt.legend(fontsize=6)
    plt.savefig(os.path.join(here, "traces.png"), dpi=160)
    plt.close()

rates = read_csv("rates.csv")
if rates:
    plt.errorbar(rates["hp"], rates["c_R"], yerr=rates["stderr"], fmt="o")
    plt.xlabel("h_p")
    plt.ylabel("c_R [1/us]")
    plt.savefig(os.path.join(here, "rates.png"), dpi=160)
    plt.close()

overlay = read_csv("overlay.csv")
if overlay:
    plt.plot(overlay["t_us"], overlay["engine"], lw=0.8, label="engine")
    plt.plot(overlay["t_us"], overlay["oracle"], lw=0.8, label="oracle")
    plt.xlabel("t [us]")
    plt.legend()
    plt.savefig(os.path.join(here, "overlay.png"), dpi=160)
    plt.close()

print("wrote plots into", here)
)";

void emit_run_outputs(const fs::path& dir, const RunResult& result) {
    write_trace_csv((dir / "trace.csv").string(), result.average);
    write_text(dir / "fit.txt", format_fit_result(result.fit));
    write_text(dir / "meta.txt", format_metadata(result.meta));
    write_text(dir / "plot.py", kPlotScript);
}

void emit_dumps(const fs::path& dir, const ExperimentConfig& config) {
    if (config.dump_realizations)
        write_text(dir / "realizations.txt", dump_realizations_text(config));
    if (config.dump_couplings)
        write_text(dir / "couplings.txt", dump_couplings_text(config));
}

std::string hp_suffix(double h_p) {
    std::ostringstream out;
    out << "hp" << h_p;
    std::string s = out.str();
    for (char& c : s)
        if (c == '.')
            c = 'p';
    return s;
}

int cmd_run(const CliOverrides& o) {
    const ExperimentConfig config = build_config(o, RunMode::Rabi);
    const RunResult result = run_experiment(config);
    const fs::path dir = prepare_output_dir(config);
    emit_run_outputs(dir, result);
    emit_dumps(dir, config);
    std::cout << "mode " << mode_name(config.mode) << ": fitted "
              << fit_model_name(result.fit.kind) << " c = " << result.fit.decay_rate()
              << " 1/us, f = " << result.fit.frequency() << " MHz\n"
              << "outputs in " << dir << "\n";
    return 0;
}

int cmd_sweep(const CliOverrides& o) {
    const ExperimentConfig config = build_config(o, RunMode::Rabi);
    const SweepResult sweep = run_sweep(config);
    const fs::path dir = prepare_output_dir(config);
    for (const RunResult& run : sweep.runs) {
        write_trace_csv((dir / ("trace_" + hp_suffix(run.h_p) + ".csv")).string(),
                        run.average);
        write_text(dir / ("fit_" + hp_suffix(run.h_p) + ".txt"),
                   format_fit_result(run.fit));
    }
    write_rates_csv((dir / "rates.csv").string(), sweep.rates);
    write_text(dir / "meta.txt", format_metadata(sweep.meta));
    write_text(dir / "plot.py", kPlotScript);
    emit_dumps(dir, config);
    std::cout << "sweep: c_R(h_p) slope = " << sweep.rates.slope << " +- "
              << sweep.rates.slope_stderr << ", intercept = " << sweep.rates.intercept
              << " +- " << sweep.rates.intercept_stderr
              << ", R^2 = " << sweep.rates.r_squared << "\n"
              << "outputs in " << dir << "\n";
    return 0;
}

int cmd_oracle(const CliOverrides& o, bool compare) {
    ExperimentConfig config = build_config(o, RunMode::Oracle);
    config.mode = RunMode::Oracle;
    const fs::path dir = prepare_output_dir(config);

    const Trace curve = oracle_curve(config);
    write_trace_csv((dir / "oracle.csv").string(), curve);
    write_text(dir / "plot.py", kPlotScript);

    if (compare) {
        const OracleCompareResult overlay = compare_oracle(config);
        std::ofstream out(dir / "overlay.csv");
        out << "t_us,engine,oracle,band3sigma\n" << std::setprecision(17);
        for (std::size_t i = 0; i < overlay.times.size(); ++i)
            out << overlay.times[i] << ',' << overlay.engine[i] << ','
                << overlay.oracle[i] << ',' << overlay.band[i] << '\n';
        std::ostringstream report;
        report << "oracle_kind " << config.oracle_kind << "\n"
               << "max_abs_deviation " << overlay.max_abs_deviation << "\n"
               << "within_3sigma_band " << (overlay.within_band ? 1 : 0) << "\n";
        write_text(dir / "report.txt", report.str());
        std::cout << report.str();
    }
    std::cout << "outputs in " << dir << "\n";
    return 0;
}

int cmd_bloch(const CliOverrides& o) {
    ExperimentConfig config = build_config(o, RunMode::Bloch);
    config.mode = RunMode::Bloch;
    const RunResult result = run_bloch(config);
    const fs::path dir = prepare_output_dir(config);
    emit_run_outputs(dir, result);
    std::cout << "bloch: fitted c = " << result.fit.decay_rate() << " 1/us, f = "
              << result.fit.frequency() << " MHz\n"
              << "outputs in " << dir << "\n";
    return 0;
}

int cmd_fit(const std::string& csv_path, const std::string& model,
            const std::string& column, double tmin, double tmax,
            const std::optional<std::string>& out_dir) {
    const Trace trace = read_trace_csv(csv_path);
    const std::vector<double>* y = &trace.mz;
    if (column == "mx") y = &trace.mx;
    else if (column == "my") y = &trace.my;
    else if (column != "mz")
        throw std::runtime_error("fit: column must be mx, my or mz");

    FitModelKind kind;
    if (model == "damped-cosine") kind = FitModelKind::DampedCosine;
    else if (model == "exponential") kind = FitModelKind::Exponential;
    else if (model == "sine-offset") kind = FitModelKind::SineOffset;
    else throw std::runtime_error("fit: unknown model '" + model + "'");

    FitOptions options;
    options.t_min = tmin;
    options.t_max = tmax;
    const FitResult result = fit(trace.times, *y, kind, options);
    const std::string text = format_fit_result(result);
    std::cout << text;
    if (out_dir) {
        fs::create_directories(*out_dir);
        write_text(fs::path(*out_dir) / "fit.txt", text);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rabi-oscillation decoherence simulator"};
    app.require_subcommand(1);

    CliOverrides run_o, sweep_o, oracle_o, bloch_o;
    auto* run_cmd = app.add_subcommand("run", "Ensemble TDSE run (modes rabi / t2)");
    add_common_options(run_cmd, run_o);
    run_cmd->add_option("--mode", run_o.mode, "rabi | t2");

    auto* sweep_cmd = app.add_subcommand("sweep", "Rate sweep over h_p values");
    add_common_options(sweep_cmd, sweep_o);

    auto* oracle_cmd = app.add_subcommand("oracle", "Closed-form / quadrature curves");
    add_common_options(oracle_cmd, oracle_o);
    bool compare = false;
    oracle_cmd->add_flag("--compare", compare,
                         "Also run the engine ensemble and emit the overlay");

    auto* bloch_cmd = app.add_subcommand("bloch", "Averaged-local-Bloch model run");
    add_common_options(bloch_cmd, bloch_o);

    auto* fit_cmd = app.add_subcommand("fit", "Fit an external CSV trace");
    std::string fit_csv, fit_model = "damped-cosine", fit_column = "mz";
    double fit_tmin = 0.0, fit_tmax = std::numeric_limits<double>::infinity();
    std::optional<std::string> fit_out;
    fit_cmd->add_option("csv", fit_csv, "Trace CSV path")->required();
    fit_cmd->add_option("--model", fit_model, "damped-cosine | exponential | sine-offset");
    fit_cmd->add_option("--column", fit_column, "mx | my | mz");
    fit_cmd->add_option("--tmin", fit_tmin, "Window start in us");
    fit_cmd->add_option("--tmax", fit_tmax, "Window end in us");
    fit_cmd->add_option("--out", fit_out, "Directory for fit.txt");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return cmd_run(run_o);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_o);
        if (oracle_cmd->parsed())
            return cmd_oracle(oracle_o, compare);
        if (bloch_cmd->parsed())
            return cmd_bloch(bloch_o);
        if (fit_cmd->parsed())
            return cmd_fit(fit_csv, fit_model, fit_column, fit_tmin, fit_tmax, fit_out);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
