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

#include "rabisim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace rabisim {

double ExperimentConfig::effective_xi0() const {
    if (xi0 > 0.0)
        return xi0;
    return gamma_g > 0.0 ? 10.0 * gamma_g : 1.0;
}

double ExperimentConfig::effective_zeta0() const {
    if (zeta0 > 0.0)
        return zeta0;
    return gamma_mw > 0.0 ? 10.0 * gamma_mw : 1.0;
}

double ExperimentConfig::spin_density() const {
    return concentration * kDiamondSiteDensity;
}

LorentzianSpec ExperimentConfig::g_spec() const {
    return LorentzianSpec{gamma_g, effective_xi0()};
}

LorentzianSpec ExperimentConfig::mw_spec() const {
    return LorentzianSpec{gamma_mw, effective_zeta0()};
}

oracles::OracleParams ExperimentConfig::oracle_params(double h_p) const {
    oracles::OracleParams p;
    p.drive_amplitude = h_p;
    p.gamma_g = gamma_g;
    p.gamma_mw = gamma_mw;
    p.xi0 = effective_xi0();
    p.zeta0 = effective_zeta0();
    return p;
}

void ExperimentConfig::validate() const {
    if (num_spins < 1)
        throw ConfigError("config: L must be >= 1");
    if (num_spins > kMaxSpins)
        throw ResourceError("config: L exceeds the hard cap of 30 spins");
    if (num_spins > kLargeRunThreshold && !allow_large)
        throw ResourceError(
            "config: L > 24 needs allow_large = true (memory is 16 B * 2^L)");
    if (concentration <= 0.0 || concentration > 1.0)
        throw ConfigError("config: concentration is a site fraction in (0, 1]");
    if (gamma_g < 0.0 || gamma_mw < 0.0)
        throw ConfigError("config: disorder widths must be >= 0");
    if (realizations < 1)
        throw ConfigError("config: realizations must be >= 1");
    if (t_max <= 0.0)
        throw ConfigError("config: t_max must be > 0");
    if (sample_stride <= 0.0)
        throw ConfigError("config: sample_stride must be > 0");
    if (h_p_list.empty())
        throw ConfigError("config: h_p_list must not be empty");
    if (mode == RunMode::T2)
        for (double h : h_p_list)
            if (h != 0.0)
                throw ConfigError("config: t2 mode forces h_p = 0");
    if (!(t1_us > 0.0) || !(t2_us > 0.0))
        throw ConfigError("config: T1 and T2 must be positive (or inf)");
    if (g_axes != "xyz" && g_axes != "z" && g_axes != "xy")
        throw ConfigError("config: g_axes must be one of xyz, z, xy");
    if (dt_check_tol <= 0.0)
        throw ConfigError("config: dt_check_tol must be > 0");
}

namespace {

constexpr double kDefaultDt = 1e-5;

RunMode parse_mode(const std::string& value) {
    if (value == "rabi")
        return RunMode::Rabi;
    if (value == "t2")
        return RunMode::T2;
    if (value == "oracle")
        return RunMode::Oracle;
    if (value == "bloch")
        return RunMode::Bloch;
    throw ConfigError("config: unknown mode '" + value + "'");
}

bool parse_bool(const std::string& value) {
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    throw ConfigError("config: expected boolean, got '" + value + "'");
}

double parse_time(const std::string& value) {
    if (value == "inf")
        return std::numeric_limits<double>::infinity();
    return std::stod(value);
}

std::vector<double> parse_list(const std::string& value) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(std::stod(item));
    return out;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    const auto end = s.find_last_not_of(" \t\r");
    return begin == std::string::npos ? std::string() : s.substr(begin, end - begin + 1);
}

} // namespace

std::string mode_name(RunMode mode) {
    switch (mode) {
        case RunMode::Rabi: return "rabi";
        case RunMode::T2: return "t2";
        case RunMode::Oracle: return "oracle";
        default: return "bloch";
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    bool saw_h_p = false;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        std::string key, value;
        const auto eq = line.find('=');
        if (eq != std::string::npos) {
            key = trim(line.substr(0, eq));
            value = trim(line.substr(eq + 1));
        } else {
            const auto space = line.find_first_of(" \t");
            if (space == std::string::npos)
                throw ConfigError("config: malformed line '" + line + "'");
            key = trim(line.substr(0, space));
            value = trim(line.substr(space + 1));
        }
        if (value.empty())
            throw ConfigError("config: missing value for key '" + key + "'");

        if (key == "mode") config.mode = parse_mode(value);
        else if (key == "L") config.num_spins = std::stoul(value);
        else if (key == "n") config.concentration = std::stod(value);
        else if (key == "Gamma") config.gamma_g = std::stod(value);
        else if (key == "gamma") config.gamma_mw = std::stod(value);
        else if (key == "xi0") config.xi0 = std::stod(value);
        else if (key == "zeta0") config.zeta0 = std::stod(value);
        else if (key == "h_p_list") { config.h_p_list = parse_list(value); saw_h_p = true; }
        else if (key == "dipolar_enabled") config.dipolar_enabled = parse_bool(value);
        else if (key == "realizations") config.realizations = std::stoul(value);
        else if (key == "master_seed") config.master_seed = std::stoull(value);
        else if (key == "t_max") config.t_max = std::stod(value);
        else if (key == "dt") config.dt = std::stod(value);
        else if (key == "sample_stride") config.sample_stride = std::stod(value);
        else if (key == "output_dir") config.output_dir = value;
        else if (key == "T1") config.t1_us = parse_time(value);
        else if (key == "T2") config.t2_us = parse_time(value);
        else if (key == "oracle_kind") config.oracle_kind = value;
        else if (key == "workers") config.workers = std::stoul(value);
        else if (key == "allow_large") config.allow_large = parse_bool(value);
        else if (key == "g_axes") config.g_axes = value;
        else if (key == "dump_realizations") config.dump_realizations = parse_bool(value);
        else if (key == "dump_couplings") config.dump_couplings = parse_bool(value);
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    if (config.mode == RunMode::T2 && !saw_h_p)
        config.h_p_list = {0.0};
    config.validate();
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

std::string format_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "mode = " << mode_name(config.mode) << "\n";
    out << "L = " << config.num_spins << "\n";
    out << "n = " << config.concentration << "\n";
    out << "Gamma = " << config.gamma_g << "\n";
    out << "gamma = " << config.gamma_mw << "\n";
    out << "xi0 = " << config.effective_xi0() << "\n";
    out << "zeta0 = " << config.effective_zeta0() << "\n";
    out << "h_p_list = ";
    for (std::size_t i = 0; i < config.h_p_list.size(); ++i)
        out << (i ? "," : "") << config.h_p_list[i];
    out << "\n";
    out << "dipolar_enabled = " << (config.dipolar_enabled ? "true" : "false") << "\n";
    out << "realizations = " << config.realizations << "\n";
    out << "master_seed = " << config.master_seed << "\n";
    out << "t_max = " << config.t_max << "\n";
    out << "dt = " << config.dt << "\n";
    out << "sample_stride = " << config.sample_stride << "\n";
    out << "output_dir = " << config.output_dir << "\n";
    out << "T1 = " << config.t1_us << "\n";
    out << "T2 = " << config.t2_us << "\n";
    out << "oracle_kind = " << config.oracle_kind << "\n";
    out << "workers = " << config.workers << "\n";
    out << "allow_large = " << (config.allow_large ? "true" : "false") << "\n";
    out << "g_axes = " << config.g_axes << "\n";
    out << "dump_realizations = " << (config.dump_realizations ? "true" : "false") << "\n";
    out << "dump_couplings = " << (config.dump_couplings ? "true" : "false") << "\n";
    return out.str();
}

namespace {

ProductAxis start_axis_for(const ExperimentConfig& config) {
    if (config.mode == RunMode::T2)
        return ProductAxis::XPlus;
    if (config.mode == RunMode::Oracle && config.oracle_kind == "gz-sx")
        return ProductAxis::XPlus;
    return ProductAxis::ZPlus;
}

void apply_axis_mask(Realization& real, const std::string& axes) {
    if (axes == "xyz")
        return;
    if (axes == "z") {
        std::fill(real.xi_x.begin(), real.xi_x.end(), 0.0);
        std::fill(real.xi_y.begin(), real.xi_y.end(), 0.0);
    } else if (axes == "xy") {
        std::fill(real.xi_z.begin(), real.xi_z.end(), 0.0);
    } else {
        throw ConfigError("config: g_axes must be one of xyz, z, xy");
    }
}

std::size_t steps_for(const ExperimentConfig& config, double dt) {
    return static_cast<std::size_t>(std::llround(config.t_max / dt));
}

std::size_t record_stride_for(const ExperimentConfig& config, double dt) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(
                                        std::llround(config.sample_stride / dt)));
}

Trace simulate_realization(const ExperimentConfig& config, double h_p,
                           std::size_t index, double dt) {
    Realization real =
        draw_realization(config.num_spins, config.spin_density(), config.g_spec(),
                         config.mw_spec(), sub_seed(config.master_seed, index));
    apply_axis_mask(real, config.g_axes);

    ModelParams params;
    params.drive_amplitude = h_p;
    params.dipolar_enabled = config.dipolar_enabled;
    const CouplingTable table = build_couplings(real, params);

    StateVector state = init_product_state(config.num_spins, start_axis_for(config));
    EvolutionPlan plan;
    plan.dt = dt;
    plan.n_steps = steps_for(config, dt);
    plan.record_every = record_stride_for(config, dt);
    return evolve_and_record(state, table, plan);
}

/// Runs fn(0..count-1) on a small pool and feeds the results to consume() in
/// strict index order, so the reduction is independent of scheduling.
template <class Fn, class Consume>
void ordered_parallel_for(std::size_t count, std::size_t workers, Fn&& fn,
                          Consume&& consume) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            consume(i, fn(i));
        return;
    }

    std::mutex mutex;
    std::condition_variable produced, drained;
    std::map<std::size_t, Trace> ready;
    std::atomic<std::size_t> next_task{0};
    std::size_t next_reduce = 0;
    std::exception_ptr failure;
    const std::size_t buffer_cap = 2 * workers + 2;

    auto worker = [&]() {
        try {
            for (;;) {
                const std::size_t i = next_task.fetch_add(1);
                if (i >= count)
                    return;
                Trace trace = fn(i);
                std::unique_lock lock(mutex);
                drained.wait(lock, [&] {
                    return failure || ready.size() < buffer_cap || i == next_reduce;
                });
                if (failure)
                    return;
                ready.emplace(i, std::move(trace));
                produced.notify_all();
            }
        } catch (...) {
            std::lock_guard lock(mutex);
            if (!failure)
                failure = std::current_exception();
            produced.notify_all();
            drained.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back(worker);

    while (next_reduce < count) {
        Trace trace;
        {
            std::unique_lock lock(mutex);
            produced.wait(lock, [&] { return failure || ready.count(next_reduce); });
            if (failure)
                break;
            trace = std::move(ready.at(next_reduce));
            ready.erase(next_reduce);
            drained.notify_all();
        }
        consume(next_reduce, std::move(trace));
        ++next_reduce;
    }
    for (std::thread& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

struct EnsembleStats {
    Trace mean;
    Trace std_error;
};

EnsembleStats reduce_ensemble(const ExperimentConfig& config, double h_p, double dt) {
    const std::size_t count = config.realizations;
    const std::size_t workers =
        config.workers > 0 ? config.workers
                           : std::max(1u, std::thread::hardware_concurrency());

    Trace sum, sumsq;
    bool first = true;
    auto consume = [&](std::size_t, Trace trace) {
        if (first) {
            sum = trace;
            for (double& v : sum.mx) v = 0.0;
            for (double& v : sum.my) v = 0.0;
            for (double& v : sum.mz) v = 0.0;
            for (double& v : sum.energy) v = 0.0;
            sumsq = sum;
            first = false;
        }
        for (std::size_t i = 0; i < trace.size(); ++i) {
            sum.mx[i] += trace.mx[i];
            sum.my[i] += trace.my[i];
            sum.mz[i] += trace.mz[i];
            sum.energy[i] += trace.energy[i];
            sumsq.mx[i] += trace.mx[i] * trace.mx[i];
            sumsq.my[i] += trace.my[i] * trace.my[i];
            sumsq.mz[i] += trace.mz[i] * trace.mz[i];
            sumsq.energy[i] += trace.energy[i] * trace.energy[i];
        }
    };
    ordered_parallel_for(
        count, workers,
        [&](std::size_t i) { return simulate_realization(config, h_p, i, dt); },
        consume);

    EnsembleStats stats;
    stats.mean = sum;
    stats.std_error = sum;
    const double r = static_cast<double>(count);
    auto finalize = [&](std::vector<double>& mean_v, std::vector<double>& se_v,
                        const std::vector<double>& s, const std::vector<double>& ss) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double mean = s[i] / r;
            mean_v[i] = mean;
            double var = 0.0;
            if (count > 1)
                var = std::max(0.0, (ss[i] - r * mean * mean) / (r - 1.0));
            se_v[i] = std::sqrt(var / r);
        }
    };
    finalize(stats.mean.mx, stats.std_error.mx, sum.mx, sumsq.mx);
    finalize(stats.mean.my, stats.std_error.my, sum.my, sumsq.my);
    finalize(stats.mean.mz, stats.std_error.mz, sum.mz, sumsq.mz);
    finalize(stats.mean.energy, stats.std_error.energy, sum.energy, sumsq.energy);
    return stats;
}

double observable_change(const Trace& coarse, const Trace& fine) {
    const std::size_t n = std::min(coarse.size(), fine.size());
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        change = std::max(change, std::abs(coarse.mx[i] - fine.mx[i]));
        change = std::max(change, std::abs(coarse.my[i] - fine.my[i]));
        change = std::max(change, std::abs(coarse.mz[i] - fine.mz[i]));
    }
    return change;
}

DtCheckReport pick_dt(const ExperimentConfig& config, double h_p) {
    const bool explicit_dt = config.dt > 0.0;
    double dt = explicit_dt ? config.dt : kDefaultDt;

    DtCheckReport report;
    report.performed = true;
    for (int halvings = 0;; ++halvings) {
        const Trace coarse = simulate_realization(config, h_p, 0, dt);
        const Trace fine = simulate_realization(config, h_p, 0, 0.5 * dt);
        report.dt_used = dt;
        report.halvings = halvings;
        report.max_observable_change = observable_change(coarse, fine);
        report.accepted = report.max_observable_change < config.dt_check_tol;
        if (report.accepted || explicit_dt || halvings >= config.max_dt_halvings)
            return report;
        dt *= 0.5;
    }
}

std::vector<std::uint64_t> collect_sub_seeds(const ExperimentConfig& config) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(config.realizations);
    for (std::size_t i = 0; i < config.realizations; ++i)
        seeds.push_back(sub_seed(config.master_seed, i));
    return seeds;
}

RunResult run_single_ensemble(const ExperimentConfig& config, double h_p) {
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    result.h_p = h_p;
    result.meta.config_echo = format_config(config);
    result.meta.sub_seeds = collect_sub_seeds(config);
    result.meta.dt_check = pick_dt(config, h_p);

    const EnsembleStats stats = reduce_ensemble(config, h_p, result.meta.dt_check.dt_used);
    result.average = stats.mean;
    result.std_error = stats.std_error;

    if (config.mode == RunMode::T2)
        result.fit = fit(result.average.times, result.average.mx, FitModelKind::Exponential);
    else
        result.fit = fit(result.average.times, result.average.mz, FitModelKind::DampedCosine);

    result.meta.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace

RunResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.mode != RunMode::Rabi && config.mode != RunMode::T2)
        throw ConfigError("run_experiment handles modes rabi and t2 only");
    if (config.h_p_list.size() != 1)
        throw ConfigError("run_experiment needs exactly one h_p value; use sweep");
    const double h_p = config.mode == RunMode::T2 ? 0.0 : config.h_p_list.front();
    return run_single_ensemble(config, h_p);
}

SweepResult run_sweep(const ExperimentConfig& config) {
    config.validate();
    if (config.mode != RunMode::Rabi)
        throw ConfigError("sweep requires mode = rabi");
    if (config.h_p_list.size() < 2)
        throw ConfigError("sweep needs at least 2 h_p values");

    const auto start = std::chrono::steady_clock::now();
    SweepResult sweep;
    sweep.meta.config_echo = format_config(config);
    sweep.meta.sub_seeds = collect_sub_seeds(config);

    std::vector<LabeledTrace> labeled;
    for (double h_p : config.h_p_list) {
        RunResult run = run_single_ensemble(config, h_p);
        LabeledTrace trace;
        trace.h_p = h_p;
        trace.t = run.average.times;
        trace.y = run.average.mz;
        labeled.push_back(std::move(trace));
        sweep.runs.push_back(std::move(run));
    }
    sweep.meta.dt_check = sweep.runs.front().meta.dt_check;

    if (labeled.size() >= 3) {
        sweep.rates = sweep_rates(labeled);
    } else {
        // Two-point sweep: rates from the per-trace fits, the line through them.
        RateSweep rates;
        for (const RunResult& run : sweep.runs) {
            RateEntry entry;
            entry.h_p = run.h_p;
            entry.c = run.fit.params[2];
            entry.c_stderr = run.fit.stderrs[2];
            entry.f = run.fit.params[3];
            entry.a = run.fit.params[0];
            entry.b = run.fit.params[1];
            rates.rates.push_back(entry);
        }
        const double dh = rates.rates[1].h_p - rates.rates[0].h_p;
        rates.slope = (rates.rates[1].c - rates.rates[0].c) / dh;
        rates.intercept = rates.rates[0].c - rates.slope * rates.rates[0].h_p;
        rates.r_squared = 1.0;
        sweep.rates = std::move(rates);
    }
    sweep.meta.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sweep;
}

namespace {

struct OracleKindInfo {
    bool x_start = false;
    // Column selector: 0 = mx, 1 = my, 2 = mz.
    int column = 2;
};

OracleKindInfo oracle_kind_info(const std::string& kind) {
    OracleKindInfo info;
    if (kind == "gz-sx") {
        info.x_start = true;
        info.column = 0;
    } else if (kind == "gz-sy") {
        info.column = 1;
    }
    return info;
}

double oracle_value(const ExperimentConfig& config, double h_p, double t) {
    const oracles::OracleParams p = config.oracle_params(h_p);
    const std::string& kind = config.oracle_kind;
    if (kind == "ideal")
        return oracles::rabi_ideal(t, p);
    if (kind == "mw")
        return oracles::rabi_mw_disorder_quad(t, p);
    if (kind == "mw-nocutoff")
        return oracles::rabi_mw_disorder(t, p);
    if (kind == "gxy")
        return oracles::rabi_gxy_disorder_quad(t, p);
    if (kind == "gxy-nocutoff")
        return oracles::rabi_gxy_disorder(t, p);
    if (kind == "gz-sz")
        return oracles::sz_gz_disorder(t, p);
    if (kind == "gz-sz-nocutoff")
        return oracles::sz_gz_nocutoff(t, p);
    if (kind == "gz-sy")
        return oracles::sy_gz_disorder(t, p);
    if (kind == "gz-sy-nocutoff")
        return oracles::sy_gz_nocutoff(t, p);
    if (kind == "gz-sx")
        return oracles::sx_gz_disorder(t, p);
    if (kind == "gz-sx-nocutoff")
        return oracles::sx_gz_nocutoff(t, p);
    throw ConfigError("config: unknown oracle_kind '" + kind + "'");
}

std::vector<double> record_grid(const ExperimentConfig& config) {
    std::vector<double> times;
    const std::size_t n =
        static_cast<std::size_t>(std::llround(config.t_max / config.sample_stride));
    times.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        times.push_back(static_cast<double>(k) * config.sample_stride);
    return times;
}

} // namespace

Trace oracle_curve(const ExperimentConfig& config) {
    config.validate();
    const double h_p = config.h_p_list.front();
    const oracles::OracleParams p = config.oracle_params(h_p);
    const std::string& kind = config.oracle_kind;
    const std::vector<double> times = record_grid(config);

    Trace trace;
    trace.times = times;
    const std::size_t n = times.size();
    trace.mx.assign(n, 0.0);
    trace.my.assign(n, 0.0);
    trace.mz.assign(n, 0.0);
    // Energy is conserved realization by realization; the averaged value is
    // fixed by the t = 0 state.
    const double energy0 =
        oracle_kind_info(kind).x_start ? -0.5 * p.drive_mhz() : 0.0;
    trace.energy.assign(n, energy0);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = times[i];
        if (kind == "ideal") {
            trace.mz[i] = oracles::rabi_ideal(t, p);
            trace.my[i] = 0.5 * std::sin(p.rabi_angular() * t);
        } else if (kind == "mw" || kind == "mw-nocutoff") {
            const double omega = p.rabi_angular();
            const double phi =
                kind == "mw" ? oracles::truncated_charfn(omega * t, p.mw_spec())
                             : std::exp(-p.gamma_mw * omega * t);
            trace.mz[i] = 0.5 * std::cos(omega * t) * phi;
            trace.my[i] = 0.5 * std::sin(omega * t) * phi;
        } else if (kind == "gxy" || kind == "gxy-nocutoff") {
            const double omega = p.rabi_angular();
            double env;
            if (kind == "gxy") {
                const double phi = oracles::truncated_charfn(0.5 * omega * t, p.g_spec());
                env = phi * phi;
            } else {
                env = std::exp(-p.gamma_g * omega * t);
            }
            trace.mz[i] = 0.5 * std::cos(omega * t) * env;
            trace.my[i] = 0.5 * std::sin(omega * t) * env;
        } else if (kind == "gz-sz" || kind == "gz-sz-nocutoff") {
            trace.mz[i] = oracle_value(config, h_p, t);
            trace.my[i] = kind == "gz-sz" ? oracles::sy_gz_disorder(t, p)
                                          : oracles::sy_gz_nocutoff(t, p);
        } else if (kind == "gz-sy" || kind == "gz-sy-nocutoff") {
            trace.my[i] = oracle_value(config, h_p, t);
            trace.mz[i] = kind == "gz-sy" ? oracles::sz_gz_disorder(t, p)
                                          : oracles::sz_gz_nocutoff(t, p);
        } else if (kind == "gz-sx" || kind == "gz-sx-nocutoff") {
            trace.mx[i] = oracle_value(config, h_p, t);
        } else {
            throw ConfigError("config: unknown oracle_kind '" + kind + "'");
        }
    }
    return trace;
}

OracleCompareResult compare_oracle(const ExperimentConfig& config) {
    config.validate();
    if (config.dipolar_enabled)
        throw OracleInapplicableError(
            "compare_oracle: oracle comparisons require dipolar_enabled = false");

    ExperimentConfig engine_config = config;
    engine_config.mode = RunMode::Oracle;
    const double h_p = config.h_p_list.front();

    const auto start = std::chrono::steady_clock::now();
    const DtCheckReport dt_report = pick_dt(engine_config, h_p);
    const EnsembleStats stats =
        reduce_ensemble(engine_config, h_p, dt_report.dt_used);
    (void)start;

    const OracleKindInfo info = oracle_kind_info(config.oracle_kind);
    const double per_spin = 1.0 / static_cast<double>(config.num_spins);

    OracleCompareResult result;
    result.times = stats.mean.times;
    const std::size_t n = result.times.size();
    result.engine.resize(n);
    result.oracle.resize(n);
    result.band.resize(n);

    const std::vector<double>& column = info.column == 0   ? stats.mean.mx
                                        : info.column == 1 ? stats.mean.my
                                                           : stats.mean.mz;
    const std::vector<double>& column_se = info.column == 0   ? stats.std_error.mx
                                           : info.column == 1 ? stats.std_error.my
                                                              : stats.std_error.mz;
    // Floor on the band: quadrature tolerance plus product-formula error.
    const double band_floor = 1e-6;
    for (std::size_t i = 0; i < n; ++i) {
        result.engine[i] = column[i] * per_spin;
        result.oracle[i] = oracle_value(config, h_p, result.times[i]);
        result.band[i] = 3.0 * column_se[i] * per_spin + band_floor;
        const double dev = std::abs(result.engine[i] - result.oracle[i]);
        result.max_abs_deviation = std::max(result.max_abs_deviation, dev);
        if (dev > result.band[i])
            result.within_band = false;
    }
    return result;
}

RunResult run_bloch(const ExperimentConfig& config) {
    config.validate();

    BlochParams params;
    params.t1_us = config.t1_us;
    params.t2_us = config.t2_us;
    params.drive_amplitude = config.h_p_list.front();

    const std::vector<double> grid = record_grid(config);
    const double tau = config.dt > 0.0 ? config.dt : kDefaultDt;

    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    result.h_p = params.drive_amplitude;
    result.meta.config_echo = format_config(config);
    result.meta.sub_seeds = collect_sub_seeds(config);
    result.meta.dt_check.performed = false;
    result.meta.dt_check.dt_used = tau;

    BlochState init;
    const BlochTrace trace =
        bloch_ensemble(params, config.g_spec(), config.mw_spec(),
                       config.realizations, grid, init, config.master_seed, tau);

    result.average.times = trace.times;
    result.average.mx = trace.sx;
    result.average.my = trace.sy;
    result.average.mz = trace.sz;
    result.average.energy.assign(trace.size(), 0.0);
    result.std_error = result.average;
    for (auto* v : {&result.std_error.mx, &result.std_error.my, &result.std_error.mz,
                    &result.std_error.energy})
        std::fill(v->begin(), v->end(), 0.0);

    result.fit =
        fit(result.average.times, result.average.mz, FitModelKind::DampedCosine);
    result.meta.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

namespace {

Realization realization_for(const ExperimentConfig& config, std::size_t index) {
    Realization real =
        draw_realization(config.num_spins, config.spin_density(), config.g_spec(),
                         config.mw_spec(), sub_seed(config.master_seed, index));
    apply_axis_mask(real, config.g_axes);
    return real;
}

} // namespace

std::string dump_realizations_text(const ExperimentConfig& config) {
    config.validate();
    std::ostringstream out;
    for (std::size_t i = 0; i < config.realizations; ++i) {
        out << "realization " << i << "\n";
        out << format_realization(realization_for(config, i));
    }
    return out.str();
}

std::string dump_couplings_text(const ExperimentConfig& config) {
    config.validate();
    ModelParams params;
    params.drive_amplitude = config.h_p_list.front();
    params.dipolar_enabled = config.dipolar_enabled;
    const CouplingTable table = build_couplings(realization_for(config, 0), params);

    std::ostringstream out;
    out.precision(17);
    out << "spins " << table.num_spins << "\n";
    for (std::size_t j = 0; j < table.num_spins; ++j)
        out << "local " << j << " z " << table.local_z[j] << " x "
            << table.drive_x[j] << "\n";
    for (const PairCoupling& pair : table.pairs)
        out << "pair " << pair.j << " " << pair.k << " zz " << pair.zz
            << " xxyy " << pair.xxyy << "\n";
    return out.str();
}

std::string format_metadata(const RunMetadata& meta) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "version " << meta.version << "\n";
    out << "wall_seconds " << meta.wall_seconds << "\n";
    out << "dt_check performed=" << (meta.dt_check.performed ? 1 : 0)
        << " dt_used=" << meta.dt_check.dt_used
        << " max_observable_change=" << meta.dt_check.max_observable_change
        << " accepted=" << (meta.dt_check.accepted ? 1 : 0)
        << " halvings=" << meta.dt_check.halvings << "\n";
    out << "config_begin\n" << meta.config_echo << "config_end\n";
    out << "sub_seeds";
    for (std::uint64_t s : meta.sub_seeds)
        out << " " << s;
    out << "\n";
    return out.str();
}

} // namespace rabisim
