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

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rabisim/bloch.hpp"
#include "rabisim/engine.hpp"
#include "rabisim/fit.hpp"
#include "rabisim/oracles.hpp"

namespace rabisim {

inline constexpr const char* kVersion = "1.0.0";

/// Spin counts above this need an explicit opt-in; the engine caps at
/// kMaxSpins regardless.
inline constexpr std::size_t kLargeRunThreshold = 24;

/// Sites per cubic Angstrom of the diamond host lattice (8 per cell).
inline constexpr double kDiamondSiteDensity = 8.0 / (5.43 * 5.43 * 5.43);

enum class RunMode { Rabi, T2, Oracle, Bloch };

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ResourceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class OracleInapplicableError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    RunMode mode = RunMode::Rabi;
    std::size_t num_spins = 1;              // L
    // n, the fraction of occupied lattice sites (the experimental dial:
    // 1e-4 corresponds to a 0.01% doped crystal). The spin number density
    // is n * kDiamondSiteDensity.
    double concentration = 1e-4;
    double gamma_g = 0.0;                   // Gamma
    double gamma_mw = 0.0;                  // gamma
    double xi0 = 0.0;                       // <= 0 means 10 * Gamma
    double zeta0 = 0.0;                     // <= 0 means 10 * gamma
    std::vector<double> h_p_list = {1.0};
    bool dipolar_enabled = true;
    std::size_t realizations = 1;           // R
    std::uint64_t master_seed = 1;
    double t_max = 0.5;                     // us
    double dt = 0.0;                        // <= 0 means default 1e-5 + auto check
    double sample_stride = 1e-3;            // us between records
    std::string output_dir;

    // Mode-specific and operational extras.
    double t1_us = std::numeric_limits<double>::infinity();
    double t2_us = std::numeric_limits<double>::infinity();
    std::string oracle_kind = "ideal";
    std::string g_axes = "xyz";             // which xi components are drawn
    std::size_t workers = 0;                // 0 means hardware concurrency
    bool allow_large = false;
    bool dump_realizations = false;         // write replayable disorder records
    bool dump_couplings = false;            // write realization 0's table
    double dt_check_tol = 1e-6;
    int max_dt_halvings = 3;

    double effective_xi0() const;
    double effective_zeta0() const;
    double spin_density() const;            // spins per cubic Angstrom
    LorentzianSpec g_spec() const;
    LorentzianSpec mw_spec() const;
    oracles::OracleParams oracle_params(double h_p) const;

    void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
std::string format_config(const ExperimentConfig& config);
std::string mode_name(RunMode mode);

struct DtCheckReport {
    bool performed = false;
    double dt_used = 0.0;
    double max_observable_change = 0.0;
    bool accepted = false;
    int halvings = 0;
};

struct RunMetadata {
    std::string config_echo;
    std::vector<std::uint64_t> sub_seeds;
    std::string version = kVersion;
    double wall_seconds = 0.0;
    DtCheckReport dt_check;
};

std::string format_metadata(const RunMetadata& meta);

struct RunResult {
    Trace average;       // realization-index-ordered pointwise mean
    Trace std_error;     // per-point standard error of the mean (energy too)
    FitResult fit;
    RunMetadata meta;
    double h_p = 0.0;
};

/// Ensemble run for modes rabi (z+ start, damped-cosine fit on mz) and
/// t2 (x+ start, h_p = 0, exponential fit on mx).
RunResult run_experiment(const ExperimentConfig& config);

struct SweepResult {
    std::vector<RunResult> runs;
    RateSweep rates;
    RunMetadata meta;
};

/// One ensemble per h_p value, reusing identical realizations across the
/// sweep, followed by the rate regression.
SweepResult run_sweep(const ExperimentConfig& config);

/// Oracle curve for the configured kind on the run's record grid, as a
/// single-spin trace (values in [-1/2, 1/2]).
Trace oracle_curve(const ExperimentConfig& config);

struct OracleCompareResult {
    std::vector<double> times;
    std::vector<double> engine;     // per-spin engine ensemble average
    std::vector<double> oracle;
    std::vector<double> band;       // 3 sigma Monte-Carlo band
    double max_abs_deviation = 0.0;
    bool within_band = true;
};

/// Engine ensemble vs oracle overlay; requires dipolar_enabled = false.
OracleCompareResult compare_oracle(const ExperimentConfig& config);

/// Disorder-averaged phenomenological model on the same record grid,
/// emitted in the trace layout (mx,my,mz = sx,sy,sz of the single spin).
RunResult run_bloch(const ExperimentConfig& config);

/// Replayable text records of the run's realizations (one per block).
std::string dump_realizations_text(const ExperimentConfig& config);

/// Realization 0's coupling table: local terms and per-pair coefficients.
std::string dump_couplings_text(const ExperimentConfig& config);

} // namespace rabisim
