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

#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabisim {

/// Trace models used for rate extraction (m is the raw trace value):
///   DampedCosine: m(t) = (a + b e^{-c t} cos(2 pi f t)) / 2, params {a,b,c,f}
///   Exponential:  m(t) = (a + b e^{-c t}) / 2,               params {a,b,c}
///   SineOffset:   m(t) = A0 sin(W t + phi) e^{-c t} + m_inf, params {A0,W,phi,c,m_inf}
enum class FitModelKind { DampedCosine, Exponential, SineOffset };

struct FitOptions {
    double t_min = 0.0;
    double t_max = std::numeric_limits<double>::infinity();
    std::size_t max_iterations = 200;
    double rel_tol = 1e-9;
};

struct FitResult {
    FitModelKind kind = FitModelKind::DampedCosine;
    std::vector<double> params;
    std::vector<double> stderrs; // linearized covariance
    double residual_rms = 0.0;
    bool converged = false;
    bool low_confidence = false; // oscillatory fit with < 2 visible periods
    std::size_t n_points = 0;
    std::size_t iterations = 0;
    double window_min = 0.0;
    double window_max = 0.0;

    double decay_rate() const; // c (or 1/T_R), always >= 0 on output
    double frequency() const;  // f in MHz (DampedCosine only)
};

class FitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

double fit_model_value(FitModelKind kind, std::span<const double> params, double t);

/// Damped Gauss-Newton least squares with analytic Jacobians. Frequency is
/// initialized from the dominant discrete-spectrum peak and the decay rate
/// from a log-linear fit to the rectified envelope; both are mandatory, not
/// best-effort. Throws FitError when the window holds fewer than 8 samples.
FitResult fit(std::span<const double> t, std::span<const double> y,
              FitModelKind kind, const FitOptions& options = {});

struct LabeledTrace {
    double h_p = 0.0;
    std::vector<double> t;
    std::vector<double> y;
};

struct RateEntry {
    double h_p = 0.0;
    double c = 0.0;
    double c_stderr = 0.0;
    double f = 0.0;
    double a = 0.0;
    double b = 0.0;
};

struct RateSweep {
    std::vector<RateEntry> rates;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    double r_squared = 0.0;
};

class DegenerateSweepError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Damped-cosine fit per trace plus a weighted linear regression of the
/// decay rate on h_p. Needs at least 3 traces.
RateSweep sweep_rates(const std::vector<LabeledTrace>& traces,
                      const FitOptions& options = {});

std::string fit_model_name(FitModelKind kind);

} // namespace rabisim
