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

#include "rabisim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rabisim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t param_count(FitModelKind kind) {
    switch (kind) {
        case FitModelKind::DampedCosine: return 4;
        case FitModelKind::Exponential: return 3;
        default: return 5;
    }
}

double model_value(FitModelKind kind, const std::vector<double>& p, double t) {
    switch (kind) {
        case FitModelKind::DampedCosine:
            return 0.5 * (p[0] + p[1] * std::exp(-p[2] * t) * std::cos(kTwoPi * p[3] * t));
        case FitModelKind::Exponential:
            return 0.5 * (p[0] + p[1] * std::exp(-p[2] * t));
        default:
            return p[0] * std::sin(p[1] * t + p[2]) * std::exp(-p[3] * t) + p[4];
    }
}

void model_jacobian(FitModelKind kind, const std::vector<double>& p, double t,
                    double* row) {
    switch (kind) {
        case FitModelKind::DampedCosine: {
            const double env = std::exp(-p[2] * t);
            const double arg = kTwoPi * p[3] * t;
            const double cosv = std::cos(arg), sinv = std::sin(arg);
            row[0] = 0.5;
            row[1] = 0.5 * env * cosv;
            row[2] = -0.5 * p[1] * t * env * cosv;
            row[3] = -0.5 * p[1] * env * kTwoPi * t * sinv;
            break;
        }
        case FitModelKind::Exponential: {
            const double env = std::exp(-p[2] * t);
            row[0] = 0.5;
            row[1] = 0.5 * env;
            row[2] = -0.5 * p[1] * t * env;
            break;
        }
        default: {
            const double env = std::exp(-p[3] * t);
            const double arg = p[1] * t + p[2];
            const double sinv = std::sin(arg), cosv = std::cos(arg);
            row[0] = sinv * env;
            row[1] = p[0] * t * cosv * env;
            row[2] = p[0] * cosv * env;
            row[3] = -p[0] * t * sinv * env;
            row[4] = 1.0;
            break;
        }
    }
}

// Gaussian elimination with partial pivoting; a is n x n row-major, b the
// right-hand side, solution written into x. Returns false when singular.
bool solve_linear(std::vector<double> a, std::vector<double> b, std::size_t n,
                  std::vector<double>& x) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col]))
                pivot = r;
        if (a[pivot * n + col] == 0.0)
            return false;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c)
                std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a[r * n + col] * inv;
            if (factor == 0.0)
                continue;
            for (std::size_t c = col; c < n; ++c)
                a[r * n + c] -= factor * a[col * n + c];
            b[r] -= factor * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double sum = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c)
            sum -= a[ri * n + c] * x[c];
        x[ri] = sum / a[ri * n + ri];
    }
    return true;
}

double mean(std::span<const double> v, std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t i = from; i < to; ++i)
        s += v[i];
    return to > from ? s / static_cast<double>(to - from) : 0.0;
}

// Dominant frequency of the detrended series by direct spectrum scan with
// parabolic peak refinement. Assumes a near-uniform grid.
double dominant_frequency(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    const double span = t[n - 1] - t[0];
    const double dt = span / static_cast<double>(n - 1);
    const double f_nyquist = 0.5 / dt;
    const double df = 0.25 / span;
    const std::size_t n_freq = static_cast<std::size_t>(f_nyquist / df);
    if (n_freq < 2)
        return 0.0;

    const double base = mean(y, 0, n);
    std::vector<double> power(n_freq, 0.0);
    for (std::size_t k = 1; k < n_freq; ++k) {
        const double w = kTwoPi * df * static_cast<double>(k);
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = y[i] - base;
            re += v * std::cos(w * t[i]);
            im -= v * std::sin(w * t[i]);
        }
        power[k] = re * re + im * im;
    }
    std::size_t best = 1;
    for (std::size_t k = 2; k < n_freq; ++k)
        if (power[k] > power[best])
            best = k;

    double refined = static_cast<double>(best);
    if (best + 1 < n_freq && best > 1) {
        const double pm = power[best - 1], p0 = power[best], pp = power[best + 1];
        const double denom = pm - 2.0 * p0 + pp;
        if (denom < 0.0)
            refined += 0.5 * (pm - pp) / denom;
    }
    return refined * df;
}

// Log-linear fit to the rectified-envelope peaks; returns a nonnegative rate.
double envelope_rate(std::span<const double> t, std::span<const double> y,
                     double base, double frequency) {
    const std::size_t n = t.size();
    const double span = t[n - 1] - t[0];
    const double dt = span / static_cast<double>(n - 1);
    std::size_t window = frequency > 0.0
                             ? static_cast<std::size_t>(std::max(1.0, 1.0 / (frequency * dt)))
                             : n / 8;
    window = std::min(std::max<std::size_t>(window, 1), n);

    std::vector<double> pt, pe;
    double top = 0.0;
    for (std::size_t start = 0; start < n; start += window) {
        const std::size_t stop = std::min(start + window, n);
        std::size_t arg = start;
        for (std::size_t i = start; i < stop; ++i)
            if (std::abs(y[i] - base) > std::abs(y[arg] - base))
                arg = i;
        const double e = std::abs(y[arg] - base);
        if (e > 0.0) {
            pt.push_back(t[arg]);
            pe.push_back(e);
            top = std::max(top, e);
        }
    }
    // Discard peaks buried near zero; log of those is all noise.
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < pt.size(); ++i)
        if (pe[i] > 1e-3 * top) {
            lx.push_back(pt[i]);
            ly.push_back(std::log(pe[i]));
        }
    if (lx.size() < 2)
        return span > 0.0 ? 1.0 / span : 0.0;
    const double mx = mean(lx, 0, lx.size());
    const double my = mean(ly, 0, ly.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0)
        return 0.0;
    return std::max(0.0, -sxy / sxx);
}

std::vector<double> initial_guess(FitModelKind kind, std::span<const double> t,
                                  std::span<const double> y) {
    const std::size_t n = t.size();
    const double trace_mean = mean(y, 0, n);
    const double tail_mean = mean(y, n - std::max<std::size_t>(n / 5, 1), n);

    switch (kind) {
        case FitModelKind::DampedCosine: {
            const double f = dominant_frequency(t, y);
            const double c = envelope_rate(t, y, trace_mean, f);
            const double a = 2.0 * trace_mean;
            const double b = 2.0 * y[0] - a;
            return {a, b == 0.0 ? 1.0 : b, c, f > 0.0 ? f : 1.0 / (t[n - 1] - t[0])};
        }
        case FitModelKind::Exponential: {
            const double a = 2.0 * tail_mean;
            const double b = 2.0 * y[0] - a;
            const double c = envelope_rate(t, y, tail_mean, 0.0);
            return {a, b == 0.0 ? 1.0 : b, c};
        }
        default: {
            const double m_inf = tail_mean;
            const double f = dominant_frequency(t, y);
            const double omega = kTwoPi * (f > 0.0 ? f : 1.0 / (t[n - 1] - t[0]));
            double a0 = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                a0 = std::max(a0, std::abs(y[i] - m_inf));
            const double dy0 = n > 1 ? (y[1] - y[0]) / (t[1] - t[0]) : 0.0;
            const double phi = std::atan2((y[0] - m_inf) * omega, dy0);
            const double c = envelope_rate(t, y, m_inf, f);
            return {a0 == 0.0 ? 1.0 : a0, omega, phi, c, m_inf};
        }
    }
}

} // namespace

double fit_model_value(FitModelKind kind, std::span<const double> params, double t) {
    std::vector<double> p(params.begin(), params.end());
    return model_value(kind, p, t);
}

double FitResult::decay_rate() const {
    switch (kind) {
        case FitModelKind::DampedCosine:
        case FitModelKind::Exponential: return params[2];
        default: return params[3];
    }
}

double FitResult::frequency() const {
    if (kind == FitModelKind::DampedCosine)
        return params[3];
    if (kind == FitModelKind::SineOffset)
        return params[1] / kTwoPi;
    return 0.0;
}

std::string fit_model_name(FitModelKind kind) {
    switch (kind) {
        case FitModelKind::DampedCosine: return "damped-cosine";
        case FitModelKind::Exponential: return "exponential";
        default: return "sine-offset";
    }
}

FitResult fit(std::span<const double> t, std::span<const double> y,
              FitModelKind kind, const FitOptions& options) {
    if (t.size() != y.size())
        throw std::invalid_argument("fit: time and value arrays differ in length");

    std::vector<double> tw, yw;
    tw.reserve(t.size());
    yw.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= options.t_min && t[i] <= options.t_max) {
            tw.push_back(t[i]);
            yw.push_back(y[i]);
        }
    const std::size_t n = tw.size();
    if (n < 8)
        throw FitError("fit: degenerate window, fewer than 8 samples");

    const std::size_t np = param_count(kind);
    std::vector<double> p = initial_guess(kind, tw, yw);

    FitResult result;
    result.kind = kind;
    result.n_points = n;
    result.window_min = tw.front();
    result.window_max = tw.back();

    const double window_span = tw.back() - tw.front();
    if (kind != FitModelKind::Exponential) {
        const double f0 = kind == FitModelKind::DampedCosine ? p[3] : p[1] / kTwoPi;
        result.low_confidence = f0 * window_span < 2.0;
    }

    auto cost_of = [&](const std::vector<double>& params) {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = yw[i] - model_value(kind, params, tw[i]);
            cost += r * r;
        }
        return cost;
    };

    double cost = cost_of(p);
    double lambda = 1e-6;
    std::vector<double> jtj(np * np), jtr(np), row(np), delta;

    std::size_t iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        std::fill(jtj.begin(), jtj.end(), 0.0);
        std::fill(jtr.begin(), jtr.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            model_jacobian(kind, p, tw[i], row.data());
            const double r = yw[i] - model_value(kind, p, tw[i]);
            for (std::size_t a = 0; a < np; ++a) {
                jtr[a] += row[a] * r;
                for (std::size_t b = a; b < np; ++b)
                    jtj[a * np + b] += row[a] * row[b];
            }
        }
        for (std::size_t a = 0; a < np; ++a)
            for (std::size_t b = 0; b < a; ++b)
                jtj[a * np + b] = jtj[b * np + a];

        bool accepted = false;
        double max_rel_change = 0.0;
        for (int attempt = 0; attempt < 40; ++attempt) {
            std::vector<double> damped = jtj;
            for (std::size_t a = 0; a < np; ++a)
                damped[a * np + a] += lambda * std::max(jtj[a * np + a], 1e-30);
            if (!solve_linear(damped, jtr, np, delta)) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> trial = p;
            for (std::size_t a = 0; a < np; ++a)
                trial[a] += delta[a];
            const double trial_cost = cost_of(trial);
            if (trial_cost <= cost) {
                max_rel_change = 0.0;
                for (std::size_t a = 0; a < np; ++a)
                    max_rel_change = std::max(
                        max_rel_change, std::abs(delta[a]) / (std::abs(p[a]) + 1e-30));
                p = trial;
                cost = trial_cost;
                lambda = std::max(lambda * 0.3, 1e-14);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted)
            break;
        if (max_rel_change < options.rel_tol) {
            result.converged = true;
            break;
        }
    }
    result.iterations = iter + 1;

    // Report nonnegative rates and frequencies; both models are even in f.
    if (kind == FitModelKind::DampedCosine) {
        p[3] = std::abs(p[3]);
        p[2] = std::max(p[2], 0.0);
    } else if (kind == FitModelKind::Exponential) {
        p[2] = std::max(p[2], 0.0);
    } else {
        p[3] = std::max(p[3], 0.0);
    }

    // Linearized covariance at the optimum.
    std::fill(jtj.begin(), jtj.end(), 0.0);
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        model_jacobian(kind, p, tw[i], row.data());
        const double r = yw[i] - model_value(kind, p, tw[i]);
        rss += r * r;
        for (std::size_t a = 0; a < np; ++a)
            for (std::size_t b = a; b < np; ++b)
                jtj[a * np + b] += row[a] * row[b];
    }
    for (std::size_t a = 0; a < np; ++a)
        for (std::size_t b = 0; b < a; ++b)
            jtj[a * np + b] = jtj[b * np + a];

    result.params = p;
    result.residual_rms = std::sqrt(rss / static_cast<double>(n));
    result.stderrs.assign(np, 0.0);
    if (n > np) {
        const double sigma2 = rss / static_cast<double>(n - np);
        std::vector<double> unit(np, 0.0), col;
        for (std::size_t a = 0; a < np; ++a) {
            std::fill(unit.begin(), unit.end(), 0.0);
            unit[a] = 1.0;
            if (solve_linear(jtj, unit, np, col) && col[a] >= 0.0)
                result.stderrs[a] = std::sqrt(sigma2 * col[a]);
        }
    }
    return result;
}

RateSweep sweep_rates(const std::vector<LabeledTrace>& traces, const FitOptions& options) {
    if (traces.size() < 3)
        throw DegenerateSweepError("sweep_rates: need at least 3 traces");

    RateSweep sweep;
    for (const LabeledTrace& trace : traces) {
        const FitResult res = fit(trace.t, trace.y, FitModelKind::DampedCosine, options);
        RateEntry entry;
        entry.h_p = trace.h_p;
        entry.c = res.params[2];
        entry.c_stderr = res.stderrs[2];
        entry.f = res.params[3];
        entry.a = res.params[0];
        entry.b = res.params[1];
        sweep.rates.push_back(entry);
    }

    bool use_weights = true;
    for (const RateEntry& e : sweep.rates)
        if (!(e.c_stderr > 0.0) || !std::isfinite(e.c_stderr))
            use_weights = false;

    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const RateEntry& e : sweep.rates) {
        const double w = use_weights ? 1.0 / (e.c_stderr * e.c_stderr) : 1.0;
        sw += w;
        sx += w * e.h_p;
        sy += w * e.c;
        sxx += w * e.h_p * e.h_p;
        sxy += w * e.h_p * e.c;
    }
    const double det = sw * sxx - sx * sx;
    if (det == 0.0)
        throw DegenerateSweepError("sweep_rates: h_p values are degenerate");
    sweep.slope = (sw * sxy - sx * sy) / det;
    sweep.intercept = (sxx * sy - sx * sxy) / det;

    double ss_res = 0.0, ss_tot = 0.0;
    double c_mean = 0.0;
    for (const RateEntry& e : sweep.rates)
        c_mean += e.c / static_cast<double>(sweep.rates.size());
    for (const RateEntry& e : sweep.rates) {
        const double pred = sweep.slope * e.h_p + sweep.intercept;
        ss_res += (e.c - pred) * (e.c - pred);
        ss_tot += (e.c - c_mean) * (e.c - c_mean);
    }
    sweep.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    if (use_weights) {
        sweep.slope_stderr = std::sqrt(sw / det);
        sweep.intercept_stderr = std::sqrt(sxx / det);
    } else {
        const std::size_t m = sweep.rates.size();
        const double sigma2 = m > 2 ? ss_res / static_cast<double>(m - 2) : 0.0;
        sweep.slope_stderr = std::sqrt(sigma2 * sw / det);
        sweep.intercept_stderr = std::sqrt(sigma2 * sxx / det);
    }
    return sweep;
}

} // namespace rabisim
