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

#include "rabisim/oracles.hpp"

#include <cmath>
#include <numbers>

namespace rabisim::oracles {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double OracleParams::rabi_angular() const { return kTwoPi * drive_mhz(); }

LorentzianSpec OracleParams::g_spec() const {
    LorentzianSpec spec;
    spec.width = gamma_g;
    spec.cutoff = xi0 > 0.0 ? xi0 : (gamma_g > 0.0 ? 10.0 * gamma_g : 1.0);
    return spec;
}

LorentzianSpec OracleParams::mw_spec() const {
    LorentzianSpec spec;
    spec.width = gamma_mw;
    spec.cutoff = zeta0 > 0.0 ? zeta0 : (gamma_mw > 0.0 ? 10.0 * gamma_mw : 1.0);
    return spec;
}

double bessel_j0(double x) {
    x = std::abs(x);
    if (x <= 14.0) {
        const double q = -0.25 * x * x;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= 200; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (std::abs(term) < 1e-20 * (1.0 + std::abs(sum)))
                break;
        }
        return sum;
    }
    // Hankel expansion: J0 = Re[ sqrt(2/(pi x)) e^{i(x - pi/4)} sum_m i^m t_m ]
    // with t_0 = 1 and t_m = -t_{m-1} (2m-1)^2 / (8 m x).
    double term = 1.0, sum_p = 1.0, sum_q = 0.0;
    for (int m = 1; m <= 40; ++m) {
        const double next = -term * (2.0 * m - 1.0) * (2.0 * m - 1.0) /
                            (8.0 * static_cast<double>(m) * x);
        if (std::abs(next) >= std::abs(term))
            break;
        term = next;
        switch (m % 4) {
            case 0: sum_p += term; break;
            case 1: sum_q += term; break;
            case 2: sum_p -= term; break;
            default: sum_q -= term; break;
        }
        if (std::abs(term) < 1e-19)
            break;
    }
    const double chi = x - 0.25 * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) *
           (std::cos(chi) * sum_p - std::sin(chi) * sum_q);
}

namespace {

// Adaptive integration of f over [0, b] with the initial subdivision seeded
// at geometric breakpoints around the integrand's intrinsic scale. A single
// top panel can miss a Lorentzian spike that is orders of magnitude narrower
// than the panel; panels growing geometrically from the smallest scale make
// the spike visible to the error estimator at every magnification.
template <class F>
double integrate_scaled(const F& f, double b, double scale, double abs_tol,
                        EvalBudget& budget) {
    scale = std::min(std::max(scale, 1e-12), b);
    std::vector<double> cuts;
    cuts.push_back(0.0);
    for (double edge = 0.125 * scale; edge < b; edge *= 4.0)
        cuts.push_back(edge);
    cuts.push_back(b);
    const double panel_tol = abs_tol / static_cast<double>(cuts.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate_adaptive(f, cuts[i], cuts[i + 1], panel_tol, budget);
    return total;
}

} // namespace

double truncated_charfn(double v, const LorentzianSpec& spec,
                        const QuadratureOptions& opts) {
    spec.validate();
    if (spec.width == 0.0)
        return 1.0;
    const auto f = [&](double x) { return 2.0 * lorentzian_pdf(x, spec) * std::cos(v * x); };
    EvalBudget budget{opts.max_evals};
    return integrate_scaled(f, spec.cutoff, spec.width, opts.abs_tol, budget);
}

double rabi_ideal(double t, const OracleParams& p) {
    return 0.5 * std::cos(p.rabi_angular() * t);
}

double rabi_mw_disorder(double t, const OracleParams& p) {
    const double omega = p.rabi_angular();
    return 0.5 * std::exp(-p.gamma_mw * omega * t) * std::cos(omega * t);
}

double rabi_mw_disorder_quad(double t, const OracleParams& p,
                             const QuadratureOptions& opts) {
    const double omega = p.rabi_angular();
    return 0.5 * std::cos(omega * t) * truncated_charfn(omega * t, p.mw_spec(), opts);
}

double rabi_gxy_disorder(double t, const OracleParams& p) {
    const double omega = p.rabi_angular();
    return 0.5 * std::exp(-p.gamma_g * omega * t) * std::cos(omega * t);
}

double rabi_gxy_disorder_quad(double t, const OracleParams& p,
                              const QuadratureOptions& opts) {
    // <cos(Omega t (1+(xi_x+xi_y)/2))> factorizes into the squared
    // characteristic function at half the phase.
    const double omega = p.rabi_angular();
    const double phi = truncated_charfn(0.5 * omega * t, p.g_spec(), opts);
    return 0.5 * std::cos(omega * t) * phi * phi;
}

namespace {

enum class GzComponent { SzFromZ, SyFromZ, SxFromX };

// One-spin nutation-cone averages against the truncated xi_z density.
// The integrand splits into a time-independent part and an oscillatory part
// cos/sin(2 pi t sqrt(a^2+w^2)) with a = F0 xi. The oscillatory tail beyond
// xi_c is dropped once the first-order stationary-phase bound
// 4 h(xi_c)/phi'(xi_c) falls below a fraction of the tolerance; h/phi' is
// monotone decreasing there, so the bound is valid.
class GzQuadrature {
  public:
    GzQuadrature(const OracleParams& p, const QuadratureOptions& opts)
        : w_(p.drive_mhz()), f0_(p.larmor_mhz), spec_(p.g_spec()), opts_(opts) {}

    double evaluate(double t, GzComponent comp) const {
        if (spec_.width == 0.0)
            return no_disorder(t, comp);
        EvalBudget budget{opts_.max_evals};
        double value = 0.0;
        switch (comp) {
            case GzComponent::SzFromZ:
                value = 0.5 * (steady_part(comp, budget) +
                               oscillatory_part(t, comp, budget));
                break;
            case GzComponent::SxFromX:
                value = 0.5 * (steady_part(comp, budget) +
                               oscillatory_part(t, comp, budget));
                break;
            case GzComponent::SyFromZ:
                value = 0.5 * oscillatory_part(t, comp, budget);
                break;
        }
        return value;
    }

  private:
    double no_disorder(double t, GzComponent comp) const {
        const double phase = kTwoPi * w_ * t;
        switch (comp) {
            case GzComponent::SzFromZ: return 0.5 * std::cos(phase);
            case GzComponent::SyFromZ: return 0.5 * std::sin(phase);
            default: return 0.5;
        }
    }

    // Oscillation amplitude profile of the component at detuning a = F0 xi.
    double amplitude(double xi, GzComponent comp) const {
        const double a = f0_ * xi;
        const double w2 = w_ * w_;
        const double omega2 = a * a + w2;
        switch (comp) {
            case GzComponent::SzFromZ: return w2 / omega2;
            case GzComponent::SxFromX: return a * a / omega2;
            default: return w_ / std::sqrt(omega2);
        }
    }

    double intrinsic_scale() const {
        double scale = spec_.width;
        if (w_ > 0.0)
            scale = scale > 0.0 ? std::min(scale, w_ / f0_) : w_ / f0_;
        return scale > 0.0 ? scale : spec_.cutoff;
    }

    // The time-independent term: a^2/(a^2+w^2) for the z-start longitudinal
    // component, w^2/(a^2+w^2) for the x-start transverse one. Either way it
    // is one minus the oscillation amplitude.
    double steady_part(GzComponent comp, EvalBudget& budget) const {
        const auto f = [&](double xi) {
            return 2.0 * lorentzian_pdf(xi, spec_) * (1.0 - amplitude(xi, comp));
        };
        return integrate_scaled(f, spec_.cutoff, intrinsic_scale(),
                                0.25 * opts_.abs_tol, budget);
    }

    double phase_rate(double xi, double t) const {
        const double a = f0_ * xi;
        const double omega = std::sqrt(a * a + w_ * w_);
        return kTwoPi * t * f0_ * f0_ * xi / omega;
    }

    double clip_point(double t, GzComponent comp) const {
        double xi_c = std::max({20.0 * spec_.width, 20.0 * w_ / f0_, 1e-8});
        while (xi_c < spec_.cutoff) {
            const double rate = phase_rate(xi_c, t);
            if (rate > 0.0) {
                const double h = 2.0 * lorentzian_pdf(xi_c, spec_) * amplitude(xi_c, comp);
                if (4.0 * h / rate <= 0.25 * opts_.abs_tol)
                    return xi_c;
            }
            xi_c *= 2.0;
        }
        return spec_.cutoff;
    }

    double oscillatory_part(double t, GzComponent comp, EvalBudget& budget) const {
        if (t == 0.0)
            return comp == GzComponent::SyFromZ ? 0.0 : steady_complement(comp, budget);
        const double xi_c = std::min(clip_point(t, comp), spec_.cutoff);
        const auto f = [&](double xi) {
            const double a = f0_ * xi;
            const double omega = std::sqrt(a * a + w_ * w_);
            const double phase = kTwoPi * t * omega;
            const double osc = comp == GzComponent::SyFromZ ? std::sin(phase)
                                                            : std::cos(phase);
            return 2.0 * lorentzian_pdf(xi, spec_) * amplitude(xi, comp) * osc;
        };
        return integrate_scaled(f, xi_c, intrinsic_scale(), 0.5 * opts_.abs_tol, budget);
    }

    // At t = 0 the oscillatory factor is 1; together with the steady part the
    // integrand integrates to exactly 1 (sz, sx) by normalization.
    double steady_complement(GzComponent comp, EvalBudget& budget) const {
        const auto f = [&](double xi) {
            return 2.0 * lorentzian_pdf(xi, spec_) * amplitude(xi, comp);
        };
        return integrate_scaled(f, spec_.cutoff, intrinsic_scale(),
                                0.5 * opts_.abs_tol, budget);
    }

    double w_;
    double f0_;
    LorentzianSpec spec_;
    QuadratureOptions opts_;
};

} // namespace

double sz_gz_disorder(double t, const OracleParams& p, const QuadratureOptions& opts) {
    return GzQuadrature(p, opts).evaluate(t, GzComponent::SzFromZ);
}

double sy_gz_disorder(double t, const OracleParams& p, const QuadratureOptions& opts) {
    return GzQuadrature(p, opts).evaluate(t, GzComponent::SyFromZ);
}

double sx_gz_disorder(double t, const OracleParams& p, const QuadratureOptions& opts) {
    return GzQuadrature(p, opts).evaluate(t, GzComponent::SxFromX);
}

namespace {

struct ClosedFormScales {
    double w = 0.0;     // h_p F_R
    double g = 0.0;     // Gamma F0
    double delta = 0.0; // sqrt(w^2 - g^2)
};

ClosedFormScales closed_form_scales(const OracleParams& p) {
    ClosedFormScales s;
    s.w = p.drive_mhz();
    s.g = p.gz_mhz();
    if (!(s.w > s.g))
        throw std::domain_error(
            "no-cutoff closed forms require h_p F_R > Gamma F0");
    s.delta = std::sqrt(s.w * s.w - s.g * s.g);
    return s;
}

} // namespace

double sz_gz_nocutoff(double t, const OracleParams& p, const QuadratureOptions& opts) {
    const ClosedFormScales s = closed_form_scales(p);
    if (p.gamma_g == 0.0)
        return 0.5 * std::cos(kTwoPi * s.w * t);
    const double d2 = s.delta * s.delta;
    const auto kernel = [&](double u) {
        return bessel_j0(kTwoPi * s.w * u) *
               (1.0 - std::cos(kTwoPi * (t - u) * s.delta));
    };
    const double conv = integrate_adaptive(kernel, 0.0, t, opts);
    return 0.5 * ((-s.g * s.g + s.w * s.w * std::cos(kTwoPi * t * s.delta)) / d2 +
                  kTwoPi * s.g * s.w * s.w * conv / d2);
}

double sy_gz_nocutoff(double t, const OracleParams& p, const QuadratureOptions& opts) {
    const ClosedFormScales s = closed_form_scales(p);
    if (p.gamma_g == 0.0)
        return 0.5 * std::sin(kTwoPi * s.w * t);
    const auto kernel = [&](double u) {
        return bessel_j0(kTwoPi * s.w * u) * std::sin(kTwoPi * (t - u) * s.delta);
    };
    const double conv = integrate_adaptive(kernel, 0.0, t, opts);
    return 0.5 * s.w *
           (std::sin(kTwoPi * t * s.delta) / s.delta - kTwoPi * s.g * conv / s.delta);
}

double sx_gz_nocutoff(double t, const OracleParams& p, const QuadratureOptions& opts) {
    const ClosedFormScales s = closed_form_scales(p);
    if (p.gamma_g == 0.0)
        return 0.5;
    const double d2 = s.delta * s.delta;
    const auto j0_kernel = [&](double u) { return bessel_j0(kTwoPi * s.w * u); };
    const auto cos_kernel = [&](double u) {
        return bessel_j0(kTwoPi * s.w * u) * std::cos(kTwoPi * (t - u) * s.delta);
    };
    QuadratureOptions half = opts;
    half.abs_tol = 0.5 * opts.abs_tol;
    half.max_evals = opts.max_evals / 2;
    const double conv_j0 = integrate_adaptive(j0_kernel, 0.0, t, half);
    const double conv_cos = integrate_adaptive(cos_kernel, 0.0, t, half);
    return 0.5 * ((s.w * s.w - s.g * s.g * std::cos(kTwoPi * t * s.delta)) / d2 -
                  kTwoPi * s.g * s.w * s.w * conv_j0 / d2 +
                  kTwoPi * s.g * s.g * s.g * conv_cos / d2);
}

LongTimeAverages longtime_averages(const OracleParams& p) {
    const double w = p.drive_mhz();
    const double g = p.gz_mhz();
    if (!(w + g > 0.0))
        throw std::invalid_argument("longtime_averages: h_p F_R + Gamma F0 must be > 0");
    LongTimeAverages avg;
    avg.sz = 0.5 * g / (w + g);
    avg.sx_xstart = 0.5 * w / (w + g);
    return avg;
}

} // namespace rabisim::oracles
