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

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rabisim {

struct QuadratureOptions {
    double abs_tol = 1e-8;
    std::size_t max_evals = 1'000'000;
};

class QuadratureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct PanelEstimate {
    double value = 0.0;
    double error = 0.0;
};

template <class F>
PanelEstimate gk15(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kronrod = kKronrodWeights[7] * f(mid);
    double gauss = kGaussWeights[3] * f(mid);
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        kronrod += kKronrodWeights[i] * fsum;
        if (i % 2 == 1)
            gauss += kGaussWeights[i / 2] * fsum;
    }
    PanelEstimate est;
    est.value = kronrod * half;
    est.error = std::abs((kronrod - gauss) * half);
    return est;
}

} // namespace detail

/// Shared evaluation budget across the sub-integrations of one oracle call.
struct EvalBudget {
    std::size_t remaining = 0;

    void charge(std::size_t n) {
        if (n > remaining)
            throw QuadratureError(
                "adaptive quadrature exceeded its kernel evaluation budget");
        remaining -= n;
    }
};

/// Adaptive interval-subdivision quadrature of f over [a, b] to an absolute
/// tolerance. Throws QuadratureError when the budget runs out before the
/// tolerance is met.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double abs_tol,
                          EvalBudget& budget) {
    if (!(a < b))
        return 0.0;
    struct Panel {
        double a, b, tol;
    };
    std::vector<Panel> stack;
    stack.push_back({a, b, abs_tol});
    double total = 0.0;
    const double min_width = (b - a) * 1e-14;
    while (!stack.empty()) {
        const Panel panel = stack.back();
        stack.pop_back();
        budget.charge(15);
        const detail::PanelEstimate est = detail::gk15(f, panel.a, panel.b);
        const double width = panel.b - panel.a;
        if (est.error <= panel.tol || width <= min_width) {
            total += est.value;
            continue;
        }
        const double mid = 0.5 * (panel.a + panel.b);
        stack.push_back({panel.a, mid, 0.5 * panel.tol});
        stack.push_back({mid, panel.b, 0.5 * panel.tol});
    }
    return total;
}

template <class F>
double integrate_adaptive(const F& f, double a, double b,
                          const QuadratureOptions& opts = {}) {
    EvalBudget budget{opts.max_evals};
    return integrate_adaptive(f, a, b, opts.abs_tol, budget);
}

} // namespace rabisim
