#pragma once

// Globally adaptive Gauss-Kronrod (G7/K15) quadrature over a finite interval.
// Works for any integrand whose value type supports +, scalar * and std::abs,
// so real and complex integrands share one implementation.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include "cvqkd/errors.hpp"

namespace cvqkd {

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

template <class Value>
struct QuadratureResult {
    Value value{};
    double abs_error = 0.0;   // estimated absolute error of value
    int intervals = 0;
    int evaluations = 0;
};

namespace detail {

// Kronrod abscissae on [0,1]; every odd index is also a Gauss node.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class Value>
struct Panel {
    double a;
    double b;
    Value value;
    double error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class Value, class F>
Panel<Value> gauss_kronrod_15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const Value f_centre = f(centre);
    Value kronrod = kronrod_weights[7] * f_centre;
    Value gauss = gauss_weights[3] * f_centre;

    for (int i = 0; i < 7; ++i) {
        const double dx = half * kronrod_nodes[i];
        const Value pair = f(centre - dx) + f(centre + dx);
        kronrod += kronrod_weights[i] * pair;
        if (i % 2 == 1) gauss += gauss_weights[i / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Integrates f over [a, b] until the summed error estimate drops below
/// max(abs_tol, rel_tol * |I|). Throws NumericalError (carrying the best
/// estimate) when the interval budget runs out.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& opts = {})
    -> QuadratureResult<std::decay_t<std::invoke_result_t<F&, double>>> {
    using Value = std::decay_t<std::invoke_result_t<F&, double>>;
    using Panel = detail::Panel<Value>;

    if (!(opts.rel_tol > 0.0) && !(opts.abs_tol > 0.0))
        throw DomainError("integrate_adaptive: need rel_tol > 0 or abs_tol > 0");
    if (!(a < b)) throw DomainError("integrate_adaptive: require a < b");

    std::priority_queue<Panel> panels;
    panels.push(detail::gauss_kronrod_15<Value>(f, a, b));
    Value total = panels.top().value;
    double total_error = panels.top().error;
    int evaluations = 15;

    const double min_width = 64.0 * std::numeric_limits<double>::epsilon() * (b - a);

    auto converged = [&] {
        const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
        return total_error <= target;
    };

    while (!converged()) {
        if (static_cast<int>(panels.size()) >= opts.max_intervals) {
            throw NumericalError("adaptive quadrature: interval limit reached",
                                 std::real(total), total_error);
        }
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a < min_width) {
            throw NumericalError("adaptive quadrature: interval too narrow to subdivide",
                                 std::real(total), total_error);
        }
        Panel left = detail::gauss_kronrod_15<Value>(f, worst.a, mid);
        Panel right = detail::gauss_kronrod_15<Value>(f, mid, worst.b);
        evaluations += 30;

        total += (left.value + right.value) - worst.value;
        total_error += (left.error + right.error) - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum from scratch: the running totals accumulate cancellation error.
    Value sum{};
    double err = 0.0;
    const int count = static_cast<int>(panels.size());
    while (!panels.empty()) {
        sum += panels.top().value;
        err += panels.top().error;
        panels.pop();
    }
    return {sum, err, count, evaluations};
}

}  // namespace cvqkd
