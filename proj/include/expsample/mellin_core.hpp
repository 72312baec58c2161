#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <span>
#include <type_traits>
#include <vector>

#include "expsample/errors.hpp"

namespace expsample {

/// Closed interval [lo, hi] in the log coordinate u = log t.
struct LogInterval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    void validate() const;
};

/// Composite Gauss-Legendre settings. Node density is measured per unit of the
/// integration variable; panels never exceed `panel_max_width`.
struct QuadratureConfig {
    int nodes_per_unit = 20;
    double panel_max_width = 0.5;

    void validate() const;
};

/// s = c + i t on a vertical line of the Mellin plane.
struct MellinPoint {
    double c = 0.0;
    double t = 0.0;

    std::complex<double> s() const { return {c, t}; }
};

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline constexpr int kMaxGaussNodes = 128;

/// Rule with n points, 1 <= n <= kMaxGaussNodes. Rules are built once and shared.
const GaussRule& gauss_legendre(int n);

/// Number of panels and nodes per panel used for an interval of the given width.
struct PanelLayout {
    int panels = 1;
    int nodes = 2;
};
PanelLayout panel_layout(double width, const QuadratureConfig& cfg);

namespace detail {

template <class T>
bool is_finite_value(const T& v) {
    if constexpr (std::is_floating_point_v<T>) {
        return std::isfinite(v);
    } else {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    }
}

[[noreturn]] void throw_non_finite(double node);

}  // namespace detail

/// Composite Gauss-Legendre approximation of the integral of g over iv.
/// g may return double or std::complex<double>.
template <class G>
auto integrate_log(G&& g, const LogInterval& iv, const QuadratureConfig& cfg) {
    using Value = std::decay_t<decltype(g(0.0))>;
    iv.validate();
    Value total{};
    if (iv.width() == 0.0) return total;
    const PanelLayout layout = panel_layout(iv.width(), cfg);
    const GaussRule& rule = gauss_legendre(layout.nodes);
    const double h = iv.width() / layout.panels;
    for (int p = 0; p < layout.panels; ++p) {
        const double a = iv.lo + p * h;
        const double mid = a + 0.5 * h;
        Value panel{};
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double u = mid + 0.5 * h * rule.nodes[i];
            const Value gu = g(u);
            if (!detail::is_finite_value(gu)) detail::throw_non_finite(u);
            panel += rule.weights[i] * gu;
        }
        total += 0.5 * h * panel;
    }
    return total;
}

/// Integrates over consecutive pieces between sorted breakpoints, so that
/// piecewise-polynomial integrands are handled exactly on each piece.
template <class G>
auto integrate_piecewise(G&& g, std::span<const double> breakpoints, const QuadratureConfig& cfg) {
    using Value = std::decay_t<decltype(g(0.0))>;
    Value total{};
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        total += integrate_log(g, LogInterval{breakpoints[i], breakpoints[i + 1]}, cfg);
    }
    return total;
}

/// Central finite-difference weights (Fornberg) for the order-th derivative on
/// the integer offsets -half..half, scaled to unit spacing.
std::vector<double> central_difference_weights(int order, int half_width);

/// Smallest symmetric stencil half-width giving second-order accuracy.
int minimal_half_width(int order);

/// Default log step for mellin_derivative.
double default_log_step(int order);

inline constexpr int kMaxMellinDerivativeOrder = 6;

/// theta^r f(x) for c = 0, i.e. the r-th derivative of u -> f(e^u) at u = log x,
/// by second-order central differences with step h in log units.
double mellin_derivative(const std::function<double(double)>& f, double x, int order, double h);
double mellin_derivative(const std::function<double(double)>& f, double x, int order);

/// Numerical Mellin transform of f over a finite log-support:
/// integral of f(e^u) e^{s u} du. `breakpoints` (log coordinates, sorted) must
/// start and end at the support ends; interior points split the quadrature.
std::complex<double> mellin_transform(const std::function<double(double)>& f,
                                      std::span<const double> breakpoints, const MellinPoint& p,
                                      const QuadratureConfig& cfg = {});
std::complex<double> mellin_transform(const std::function<double(double)>& f,
                                      const LogInterval& support, const MellinPoint& p,
                                      const QuadratureConfig& cfg = {});

}  // namespace expsample
