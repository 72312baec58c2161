#include "expsample/mellin_core.hpp"

#include <array>
#include <cstdio>
#include <numbers>

namespace expsample {

void LogInterval::validate() const {
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw ConfigError("log interval must have finite ends");
    }
    if (lo > hi) throw ConfigError("log interval has lo > hi");
}

void QuadratureConfig::validate() const {
    if (nodes_per_unit < 2) throw ConfigError("quadrature needs nodes_per_unit >= 2");
    if (!(panel_max_width > 0.0) || !std::isfinite(panel_max_width)) {
        throw ConfigError("quadrature needs a positive finite panel_max_width");
    }
}

namespace {

GaussRule build_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            dp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Recompute the derivative at the converged root for the weight.
        double p1 = 1.0;
        double p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        dp = n * (z * p1 - p2) / (z * z - 1.0);
        const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = weight;
        rule.weights[n - 1 - i] = weight;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static const std::vector<GaussRule> rules = [] {
        std::vector<GaussRule> out(kMaxGaussNodes + 1);
        for (int k = 1; k <= kMaxGaussNodes; ++k) out[k] = build_rule(k);
        return out;
    }();
    if (n < 1 || n > kMaxGaussNodes) {
        throw ConfigError("Gauss-Legendre order out of range: " + std::to_string(n));
    }
    return rules[n];
}

PanelLayout panel_layout(double width, const QuadratureConfig& cfg) {
    cfg.validate();
    PanelLayout layout;
    // Tolerate widths that exceed an integer multiple by rounding noise only.
    const double ratio = width / cfg.panel_max_width;
    layout.panels = std::max(1, static_cast<int>(std::ceil(ratio * (1.0 - 1e-12))));
    const double panel_width = width / layout.panels;
    const double nodes = std::ceil(cfg.nodes_per_unit * panel_width * (1.0 - 1e-12));
    layout.nodes = static_cast<int>(std::clamp(nodes, 2.0, static_cast<double>(kMaxGaussNodes)));
    return layout;
}

namespace detail {

void throw_non_finite(double node) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "integrand is not finite at log-node u = %.17g", node);
    throw EvaluationError(buf);
}

}  // namespace detail

std::vector<double> central_difference_weights(int order, int half_width) {
    // Fornberg's recursion for weights at integer offsets around 0.
    const int n = 2 * half_width + 1;
    if (order < 0 || order >= n) throw ConfigError("stencil too narrow for derivative order");
    std::vector<double> offsets(n);
    for (int i = 0; i < n; ++i) offsets[i] = static_cast<double>(i - half_width);
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = offsets[0];
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = offsets[i];
        for (int j = 0; j < i; ++j) {
            const double c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][order];
    return w;
}

int minimal_half_width(int order) { return (order + 1) / 2; }

double default_log_step(int order) {
    if (order <= 2) return 1e-3;
    if (order == 3) return 1e-2;
    if (order == 4) return 2e-2;
    return 5e-2;
}

double mellin_derivative(const std::function<double(double)>& f, double x, int order, double h) {
    if (!(x > 0.0)) throw ConfigError("mellin_derivative needs x > 0");
    if (order < 1 || order > kMaxMellinDerivativeOrder) {
        throw ConfigError("mellin_derivative order must be in 1..6, got " + std::to_string(order));
    }
    if (!(h > 0.0)) throw ConfigError("mellin_derivative needs a positive step");
    const int half = minimal_half_width(order);
    const std::vector<double> weights = central_difference_weights(order, half);
    const double u = std::log(x);
    double acc = 0.0;
    for (int i = -half; i <= half; ++i) {
        const double wi = weights[i + half];
        if (wi == 0.0) continue;
        const double fi = f(std::exp(u + i * h));
        if (!std::isfinite(fi)) detail::throw_non_finite(u + i * h);
        acc += wi * fi;
    }
    return acc / std::pow(h, order);
}

double mellin_derivative(const std::function<double(double)>& f, double x, int order) {
    return mellin_derivative(f, x, order, default_log_step(order));
}

std::complex<double> mellin_transform(const std::function<double(double)>& f,
                                      std::span<const double> breakpoints, const MellinPoint& p,
                                      const QuadratureConfig& cfg) {
    if (breakpoints.size() < 2) throw ConfigError("mellin_transform needs a support interval");
    for (double b : breakpoints) {
        if (!std::isfinite(b)) throw ConfigError("mellin_transform needs a bounded log-support");
    }
    const std::complex<double> s = p.s();
    return integrate_piecewise([&](double u) { return f(std::exp(u)) * std::exp(s * u); },
                               breakpoints, cfg);
}

std::complex<double> mellin_transform(const std::function<double(double)>& f,
                                      const LogInterval& support, const MellinPoint& p,
                                      const QuadratureConfig& cfg) {
    const std::array<double, 2> ends{support.lo, support.hi};
    return mellin_transform(f, std::span<const double>(ends), p, cfg);
}

}  // namespace expsample
