#include "expsample/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "expsample/errors.hpp"

namespace expsample {

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

void require_order(int n) {
    if (n < 1) throw ConfigError("B-spline order must be >= 1, got " + std::to_string(n));
}

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v) {
        if (out.empty() || x - out.back() > 1e-13 * std::max(1.0, std::abs(x))) out.push_back(x);
    }
    return out;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Raw moments of the central B-spline of order n, i.e. of a sum of n
// independent uniforms on [-1/2, 1/2].
std::vector<double> bspline_moments(int n, int max_order) {
    std::vector<double> uniform(max_order + 1, 0.0);
    for (int k = 0; k <= max_order; k += 2) uniform[k] = std::pow(0.5, k) / (k + 1);
    std::vector<double> acc = uniform;
    for (int m = 1; m < n; ++m) {
        std::vector<double> next(max_order + 1, 0.0);
        for (int nu = 0; nu <= max_order; ++nu) {
            for (int i = 0; i <= nu; ++i) next[nu] += binomial(nu, i) * acc[i] * uniform[nu - i];
        }
        acc = std::move(next);
    }
    return acc;
}

// E[(V - shift)^nu] for V distributed as the central B-spline of order n.
double shifted_bspline_moment(int n, int nu, double shift) {
    const std::vector<double> m = bspline_moments(n, nu);
    double total = 0.0;
    for (int i = 0; i <= nu; ++i) total += binomial(nu, i) * m[i] * std::pow(-shift, nu - i);
    return total;
}

}  // namespace

double central_bspline(int n, double v) {
    require_order(n);
    if (n == 1) return (v >= -0.5 && v < 0.5) ? 1.0 : 0.0;
    const double half = 0.5 * n;
    const double a = std::abs(v);
    if (a >= half) return 0.0;
    // Evaluate at -|v| so that only the few truncated powers left of the
    // point contribute; this also makes the result exactly even in v.
    const double t = half - a;
    double sum = 0.0;
    for (int j = 0; j < n && t - j > 0.0; ++j) {
        const double term = binomial(n, j) * std::pow(t - j, n - 1);
        sum += (j % 2 == 0) ? term : -term;
    }
    return sum / factorial(n - 1);
}

double bspline_eval(int n, double x) {
    if (!(x > 0.0)) throw ConfigError("bspline_eval needs x > 0");
    return central_bspline(n, std::log(x));
}

Kernel Kernel::bspline(int order) {
    require_order(order);
    Kernel k;
    k.family_ = KernelFamily::MellinBSpline;
    k.role_ = RoleHint::Both;
    k.order_ = order;
    k.support_ = {-0.5 * order, 0.5 * order};
    for (int j = 0; j <= order; ++j) k.breakpoints_.push_back(-0.5 * order + j);
    return k;
}

Kernel Kernel::characteristic() {
    Kernel k;
    k.family_ = KernelFamily::Characteristic;
    k.role_ = RoleHint::Continuous;
    k.order_ = 0;
    k.support_ = {0.0, 1.0};
    k.breakpoints_ = {0.0, 1.0};
    return k;
}

Kernel Kernel::translates(int order, double log_a, double log_b) {
    require_order(order);
    if (!std::isfinite(log_a) || !std::isfinite(log_b)) {
        throw ConfigError("translate parameters must be finite and positive");
    }
    if (log_a == log_b) {
        throw SingularSystemError("translate combination is singular: log a == log b");
    }
    Kernel k;
    k.family_ = KernelFamily::TranslateCombination;
    k.role_ = RoleHint::Both;
    k.order_ = order;
    k.log_a_ = log_a;
    k.log_b_ = log_b;
    k.c1_ = log_b / (log_b - log_a);
    k.c2_ = -log_a / (log_b - log_a);
    const double half = 0.5 * order;
    // B_n(a x) is centred at log x = -log a.
    std::vector<double> bp;
    for (int j = 0; j <= order; ++j) {
        bp.push_back(-log_a - half + j);
        bp.push_back(-log_b - half + j);
    }
    k.breakpoints_ = sorted_unique(std::move(bp));
    k.support_ = {k.breakpoints_.front(), k.breakpoints_.back()};
    return k;
}

Kernel make_translate_combination(int order, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("translate parameters must be positive");
    return Kernel::translates(order, std::log(a), std::log(b));
}

double Kernel::at_log(double v) const {
    switch (family_) {
        case KernelFamily::MellinBSpline: return central_bspline(order_, v);
        case KernelFamily::Characteristic: return (v >= 0.0 && v < 1.0) ? 1.0 : 0.0;
        case KernelFamily::TranslateCombination:
            return c1_ * central_bspline(order_, v + log_a_) + c2_ * central_bspline(order_, v + log_b_);
    }
    return 0.0;
}

double Kernel::operator()(double x) const {
    if (!(x > 0.0)) throw ConfigError("kernel argument must be positive");
    return at_log(std::log(x));
}

double Kernel::log_support_radius() const {
    return std::max(std::abs(support_.lo), std::abs(support_.hi));
}

std::string Kernel::descriptor() const {
    switch (family_) {
        case KernelFamily::MellinBSpline: return "bspline:" + std::to_string(order_);
        case KernelFamily::Characteristic: return "char";
        case KernelFamily::TranslateCombination: {
            auto param = [](double l) {
                if (l == std::round(l)) return "e^" + std::to_string(static_cast<long long>(l));
                return "e^" + format_real(l);
            };
            return "translates:" + std::to_string(order_) + ":a=" + param(log_a_) +
                   ",b=" + param(log_b_);
        }
    }
    return {};
}

namespace {

double parse_real_field(std::string_view text, std::string_view field, std::size_t offset) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ParseError("kernel descriptor: bad value for field '" + std::string(field) + "'",
                         offset);
    }
    return v;
}

// `<real>` or `e^<real>`; returns the logarithm.
double parse_translate_param(std::string_view text, std::string_view field, std::size_t offset) {
    if (text.starts_with("e^")) return parse_real_field(text.substr(2), field, offset + 2);
    const double v = parse_real_field(text, field, offset);
    if (!(v > 0.0)) {
        throw ParseError("kernel descriptor: field '" + std::string(field) + "' must be positive",
                         offset);
    }
    return std::log(v);
}

}  // namespace

Kernel parse_kernel(std::string_view d) {
    if (d == "char") return Kernel::characteristic();
    if (d.starts_with("bspline:")) {
        const double n = parse_real_field(d.substr(8), "n", 8);
        if (n != std::floor(n) || n < 1) {
            throw ParseError("kernel descriptor: field 'n' must be a positive integer", 8);
        }
        return Kernel::bspline(static_cast<int>(n));
    }
    if (d.starts_with("translates:")) {
        const std::size_t n_start = 11;
        const std::size_t colon = d.find(':', n_start);
        if (colon == std::string_view::npos) {
            throw ParseError("kernel descriptor: missing ':' after field 'n'", d.size());
        }
        const double n = parse_real_field(d.substr(n_start, colon - n_start), "n", n_start);
        if (n != std::floor(n) || n < 1) {
            throw ParseError("kernel descriptor: field 'n' must be a positive integer", n_start);
        }
        const std::size_t a_start = colon + 1;
        if (d.substr(a_start, 2) != "a=") {
            throw ParseError("kernel descriptor: expected field 'a='", a_start);
        }
        const std::size_t comma = d.find(',', a_start);
        if (comma == std::string_view::npos) {
            throw ParseError("kernel descriptor: missing field 'b'", d.size());
        }
        const double la = parse_translate_param(d.substr(a_start + 2, comma - a_start - 2), "a",
                                                a_start + 2);
        const std::size_t b_start = comma + 1;
        if (d.substr(b_start, 2) != "b=") {
            throw ParseError("kernel descriptor: expected field 'b='", b_start);
        }
        const double lb = parse_translate_param(d.substr(b_start + 2), "b", b_start + 2);
        return Kernel::translates(static_cast<int>(n), la, lb);
    }
    throw ParseError("kernel descriptor: unknown family in '" + std::string(d) + "'", 0);
}

double discrete_moment_log(const Kernel& chi, int nu, double log_u) {
    if (nu < 0) throw ConfigError("moment order must be non-negative");
    const LogInterval sup = chi.log_support();
    // chi(e^{-k} u) = chi_log(log u - k) is nonzero only for log u - k in [lo, hi].
    const long long k_lo = static_cast<long long>(std::ceil(log_u - sup.hi));
    const long long k_hi = static_cast<long long>(std::floor(log_u - sup.lo));
    double total = 0.0;
    for (long long k = k_lo; k <= k_hi; ++k) {
        const double d = static_cast<double>(k) - log_u;
        const double c = chi.at_log(-d);
        if (c != 0.0) total += c * std::pow(d, nu);
    }
    return total;
}

double discrete_moment(const Kernel& chi, int nu, double u) {
    if (!(u > 0.0)) throw ConfigError("discrete_moment needs u > 0");
    return discrete_moment_log(chi, nu, std::log(u));
}

double continuous_moment_quadrature(const Kernel& phi, int nu, const QuadratureConfig& cfg) {
    if (nu < 0) throw ConfigError("moment order must be non-negative");
    const auto& bp = phi.breakpoints();
    return integrate_piecewise(
        [&](double v) { return phi.at_log(v) * std::pow(v, nu); }, std::span<const double>(bp), cfg);
}

std::optional<double> continuous_moment_closed_form(const Kernel& phi, int nu) {
    if (nu < 0) throw ConfigError("moment order must be non-negative");
    switch (phi.family()) {
        case KernelFamily::Characteristic: return 1.0 / (nu + 1);
        case KernelFamily::MellinBSpline: return bspline_moments(phi.order(), nu)[nu];
        case KernelFamily::TranslateCombination:
            return phi.c1() * shifted_bspline_moment(phi.order(), nu, phi.log_a()) +
                   phi.c2() * shifted_bspline_moment(phi.order(), nu, phi.log_b());
    }
    return std::nullopt;
}

double continuous_moment(const Kernel& phi, int nu, const QuadratureConfig& cfg) {
    if (auto exact = continuous_moment_closed_form(phi, nu)) return *exact;
    return continuous_moment_quadrature(phi, nu, cfg);
}

double absolute_discrete_moment(const Kernel& chi, int nu, int grid) {
    if (grid < 1) throw ConfigError("supremum grid must be nonempty");
    const LogInterval sup = chi.log_support();
    double best = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double y = static_cast<double>(i) / grid;
        const long long k_lo = static_cast<long long>(std::ceil(y - sup.hi));
        const long long k_hi = static_cast<long long>(std::floor(y - sup.lo));
        double s = 0.0;
        for (long long k = k_lo; k <= k_hi; ++k) {
            const double d = static_cast<double>(k) - y;
            s += std::abs(chi.at_log(-d)) * std::pow(std::abs(d), nu);
        }
        best = std::max(best, s);
    }
    return best;
}

double absolute_continuous_moment(const Kernel& phi, int nu, const QuadratureConfig& cfg) {
    std::vector<double> bp = phi.breakpoints();
    // |v|^nu has a kink at 0.
    if (bp.front() < 0.0 && bp.back() > 0.0) bp.push_back(0.0);
    bp = sorted_unique(std::move(bp));
    // |phi| has a kink wherever phi changes sign inside a piece.
    std::vector<double> roots;
    constexpr int kSamples = 32;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const double h = (bp[i + 1] - bp[i]) / kSamples;
        for (int j = 0; j < kSamples; ++j) {
            double a = bp[i] + j * h;
            double b = a + h;
            double fa = phi.at_log(a);
            if (fa == 0.0 || fa * phi.at_log(b) >= 0.0) continue;
            for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
                const double m = 0.5 * (a + b);
                const double fm = phi.at_log(m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
    }
    bp.insert(bp.end(), roots.begin(), roots.end());
    bp = sorted_unique(std::move(bp));
    return integrate_piecewise(
        [&](double v) { return std::abs(phi.at_log(v)) * std::pow(std::abs(v), nu); },
        std::span<const double>(bp), cfg);
}

double absolute_moment(const Kernel& kernel, int nu, MomentSide side, const QuadratureConfig& cfg) {
    return side == MomentSide::Discrete ? absolute_discrete_moment(kernel, nu)
                                        : absolute_continuous_moment(kernel, nu, cfg);
}

MomentReport moment_report(const Kernel& kernel, int nu, double log_u, const QuadratureConfig& cfg) {
    MomentReport r;
    r.order = nu;
    r.log_u = log_u;
    r.discrete = discrete_moment_log(kernel, nu, log_u);
    r.continuous = continuous_moment(kernel, nu, cfg);
    r.absolute_discrete = absolute_discrete_moment(kernel, nu);
    r.absolute_continuous = absolute_continuous_moment(kernel, nu, cfg);
    return r;
}

std::complex<double> kernel_mellin_transform(const Kernel& kernel, const MellinPoint& p,
                                             const QuadratureConfig& cfg) {
    const std::complex<double> s = p.s();
    const auto& bp = kernel.breakpoints();
    return integrate_piecewise([&](double v) { return kernel.at_log(v) * std::exp(s * v); },
                               std::span<const double>(bp), cfg);
}

double poisson_moment(const Kernel& chi, int j, int cutoff, double log_u, const PoissonConfig& cfg) {
    if (j < 0 || j > 4) throw ConfigError("poisson_moment supports orders 0..4");
    if (cutoff < 0) throw ConfigError("poisson_moment cutoff must be non-negative");
    const int half = std::max(cfg.stencil_half, minimal_half_width(j));
    const std::vector<double> weights = central_difference_weights(j, half);
    const std::complex<double> i_pow = std::pow(std::complex<double>(0.0, 1.0), j);
    std::complex<double> total{};
    for (int k = -cutoff; k <= cutoff; ++k) {
        const double t0 = 2.0 * std::numbers::pi * k;
        std::complex<double> deriv{};
        for (int m = -half; m <= half; ++m) {
            const double wm = weights[m + half];
            if (wm == 0.0) continue;
            deriv += wm * kernel_mellin_transform(chi, MellinPoint{0.0, t0 + m * cfg.step},
                                                  cfg.quadrature);
        }
        deriv /= std::pow(cfg.step, j);
        total += deriv * std::exp(std::complex<double>(0.0, -t0 * log_u));
    }
    return (i_pow * total).real();
}

bool AssumptionReport::all_passed() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const ConditionResult& c) { return c.passed; });
}

const ConditionResult* AssumptionReport::find(std::string_view name) const {
    for (const auto& c : conditions) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

AssumptionReport verify_kernel(const Kernel& chi, const Kernel& phi, int r, double tol,
                               const QuadratureConfig& cfg) {
    AssumptionReport report;

    double partition = 0.0;
    for (int i = 0; i < kPartitionCheckPoints; ++i) {
        const double y = static_cast<double>(i) / kPartitionCheckPoints;
        partition = std::max(partition, std::abs(discrete_moment_log(chi, 0, y) - 1.0));
    }
    report.conditions.push_back({"K1.partition", partition <= tol, partition,
                                 "max |sum_k chi(e^-k u) - 1| over 1000 points of log u in [0,1)"});

    const double integral = std::abs(continuous_moment_quadrature(phi, 0, cfg) - 1.0);
    report.conditions.push_back(
        {"K1.unit_integral", integral <= tol, integral, "|integral phi du/u - 1|"});

    const double finite = absolute_discrete_moment(chi, r) + absolute_continuous_moment(phi, r, cfg);
    report.conditions.push_back({"K2.finite_moments", std::isfinite(finite), finite,
                                 "M_r(chi) + M^_r(phi)"});

    // Tail beyond gamma = support radius, summed over a window wider than the support.
    const double gamma = chi.log_support_radius();
    const double reach = gamma + 8.0;
    double tail = 0.0;
    for (int i = 0; i < kPartitionCheckPoints; ++i) {
        const double y = static_cast<double>(i) / kPartitionCheckPoints;
        double s = 0.0;
        for (long long k = static_cast<long long>(std::floor(y - reach));
             k <= static_cast<long long>(std::ceil(y + reach)); ++k) {
            const double d = static_cast<double>(k) - y;
            if (std::abs(d) > gamma) s += std::abs(chi.at_log(-d)) * std::pow(std::abs(d), r);
        }
        tail = std::max(tail, s);
    }
    report.conditions.push_back({"K2.tail", tail < tol || tail == 0.0, tail,
                                 "sum over |k - log u| > support radius of |chi| |k - log u|^r"});

    double jump = 0.0;
    for (double b : chi.breakpoints()) {
        const double eps = 1e-9 * std::max(1.0, std::abs(b));
        jump = std::max(jump, std::abs(chi.at_log(b + eps) - chi.at_log(b - eps)));
    }
    // A continuous piecewise polynomial moves by O(eps) across a knot.
    const double continuity_tol = std::max(tol, 1e-7);
    report.conditions.push_back({"chi.continuity", jump <= continuity_tol, jump,
                                 "largest jump of chi across its breakpoints"});
    return report;
}

}  // namespace expsample
