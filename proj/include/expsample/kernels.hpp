#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expsample/mellin_core.hpp"

namespace expsample {

enum class KernelFamily { MellinBSpline, TranslateCombination, Characteristic };

/// Role a kernel is meant for: discrete sampling weight (chi), continuous
/// averaging weight (phi), or either.
enum class RoleHint { Discrete, Continuous, Both };

/// Central B-spline of order n at v, i.e. the Mellin B-spline at x = e^v.
/// Piecewise polynomial of degree n-1, exactly zero for |v| >= n/2.
double central_bspline(int n, double v);

/// Mellin B-spline of order n at x > 0.
double bspline_eval(int n, double x);

/// Immutable kernel on the multiplicative half-line. Internally everything is
/// expressed in the log coordinate v = log x, where the kernel is piecewise
/// polynomial with finitely many breakpoints.
class Kernel {
public:
    static Kernel bspline(int order);
    static Kernel characteristic();
    /// c1 B_n(a x) + c2 B_n(b x) with c1 + c2 = 1 and vanishing first moment.
    /// Parameterized by log a and log b so that a = e^k is exact.
    static Kernel translates(int order, double log_a, double log_b);

    KernelFamily family() const { return family_; }
    RoleHint role_hint() const { return role_; }
    int order() const { return order_; }
    double log_a() const { return log_a_; }
    double log_b() const { return log_b_; }
    double c1() const { return c1_; }
    double c2() const { return c2_; }

    double operator()(double x) const;
    double at_log(double v) const;

    /// Support in the log coordinate; the kernel vanishes outside [lo, hi].
    LogInterval log_support() const { return support_; }
    /// max(|lo|, |hi|).
    double log_support_radius() const;
    /// Sorted log-coordinate breakpoints, including both support ends.
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    /// True if the kernel is continuous on the whole line.
    bool is_continuous() const { return family_ != KernelFamily::Characteristic && order_ >= 2; }

    /// Round-trippable descriptor, e.g. `bspline:4`, `translates:2:a=e^-2,b=e^-3`, `char`.
    std::string descriptor() const;

private:
    Kernel() = default;

    KernelFamily family_ = KernelFamily::MellinBSpline;
    RoleHint role_ = RoleHint::Both;
    int order_ = 0;
    double log_a_ = 0.0;
    double log_b_ = 0.0;
    double c1_ = 1.0;
    double c2_ = 0.0;
    LogInterval support_{};
    std::vector<double> breakpoints_;
};

Kernel make_translate_combination(int order, double a, double b);

/// Parses `bspline:<n>`, `translates:<n>:a=<real|e^<k>>,b=<...>` or `char`.
Kernel parse_kernel(std::string_view descriptor);

/// m_nu(chi, u) = sum_k chi(e^{-k} u) (k - log u)^nu, with the argument given as log u.
double discrete_moment_log(const Kernel& chi, int nu, double log_u);
double discrete_moment(const Kernel& chi, int nu, double u);

/// Continuous moment by quadrature over the kernel's pieces.
double continuous_moment_quadrature(const Kernel& phi, int nu, const QuadratureConfig& cfg = {});
/// Closed-form continuous moment, when the family has one.
std::optional<double> continuous_moment_closed_form(const Kernel& phi, int nu);
/// m^_nu(phi) = integral phi(u) log^nu u du/u; closed form when available.
double continuous_moment(const Kernel& phi, int nu, const QuadratureConfig& cfg = {});

inline constexpr int kSupremumGridPoints = 2048;

/// M_nu(chi): supremum over log u in [0, 1) on a uniform grid (the sum is
/// 1-periodic in log u).
double absolute_discrete_moment(const Kernel& chi, int nu, int grid = kSupremumGridPoints);
/// M^_nu(phi) = integral |phi| |log u|^nu du/u.
double absolute_continuous_moment(const Kernel& phi, int nu, const QuadratureConfig& cfg = {});

/// Which moment kind absolute_moment should compute.
enum class MomentSide { Discrete, Continuous };
double absolute_moment(const Kernel& kernel, int nu, MomentSide side,
                       const QuadratureConfig& cfg = {});

struct MomentReport {
    int order = 0;
    double log_u = 0.0;
    double discrete = 0.0;
    double continuous = 0.0;
    double absolute_discrete = 0.0;
    double absolute_continuous = 0.0;
};
MomentReport moment_report(const Kernel& kernel, int nu, double log_u = 0.0,
                           const QuadratureConfig& cfg = {});

/// Numerical Mellin transform of a kernel at c + i t.
std::complex<double> kernel_mellin_transform(const Kernel& kernel, const MellinPoint& p,
                                             const QuadratureConfig& cfg = {});

/// Settings for the transform-derivative route.
struct PoissonConfig {
    double step = 1e-2;      ///< finite-difference step in t
    int stencil_half = 4;    ///< central stencil half-width (accuracy order 2*half - order + ...)
    QuadratureConfig quadrature{};
};

/// m_j(chi, u) from the Mellin-Poisson identity
///   sum_k chi(e^{-k}u)(k - log u)^j = i^j sum_k F^{(j)}(2 pi k) u^{-2 pi i k},
/// with F(t) the transform on the imaginary axis, truncated to |k| <= cutoff and
/// differentiated numerically in t.
double poisson_moment(const Kernel& chi, int j, int cutoff, double log_u = 0.0,
                      const PoissonConfig& cfg = {});

struct ConditionResult {
    std::string name;
    bool passed = false;
    double residual = 0.0;
    std::string detail;
};

struct AssumptionReport {
    std::vector<ConditionResult> conditions;

    bool all_passed() const;
    const ConditionResult* find(std::string_view name) const;
};

inline constexpr int kPartitionCheckPoints = 1000;

/// Checks the kernel assumptions for the pair (chi, phi) at moment order r:
/// partition of unity and unit integral, finiteness of M_r(chi) + M^_r(phi),
/// vanishing tails beyond the support radius, and continuity of chi.
AssumptionReport verify_kernel(const Kernel& chi, const Kernel& phi, int r, double tol = 1e-10,
                               const QuadratureConfig& cfg = {});

}  // namespace expsample
