#pragma once

#include <string>
#include <vector>

#include "expsample/operators.hpp"

namespace expsample {

inline constexpr int kMaxCombinationOrder = 12;

/// Weights beta_1..beta_p of sum_i beta_i I_{i w}.
struct CombinationSpec {
    int p = 1;
    std::vector<double> beta;
    /// beta_i as reduced fractions, e.g. "9/2".
    std::vector<std::string> exact;

    /// (sum_i beta_i / i^k) - [k == 0] for k = 0..p-1.
    std::vector<double> residuals() const;
    std::string label() const { return "p=" + std::to_string(p); }
};

/// Solves sum_i beta_i = 1, sum_i beta_i / i^k = 0 (k = 1..p-1) by exact
/// rational elimination, then rounds to double.
CombinationSpec solve_coefficients(int p);

/// sum_i beta_i (I_{i w} f)(x); the p scaled evaluations run in parallel and
/// are summed in index order.
double combined_eval(const CombinationSpec& spec, const OperatorSpec& op, const RealFunction& f,
                     double x);

/// sum_eta C(j, eta) m^_{j-eta}(phi) m_eta(chi, u) with u given as log u: the
/// coefficient of theta^j f / (j! w^j) in the expansion of I_w f - f.
double expansion_moment(const Kernel& chi, const Kernel& phi, int j, double log_u,
                        const QuadratureConfig& cfg = {});

/// M_j^p(chi, phi) = sum_i beta_i / i^j * expansion_moment(chi, phi, j, u), with
/// the same discrete-moment argument u for every i.
double combined_moment(const CombinationSpec& spec, const Kernel& chi, const Kernel& phi, int j,
                       double u, const QuadratureConfig& cfg = {});

/// Variant where the i-th term uses the argument the operator actually sees,
/// u_i = x^{i w}. Identical to combined_moment when the discrete moments of chi
/// do not depend on u.
double combined_moment_at_scale(const CombinationSpec& spec, const Kernel& chi, const Kernel& phi,
                                int j, double x, double w, const QuadratureConfig& cfg = {});

}  // namespace expsample
