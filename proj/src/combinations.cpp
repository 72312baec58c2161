#include "expsample/combinations.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "expsample/errors.hpp"
#include "expsample/parallel.hpp"

namespace expsample {

namespace {

using Rational = boost::multiprecision::cpp_rational;

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

std::vector<double> CombinationSpec::residuals() const {
    std::vector<double> out(p, 0.0);
    for (int k = 0; k < p; ++k) {
        double s = 0.0;
        for (int i = 1; i <= p; ++i) s += beta[i - 1] / std::pow(static_cast<double>(i), k);
        out[k] = s - (k == 0 ? 1.0 : 0.0);
    }
    return out;
}

CombinationSpec solve_coefficients(int p) {
    if (p < 1 || p > kMaxCombinationOrder) {
        throw ConfigError("combination order p must be in 1.." + std::to_string(kMaxCombinationOrder) +
                          ", got " + std::to_string(p));
    }
    // Row k: sum_i beta_i (1/i)^k = [k == 0].
    std::vector<std::vector<Rational>> a(p, std::vector<Rational>(p + 1));
    for (int k = 0; k < p; ++k) {
        for (int i = 1; i <= p; ++i) {
            a[k][i - 1] = Rational(1, boost::multiprecision::pow(boost::multiprecision::cpp_int(i), k));
        }
        a[k][p] = (k == 0) ? Rational(1) : Rational(0);
    }
    for (int col = 0; col < p; ++col) {
        int pivot = col;
        while (pivot < p && a[pivot][col] == 0) ++pivot;
        if (pivot == p) throw SingularSystemError("coefficient system is singular");
        std::swap(a[col], a[pivot]);
        for (int r = 0; r < p; ++r) {
            if (r == col || a[r][col] == 0) continue;
            const Rational factor = a[r][col] / a[col][col];
            for (int c = col; c <= p; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    CombinationSpec spec;
    spec.p = p;
    for (int i = 0; i < p; ++i) {
        const Rational beta = a[i][p] / a[i][i];
        spec.beta.push_back(beta.convert_to<double>());
        const auto num = boost::multiprecision::numerator(beta);
        const auto den = boost::multiprecision::denominator(beta);
        spec.exact.push_back(den == 1 ? num.str() : num.str() + "/" + den.str());
    }
    return spec;
}

double combined_eval(const CombinationSpec& spec, const OperatorSpec& op, const RealFunction& f,
                     double x) {
    std::vector<double> parts(spec.p, 0.0);
    parallel_for(static_cast<std::size_t>(spec.p), [&](std::size_t idx) {
        const double scale = static_cast<double>(idx + 1);
        parts[idx] = durrmeyer_eval(op.with_w(scale * op.w), f, x);
    });
    double total = 0.0;
    for (int i = 0; i < spec.p; ++i) total += spec.beta[i] * parts[i];
    return total;
}

double expansion_moment(const Kernel& chi, const Kernel& phi, int j, double log_u,
                        const QuadratureConfig& cfg) {
    if (j < 0) throw ConfigError("moment order must be non-negative");
    double total = 0.0;
    for (int eta = 0; eta <= j; ++eta) {
        total += binomial(j, eta) * continuous_moment(phi, j - eta, cfg) *
                 discrete_moment_log(chi, eta, log_u);
    }
    return total;
}

double combined_moment(const CombinationSpec& spec, const Kernel& chi, const Kernel& phi, int j,
                       double u, const QuadratureConfig& cfg) {
    if (!(u > 0.0)) throw ConfigError("combined_moment needs u > 0");
    const double inner = expansion_moment(chi, phi, j, std::log(u), cfg);
    double weight = 0.0;
    for (int i = 1; i <= spec.p; ++i) weight += spec.beta[i - 1] / std::pow(static_cast<double>(i), j);
    return weight * inner;
}

double combined_moment_at_scale(const CombinationSpec& spec, const Kernel& chi, const Kernel& phi,
                                int j, double x, double w, const QuadratureConfig& cfg) {
    if (!(x > 0.0) || !(w > 0.0)) throw ConfigError("combined_moment_at_scale needs x, w > 0");
    double total = 0.0;
    for (int i = 1; i <= spec.p; ++i) {
        const double log_u = i * w * std::log(x);
        total += spec.beta[i - 1] / std::pow(static_cast<double>(i), j) *
                 expansion_moment(chi, phi, j, log_u, cfg);
    }
    return total;
}

}  // namespace expsample
