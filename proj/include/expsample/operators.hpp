#pragma once

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "expsample/funcspec.hpp"
#include "expsample/kernels.hpp"

namespace expsample {

/// Kernel pair, scale w and numerical settings of a Durrmeyer operator.
struct OperatorSpec {
    Kernel chi;
    Kernel phi;
    double w = 1.0;
    /// Half-width of the k-window around w log x. Unset means "derived from
    /// the support of chi", which makes the series sum exact.
    std::optional<double> truncation_radius;
    QuadratureConfig quadrature{};

    void validate() const;
    /// Copy with a different scale.
    OperatorSpec with_w(double new_w) const;
};

/// Integer range of k whose chi-weights can be nonzero at log x.
struct KWindow {
    long long lo = 0;
    long long hi = -1;
    bool empty() const { return hi < lo; }
};
KWindow sampling_window(const Kernel& chi, double w, double log_x,
                        std::optional<double> truncation_radius = std::nullopt);

/// Sample values g(e^{k/w}), either synthesized from a function or read from a table.
class SampleAccessor {
public:
    explicit SampleAccessor(RealFunction source);
    explicit SampleAccessor(std::map<long long, double> table);

    /// Sample at node k for scale w; throws EvaluationError on a missing table entry.
    double at(long long k, double w) const;
    /// Keys in [lo, hi] absent from the table (empty for function-backed accessors).
    std::vector<long long> missing(long long lo, long long hi) const;

private:
    std::variant<RealFunction, std::map<long long, double>> source_;
};

/// (T_w^phi f)(s) = w * integral phi(t^w / s^w) f(t) dt/t.
double mellin_convolution(const Kernel& phi, const RealFunction& f, double w, double s,
                          const QuadratureConfig& cfg = {});
/// Same with the centre given as log s.
double mellin_convolution_log(const Kernel& phi, const RealFunction& f, double w, double log_s,
                              const QuadratureConfig& cfg = {});

/// (I_w f)(x) = sum_k chi(e^{-k} x^w) (T_w^phi f)(e^{k/w}).
double durrmeyer_eval(const OperatorSpec& spec, const RealFunction& f, double x);

/// Kantorovich form: sum_k chi(e^{-k} x^w) w * integral_{k/w}^{(k+1)/w} f(e^u) du.
double kantorovich_eval(const Kernel& chi, const RealFunction& f, double w, double x,
                        const QuadratureConfig& cfg = {});

/// Generalized exponential sampling: sum_k chi(e^{-k} x^w) sample(k).
double sampling_eval(const Kernel& chi, const SampleAccessor& samples, double w, double x);

struct GridPoint {
    double x = 1.0;
    double w = 1.0;
};
struct GridValue {
    double x = 1.0;
    double w = 1.0;
    double fx = 0.0;
    double value = 0.0;
    double abs_err() const;
};

/// Evaluates durrmeyer_eval over (x, w) pairs in parallel; output order equals input order.
std::vector<GridValue> durrmeyer_batch(const OperatorSpec& spec, const RealFunction& f,
                                       const std::vector<GridPoint>& points);

}  // namespace expsample
