#include "expsample/operators.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "expsample/errors.hpp"
#include "expsample/parallel.hpp"

namespace expsample {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + " must be positive and finite");
    }
}

std::string describe_point(const char* op, double log_s) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s at log s = %.17g: ", op, log_s);
    return buf;
}

}  // namespace

void OperatorSpec::validate() const {
    require_positive(w, "operator scale w");
    quadrature.validate();
    if (truncation_radius) {
        require_positive(*truncation_radius, "truncation radius");
        if (*truncation_radius < chi.log_support_radius()) {
            throw ConfigError("truncation radius is smaller than the support radius of chi");
        }
    }
}

OperatorSpec OperatorSpec::with_w(double new_w) const {
    OperatorSpec out = *this;
    out.w = new_w;
    return out;
}

KWindow sampling_window(const Kernel& chi, double w, double log_x,
                        std::optional<double> truncation_radius) {
    const double y = w * log_x;
    KWindow win;
    if (truncation_radius) {
        win.lo = static_cast<long long>(std::ceil(y - *truncation_radius));
        win.hi = static_cast<long long>(std::floor(y + *truncation_radius));
    } else {
        const LogInterval sup = chi.log_support();
        win.lo = static_cast<long long>(std::ceil(y - sup.hi));
        win.hi = static_cast<long long>(std::floor(y - sup.lo));
    }
    return win;
}

SampleAccessor::SampleAccessor(RealFunction source) : source_(std::move(source)) {}
SampleAccessor::SampleAccessor(std::map<long long, double> table) : source_(std::move(table)) {}

double SampleAccessor::at(long long k, double w) const {
    if (const auto* f = std::get_if<RealFunction>(&source_)) {
        return (*f)(std::exp(static_cast<double>(k) / w));
    }
    const auto& table = std::get<std::map<long long, double>>(source_);
    const auto it = table.find(k);
    if (it == table.end()) throw EvaluationError("sample table has no entry for k = " + std::to_string(k));
    return it->second;
}

std::vector<long long> SampleAccessor::missing(long long lo, long long hi) const {
    std::vector<long long> out;
    const auto* table = std::get_if<std::map<long long, double>>(&source_);
    if (!table) return out;
    for (long long k = lo; k <= hi; ++k) {
        if (!table->contains(k)) out.push_back(k);
    }
    return out;
}

double mellin_convolution_log(const Kernel& phi, const RealFunction& f, double w, double log_s,
                              const QuadratureConfig& cfg) {
    require_positive(w, "operator scale w");
    // v = w (log t - log s) turns w phi(t^w / s^w) dt/t into phi_log(v) dv.
    const auto& bp = phi.breakpoints();
    try {
        return integrate_piecewise(
            [&](double v) { return phi.at_log(v) * f(std::exp(log_s + v / w)); },
            std::span<const double>(bp), cfg);
    } catch (const EvaluationError& e) {
        throw EvaluationError(describe_point("mellin_convolution", log_s) + e.what());
    }
}

double mellin_convolution(const Kernel& phi, const RealFunction& f, double w, double s,
                          const QuadratureConfig& cfg) {
    require_positive(s, "convolution centre s");
    return mellin_convolution_log(phi, f, w, std::log(s), cfg);
}

double durrmeyer_eval(const OperatorSpec& spec, const RealFunction& f, double x) {
    spec.validate();
    require_positive(x, "evaluation point x");
    const double log_x = std::log(x);
    const double y = spec.w * log_x;
    const KWindow win = sampling_window(spec.chi, spec.w, log_x, spec.truncation_radius);
    if (win.empty()) throw EvaluationError("durrmeyer_eval: empty summation window");
    double total = 0.0;
    for (long long k = win.lo; k <= win.hi; ++k) {
        const double weight = spec.chi.at_log(y - static_cast<double>(k));
        if (weight == 0.0) continue;
        total += weight * mellin_convolution_log(spec.phi, f, spec.w,
                                                 static_cast<double>(k) / spec.w, spec.quadrature);
    }
    return total;
}

double kantorovich_eval(const Kernel& chi, const RealFunction& f, double w, double x,
                        const QuadratureConfig& cfg) {
    require_positive(w, "operator scale w");
    require_positive(x, "evaluation point x");
    const double log_x = std::log(x);
    const double y = w * log_x;
    const KWindow win = sampling_window(chi, w, log_x);
    if (win.empty()) throw EvaluationError("kantorovich_eval: empty summation window");
    double total = 0.0;
    for (long long k = win.lo; k <= win.hi; ++k) {
        const double weight = chi.at_log(y - static_cast<double>(k));
        if (weight == 0.0) continue;
        // w * integral over [k/w, (k+1)/w] of f(e^u) du, written in z = w u - k
        // so that the nodes do not depend on rounding of the scaled interval.
        const double kd = static_cast<double>(k);
        double mean = 0.0;
        try {
            mean = integrate_log([&](double z) { return f(std::exp((kd + z) / w)); }, LogInterval{0.0, 1.0}, cfg);
        } catch (const EvaluationError& e) {
            throw EvaluationError(describe_point("kantorovich_eval", kd / w) + e.what());
        }
        total += weight * mean;
    }
    return total;
}

double sampling_eval(const Kernel& chi, const SampleAccessor& samples, double w, double x) {
    require_positive(w, "operator scale w");
    require_positive(x, "evaluation point x");
    const double log_x = std::log(x);
    const double y = w * log_x;
    const KWindow win = sampling_window(chi, w, log_x);
    if (win.empty()) throw EvaluationError("sampling_eval: empty summation window");
    if (const auto gaps = samples.missing(win.lo, win.hi); !gaps.empty()) {
        std::string list;
        for (long long k : gaps) list += (list.empty() ? "" : ",") + std::to_string(k);
        throw EvaluationError("sampling_eval: sample table is missing k = " + list);
    }
    double total = 0.0;
    for (long long k = win.lo; k <= win.hi; ++k) {
        const double weight = chi.at_log(y - static_cast<double>(k));
        if (weight == 0.0) continue;
        total += weight * samples.at(k, w);
    }
    return total;
}

double GridValue::abs_err() const { return std::abs(fx - value); }

std::vector<GridValue> durrmeyer_batch(const OperatorSpec& spec, const RealFunction& f,
                                       const std::vector<GridPoint>& points) {
    std::vector<GridValue> out(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        const GridPoint& p = points[i];
        out[i] = GridValue{p.x, p.w, f(p.x), durrmeyer_eval(spec.with_w(p.w), f, p.x)};
    });
    return out;
}

}  // namespace expsample
