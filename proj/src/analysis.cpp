#include "expsample/analysis.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <json.hpp>
#include <sstream>

#include "expsample/errors.hpp"
#include "expsample/parallel.hpp"

namespace expsample {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

void require_scales(const std::vector<double>& ws, std::size_t min_count) {
    if (ws.size() < min_count) {
        throw ConfigError("need at least " + std::to_string(min_count) + " w values");
    }
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (!(ws[i] > 0.0)) throw ConfigError("w values must be positive");
        if (i > 0 && !(ws[i] > ws[i - 1])) throw ConfigError("w values must be strictly increasing");
    }
}

}  // namespace

double Approximant::eval(const RealFunction& f, double x, double w) const {
    const OperatorSpec scaled = op.with_w(w);
    return combination ? combined_eval(*combination, scaled, f, x) : durrmeyer_eval(scaled, f, x);
}

std::string Approximant::label(double w) const {
    return combination ? num(w) + ";p=" + std::to_string(combination->p) : num(w);
}

Approximant plain(OperatorSpec op) { return Approximant{std::move(op), std::nullopt}; }

Approximant combined(OperatorSpec op, int p) {
    if (p == 1) return plain(std::move(op));
    return Approximant{std::move(op), solve_coefficients(p)};
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ConfigDigest make_digest(const std::string& command, const Approximant& a, const RealFunction& f,
                         const std::vector<double>& xs, const std::vector<double>& ws,
                         const std::vector<int>& ps) {
    std::ostringstream os;
    os << "command=" << command << ";chi=" << a.op.chi.descriptor() << ";phi=" << a.op.phi.descriptor()
       << ";fn=" << f.name << ";x=";
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << num(xs[i]);
    os << ";w=";
    for (std::size_t i = 0; i < ws.size(); ++i) os << (i ? "," : "") << num(ws[i]);
    os << ";p=";
    if (ps.empty()) {
        os << a.p();
    } else {
        for (std::size_t i = 0; i < ps.size(); ++i) os << (i ? "," : "") << ps[i];
    }
    os << ";nodes_per_unit=" << a.op.quadrature.nodes_per_unit
       << ";panel_max_width=" << num(a.op.quadrature.panel_max_width);
    if (a.op.truncation_radius) os << ";truncation=" << num(*a.op.truncation_radius);
    os << ";version=" << kVersion;
    return ConfigDigest{os.str(), fnv1a_hex(os.str())};
}

double ErrorRow::abs_err() const { return std::abs(fx - value); }

std::string ErrorTable::to_csv() const {
    std::string out = "x,w,fx,Iwfx,abs_err\n";
    for (const auto& r : rows) {
        out += num(r.x) + "," + r.label + "," + num(r.fx) + "," + num(r.value) + "," +
               num(r.abs_err()) + "\n";
    }
    return out;
}

std::string ErrorTable::to_json() const {
    nlohmann::ordered_json j;
    j["config"] = {{"chi", chi},       {"phi", phi},         {"function", function},
                   {"digest", digest.hex}, {"canonical", digest.canonical}, {"version", kVersion}};
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"x", r.x},
                             {"w", r.w},
                             {"p", r.p},
                             {"fx", r.fx},
                             {"Iwfx", r.value},
                             {"abs_err", r.abs_err()}});
    }
    return j.dump(2) + "\n";
}

ErrorTable error_table(const RealFunction& f, const std::vector<Approximant>& columns,
                       const std::vector<double>& xs, const std::vector<double>& ws) {
    if (columns.empty() || xs.empty() || ws.empty()) {
        throw ConfigError("error_table needs nonempty x, w and column lists");
    }
    ErrorTable table;
    table.chi = columns.front().op.chi.descriptor();
    table.phi = columns.front().op.phi.descriptor();
    table.function = f.name;
    std::vector<int> ps;
    for (const auto& c : columns) ps.push_back(c.p());
    table.digest = make_digest("table", columns.front(), f, xs, ws, ps);

    const std::size_t per_x = columns.size() * ws.size();
    table.rows.resize(xs.size() * per_x);
    parallel_for(table.rows.size(), [&](std::size_t idx) {
        const double x = xs[idx / per_x];
        const Approximant& col = columns[(idx % per_x) / ws.size()];
        const double w = ws[idx % ws.size()];
        table.rows[idx] = ErrorRow{x, w, col.p(), col.label(w), f(x), col.eval(f, x, w)};
    });
    return table;
}

std::string RateReport::to_json() const {
    nlohmann::ordered_json j;
    j["x"] = x;
    j["w"] = ws;
    j["abs_err"] = errors;
    j["fitted_order"] = zero_error ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(fitted_order);
    j["zero_error"] = zero_error;
    j["extrapolated_constant"] = extrapolated_constant;
    return j.dump(2) + "\n";
}

double richardson_step(double w_lo, double a_lo, double w_hi, double a_hi) {
    const double rho = w_hi / w_lo;
    return (rho * a_hi - a_lo) / (rho - 1.0);
}

RateReport empirical_order(const RealFunction& f, const Approximant& a, double x,
                           const std::vector<double>& ws) {
    require_scales(ws, 3);
    RateReport r;
    r.x = x;
    r.ws = ws;
    const double fx = f(x);
    for (double w : ws) {
        const double v = a.eval(f, x, w);
        r.signed_errors.push_back(v - fx);
        r.errors.push_back(std::abs(v - fx));
    }
    for (double e : r.errors) {
        if (e == 0.0) r.zero_error = true;
    }
    if (r.zero_error) {
        r.fitted_order = std::numeric_limits<double>::infinity();
        return r;
    }
    const std::size_t n = ws.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(ws[i]);
        const double ly = std::log(r.errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.fitted_order = -slope;
    const double power = std::round(r.fitted_order);
    const double a_lo = std::pow(ws[n - 2], power) * r.signed_errors[n - 2];
    const double a_hi = std::pow(ws[n - 1], power) * r.signed_errors[n - 1];
    r.extrapolated_constant = richardson_step(ws[n - 2], a_lo, ws[n - 1], a_hi);
    return r;
}

double predicted_constant(const RealFunction& f, const Approximant& a, double x, double w, int j) {
    const CombinationSpec spec = a.combination ? *a.combination : solve_coefficients(1);
    const double moment =
        combined_moment_at_scale(spec, a.op.chi, a.op.phi, j, x, w, a.op.quadrature);
    return f.analytic_derivative(j, x) / factorial(j) * moment;
}

std::string VoronovskayaRecord::to_json() const {
    nlohmann::ordered_json j;
    j["order"] = order;
    j["x"] = x;
    j["w"] = ws;
    j["scaled_errors"] = scaled_errors;
    j["predicted"] = predicted;
    j["extrapolated"] = extrapolated;
    j["relative_deviation"] = relative_deviation;
    j["diverged"] = diverged;
    return j.dump(2) + "\n";
}

VoronovskayaRecord voronovskaya_check(const RealFunction& f, const Approximant& a, double x,
                                      const std::vector<double>& ws, int j) {
    require_scales(ws, 2);
    if (j < 1) throw ConfigError("voronovskaya order must be >= 1");
    if (!f.has_analytic_derivative(j)) {
        throw ConfigError("voronovskaya_check needs closed-form theta^" + std::to_string(j) + " of " +
                          f.name);
    }
    VoronovskayaRecord rec;
    rec.order = j;
    rec.x = x;
    rec.ws = ws;
    const double fx = f(x);
    for (double w : ws) rec.scaled_errors.push_back(std::pow(w, j) * (a.eval(f, x, w) - fx));
    const std::size_t n = ws.size();
    rec.extrapolated = richardson_step(ws[n - 2], rec.scaled_errors[n - 2], ws[n - 1], rec.scaled_errors[n - 1]);
    if (n >= 3) {
        const double previous = richardson_step(ws[n - 3], rec.scaled_errors[n - 3], ws[n - 2],
                                                rec.scaled_errors[n - 2]);
        const double scale = std::max(std::abs(rec.extrapolated), 1e-12);
        rec.diverged = std::abs(rec.extrapolated - previous) > 0.25 * scale;
    }
    rec.predicted = predicted_constant(f, a, x, ws.back(), j);
    rec.relative_deviation = rec.predicted != 0.0
                                 ? std::abs(rec.extrapolated - rec.predicted) / std::abs(rec.predicted)
                                 : std::abs(rec.extrapolated);
    return rec;
}

}  // namespace expsample
