#include "expsample/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "expsample/analysis.hpp"
#include "expsample/errors.hpp"

namespace expsample::cli {

namespace {

/// Thrown for bad flag values found after CLI11 parsing; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Wraps failures of the numerical stage with the operation name; exit code 1.
struct NumericalFailure : std::runtime_error {
    NumericalFailure(const std::string& op, const std::string& what)
        : std::runtime_error(op + " failed: " + what) {}
};

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

double parse_real(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw UsageError("not a number: '" + s + "'");
    return v;
}

struct CommonOptions {
    std::string chi = "bspline:4";
    std::string phi = "bspline:2";
    std::string fn;
    std::string xs;
    std::string ws;
    std::string combine;
    std::string out;
    std::string format = "csv";
    int nodes_per_unit = QuadratureConfig{}.nodes_per_unit;
    double panel_width = QuadratureConfig{}.panel_max_width;
};

void add_operator_options(CLI::App* cmd, CommonOptions& o, bool needs_fn) {
    cmd->add_option("--chi", o.chi, "discrete kernel descriptor (bspline:<n>, translates:..., char)")
        ->capture_default_str();
    cmd->add_option("--phi", o.phi, "continuous kernel descriptor")->capture_default_str();
    auto* fn = cmd->add_option("--fn", o.fn, "function: name:<builtin> or expr:<expression>");
    if (needs_fn) fn->required();
    cmd->add_option("--nodes-per-unit", o.nodes_per_unit, "Gauss-Legendre nodes per unit log length")
        ->capture_default_str();
    cmd->add_option("--panel-width", o.panel_width, "maximum quadrature panel width (log units)")
        ->capture_default_str();
}

void add_output_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--out", o.out, "output file (default: standard output)");
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

Kernel kernel_arg(const std::string& text, const char* flag) {
    try {
        return parse_kernel(text);
    } catch (const Error& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

OperatorSpec operator_from(const CommonOptions& o) {
    OperatorSpec spec{kernel_arg(o.chi, "--chi"), kernel_arg(o.phi, "--phi"), 1.0, std::nullopt, {}};
    spec.quadrature.nodes_per_unit = o.nodes_per_unit;
    spec.quadrature.panel_max_width = o.panel_width;
    try {
        spec.quadrature.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return spec;
}

RealFunction function_from(const CommonOptions& o) {
    try {
        return function_from_descriptor(o.fn);
    } catch (const Error& e) {
        throw UsageError(std::string("--fn: ") + e.what());
    }
}

std::vector<double> positive_list(const std::string& text, const char* flag) {
    std::vector<double> v;
    try {
        v = parse_real_list(text);
    } catch (const UsageError& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
    for (double d : v) {
        if (!(d > 0.0)) throw UsageError(std::string(flag) + ": values must be positive");
    }
    return v;
}

std::vector<int> combine_list(const std::string& text) {
    if (text.empty()) return {1};
    return parse_combine(text);
}

void emit(const CommonOptions& o, const std::string& content, std::ostream& out) {
    if (o.out.empty()) {
        out << content;
    } else {
        write_atomically(o.out, content);
    }
}

void summary(std::ostream& err, const std::string& command, std::size_t rows, const ConfigDigest& d) {
    err << "expsample " << command << ": " << rows << " rows, config digest " << d.hex << " ["
        << d.canonical << "]\n";
}

void echo_coefficients(std::ostream& err, const Approximant& a) {
    if (!a.combination) return;
    err << "# combination " << a.combination->label() << " beta =";
    for (const auto& b : a.combination->exact) err << " " << b;
    err << "\n";
}

template <class Fn>
auto numerically(const std::string& op, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    } catch (const Error& e) {
        throw NumericalFailure(op, e.what());
    }
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
    if (text.empty()) throw UsageError("empty list");
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
        if (parts.size() != 3) throw UsageError("range must be lo:hi:n, got '" + text + "'");
        const double lo = parse_real(parts[0]);
        const double hi = parse_real(parts[1]);
        const double n = parse_real(parts[2]);
        if (n < 1 || n != std::floor(n)) throw UsageError("range count must be a positive integer");
        if (n == 1) return {lo};
        for (int i = 0; i < static_cast<int>(n); ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
        return out;
    }
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_real(item));
    if (out.empty()) throw UsageError("empty list");
    return out;
}

std::vector<int> parse_combine(const std::string& text) {
    if (!text.starts_with("p=")) throw UsageError("--combine expects p=<int>, got '" + text + "'");
    std::vector<int> out;
    for (double v : parse_real_list(text.substr(2))) {
        if (v != std::floor(v) || v < 1 || v > kMaxCombinationOrder) {
            throw UsageError("--combine: p must be an integer in 1..12");
        }
        out.push_back(static_cast<int>(v));
    }
    return out;
}

void write_atomically(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw Error("failed writing " + tmp.string());
    }
    fs::rename(tmp, target);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Durrmeyer-type exponential sampling operators: kernels, evaluation, tables, rates",
                 "expsample"};
    app.require_subcommand(1);

    // coeffs
    int coeff_p = 3;
    bool coeff_exact = false;
    auto* coeffs = app.add_subcommand("coeffs", "print combination weights beta_1..beta_p");
    coeffs->add_option("--p", coeff_p, "combination order (1..12)")->required();
    coeffs->add_flag("--exact", coeff_exact, "print reduced fractions instead of decimals");

    // moments
    std::string mom_kernel;
    int mom_order = 0;
    std::string mom_kind = "discrete";
    double mom_u = 1.0;
    int mom_cutoff = 3;
    auto* moments = app.add_subcommand("moments", "print a kernel moment");
    moments->add_option("--kernel", mom_kernel, "kernel descriptor")->required();
    moments->add_option("--order", mom_order, "moment order")->required()->check(CLI::NonNegativeNumber);
    moments->add_option("--kind", mom_kind, "discrete, continuous, abs-discrete, abs-continuous, poisson")
        ->check(CLI::IsMember({"discrete", "continuous", "abs-discrete", "abs-continuous", "poisson"}))
        ->capture_default_str();
    moments->add_option("--u", mom_u, "evaluation point u of discrete and poisson moments")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    moments->add_option("--cutoff", mom_cutoff, "frequency cutoff of the poisson route")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    // verify
    CommonOptions ver;
    int ver_order = 2;
    double ver_tol = 1e-10;
    auto* verify = app.add_subcommand("verify", "check the kernel assumptions for a (chi, phi) pair");
    add_operator_options(verify, ver, false);
    verify->add_option("--order", ver_order, "moment order r")->check(CLI::NonNegativeNumber)->capture_default_str();
    verify->add_option("--tol", ver_tol, "tolerance")->capture_default_str();

    // eval / table
    CommonOptions ev;
    auto* eval = app.add_subcommand("eval", "evaluate the operator at each (x, w) pair of the cross product");
    add_operator_options(eval, ev, true);
    eval->add_option("--x", ev.xs, "x list (a,b,c) or range lo:hi:n")->required();
    eval->add_option("--w", ev.ws, "w list or range")->required();
    eval->add_option("--combine", ev.combine, "combination order p=<int>");
    add_output_options(eval, ev);

    CommonOptions tb;
    auto* table = app.add_subcommand("table", "error table over x, combination orders and w");
    add_operator_options(table, tb, true);
    table->add_option("--x", tb.xs, "x list or range")->required();
    table->add_option("--w", tb.ws, "w list or range")->required();
    table->add_option("--combine", tb.combine, "combination orders p=<int>[,<int>...] (1 = plain)");
    add_output_options(table, tb);

    // rates
    CommonOptions rt;
    auto* rates = app.add_subcommand("rates", "fit empirical convergence orders over a w sequence");
    add_operator_options(rates, rt, true);
    rates->add_option("--x", rt.xs, "x list or range")->required();
    rates->add_option("--w", rt.ws, "increasing w sequence (>= 3 values)")->required();
    rates->add_option("--combine", rt.combine, "combination order p=<int>");
    add_output_options(rates, rt);

    // voronovskaya
    CommonOptions vo;
    int vo_order = 2;
    auto* voron = app.add_subcommand("voronovskaya", "compare predicted and extrapolated asymptotic constants");
    add_operator_options(voron, vo, true);
    voron->add_option("--x", vo.xs, "x list or range")->required();
    voron->add_option("--w", vo.ws, "increasing geometric w sequence")->required();
    voron->add_option("--order", vo_order, "asymptotic order j")->check(CLI::PositiveNumber)->capture_default_str();
    voron->add_option("--combine", vo.combine, "combination order p=<int>");
    add_output_options(voron, vo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*coeffs) {
            const CombinationSpec spec = numerically("coeffs", [&] { return solve_coefficients(coeff_p); });
            for (int i = 0; i < spec.p; ++i) {
                out << (i ? " " : "") << (coeff_exact ? spec.exact[i] : fmt("%.10g", spec.beta[i]));
            }
            out << "\n";
            err << "expsample coeffs: config digest " << fnv1a_hex("command=coeffs;p=" + std::to_string(coeff_p))
                << " [command=coeffs;p=" << coeff_p << "]\n";
            return 0;
        }
        if (*moments) {
            const Kernel k = kernel_arg(mom_kernel, "--kernel");
            const double log_u = std::log(mom_u);
            const double v = numerically("moments", [&] {
                if (mom_kind == "discrete") return discrete_moment_log(k, mom_order, log_u);
                if (mom_kind == "continuous") return continuous_moment(k, mom_order);
                if (mom_kind == "abs-discrete") return absolute_discrete_moment(k, mom_order);
                if (mom_kind == "abs-continuous") return absolute_continuous_moment(k, mom_order);
                return poisson_moment(k, mom_order, mom_cutoff, log_u);
            });
            out << fmt("%.10f", v) << "\n";
            const std::string canon = "command=moments;kernel=" + k.descriptor() + ";order=" +
                                      std::to_string(mom_order) + ";kind=" + mom_kind + ";u=" +
                                      fmt("%.17g", mom_u) + ";cutoff=" + std::to_string(mom_cutoff);
            err << "expsample moments: config digest " << fnv1a_hex(canon) << " [" << canon << "]\n";
            return 0;
        }
        if (*verify) {
            const OperatorSpec spec = operator_from(ver);
            const AssumptionReport rep =
                numerically("verify", [&] { return verify_kernel(spec.chi, spec.phi, ver_order, ver_tol); });
            for (const auto& c : rep.conditions) {
                out << c.name << " " << (c.passed ? "pass" : "FAIL") << " residual=" << fmt("%.3e", c.residual)
                    << "  # " << c.detail << "\n";
            }
            out << (rep.all_passed() ? "all conditions pass" : "some conditions FAIL") << "\n";
            const std::string canon = "command=verify;chi=" + spec.chi.descriptor() + ";phi=" +
                                      spec.phi.descriptor() + ";order=" + std::to_string(ver_order) +
                                      ";tol=" + fmt("%.17g", ver_tol);
            err << "expsample verify: config digest " << fnv1a_hex(canon) << " [" << canon << "]\n";
            return 0;
        }
        if (*eval || *table) {
            const CommonOptions& o = *eval ? ev : tb;
            const OperatorSpec spec = operator_from(o);
            const RealFunction f = function_from(o);
            const auto xs = positive_list(o.xs, "--x");
            const auto ws = positive_list(o.ws, "--w");
            const auto ps = combine_list(o.combine);
            if (*eval && ps.size() != 1) throw UsageError("eval takes a single combination order");
            if (!is_admissible(f)) {
                err << "warning: " << f.name << " is neither bounded nor of declared log-linear growth\n";
            }
            std::vector<Approximant> columns;
            for (int p : ps) columns.push_back(numerically("coeffs", [&] { return combined(spec, p); }));
            for (const auto& c : columns) echo_coefficients(err, c);
            ErrorTable t = numerically(*eval ? "eval" : "table", [&] { return error_table(f, columns, xs, ws); });
            if (*eval) t.digest = make_digest("eval", columns.front(), f, xs, ws, ps);
            emit(o, o.format == "json" ? t.to_json() : t.to_csv(), out);
            summary(err, *eval ? "eval" : "table", t.rows.size(), t.digest);
            return 0;
        }
        if (*rates) {
            const OperatorSpec spec = operator_from(rt);
            const RealFunction f = function_from(rt);
            const auto xs = positive_list(rt.xs, "--x");
            const auto ws = positive_list(rt.ws, "--w");
            const auto ps = combine_list(rt.combine);
            if (ps.size() != 1) throw UsageError("rates takes a single combination order");
            const Approximant a = numerically("coeffs", [&] { return combined(spec, ps.front()); });
            echo_coefficients(err, a);
            std::string csv = "x,w,abs_err,fitted_order,extrapolated_constant\n";
            nlohmann::ordered_json js = nlohmann::ordered_json::array();
            for (double x : xs) {
                const RateReport r = numerically("rates", [&] { return empirical_order(f, a, x, ws); });
                for (std::size_t i = 0; i < ws.size(); ++i) {
                    csv += fmt("%.15g", x) + "," + fmt("%.15g", ws[i]) + "," + fmt("%.15g", r.errors[i]) + "," +
                           (r.zero_error ? std::string("inf") : fmt("%.15g", r.fitted_order)) + "," +
                           fmt("%.15g", r.extrapolated_constant) + "\n";
                }
                js.push_back(nlohmann::ordered_json::parse(r.to_json()));
            }
            const ConfigDigest d = make_digest("rates", a, f, xs, ws);
            if (rt.format == "json") {
                nlohmann::ordered_json doc{{"config", {{"digest", d.hex}, {"canonical", d.canonical}}},
                                           {"reports", js}};
                emit(rt, doc.dump(2) + "\n", out);
            } else {
                emit(rt, csv, out);
            }
            summary(err, "rates", xs.size() * ws.size(), d);
            return 0;
        }
        if (*voron) {
            const OperatorSpec spec = operator_from(vo);
            const RealFunction f = function_from(vo);
            const auto xs = positive_list(vo.xs, "--x");
            const auto ws = positive_list(vo.ws, "--w");
            const auto ps = combine_list(vo.combine);
            if (ps.size() != 1) throw UsageError("voronovskaya takes a single combination order");
            const Approximant a = numerically("coeffs", [&] { return combined(spec, ps.front()); });
            echo_coefficients(err, a);
            std::string csv = "x,order,predicted,extrapolated,relative_deviation,diverged\n";
            nlohmann::ordered_json js = nlohmann::ordered_json::array();
            for (double x : xs) {
                const VoronovskayaRecord r =
                    numerically("voronovskaya", [&] { return voronovskaya_check(f, a, x, ws, vo_order); });
                csv += fmt("%.15g", x) + "," + std::to_string(vo_order) + "," + fmt("%.15g", r.predicted) + "," +
                       fmt("%.15g", r.extrapolated) + "," + fmt("%.15g", r.relative_deviation) + "," +
                       (r.diverged ? "1" : "0") + "\n";
                js.push_back(nlohmann::ordered_json::parse(r.to_json()));
            }
            const ConfigDigest d = make_digest("voronovskaya", a, f, xs, ws);
            if (vo.format == "json") {
                nlohmann::ordered_json doc{{"config", {{"digest", d.hex}, {"canonical", d.canonical}}},
                                           {"records", js}};
                emit(vo, doc.dump(2) + "\n", out);
            } else {
                emit(vo, csv, out);
            }
            summary(err, "voronovskaya", xs.size(), d);
            return 0;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const NumericalFailure& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace expsample::cli
