#pragma once

#include <optional>
#include <string>
#include <vector>

#include "expsample/combinations.hpp"

namespace expsample {

inline constexpr const char* kVersion = "0.1.0";

/// A plain operator I_w or a combination I_{w,p} built on it.
struct Approximant {
    OperatorSpec op;
    std::optional<CombinationSpec> combination;

    double eval(const RealFunction& f, double x, double w) const;
    /// Column label: the w value, with ";p=<p>" appended for combinations.
    std::string label(double w) const;
    int p() const { return combination ? combination->p : 1; }
};

Approximant plain(OperatorSpec op);
Approximant combined(OperatorSpec op, int p);

/// Canonical description of a run and its FNV-1a digest.
struct ConfigDigest {
    std::string canonical;
    std::string hex;
};
ConfigDigest make_digest(const std::string& command, const Approximant& a, const RealFunction& f,
                         const std::vector<double>& xs, const std::vector<double>& ws,
                         const std::vector<int>& ps = {});
std::string fnv1a_hex(const std::string& text);

struct ErrorRow {
    double x = 1.0;
    double w = 1.0;
    int p = 1;
    std::string label;
    double fx = 0.0;
    double value = 0.0;
    double abs_err() const;
};

struct ErrorTable {
    std::vector<ErrorRow> rows;
    std::string chi;
    std::string phi;
    std::string function;
    ConfigDigest digest;

    std::string to_csv() const;
    std::string to_json() const;
};

/// Rows for every (x, column, w), row-major in that order. `columns` holds one
/// approximant per combination order requested.
ErrorTable error_table(const RealFunction& f, const std::vector<Approximant>& columns,
                       const std::vector<double>& xs, const std::vector<double>& ws);

struct RateReport {
    double x = 1.0;
    std::vector<double> ws;
    std::vector<double> errors;         ///< |f(x) - value|
    std::vector<double> signed_errors;  ///< value - f(x)
    double fitted_order = 0.0;
    bool zero_error = false;            ///< fitted_order is +inf
    double extrapolated_constant = 0.0;

    std::string to_json() const;
};

/// Negated least-squares slope of log |error| against log w.
RateReport empirical_order(const RealFunction& f, const Approximant& a, double x,
                           const std::vector<double>& ws);

/// One Richardson step removing a term proportional to 1/w between two scales.
double richardson_step(double w_lo, double a_lo, double w_hi, double a_hi);

struct VoronovskayaRecord {
    int order = 1;
    double x = 1.0;
    std::vector<double> ws;
    std::vector<double> scaled_errors;  ///< w^j (I f - f)(x)
    double predicted = 0.0;
    double extrapolated = 0.0;
    double relative_deviation = 0.0;
    bool diverged = false;

    std::string to_json() const;
};

/// Compares the predicted limit theta^j f(x)/j! * M_j with the Richardson-
/// extrapolated value of w^j (I f - f)(x) over ws (geometric, increasing).
VoronovskayaRecord voronovskaya_check(const RealFunction& f, const Approximant& a, double x,
                                      const std::vector<double>& ws, int j);

/// Predicted constant only.
double predicted_constant(const RealFunction& f, const Approximant& a, double x, double w, int j);

}  // namespace expsample
