#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace expsample {

/// |f(e^u)| <= a + b |u| for all real u.
struct GrowthBound {
    double a = 0.0;
    double b = 0.0;
};

/// A map (0, inf) -> R with optional closed-form Mellin derivatives theta^r f.
struct RealFunction {
    using Map = std::function<double(double)>;

    std::string name;
    Map evaluator;
    std::map<int, Map> analytic_mellin_derivatives;
    std::optional<GrowthBound> growth_bound;
    bool bounded = false;

    double operator()(double x) const { return evaluator(x); }
    bool has_analytic_derivative(int order) const {
        return analytic_mellin_derivatives.contains(order);
    }
    /// theta^order f at x; throws ConfigError when no closed form is registered.
    double analytic_derivative(int order, double x) const;
};

/// Bounded or log-linear growth: the classes for which the operators are known to converge.
bool is_admissible(const RealFunction& f);

/// Expression tree for parsed test functions.
struct ExprAst {
    enum class Unary { Negate };
    enum class Binary { Add, Sub, Mul, Div, Pow };
    enum class Call { Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

    struct Constant {
        double value;
    };
    struct Variable {};
    struct UnaryNode {
        Unary op;
        std::unique_ptr<ExprAst> operand;
    };
    struct BinaryNode {
        Binary op;
        std::unique_ptr<ExprAst> lhs;
        std::unique_ptr<ExprAst> rhs;
    };
    struct CallNode {
        Call fn;
        std::unique_ptr<ExprAst> arg;
    };

    std::variant<Constant, Variable, UnaryNode, BinaryNode, CallNode> node;

    double evaluate(double x) const;
};

/// Recursive-descent parse of an expression in x. Throws ParseError.
std::unique_ptr<ExprAst> parse_expression(std::string_view src);

/// Canonical fully-parenthesized text; parses back to an equivalent tree.
std::string print_expression(const ExprAst& ast);

RealFunction parse_function(std::string_view src);

/// fig1, fig2, const:<v>, sinlog, logsq.
RealFunction builtin(std::string_view name);

/// `name:<builtin>` or `expr:<string>`.
RealFunction function_from_descriptor(std::string_view descriptor);

}  // namespace expsample
