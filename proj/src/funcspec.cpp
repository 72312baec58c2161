#include "expsample/funcspec.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "expsample/errors.hpp"

namespace expsample {

double RealFunction::analytic_derivative(int order, double x) const {
    const auto it = analytic_mellin_derivatives.find(order);
    if (it == analytic_mellin_derivatives.end()) {
        throw ConfigError("function '" + name + "' has no closed-form theta^" +
                          std::to_string(order));
    }
    return it->second(x);
}

bool is_admissible(const RealFunction& f) { return f.bounded || f.growth_bound.has_value(); }

namespace {

double checked_pow(double base, double exponent) {
    if (base < 0.0 && std::trunc(exponent) != exponent) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "negative base %.17g with non-integer exponent %.17g", base,
                      exponent);
        throw EvaluationError(buf);
    }
    return std::pow(base, exponent);
}

double apply_call(ExprAst::Call fn, double v) {
    switch (fn) {
        case ExprAst::Call::Sin: return std::sin(v);
        case ExprAst::Call::Cos: return std::cos(v);
        case ExprAst::Call::Tan: return std::tan(v);
        case ExprAst::Call::Exp: return std::exp(v);
        case ExprAst::Call::Log: return std::log(v);
        case ExprAst::Call::Sqrt: return std::sqrt(v);
        case ExprAst::Call::Abs: return std::abs(v);
    }
    return 0.0;
}

const char* call_name(ExprAst::Call fn) {
    switch (fn) {
        case ExprAst::Call::Sin: return "sin";
        case ExprAst::Call::Cos: return "cos";
        case ExprAst::Call::Tan: return "tan";
        case ExprAst::Call::Exp: return "exp";
        case ExprAst::Call::Log: return "log";
        case ExprAst::Call::Sqrt: return "sqrt";
        case ExprAst::Call::Abs: return "abs";
    }
    return "?";
}

std::optional<ExprAst::Call> lookup_call(std::string_view id) {
    static constexpr std::pair<std::string_view, ExprAst::Call> table[] = {
        {"sin", ExprAst::Call::Sin},   {"cos", ExprAst::Call::Cos}, {"tan", ExprAst::Call::Tan},
        {"exp", ExprAst::Call::Exp},   {"log", ExprAst::Call::Log}, {"sqrt", ExprAst::Call::Sqrt},
        {"abs", ExprAst::Call::Abs},
    };
    for (const auto& [name, fn] : table) {
        if (name == id) return fn;
    }
    return std::nullopt;
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::unique_ptr<ExprAst> make(auto node) {
    auto out = std::make_unique<ExprAst>();
    out->node = std::move(node);
    return out;
}

// Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'x' | 'pi' | 'e' | ident '(' args ')' | '(' expr ')'
class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    std::unique_ptr<ExprAst> parse() {
        auto root = expr();
        skip_space();
        if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("syntax error: " + what, pos_);
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::unique_ptr<ExprAst> expr() {
        auto lhs = term();
        while (true) {
            if (accept('+')) {
                lhs = make(ExprAst::BinaryNode{ExprAst::Binary::Add, std::move(lhs), term()});
            } else if (accept('-')) {
                lhs = make(ExprAst::BinaryNode{ExprAst::Binary::Sub, std::move(lhs), term()});
            } else {
                return lhs;
            }
        }
    }

    std::unique_ptr<ExprAst> term() {
        auto lhs = unary();
        while (true) {
            if (accept('*')) {
                lhs = make(ExprAst::BinaryNode{ExprAst::Binary::Mul, std::move(lhs), unary()});
            } else if (accept('/')) {
                lhs = make(ExprAst::BinaryNode{ExprAst::Binary::Div, std::move(lhs), unary()});
            } else {
                return lhs;
            }
        }
    }

    std::unique_ptr<ExprAst> unary() {
        if (accept('-')) return make(ExprAst::UnaryNode{ExprAst::Unary::Negate, unary()});
        if (accept('+')) return unary();
        return power();
    }

    std::unique_ptr<ExprAst> power() {
        auto base = primary();
        if (accept('^')) {
            return make(ExprAst::BinaryNode{ExprAst::Binary::Pow, std::move(base), unary()});
        }
        return base;
    }

    std::unique_ptr<ExprAst> primary() {
        skip_space();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (accept('(')) {
            auto inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    std::unique_ptr<ExprAst> number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            // Exponent only when followed by digits, so "2e" stays a syntax error
            // rather than silently becoming 2*e.
            std::size_t q = pos_ + 1;
            if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
            if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
                pos_ = q;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    ++pos_;
                }
            }
        }
        double value = 0.0;
        const char* first = src_.data() + start;
        const char* last = src_.data() + pos_;
        const auto res = std::from_chars(first, last, value);
        if (res.ec != std::errc{} || res.ptr != last) {
            pos_ = start;
            fail("malformed number");
        }
        return make(ExprAst::Constant{value});
    }

    std::unique_ptr<ExprAst> identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view id = src_.substr(start, pos_ - start);
        if (id == "x") return make(ExprAst::Variable{});
        if (id == "pi") return make(ExprAst::Constant{std::numbers::pi});
        if (id == "e") return make(ExprAst::Constant{std::numbers::e});
        const auto fn = lookup_call(id);
        if (!fn) throw ParseError("unknown identifier '" + std::string(id) + "'", start);
        if (!accept('(')) fail("expected '(' after " + std::string(id));
        std::vector<std::unique_ptr<ExprAst>> args;
        skip_space();
        if (!accept(')')) {
            do {
                args.push_back(expr());
            } while (accept(','));
            if (!accept(')')) fail("expected ')'");
        }
        if (args.size() != 1) {
            throw ParseError("arity mismatch: " + std::string(id) + " takes 1 argument, got " +
                                 std::to_string(args.size()),
                             start);
        }
        return make(ExprAst::CallNode{*fn, std::move(args.front())});
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

void print_into(const ExprAst& ast, std::string& out) {
    std::visit(Overloaded{
                   [&](const ExprAst::Constant& c) {
                       char buf[40];
                       std::snprintf(buf, sizeof buf, "%.17g", c.value);
                       out += '(';
                       out += buf;
                       out += ')';
                   },
                   [&](const ExprAst::Variable&) { out += 'x'; },
                   [&](const ExprAst::UnaryNode& u) {
                       out += "(-";
                       print_into(*u.operand, out);
                       out += ')';
                   },
                   [&](const ExprAst::BinaryNode& b) {
                       static constexpr char ops[] = {'+', '-', '*', '/', '^'};
                       out += '(';
                       print_into(*b.lhs, out);
                       out += ops[static_cast<int>(b.op)];
                       print_into(*b.rhs, out);
                       out += ')';
                   },
                   [&](const ExprAst::CallNode& c) {
                       out += call_name(c.fn);
                       out += '(';
                       print_into(*c.arg, out);
                       out += ')';
                   },
               },
               ast.node);
}

}  // namespace

double ExprAst::evaluate(double x) const {
    return std::visit(Overloaded{
                          [](const Constant& c) { return c.value; },
                          [x](const Variable&) { return x; },
                          [x](const UnaryNode& u) { return -u.operand->evaluate(x); },
                          [x](const BinaryNode& b) {
                              const double l = b.lhs->evaluate(x);
                              const double r = b.rhs->evaluate(x);
                              switch (b.op) {
                                  case Binary::Add: return l + r;
                                  case Binary::Sub: return l - r;
                                  case Binary::Mul: return l * r;
                                  case Binary::Div: return l / r;
                                  case Binary::Pow: return checked_pow(l, r);
                              }
                              return 0.0;
                          },
                          [x](const CallNode& c) { return apply_call(c.fn, c.arg->evaluate(x)); },
                      },
                      node);
}

std::unique_ptr<ExprAst> parse_expression(std::string_view src) {
    if (src.empty()) throw ParseError("syntax error: empty expression", 0);
    return Parser(src).parse();
}

std::string print_expression(const ExprAst& ast) {
    std::string out;
    print_into(ast, out);
    return out;
}

RealFunction parse_function(std::string_view src) {
    std::shared_ptr<const ExprAst> ast = parse_expression(src);
    RealFunction f;
    f.name = "expr:" + std::string(src);
    f.evaluator = [ast](double x) { return ast->evaluate(x); };
    return f;
}

RealFunction builtin(std::string_view name) {
    using std::numbers::pi;
    RealFunction f;
    f.name = std::string(name);
    if (name == "fig1") {
        f.evaluator = [](double x) { return x * x * std::cos(2.0 * pi * x); };
        // theta f = 2x^2 cos - 2 pi x^3 sin; theta^2 f = 4x^2 cos - 10 pi x^3 sin - 4 pi^2 x^4 cos.
        f.analytic_mellin_derivatives[1] = [](double x) {
            return 2.0 * x * x * std::cos(2.0 * pi * x) - 2.0 * pi * x * x * x * std::sin(2.0 * pi * x);
        };
        f.analytic_mellin_derivatives[2] = [](double x) {
            const double c = std::cos(2.0 * pi * x);
            const double s = std::sin(2.0 * pi * x);
            return 4.0 * x * x * c - 10.0 * pi * x * x * x * s - 4.0 * pi * pi * x * x * x * x * c;
        };
        return f;
    }
    if (name == "fig2") {
        f.evaluator = [](double x) { return std::exp(-std::sin(x * x)) / (x * x * x); };
        // theta g = g * (-3 - 2 x^2 cos(x^2)).
        f.analytic_mellin_derivatives[1] = [](double x) {
            const double g = std::exp(-std::sin(x * x)) / (x * x * x);
            return g * (-3.0 - 2.0 * x * x * std::cos(x * x));
        };
        return f;
    }
    if (name == "sinlog") {
        f.evaluator = [](double x) { return std::sin(std::log(x)); };
        f.analytic_mellin_derivatives[1] = [](double x) { return std::cos(std::log(x)); };
        f.analytic_mellin_derivatives[2] = [](double x) { return -std::sin(std::log(x)); };
        f.analytic_mellin_derivatives[3] = [](double x) { return -std::cos(std::log(x)); };
        f.analytic_mellin_derivatives[4] = [](double x) { return std::sin(std::log(x)); };
        f.bounded = true;
        f.growth_bound = GrowthBound{1.0, 0.0};
        return f;
    }
    if (name == "logsq") {
        f.evaluator = [](double x) {
            const double l = std::log(x);
            return l * l;
        };
        f.analytic_mellin_derivatives[1] = [](double x) { return 2.0 * std::log(x); };
        f.analytic_mellin_derivatives[2] = [](double) { return 2.0; };
        f.analytic_mellin_derivatives[3] = [](double) { return 0.0; };
        return f;
    }
    if (name.starts_with("const:")) {
        const std::string_view text = name.substr(6);
        double v = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
            throw ParseError("bad constant in builtin '" + std::string(name) + "'", 6);
        }
        f.evaluator = [v](double) { return v; };
        for (int r = 1; r <= 6; ++r) f.analytic_mellin_derivatives[r] = [](double) { return 0.0; };
        f.bounded = true;
        f.growth_bound = GrowthBound{std::abs(v), 0.0};
        return f;
    }
    throw ConfigError("unknown builtin function '" + std::string(name) + "'");
}

RealFunction function_from_descriptor(std::string_view descriptor) {
    if (descriptor.starts_with("name:")) return builtin(descriptor.substr(5));
    if (descriptor.starts_with("expr:")) return parse_function(descriptor.substr(5));
    throw ConfigError("function descriptor must start with 'name:' or 'expr:', got '" +
                      std::string(descriptor) + "'");
}

}  // namespace expsample
