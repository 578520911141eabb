#include "crncalc/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace crncalc {

ExprPtr Expr::make(ExprKind k, std::vector<ExprPtr> args) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->args = std::move(args);
    return e;
}

ExprPtr Expr::lit(double v) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Literal;
    e->literal = v;
    return e;
}

ExprPtr Expr::variable(std::string name) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Var;
    e->var = std::move(name);
    return e;
}

// --- parser ------------------------------------------------------------------

namespace {

struct Parser {
    const std::string& text;
    size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& expected) {
        throw Error(ErrorKind::Syntax,
                    "syntax error at byte " + std::to_string(pos) + ": expected " + expected);
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) { ++pos; return true; }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("'") + c + "'");
    }

    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        while (true) {
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos;
            std::vector<ExprPtr> args;
            args.push_back(std::move(lhs));
            args.push_back(parse_term());
            lhs = Expr::make(c == '+' ? ExprKind::Add : ExprKind::Sub, std::move(args));
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_factor();
        while (true) {
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos;
            std::vector<ExprPtr> args;
            args.push_back(std::move(lhs));
            args.push_back(parse_factor());
            lhs = Expr::make(c == '*' ? ExprKind::Mul : ExprKind::Div, std::move(args));
        }
    }

    ExprPtr parse_factor() {
        char c = peek();
        if (c == '-') {
            ++pos;
            std::vector<ExprPtr> args;
            args.push_back(parse_factor());
            return Expr::make(ExprKind::Neg, std::move(args));
        }
        if (c == '(') {
            ++pos;
            ExprPtr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail("a number, identifier, '(', '-', or a function call");
    }

    ExprPtr parse_number() {
        skip_ws();
        size_t used = 0;
        double v;
        try {
            v = std::stod(text.substr(pos), &used);
        } catch (const std::exception&) {
            fail("a number");
        }
        pos += used;
        return Expr::lit(v);
    }

    ExprPtr parse_ident() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (peek() != '(') {
            if (name == "exp" || name == "ln" || name == "root" || name == "max" ||
                name == "absdiff")
                fail("'(' after function name '" + name + "'");
            return Expr::variable(std::move(name));
        }
        ++pos; // '('
        std::vector<ExprPtr> args;
        if (peek() != ')') {
            args.push_back(parse_expr());
            while (eat(',')) args.push_back(parse_expr());
        }
        expect(')');
        return make_call(name, std::move(args));
    }

    ExprPtr make_call(const std::string& name, std::vector<ExprPtr> args) {
        auto arity = [&](size_t n) {
            if (args.size() != n)
                fail(std::to_string(n) + " argument(s) to " + name + ", got " +
                     std::to_string(args.size()));
        };
        if (name == "exp") { arity(1); return Expr::make(ExprKind::Exp, std::move(args)); }
        if (name == "ln") { arity(1); return Expr::make(ExprKind::Ln, std::move(args)); }
        if (name == "max") { arity(2); return Expr::make(ExprKind::Max, std::move(args)); }
        if (name == "absdiff") { arity(2); return Expr::make(ExprKind::AbsDiff, std::move(args)); }
        if (name == "root") {
            arity(2);
            const Expr& m = *args[1];
            if (m.kind != ExprKind::Literal || m.literal < 1.0 ||
                m.literal != std::floor(m.literal))
                fail("a positive integer root index");
            auto e = Expr::make(ExprKind::Root, {});
            e->root_m = static_cast<int>(m.literal);
            e->args.push_back(std::move(args[0]));
            return e;
        }
        fail("a known function (exp, ln, root, max, absdiff)");
    }
};

} // namespace

ExprPtr parse(const std::string& text) {
    Parser p(text);
    ExprPtr e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("end of input");
    return e;
}

InputDecl parse_input_decl(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0)
        throw Error(ErrorKind::Syntax,
                    "input declaration must look like name:real or name:nonneg(lo,hi)");
    InputDecl decl;
    decl.name = text.substr(0, colon);
    std::string rest = text.substr(colon + 1);
    std::string kind = rest.substr(0, rest.find('('));
    if (kind == "real") decl.real = true;
    else if (kind != "nonneg")
        throw Error(ErrorKind::Syntax, "input kind must be real or nonneg");
    decl.range = decl.real ? Interval::real() : Interval::nonneg();
    if (auto open = rest.find('('); open != std::string::npos) {
        if (rest.back() != ')')
            throw Error(ErrorKind::Syntax, "unterminated range in '" + text + "'");
        std::string body = rest.substr(open + 1, rest.size() - open - 2);
        auto comma = body.find(',');
        if (comma == std::string::npos)
            throw Error(ErrorKind::Syntax, "range needs two bounds: (lo,hi)");
        try {
            decl.range.lo = std::stod(body.substr(0, comma));
            decl.range.hi = std::stod(body.substr(comma + 1));
        } catch (const std::exception&) {
            throw Error(ErrorKind::Syntax, "bad range bounds in '" + text + "'");
        }
        if (decl.range.lo > decl.range.hi)
            throw Error(ErrorKind::Syntax, "range is empty in '" + text + "'");
        if (!decl.real && decl.range.lo < 0.0)
            throw Error(ErrorKind::Domain, "nonneg input cannot include negative values");
    }
    if (decl.name == "e")
        throw Error(ErrorKind::Domain, "'e' is reserved for the constant");
    return decl;
}

// --- sign / range inference ---------------------------------------------------

namespace {

void infer(Expr& e, const std::map<std::string, InputDecl>& decls) {
    for (auto& a : e.args) infer(*a, decls);
    auto& A = e.args;
    switch (e.kind) {
        case ExprKind::Literal:
            e.sign = e.literal >= 0.0 ? SignTag::NonNeg : SignTag::Real;
            e.range = Interval::point(e.literal);
            break;
        case ExprKind::Var: {
            auto it = decls.find(e.var);
            if (it == decls.end())
                throw Error(ErrorKind::Domain, "variable '" + e.var + "' was not declared");
            e.sign = it->second.real ? SignTag::Real : SignTag::NonNeg;
            e.range = it->second.range;
            break;
        }
        case ExprKind::Add:
            e.sign = (A[0]->sign == SignTag::NonNeg && A[1]->sign == SignTag::NonNeg)
                         ? SignTag::NonNeg
                         : SignTag::Real;
            e.range = interval::add(A[0]->range, A[1]->range);
            break;
        case ExprKind::Sub:
            e.sign = SignTag::Real;
            e.range = interval::sub(A[0]->range, A[1]->range);
            break;
        case ExprKind::Neg:
            e.sign = SignTag::Real;
            e.range = interval::neg(A[0]->range);
            break;
        case ExprKind::Mul:
            e.sign = (A[0]->sign == SignTag::NonNeg && A[1]->sign == SignTag::NonNeg)
                         ? SignTag::NonNeg
                         : SignTag::Real;
            e.range = interval::mul(A[0]->range, A[1]->range);
            break;
        case ExprKind::Div:
            if (!A[1]->range.positive())
                throw Error(ErrorKind::Domain,
                            "divisor of '" + to_string(e) +
                                "' must be declarably positive (tighten its range)");
            e.sign = A[0]->sign;
            e.range = interval::div(A[0]->range, A[1]->range);
            break;
        case ExprKind::Exp:
            e.sign = SignTag::NonNeg;
            e.range = interval::exp(A[0]->range);
            break;
        case ExprKind::Ln:
            if (!A[0]->range.positive())
                throw Error(ErrorKind::Domain,
                            "argument of ln must be declarably positive (tighten its range)");
            e.sign = SignTag::Real;
            e.range = interval::ln(A[0]->range);
            break;
        case ExprKind::Root:
            if (!A[0]->range.positive())
                throw Error(ErrorKind::Domain,
                            "argument of root must be declarably positive "
                            "(no roots of zero)");
            e.sign = SignTag::NonNeg;
            e.range = interval::root(A[0]->range, e.root_m);
            break;
        case ExprKind::Max:
        case ExprKind::AbsDiff:
            if (A[0]->sign != SignTag::NonNeg || A[1]->sign != SignTag::NonNeg)
                throw Error(ErrorKind::Domain,
                            std::string(e.kind == ExprKind::Max ? "max" : "absdiff") +
                                " needs nonnegative arguments");
            e.sign = SignTag::NonNeg;
            e.range = e.kind == ExprKind::Max ? interval::max(A[0]->range, A[1]->range)
                                              : interval::abs_diff(A[0]->range, A[1]->range);
            break;
    }
}

void collect_vars(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == ExprKind::Var) {
        for (const auto& v : out)
            if (v == e.var) return;
        out.push_back(e.var);
    }
    for (const auto& a : e.args) collect_vars(*a, out);
}

} // namespace

void infer_signs(Expr& e, const std::map<std::string, InputDecl>& decls) {
    infer(e, decls);
}

std::vector<std::string> free_variables(const Expr& e) {
    std::vector<std::string> out;
    collect_vars(e, out);
    return out;
}

std::string to_string(const Expr& e) {
    char buf[32];
    switch (e.kind) {
        case ExprKind::Literal:
            std::snprintf(buf, sizeof buf, "%g", e.literal);
            return buf;
        case ExprKind::Var: return e.var;
        case ExprKind::Add: return "(" + to_string(*e.args[0]) + " + " + to_string(*e.args[1]) + ")";
        case ExprKind::Sub: return "(" + to_string(*e.args[0]) + " - " + to_string(*e.args[1]) + ")";
        case ExprKind::Mul: return "(" + to_string(*e.args[0]) + " * " + to_string(*e.args[1]) + ")";
        case ExprKind::Div: return "(" + to_string(*e.args[0]) + " / " + to_string(*e.args[1]) + ")";
        case ExprKind::Exp: return "exp(" + to_string(*e.args[0]) + ")";
        case ExprKind::Ln: return "ln(" + to_string(*e.args[0]) + ")";
        case ExprKind::Root:
            return "root(" + to_string(*e.args[0]) + ", " + std::to_string(e.root_m) + ")";
        case ExprKind::Max:
            return "max(" + to_string(*e.args[0]) + ", " + to_string(*e.args[1]) + ")";
        case ExprKind::AbsDiff:
            return "absdiff(" + to_string(*e.args[0]) + ", " + to_string(*e.args[1]) + ")";
        case ExprKind::Neg: return "(-" + to_string(*e.args[0]) + ")";
    }
    return "?";
}

} // namespace crncalc
