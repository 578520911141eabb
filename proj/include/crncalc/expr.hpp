#ifndef CRNCALC_EXPR_HPP
#define CRNCALC_EXPR_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "crncalc/errors.hpp"
#include "crncalc/interval.hpp"

namespace crncalc {

enum class ExprKind { Literal, Var, Add, Sub, Mul, Div, Exp, Ln, Root, Max, AbsDiff, Neg };

enum class SignTag { NonNeg, Real };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    ExprKind kind;
    double literal = 0.0;       // Literal
    std::string var;            // Var
    int root_m = 1;             // Root
    std::vector<ExprPtr> args;

    // filled by infer_signs
    SignTag sign = SignTag::NonNeg;
    Interval range = Interval::real();

    static ExprPtr make(ExprKind k, std::vector<ExprPtr> args = {});
    static ExprPtr lit(double v);
    static ExprPtr variable(std::string name);
};

// the grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := number | ident | '(' expr ')' | func '(' args ')' | '-' factor
//   func   := exp | ln | root | max | absdiff
// root's second argument is a positive integer literal.
ExprPtr parse(const std::string& text);

// variable declarations from the CLI, "a:real", "b:nonneg(0.1,100)",
// "a:real(-5,5)"
struct InputDecl {
    std::string name;
    bool real = false;
    Interval range;
};
InputDecl parse_input_decl(const std::string& text);

// Annotates every node with its sign tag and value interval and rejects
// domain problems (ln/div/root of something not declarably positive,
// max/absdiff of possibly-negative values).
void infer_signs(Expr& e, const std::map<std::string, InputDecl>& decls);

// canonical text of an AST (tests and diagnostics)
std::string to_string(const Expr& e);

// all distinct variable names in the tree, in first-use order
std::vector<std::string> free_variables(const Expr& e);

} // namespace crncalc

#endif
