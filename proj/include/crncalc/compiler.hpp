#ifndef CRNCALC_COMPILER_HPP
#define CRNCALC_COMPILER_HPP

#include <map>
#include <string>

#include "crncalc/circuit.hpp"
#include "crncalc/expr.hpp"

namespace crncalc {

struct CompileOptions {
    // 0 picks automatically: System 5 when the argument is provably >= 1,
    // System 6 otherwise.  1..6 forces that construction (1r is chosen with
    // log_system = 1 and an argument provably >= 1? no: pass 7 for 1r).
    int log_system = 0;
    ConstEMode const_e = ConstEMode::Static;
};

// values accepted by --log-system
constexpr int kLogSystemAuto = 0;
constexpr int kLogSystem1r = 7; // "1r" on the command line

// Lowers a sign-annotated expression onto library modules, wiring every
// module's inputs catalytically to its operands' output species.  Negative
// values travel on dual rails; subtraction and negation are rail algebra
// and instantiate no modules.
CircuitInstance compile(Expr& expr, const std::map<std::string, InputDecl>& decls,
                        const CompileOptions& opts = {});

// parse + infer_signs + compile
CircuitInstance compile(const std::string& text,
                        const std::map<std::string, InputDecl>& decls,
                        const CompileOptions& opts = {});

// circuit metadata sidecar (line-oriented key = value)
std::string format_metadata(const CircuitInstance& c);
std::string format_metadata(const ModuleSpec& spec);

} // namespace crncalc

#endif
