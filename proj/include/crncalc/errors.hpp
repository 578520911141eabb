#ifndef CRNCALC_ERRORS_HPP
#define CRNCALC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace crncalc {

// Every failure mode the library reports. CLI exit codes are derived from
// the category: build-time problems (bad input, bad wiring) exit 2,
// run-time numerical problems exit 3.
enum class ErrorKind {
    Syntax,            // expression or file text could not be parsed
    Domain,            // value outside a module's declared input domain
    NotRealizable,     // polynomial ODE fails the mass-action condition
    NonUnitCoefficient,// network reconstruction needs a |coeff| != 1
    InitViolation,     // initial values break a required compatibility law
    CyclicInit,        // derived initial values form a dependency cycle
    StepFailure,       // integrator step size underflowed
    NonFinite,         // trajectory left the representable range
    NotConverged,      // trajectory too short / limit not reached
    DegenerateFit,     // rate regression window unusable
    OracleDisagreement,// oracle cross-check failed
    Invalid,           // broken type invariant (programming/wiring error)
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

    // true for errors diagnosed while building a circuit (CLI exit 2),
    // false for errors raised while integrating/analysing one (exit 3)
    bool is_build_error() const noexcept {
        switch (kind_) {
            case ErrorKind::StepFailure:
            case ErrorKind::NonFinite:
            case ErrorKind::NotConverged:
            case ErrorKind::DegenerateFit:
            case ErrorKind::OracleDisagreement: return false;
            default: return true;
        }
    }

  private:
    ErrorKind kind_;
};

const char* to_string(ErrorKind kind);

} // namespace crncalc

#endif
