#include "crncalc/compiler.hpp"

#include <cmath>
#include <cstdio>

namespace crncalc {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Emitter {
  public:
    Emitter(const std::map<std::string, InputDecl>& decls, const CompileOptions& opts)
        : decls_(decls), opts_(opts) {}

    CircuitInstance run(Expr& root, std::string text) {
        Value out = emit(root);
        if (root.kind == ExprKind::Var || root.kind == ExprKind::Literal)
            out = wrap_identity(out); // a bare input still becomes a computation
        Port port;
        if (out.dual) port = Port::output_dual("out", out.pos, out.neg);
        else port = Port::output("out", out.pos);
        return builder_.finish(std::move(port), std::move(inputs_), std::move(text));
    }

  private:
    std::string fresh(const std::string& kind) {
        return kind + "_" + std::to_string(counter_[kind]++);
    }

    SpeciesId zero_rail() {
        if (zero_.empty()) zero_ = builder_.add_const_species("zero", 0.0);
        return zero_;
    }

    // rails are nonnegative species whose individual limits we do not track
    static Value rail(const SpeciesId& s) {
        return Value::single(s, Interval::nonneg());
    }

    Value instantiate_single_out(const ModuleSpec& spec,
                                 const std::map<std::string, Value>& bindings,
                                 Interval result_range) {
        auto names = builder_.instantiate(spec, fresh(spec.kind), bindings);
        const Port& out = spec.output();
        return Value::single(names.at(out.pos), result_range);
    }

    Value emit_var(const Expr& e) {
        if (auto it = vars_.find(e.var); it != vars_.end()) return it->second;
        const InputDecl& decl = decls_.at(e.var);
        Value v;
        if (decl.real) {
            builder_.add_input_species(e.var + ".p");
            builder_.add_input_species(e.var + ".n");
            v = Value::dual_rail(e.var + ".p", e.var + ".n", decl.range);
            inputs_.push_back({e.var, true, e.var + ".p", e.var + ".n", decl.range});
        } else {
            builder_.add_input_species(e.var);
            v = Value::single(e.var, decl.range);
            inputs_.push_back({e.var, false, e.var, "", decl.range});
        }
        vars_.emplace(e.var, v);
        return v;
    }

    Value emit_literal(const Expr& e) {
        SpeciesId s = builder_.add_const_species(fresh("lit") + ".C", std::abs(e.literal));
        if (e.literal >= 0.0) return Value::single(s, Interval::point(e.literal));
        return Value::dual_rail(zero_rail(), s, Interval::point(e.literal));
    }

    // z -> a + b for two rails; absent rails pass through
    SpeciesId sum_rails(const SpeciesId& a, const SpeciesId& b) {
        if (a.empty()) return b.empty() ? zero_rail() : b;
        if (b.empty()) return a;
        auto names = builder_.instantiate(mk_add(), fresh("add"),
                                          {{"a", rail(a)}, {"b", rail(b)}});
        return names.at("Z");
    }

    SpeciesId product_rails(const SpeciesId& a, const SpeciesId& b) {
        auto names = builder_.instantiate(mk_mul(), fresh("mul"),
                                          {{"a", rail(a)}, {"b", rail(b)}});
        return names.at("Z");
    }

    Value wrap_identity(const Value& v) {
        if (!v.dual) {
            auto names = builder_.instantiate(mk_identity(), fresh("identity"),
                                              {{"a", v}});
            return Value::single(names.at("Z"), v.range);
        }
        auto p = builder_.instantiate(mk_identity(), fresh("identity"), {{"a", rail(v.pos)}});
        auto n = builder_.instantiate(mk_identity(), fresh("identity"), {{"a", rail(v.neg)}});
        return Value::dual_rail(p.at("Z"), n.at("Z"), v.range);
    }

    Value emit_add(const Expr& e) {
        Value x = emit(*e.args[0]), y = emit(*e.args[1]);
        if (!x.dual && !y.dual) {
            auto names = builder_.instantiate(mk_add(), fresh("add"),
                                              {{"a", x}, {"b", y}});
            return Value::single(names.at("Z"), e.range);
        }
        SpeciesId pos = sum_rails(x.pos, y.pos);
        SpeciesId neg = sum_rails(x.dual ? x.neg : SpeciesId{}, y.dual ? y.neg : SpeciesId{});
        return Value::dual_rail(pos, neg, e.range);
    }

    // rail algebra: (xp - xn) - (yp - yn) = (xp + yn) - (xn + yp)
    Value emit_sub(const Expr& e) {
        Value x = emit(*e.args[0]), y = emit(*e.args[1]);
        SpeciesId pos = sum_rails(x.pos, y.dual ? y.neg : SpeciesId{});
        SpeciesId neg = sum_rails(x.dual ? x.neg : SpeciesId{}, y.pos);
        return Value::dual_rail(pos, neg, e.range);
    }

    Value emit_neg(const Expr& e) {
        Value x = emit(*e.args[0]);
        return Value::dual_rail(x.dual ? x.neg : zero_rail(), x.pos, e.range);
    }

    Value emit_mul(const Expr& e) {
        Value x = emit(*e.args[0]), y = emit(*e.args[1]);
        if (!x.dual && !y.dual) {
            auto names = builder_.instantiate(mk_mul(), fresh("mul"),
                                              {{"a", x}, {"b", y}});
            return Value::single(names.at("Z"), e.range);
        }
        if (x.dual && y.dual) {
            SpeciesId pos = sum_rails(product_rails(x.pos, y.pos), product_rails(x.neg, y.neg));
            SpeciesId neg = sum_rails(product_rails(x.pos, y.neg), product_rails(x.neg, y.pos));
            return Value::dual_rail(pos, neg, e.range);
        }
        const Value& s = x.dual ? y : x;
        const Value& d = x.dual ? x : y;
        return Value::dual_rail(product_rails(s.pos, d.pos), product_rails(s.pos, d.neg),
                                e.range);
    }

    Value emit_div(const Expr& e) {
        Value x = emit(*e.args[0]), y = emit(*e.args[1]);
        if (y.dual)
            throw Error(ErrorKind::Domain,
                        "a dual-rail value cannot feed the reciprocal's positive scalar "
                        "input; restructure the expression");
        auto names = builder_.instantiate(mk_reciprocal(), fresh("reciprocal"), {{"a", y}});
        Value r = Value::single(names.at("Y"),
                                interval::div(Interval::point(1.0), y.range));
        if (!x.dual) {
            auto prod = builder_.instantiate(mk_mul(), fresh("mul"), {{"a", x}, {"b", r}});
            return Value::single(prod.at("Z"), e.range);
        }
        return Value::dual_rail(product_rails(x.pos, r.pos), product_rails(x.neg, r.pos),
                                e.range);
    }

    Value emit_exp(const Expr& e) {
        Value x = emit(*e.args[0]);
        if (!x.dual) {
            auto names = builder_.instantiate(mk_exp_nonneg(), fresh("exp_nonneg"),
                                              {{"a", x}});
            return Value::single(names.at("X"), e.range);
        }
        auto names = builder_.instantiate(mk_exp_real(), fresh("exp_real"), {{"a", x}});
        return Value::single(names.at("V"), e.range);
    }

    Value emit_ln(const Expr& e) {
        Value x = emit(*e.args[0]);
        if (x.dual)
            throw Error(ErrorKind::Domain,
                        "a dual-rail value cannot feed a logarithm's positive scalar "
                        "input; restructure the expression");
        int system = opts_.log_system;
        if (system == kLogSystemAuto) system = x.range.lo >= 1.0 ? 5 : 6;
        switch (system) {
            case 1:
                return instantiate_single_out(mk_log_system1(), {{"a", x}}, e.range);
            case kLogSystem1r:
                return instantiate_single_out(mk_log_system1r(), {{"a", x}}, e.range);
            case 2:
                return instantiate_single_out(mk_log_system2(), {{"a", x}}, e.range);
            case 3:
                if (!(x.range.lo >= 1.0))
                    throw Error(ErrorKind::Domain,
                                "System 3 computes the rectified logarithm below 1; "
                                "ln needs the argument declared >= 1");
                return instantiate_single_out(mk_log_system3(), {{"a", x}}, e.range);
            case 4: {
                auto names = builder_.instantiate(mk_log_system4(), fresh("log_system4"),
                                                  {{"a", x}});
                return Value::dual_rail(names.at("XP"), names.at("XN"), e.range);
            }
            case 5: {
                auto names = builder_.instantiate(mk_log_system5(opts_.const_e),
                                                  fresh("log_system5"), {{"a", x}});
                return Value::dual_rail(names.at("X"), names.at("ONE"), e.range);
            }
            case 6: {
                auto names = builder_.instantiate(mk_log_system6(opts_.const_e),
                                                  fresh("log_system6"), {{"a", x}});
                return Value::dual_rail(names.at("X1"), names.at("X2"), e.range);
            }
            default:
                throw Error(ErrorKind::Domain,
                            "log system must be one of 1, 1r, 2, 3, 4, 5, 6");
        }
    }

    Value emit(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Literal: return emit_literal(e);
            case ExprKind::Var: return emit_var(e);
            case ExprKind::Add: return emit_add(e);
            case ExprKind::Sub: return emit_sub(e);
            case ExprKind::Neg: return emit_neg(e);
            case ExprKind::Mul: return emit_mul(e);
            case ExprKind::Div: return emit_div(e);
            case ExprKind::Exp: return emit_exp(e);
            case ExprKind::Ln: return emit_ln(e);
            case ExprKind::Root: {
                Value x = emit(*e.args[0]);
                auto names = builder_.instantiate(mk_mth_root(e.root_m),
                                                  fresh("mth_root"), {{"a", x}});
                return Value::single(names.at("X"), e.range);
            }
            case ExprKind::Max: {
                Value x = emit(*e.args[0]), y = emit(*e.args[1]);
                return instantiate_single_out(mk_max(), {{"a", x}, {"b", y}}, e.range);
            }
            case ExprKind::AbsDiff: {
                Value x = emit(*e.args[0]), y = emit(*e.args[1]);
                return instantiate_single_out(mk_abs_diff(), {{"a", x}, {"b", y}}, e.range);
            }
        }
        throw Error(ErrorKind::Invalid, "unhandled expression node");
    }

    CircuitBuilder builder_;
    const std::map<std::string, InputDecl>& decls_;
    const CompileOptions& opts_;
    std::map<std::string, Value> vars_;
    std::vector<InputBinding> inputs_;
    std::map<std::string, int> counter_;
    SpeciesId zero_;
};

} // namespace

CircuitInstance compile(Expr& expr, const std::map<std::string, InputDecl>& decls,
                        const CompileOptions& opts) {
    infer_signs(expr, decls);
    Emitter emitter(decls, opts);
    return emitter.run(expr, to_string(expr));
}

CircuitInstance compile(const std::string& text,
                        const std::map<std::string, InputDecl>& decls,
                        const CompileOptions& opts) {
    ExprPtr expr = parse(text);
    return compile(*expr, decls, opts);
}

// --- metadata sidecars --------------------------------------------------------

namespace {

void put_port(std::string& out, const std::string& prefix, const Port& p) {
    out += prefix + ".direction = ";
    out += p.direction == Port::Direction::Input ? "input\n" : "output\n";
    out += prefix + ".rails = ";
    out += p.dual ? "dual " + p.pos + " " + p.neg : "single " + p.pos;
    out += "\n";
}

void put_init(std::string& out, const InitRule& r) {
    out += "init." + r.species + " = ";
    switch (r.kind) {
        case InitRule::Kind::Fixed: out += "fixed " + fmt(r.value); break;
        case InitRule::Kind::DerivedLog: out += "derived_log " + r.of; break;
        case InitRule::Kind::Free: out += "free " + fmt(r.value); break;
    }
    out += "\n";
}

std::string range_text(const Interval& r) {
    std::string lo = std::isinf(r.lo) ? "-inf" : fmt(r.lo);
    std::string hi = std::isinf(r.hi) ? "inf" : fmt(r.hi);
    return "[" + lo + ", " + hi + "]";
}

} // namespace

std::string format_metadata(const CircuitInstance& c) {
    std::string out;
    if (!c.expression.empty()) out += "expression = " + c.expression + "\n";
    out += "mass_action = " + std::string(c.mass_action ? "true" : "false") + "\n";
    out += "predicted_rate = " + c.predicted.text + "\n";
    for (const auto& in : c.inputs) {
        out += "input." + in.name + ".kind = " + (in.real ? "real" : "nonneg") + "\n";
        out += "input." + in.name + ".range = " + range_text(in.declared) + "\n";
        out += "input." + in.name + ".rails = " +
               (in.real ? in.pos + " " + in.neg : in.pos) + "\n";
    }
    put_port(out, "output", c.output);
    for (size_t i = 0; i < c.roster.size(); ++i) {
        const RosterEntry& m = c.roster[i];
        std::string key = "module." + std::to_string(i);
        out += key + ".instance = " + (m.instance.empty() ? "-" : m.instance) + "\n";
        out += key + ".kind = " + m.kind + "\n";
        out += key + ".flags = " + to_string(m.flags) + "\n";
        out += key + ".rate = " + m.stated.text + "\n";
        out += key + ".rate_bound = " + m.resolved.text + "\n";
    }
    for (const InitRule& r : c.init) put_init(out, r);
    for (const Monitor& m : c.monitors) out += "monitor = " + m.label + "\n";
    return out;
}

std::string format_metadata(const ModuleSpec& spec) {
    std::string out = "name = " + spec.kind + "\n";
    out += "flags = " + to_string(spec.flags) + "\n";
    out += "rate = " + spec.rate.text + "\n";
    if (std::isfinite(spec.rate.certified_cap))
        out += "rate_certified = min{rho, " + fmt(spec.rate.certified_cap) +
               "} (stated bound not certified beyond this)\n";
    for (const Port& p : spec.ports) put_port(out, "port." + p.name, p);
    for (const DomainReq& d : spec.domain)
        out += "domain." + d.port + " = " + d.note + "\n";
    for (const InitRule& r : spec.init) put_init(out, r);
    for (const Monitor& m : spec.monitors) out += "monitor = " + m.label + "\n";
    return out;
}

} // namespace crncalc
