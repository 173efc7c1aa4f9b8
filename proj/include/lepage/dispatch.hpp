#pragma once

#include <string>

#include "lepage/parser.hpp"
#include "lepage/printer.hpp"

namespace lepage {

struct ToolOptions {
    OutputFormat format = OutputFormat::text;
    OutputBasis basis = OutputBasis::contact;
    int order_cap = 0;
};

struct CommandResult {
    int exit_code = 0;
    std::string output;
};

namespace detail {

[[nodiscard]] inline const Lagrangian& require_lagrangian(const ProblemFile& pf) {
    if (!pf.lagrangian) throw PreconditionError("the problem defines no lagrangian");
    return *pf.lagrangian;
}

[[nodiscard]] inline const MetricSpace& require_metric(const ProblemFile& pf,
                                                       const std::string& cmd) {
    if (!pf.metric) throw PreconditionError("'" + cmd + "' requires mode metric");
    return *pf.metric;
}

[[nodiscard]] inline const std::vector<ChartTransform>& require_transforms(
    const ProblemFile& pf, const std::string& cmd) {
    if (pf.transforms.empty())
        throw PreconditionError("'" + cmd + "' requires at least one transform block");
    return pf.transforms;
}

[[nodiscard]] inline CommandResult dispatch(const std::string& cmd, const ProblemFile& pf,
                                            const ToolOptions& opts) {
    if (cmd == "theta")
        return {0, print_form(principal_component(require_lagrangian(pf)), opts.format,
                              opts.basis) +
                       "\n"};
    if (cmd == "fundamental")
        return {0,
                print_form(fundamental_form(require_lagrangian(pf)), opts.format, opts.basis) +
                    "\n"};
    if (cmd == "caratheodory")
        return {0, print_decomposable(caratheodory_contraction(require_lagrangian(pf)),
                                      opts.format, opts.basis)};
    if (cmd == "caratheodory-closed")
        return {0, print_decomposable(caratheodory_closed(require_lagrangian(pf)), opts.format,
                                      opts.basis)};
    if (cmd == "euler-lagrange")
        return {0, print_form(euler_lagrange(require_lagrangian(pf)), opts.format, opts.basis) +
                       "\n"};
    if (cmd == "check-lepage") {
        const Lagrangian& lag = require_lagrangian(pf);
        LepageReport rep = check_lepage(principal_component(lag), lag);
        std::string out;
        out += std::string("horizontal part matches lagrangian: ") +
               (rep.horizontal_matches ? "yes" : "no") + "\n";
        out += std::string("vertical contractions of d(theta) are contact: ") +
               (rep.vertical_trivial ? "yes" : "no") + "\n";
        out += std::string("lepage: ") + (rep.ok() ? "holds" : "fails") + "\n";
        return {rep.ok() ? 0 : 1, out};
    }
    if (cmd == "check-invariance") {
        const Lagrangian& lag = require_lagrangian(pf);
        bool all = true;
        std::string out;
        int k = 0;
        for (const ChartTransform& t : require_transforms(pf, cmd)) {
            bool ok = check_theta_invariance(lag, t);
            all = all && ok;
            out += "transform " + std::to_string(++k) + ": " + (ok ? "holds" : "fails") + "\n";
        }
        out += std::string("invariance: ") + (all ? "holds" : "fails") + "\n";
        return {all ? 0 : 1, out};
    }
    if (cmd == "obstruction") {
        const Lagrangian& lag = require_lagrangian(pf);
        bool all = true;
        std::string out;
        int k = 0;
        for (const ChartTransform& t : require_transforms(pf, cmd)) {
            ObstructionReport rep = obstruction_3rd(lag, t);
            all = all && rep.holds;
            out += "transform " + std::to_string(++k) + ": " +
                   (rep.holds ? "holds" : "fails") + "\n";
            size_t idx = 0;
            for (int sigma = 1; sigma <= pf.m; ++sigma)
                for (int i = 1; i <= pf.n; ++i)
                    for (int s = i + 1; s <= pf.n; ++s, ++idx)
                        if (!rep.brackets[idx].is_zero())
                            out += "  bracket[" + std::to_string(sigma) + "," +
                                   std::to_string(i) + std::to_string(s) +
                                   "] = " + print_expression(rep.brackets[idx], opts.format) +
                                   "\n";
        }
        out += std::string("obstruction: ") + (all ? "holds" : "fails") + "\n";
        return {all ? 0 : 1, out};
    }
    if (cmd == "hilbert-theta")
        return {0,
                print_form(hilbert_theta(require_metric(pf, cmd)), opts.format, opts.basis) +
                    "\n"};
    if (cmd == "hilbert-caratheodory")
        return {0, print_decomposable(hilbert_caratheodory(require_metric(pf, cmd)), opts.format,
                                      opts.basis)};
    if (cmd == "einstein") {
        const MetricSpace& ms = require_metric(pf, cmd);
        const Lagrangian& lag = require_lagrangian(pf);
        std::string out;
        for (size_t s = 0; s < ms.pairs.size(); ++s) {
            ScalarExpr el = classical_el_expression(lag, static_cast<int>(s) + 1);
            std::string text =
                equals_zero(el) ? "0" : print_expression(el, opts.format);
            out += "E[" + ms.space->field_label(static_cast<int>(s) + 1) + "] = " + text + "\n";
        }
        return {0, out};
    }
    throw ParseError("unknown command '" + cmd + "'");
}

}  // namespace detail

/// Parses the problem source and dispatches one command against it, mapping
/// errors to the documented exit codes (2 parse, 3 precondition).
[[nodiscard]] inline CommandResult run_command(const std::string& cmd,
                                               const std::string& problem_source,
                                               const ToolOptions& opts = {}) {
    try {
        ProblemFile pf = parse_problem(problem_source, opts.order_cap);
        return detail::dispatch(cmd, pf, opts);
    } catch (const ParseError& e) {
        return {2, std::string("parse error: ") + e.what() + "\n"};
    } catch (const PreconditionError& e) {
        return {3, std::string("precondition violated: ") + e.what() + "\n"};
    }
}

}  // namespace lepage
