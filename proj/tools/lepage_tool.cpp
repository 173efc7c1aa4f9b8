#include <lepage/lepage.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

[[nodiscard]] std::string read_source(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in) throw lepage::ParseError("cannot open problem file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Lepage equivalents of variational Lagrangians on jet prolongations:\n"
        "construction, verification, and chart-invariance analysis."};
    app.get_formatter()->column_width(26);

    std::string command, path, format = "text", basis = "contact", suite;
    int order_cap = 0;
    app.add_option("command", command,
                   "one of: theta, fundamental, caratheodory, caratheodory-closed,\n"
                   "euler-lagrange, check-lepage, check-invariance, obstruction,\n"
                   "hilbert-theta, hilbert-caratheodory, einstein");
    app.add_option("file", path, "problem file (defaults to stdin, '-' for stdin)");
    app.add_option("--format", format, "output format: text, latex, sexpr")
        ->check(CLI::IsMember({"text", "latex", "sexpr"}));
    app.add_option("--basis", basis, "presentation basis: contact, coordinate")
        ->check(CLI::IsMember({"contact", "coordinate"}));
    app.add_option("--order-cap", order_cap, "override the jet order cap")
        ->check(CLI::Range(1, 7));
    app.add_option("--suite", suite, "run a named verification suite and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (!suite.empty()) {
        try {
            if (suite == "all") {
                bool ok = true;
                for (const std::string& name : lepage::suite_names()) {
                    lepage::SuiteResult r = lepage::run_suite(name);
                    std::cout << r.text();
                    ok = ok && r.ok;
                }
                return ok ? 0 : 1;
            }
            lepage::SuiteResult r = lepage::run_suite(suite);
            std::cout << r.text();
            return r.ok ? 0 : 1;
        } catch (const lepage::ParseError& e) {
            std::cerr << "parse error: " << e.what() << "\n";
            return 2;
        }
    }

    if (command.empty()) {
        std::cerr << "parse error: no command given (try --help)\n";
        return 2;
    }

    lepage::ToolOptions opts;
    opts.format = format == "latex"   ? lepage::OutputFormat::latex
                  : format == "sexpr" ? lepage::OutputFormat::sexpr
                                      : lepage::OutputFormat::text;
    opts.basis =
        basis == "coordinate" ? lepage::OutputBasis::coordinate : lepage::OutputBasis::contact;
    opts.order_cap = order_cap;

    std::string source;
    try {
        source = read_source(path);
    } catch (const lepage::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    }

    lepage::CommandResult result = lepage::run_command(command, source, opts);
    if (result.exit_code == 0)
        std::cout << result.output;
    else if (result.exit_code == 1)
        std::cout << result.output;
    else
        std::cerr << result.output;
    return result.exit_code;
}
