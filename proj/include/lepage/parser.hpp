#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lepage/charts.hpp"
#include "lepage/relativity.hpp"

namespace lepage {

namespace detail {

struct Tok {
    enum Kind { ident, integer, punct, eof } kind;
    std::string text;
    long long value = 0;
    int line = 0, col = 0;
};

[[nodiscard]] inline std::vector<Tok> tokenize(const std::string& s, int line_no) {
    std::vector<Tok> out;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        int col = static_cast<int>(i) + 1;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j - i > 18) throw ParseError("integer literal too long", line_no, col);
            out.push_back({Tok::integer, s.substr(i, j - i), std::stoll(s.substr(i, j - i)),
                           line_no, col});
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            out.push_back({Tok::ident, s.substr(i, j - i), 0, line_no, col});
            i = j;
        } else if (std::string("+-*/^()=,").find(c) != std::string::npos) {
            out.push_back({Tok::punct, std::string(1, c), 0, line_no, col});
            ++i;
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", line_no, col);
        }
    }
    out.push_back({Tok::eof, "", 0, line_no, static_cast<int>(s.size()) + 1});
    return out;
}

struct TokStream {
    std::vector<Tok> toks;
    size_t k = 0;

    [[nodiscard]] const Tok& peek() const { return toks[k]; }
    const Tok& next() { return toks[k < toks.size() - 1 ? k++ : k]; }
    [[nodiscard]] bool at_punct(const char* p) const {
        return peek().kind == Tok::punct && peek().text == p;
    }
    void expect_punct(const char* p) {
        if (!at_punct(p))
            throw ParseError(std::string("expected '") + p + "'", peek().line, peek().col);
        next();
    }
};

/// Splits the digit tail of a jet atom name into (sigma, multi-index).
[[nodiscard]] inline std::pair<int, MultiIndex> parse_field_name(const SpacePtr& sp,
                                                                 const std::string& tail,
                                                                 const Tok& at) {
    size_t us = tail.find('_');
    std::string sig = us == std::string::npos ? tail : tail.substr(0, us);
    std::string jet = us == std::string::npos ? "" : tail.substr(us + 1);
    if (sig.empty() || sig.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("malformed field atom 'y" + tail + "'", at.line, at.col);
    if (sig.size() > 6) throw ParseError("fibre index out of range", at.line, at.col);
    int sigma = std::stoi(sig);
    if (sigma < 1 || sigma > sp->m())
        throw ParseError("fibre index " + sig + " exceeds fibre dimension", at.line, at.col);
    if (jet.empty() && us != std::string::npos)
        throw ParseError("malformed field atom 'y" + tail + "'", at.line, at.col);
    if (static_cast<int>(jet.size()) > sp->order_cap())
        throw ParseError("jet order exceeds the order cap", at.line, at.col);
    std::vector<int> entries;
    for (char d : jet) {
        if (d < '1' || d > '0' + sp->n())
            throw ParseError(std::string("jet index '") + d + "' exceeds base dimension", at.line,
                             at.col);
        entries.push_back(d - '0');
    }
    return {sigma, MultiIndex::from_sorted_or_not(entries)};
}

[[nodiscard]] inline int parse_base_name(const SpacePtr& sp, const std::string& tail,
                                         const Tok& at) {
    if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("malformed base atom 'x" + tail + "'", at.line, at.col);
    if (tail.size() > 6) throw ParseError("base index out of range", at.line, at.col);
    int i = std::stoi(tail);
    if (i < 1 || i > sp->n())
        throw ParseError("base index " + tail + " exceeds base dimension", at.line, at.col);
    return i;
}

class ExprParser {
public:
    ExprParser(SpacePtr sp, TokStream& ts) : sp_(std::move(sp)), ts_(ts) {}

    [[nodiscard]] ScalarExpr expr() {
        ScalarExpr acc = term();
        while (ts_.at_punct("+") || ts_.at_punct("-")) {
            bool plus = ts_.next().text == "+";
            ScalarExpr rhs = term();
            acc = plus ? acc + rhs : acc - rhs;
        }
        return acc;
    }

    [[nodiscard]] ScalarExpr term() {
        ScalarExpr acc = factor();
        while (ts_.at_punct("*") || ts_.at_punct("/")) {
            const Tok& op = ts_.next();
            ScalarExpr rhs = factor();
            if (op.text == "*") {
                acc = acc * rhs;
            } else if (rhs.is_constant()) {
                Rational c = rhs.constant_value();
                if (c == 0) throw ParseError("division by zero", op.line, op.col);
                acc = Rational(1) / c * acc;
            } else {
                acc = acc * inverse_of(rhs);  // needs a prior nonvanishing declaration
            }
        }
        return acc;
    }

    [[nodiscard]] ScalarExpr factor() {
        if (ts_.at_punct("-")) {
            ts_.next();
            return -factor();
        }
        ScalarExpr base = primary();
        if (ts_.at_punct("^")) {
            const Tok& op = ts_.next();
            if (ts_.peek().kind != Tok::integer)
                throw ParseError("exponent must be a nonnegative integer", op.line, op.col);
            long long p = ts_.next().value;
            if (p > 64) throw ParseError("exponent too large", op.line, op.col);
            base = pow(base, static_cast<int>(p));
        }
        return base;
    }

private:
    [[nodiscard]] ScalarExpr primary() {
        const Tok& t = ts_.peek();
        if (t.kind == Tok::integer) {
            ts_.next();
            return ScalarExpr::constant(sp_, Rational(t.value));
        }
        if (ts_.at_punct("(")) {
            ts_.next();
            ScalarExpr e = expr();
            ts_.expect_punct(")");
            return e;
        }
        if (t.kind == Tok::ident) {
            ts_.next();
            if (t.text == "sqrt" || t.text == "inv") {
                ts_.expect_punct("(");
                ScalarExpr arg = expr();
                ts_.expect_punct(")");
                return t.text == "sqrt" ? register_sqrt(arg) : inverse_of(arg);
            }
            if (t.text[0] == 'x') return x_coord(sp_, parse_base_name(sp_, t.text.substr(1), t));
            if (t.text[0] == 'y') {
                auto [sigma, j] = parse_field_name(sp_, t.text.substr(1), t);
                return y_coord(sp_, sigma, j);
            }
            throw ParseError("unknown symbol '" + t.text + "'", t.line, t.col);
        }
        throw ParseError("expected an expression", t.line, t.col);
    }

    SpacePtr sp_;
    TokStream& ts_;
};

/// Covector names are dx<i>, dy<sigma>[_<digits>] and w<sigma>[_<digits>].
[[nodiscard]] inline bool is_covector_ident(const Tok& t) {
    if (t.kind != Tok::ident || t.text.size() < 2) return false;
    if (t.text.rfind("dx", 0) == 0 || t.text.rfind("dy", 0) == 0)
        return t.text.size() > 2 && std::isdigit(static_cast<unsigned char>(t.text[2]));
    return t.text[0] == 'w' && std::isdigit(static_cast<unsigned char>(t.text[1]));
}

[[nodiscard]] inline Form parse_covector(const SpacePtr& sp, const Tok& t) {
    if (t.text.rfind("dx", 0) == 0)
        return dx_form(sp, parse_base_name(sp, t.text.substr(2), t));
    if (t.text.rfind("dy", 0) == 0) {
        auto [sigma, j] = parse_field_name(sp, t.text.substr(2), t);
        return dy_form(sp, sigma, j);
    }
    auto [sigma, j] = parse_field_name(sp, t.text.substr(1), t);
    if (j.size() >= sp->order_cap())
        throw ParseError("contact covector needs jet order below the order cap", t.line, t.col);
    return contact_one_form(sp, sigma, j);
}

class FormParser {
public:
    FormParser(SpacePtr sp, TokStream& ts) : sp_(std::move(sp)), ts_(ts) {}

    [[nodiscard]] Form form() {
        bool neg = false;
        if (ts_.at_punct("-")) {
            ts_.next();
            neg = true;
        }
        Form acc = fterm(neg);
        while (ts_.at_punct("+") || ts_.at_punct("-")) {
            bool minus = ts_.next().text == "-";
            acc = acc + fterm(minus);
        }
        return acc;
    }

private:
    [[nodiscard]] Form fterm(bool neg) {
        ExprParser ep(sp_, ts_);
        ScalarExpr coeff =
            neg ? -ScalarExpr::one(sp_) : ScalarExpr::one(sp_);
        std::vector<Form> covs;
        bool first = true;
        while (true) {
            if (is_covector_ident(ts_.peek())) {
                covs.push_back(parse_covector(sp_, ts_.next()));
                while (ts_.at_punct("^")) {
                    const Tok& op = ts_.next();
                    if (!is_covector_ident(ts_.peek()))
                        throw ParseError("expected a covector after '^'", op.line, op.col);
                    covs.push_back(parse_covector(sp_, ts_.next()));
                }
            } else {
                coeff = coeff * ep.factor();
                // rational coefficients print as p/q, so divide inline here too
                while (ts_.at_punct("/")) {
                    const Tok& op = ts_.next();
                    ScalarExpr rhs = ep.factor();
                    if (rhs.is_constant()) {
                        Rational c = rhs.constant_value();
                        if (c == 0) throw ParseError("division by zero", op.line, op.col);
                        coeff = Rational(1) / c * coeff;
                    } else {
                        coeff = coeff * inverse_of(rhs);
                    }
                }
            }
            first = false;
            if (ts_.at_punct("*")) {
                ts_.next();
                continue;
            }
            break;
        }
        (void)first;
        if (covs.empty()) return Form::from_scalar(coeff);
        return coeff * wedge_all(covs);
    }

    SpacePtr sp_;
    TokStream& ts_;
};

// --- s-expressions

struct SNode {
    bool is_list = false;
    std::string sym;
    std::vector<SNode> kids;
};

[[nodiscard]] inline SNode read_sexpr_at(const std::string& s, size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) throw ParseError("unexpected end of s-expression");
    if (s[i] == '(') {
        ++i;
        SNode node;
        node.is_list = true;
        while (true) {
            while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
            if (i >= s.size()) throw ParseError("missing ')' in s-expression");
            if (s[i] == ')') {
                ++i;
                return node;
            }
            node.kids.push_back(read_sexpr_at(s, i));
        }
    }
    if (s[i] == ')') throw ParseError("unexpected ')' in s-expression");
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' &&
           s[j] != ')')
        ++j;
    SNode node;
    node.sym = s.substr(i, j - i);
    i = j;
    return node;
}

[[nodiscard]] inline SNode read_sexpr(const std::string& s) {
    size_t i = 0;
    SNode n = read_sexpr_at(s, i);
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i != s.size()) throw ParseError("trailing input after s-expression");
    return n;
}

[[nodiscard]] inline Rational rational_from_symbol(const std::string& s) {
    std::string t = s;
    bool neg = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
        neg = t[0] == '-';
        t = t.substr(1);
    }
    size_t slash = t.find('/');
    std::string num = slash == std::string::npos ? t : t.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : t.substr(slash + 1);
    if (num.empty() || den.empty() ||
        num.find_first_not_of("0123456789") != std::string::npos ||
        den.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("malformed rational '" + s + "'");
    Rational r{Integer(num), Integer(den)};
    return neg ? Rational(-r) : r;
}

[[nodiscard]] inline int int_from_symbol(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("expected an integer in s-expression, got '" + s + "'");
    if (s.size() > 6) throw ParseError("integer out of range in s-expression");
    return std::stoi(s);
}

[[nodiscard]] inline ScalarExpr scalar_from_sexpr(const SpacePtr& sp, const SNode& n);

[[nodiscard]] inline MultiIndex multi_index_from_kids(const SpacePtr& sp, const SNode& n,
                                                      size_t from) {
    std::vector<int> entries;
    for (size_t k = from; k < n.kids.size(); ++k) {
        int e = int_from_symbol(n.kids[k].sym);
        if (e < 1 || e > sp->n()) throw ParseError("jet index exceeds base dimension");
        entries.push_back(e);
    }
    if (static_cast<int>(entries.size()) > sp->order_cap())
        throw ParseError("jet order exceeds the order cap");
    return MultiIndex::from_sorted_or_not(entries);
}

[[nodiscard]] inline ScalarExpr atom_from_sexpr(const SpacePtr& sp, const SNode& n) {
    if (!n.is_list || n.kids.empty() || n.kids[0].is_list)
        throw ParseError("malformed atom s-expression");
    const std::string& head = n.kids[0].sym;
    if (head == "x") {
        if (n.kids.size() != 2) throw ParseError("(x i) expects one index");
        int i = int_from_symbol(n.kids[1].sym);
        if (i < 1 || i > sp->n()) throw ParseError("base index exceeds base dimension");
        return x_coord(sp, i);
    }
    if (head == "y") {
        if (n.kids.size() < 2) throw ParseError("(y sigma j...) expects a fibre index");
        int sigma = int_from_symbol(n.kids[1].sym);
        if (sigma < 1 || sigma > sp->m()) throw ParseError("fibre index exceeds fibre dimension");
        return y_coord(sp, sigma, multi_index_from_kids(sp, n, 2));
    }
    if (head == "opaque") {
        if (n.kids.size() != 3) throw ParseError("(opaque name flag) expects a name and a flag");
        return opaque_symbol(sp, n.kids[1].sym, n.kids[2].sym == "1");
    }
    if (head == "inv" || head == "sqrt") {
        if (n.kids.size() != 2) throw ParseError("(" + head + " e) expects one expression");
        ScalarExpr defn = scalar_from_sexpr(sp, n.kids[1]);
        return head == "inv" ? inverse_of(defn) : register_sqrt(defn);
    }
    throw ParseError("unknown atom head '" + head + "' in s-expression");
}

[[nodiscard]] inline ScalarExpr scalar_from_sexpr(const SpacePtr& sp, const SNode& n) {
    if (!n.is_list || n.kids.empty() || n.kids[0].is_list || n.kids[0].sym != "+")
        throw ParseError("scalar s-expression must start with (+ ...)");
    ScalarExpr acc = ScalarExpr::zero(sp);
    for (size_t t = 1; t < n.kids.size(); ++t) {
        const SNode& tm = n.kids[t];
        if (!tm.is_list || tm.kids.size() < 2 || tm.kids[0].is_list || tm.kids[0].sym != "*")
            throw ParseError("scalar term must be (* coeff factors...)");
        ScalarExpr prod = ScalarExpr::constant(sp, rational_from_symbol(tm.kids[1].sym));
        for (size_t f = 2; f < tm.kids.size(); ++f) {
            const SNode& fac = tm.kids[f];
            if (fac.is_list && !fac.kids.empty() && !fac.kids[0].is_list &&
                fac.kids[0].sym == "^") {
                if (fac.kids.size() != 3) throw ParseError("(^ atom p) expects two arguments");
                prod = prod * pow(atom_from_sexpr(sp, fac.kids[1]),
                                  int_from_symbol(fac.kids[2].sym));
            } else {
                prod = prod * atom_from_sexpr(sp, fac);
            }
        }
        acc = acc + prod;
    }
    return acc;
}

[[nodiscard]] inline Form form_from_sexpr(const SpacePtr& sp, const SNode& n) {
    if (!n.is_list || n.kids.empty() || n.kids[0].is_list || n.kids[0].sym != "form")
        throw ParseError("form s-expression must start with (form ...)");
    std::optional<Form> acc;
    for (size_t t = 1; t < n.kids.size(); ++t) {
        const SNode& tm = n.kids[t];
        if (!tm.is_list || tm.kids.size() != 3 || tm.kids[0].is_list || tm.kids[0].sym != "term")
            throw ParseError("form term must be (term coeff (wedge ...))");
        ScalarExpr coeff = scalar_from_sexpr(sp, tm.kids[1]);
        const SNode& w = tm.kids[2];
        if (!w.is_list || w.kids.empty() || w.kids[0].is_list || w.kids[0].sym != "wedge")
            throw ParseError("form term must be (term coeff (wedge ...))");
        std::vector<Form> covs;
        for (size_t c = 1; c < w.kids.size(); ++c) {
            const SNode& cv = w.kids[c];
            if (!cv.is_list || cv.kids.size() < 2 || cv.kids[0].is_list)
                throw ParseError("malformed covector s-expression");
            const std::string& head = cv.kids[0].sym;
            if (head == "dx") {
                int i = int_from_symbol(cv.kids[1].sym);
                if (i < 1 || i > sp->n()) throw ParseError("base index exceeds base dimension");
                covs.push_back(dx_form(sp, i));
            } else if (head == "dy" || head == "w") {
                int sigma = int_from_symbol(cv.kids[1].sym);
                if (sigma < 1 || sigma > sp->m())
                    throw ParseError("fibre index exceeds fibre dimension");
                MultiIndex j = multi_index_from_kids(sp, cv, 2);
                covs.push_back(head == "dy" ? dy_form(sp, sigma, j)
                                            : contact_one_form(sp, sigma, j));
            } else {
                throw ParseError("unknown covector head '" + head + "' in s-expression");
            }
        }
        Form tf = covs.empty() ? Form::from_scalar(coeff) : coeff * wedge_all(covs);
        acc = acc ? *acc + tf : tf;
    }
    return acc ? *acc : Form(sp, 0);
}

}  // namespace detail

/// Parses an expression in the problem grammar against an existing space.
[[nodiscard]] inline ScalarExpr parse_expression(const SpacePtr& sp, const std::string& text,
                                                 int line_no = 1) {
    detail::TokStream ts{detail::tokenize(text, line_no), 0};
    detail::ExprParser ep(sp, ts);
    ScalarExpr e = ep.expr();
    if (ts.peek().kind != detail::Tok::eof)
        throw ParseError("trailing input after expression", ts.peek().line, ts.peek().col);
    return e;
}

/// Parses a form in the printed text syntax (covectors dx/dy/w).
[[nodiscard]] inline Form parse_form(const SpacePtr& sp, const std::string& text,
                                     int line_no = 1) {
    detail::TokStream ts{detail::tokenize(text, line_no), 0};
    detail::FormParser fp(sp, ts);
    Form f = fp.form();
    if (ts.peek().kind != detail::Tok::eof)
        throw ParseError("trailing input after form", ts.peek().line, ts.peek().col);
    return f;
}

[[nodiscard]] inline ScalarExpr parse_expression_sexpr(const SpacePtr& sp,
                                                       const std::string& text) {
    return detail::scalar_from_sexpr(sp, detail::read_sexpr(text));
}

[[nodiscard]] inline Form parse_form_sexpr(const SpacePtr& sp, const std::string& text) {
    return detail::form_from_sexpr(sp, detail::read_sexpr(text));
}

/// Parsed problem definition with its instantiated spaces and objects.
struct ProblemFile {
    int n = 0, m = 0, r = 0;
    bool metric_mode = false;
    SignatureMode signature = SignatureMode::riemannian;
    SpacePtr space;
    std::optional<MetricSpace> metric;
    std::optional<Lagrangian> lagrangian;
    std::vector<ChartTransform> transforms;
};

/// Reads the line-oriented problem format. Directives: base, fiber, order,
/// mode, lagrangian, nonvanishing, transform...end; '#' starts a comment.
/// order_cap = 0 picks a default high enough for all supported commands.
[[nodiscard]] inline ProblemFile parse_problem(const std::string& source, int order_cap = 0) {
    ProblemFile pf;
    bool seen_base = false, seen_fiber = false, seen_order = false, seen_mode = false;
    bool lag_nonvanishing = false;
    std::optional<ScalarExpr> density;
    int density_line = 0;

    std::vector<std::string> lines;
    {
        std::string cur;
        for (char c : source) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        lines.push_back(cur);
    }

    auto ensure_space = [&](const detail::Tok& at) {
        if (pf.space) return;
        if (!seen_base) throw ParseError("'base' must be declared first", at.line, at.col);
        if (pf.metric_mode) {
            if (pf.r == 0) pf.r = 2;
            if (pf.r != 2)
                throw ParseError("metric mode is second order", at.line, at.col);
            int mexp = pf.n * (pf.n + 1) / 2;
            if (seen_fiber && pf.m != mexp)
                throw ParseError("metric mode needs fiber " + std::to_string(mexp), at.line,
                                 at.col);
            pf.m = mexp;
            int cap = order_cap > 0 ? order_cap : 4;
            pf.metric = make_metric_space(pf.n, pf.signature, cap);
            pf.space = pf.metric->space;
            return;
        }
        if (!seen_fiber || !seen_order)
            throw ParseError("'fiber' and 'order' must be declared before expressions", at.line,
                             at.col);
        int cap = order_cap > 0 ? order_cap : std::min(7, std::max(2 * pf.r, 2));
        pf.space = make_jet_space(pf.n, pf.m, cap);
    };

    auto read_int_directive = [&](detail::TokStream& ts, const char* what, int lo,
                                  int hi) -> int {
        const detail::Tok& t = ts.next();
        if (t.kind != detail::Tok::integer)
            throw ParseError(std::string("'") + what + "' expects an integer", t.line, t.col);
        if (t.value < lo || t.value > hi)
            throw ParseError(std::string("'") + what + "' must be in " + std::to_string(lo) +
                                 ".." + std::to_string(hi),
                             t.line, t.col);
        if (ts.peek().kind != detail::Tok::eof)
            throw ParseError("trailing input after directive", ts.peek().line, ts.peek().col);
        return static_cast<int>(t.value);
    };

    size_t ln = 0;
    std::optional<std::pair<std::vector<std::optional<ScalarExpr>>,
                            std::vector<std::optional<ScalarExpr>>>>
        tf;  // open transform block: base images, fiber images
    int tf_line = 0;
    while (ln < lines.size()) {
        int line_no = static_cast<int>(ln) + 1;
        detail::TokStream ts{detail::tokenize(lines[ln], line_no), 0};
        ++ln;
        if (ts.peek().kind == detail::Tok::eof) continue;
        const detail::Tok head = ts.next();
        if (head.kind != detail::Tok::ident)
            throw ParseError("expected a directive", head.line, head.col);

        if (tf) {
            if (head.text == "end") {
                if (ts.peek().kind != detail::Tok::eof)
                    throw ParseError("trailing input after 'end'", ts.peek().line, ts.peek().col);
                std::vector<ScalarExpr> base_images, fiber_images;
                for (int i = 1; i <= pf.n; ++i) {
                    if (!tf->first[static_cast<size_t>(i - 1)])
                        throw ParseError("transform block misses x" + std::to_string(i), tf_line,
                                         1);
                    base_images.push_back(*tf->first[static_cast<size_t>(i - 1)]);
                }
                for (int s = 1; s <= pf.m; ++s) {
                    if (!tf->second[static_cast<size_t>(s - 1)])
                        throw ParseError("transform block misses y" + std::to_string(s), tf_line,
                                         1);
                    fiber_images.push_back(*tf->second[static_cast<size_t>(s - 1)]);
                }
                pf.transforms.push_back(
                    make_chart_transform(pf.space, base_images, fiber_images));
                tf.reset();
                continue;
            }
            bool is_base = head.text[0] == 'x';
            if (!is_base && head.text[0] != 'y')
                throw ParseError("transform lines define x<k> or y<s> images", head.line,
                                 head.col);
            int idx;
            if (is_base) {
                idx = detail::parse_base_name(pf.space, head.text.substr(1), head);
            } else {
                auto [sigma, j] = detail::parse_field_name(pf.space, head.text.substr(1), head);
                if (j.size() != 0)
                    throw ParseError("transform images are defined per fibre coordinate",
                                     head.line, head.col);
                idx = sigma;
            }
            ts.expect_punct("=");
            detail::ExprParser ep(pf.space, ts);
            ScalarExpr img = ep.expr();
            if (ts.peek().kind != detail::Tok::eof)
                throw ParseError("trailing input after transform image", ts.peek().line,
                                 ts.peek().col);
            auto& slot = is_base ? tf->first[static_cast<size_t>(idx - 1)]
                                 : tf->second[static_cast<size_t>(idx - 1)];
            if (slot)
                throw ParseError("duplicate transform image for " + head.text, head.line,
                                 head.col);
            slot = img;
            continue;
        }

        if (head.text == "base") {
            if (seen_base) throw ParseError("duplicate 'base' directive", head.line, head.col);
            pf.n = read_int_directive(ts, "base", 1, 9);
            seen_base = true;
        } else if (head.text == "fiber") {
            if (seen_fiber) throw ParseError("duplicate 'fiber' directive", head.line, head.col);
            pf.m = read_int_directive(ts, "fiber", 1, 2000);
            seen_fiber = true;
        } else if (head.text == "order") {
            if (seen_order) throw ParseError("duplicate 'order' directive", head.line, head.col);
            pf.r = read_int_directive(ts, "order", 1, 7);
            seen_order = true;
        } else if (head.text == "mode") {
            if (seen_mode) throw ParseError("duplicate 'mode' directive", head.line, head.col);
            if (pf.space)
                throw ParseError("'mode' must precede expressions", head.line, head.col);
            seen_mode = true;
            const detail::Tok& v = ts.next();
            if (v.kind != detail::Tok::ident || (v.text != "generic" && v.text != "metric"))
                throw ParseError("'mode' expects generic or metric", v.line, v.col);
            pf.metric_mode = v.text == "metric";
            if (ts.peek().kind == detail::Tok::ident) {
                const detail::Tok& sig = ts.next();
                if (!pf.metric_mode || (sig.text != "riemannian" && sig.text != "lorentzian"))
                    throw ParseError("unexpected mode qualifier '" + sig.text + "'", sig.line,
                                     sig.col);
                pf.signature = sig.text == "lorentzian" ? SignatureMode::lorentzian
                                                        : SignatureMode::riemannian;
            }
            if (ts.peek().kind != detail::Tok::eof)
                throw ParseError("trailing input after directive", ts.peek().line, ts.peek().col);
        } else if (head.text == "lagrangian") {
            if (pf.metric_mode)
                throw ParseError("metric mode defines its own Lagrangian", head.line, head.col);
            if (density) throw ParseError("duplicate 'lagrangian' directive", head.line, head.col);
            ensure_space(head);
            detail::ExprParser ep(pf.space, ts);
            density = ep.expr();
            density_line = head.line;
            if (ts.peek().kind != detail::Tok::eof)
                throw ParseError("trailing input after expression", ts.peek().line, ts.peek().col);
        } else if (head.text == "nonvanishing") {
            ensure_space(head);
            if (ts.peek().kind == detail::Tok::ident && ts.peek().text == "lagrangian") {
                ts.next();
                if (ts.peek().kind != detail::Tok::eof)
                    throw ParseError("trailing input after directive", ts.peek().line,
                                     ts.peek().col);
                lag_nonvanishing = true;
            } else {
                detail::ExprParser ep(pf.space, ts);
                ScalarExpr e = ep.expr();
                if (ts.peek().kind != detail::Tok::eof)
                    throw ParseError("trailing input after expression", ts.peek().line,
                                     ts.peek().col);
                (void)register_inverse(e);
            }
        } else if (head.text == "transform") {
            ensure_space(head);
            if (ts.peek().kind != detail::Tok::eof)
                throw ParseError("trailing input after directive", ts.peek().line, ts.peek().col);
            tf.emplace(std::vector<std::optional<ScalarExpr>>(static_cast<size_t>(pf.n)),
                       std::vector<std::optional<ScalarExpr>>(static_cast<size_t>(pf.m)));
            tf_line = head.line;
        } else {
            throw ParseError("unknown directive '" + head.text + "'", head.line, head.col);
        }
    }
    if (tf) throw ParseError("unterminated transform block", tf_line, 1);

    if (pf.metric_mode) {
        detail::Tok at{detail::Tok::eof, "", 0, static_cast<int>(lines.size()), 1};
        ensure_space(at);
        pf.lagrangian = hilbert_lagrangian(*pf.metric);
        return pf;
    }
    if (density) {
        if (jet_order(*density) > pf.r)
            throw ParseError("lagrangian uses jet atoms above the declared order", density_line,
                             1);
        pf.lagrangian = make_lagrangian(pf.space, pf.r, *density, lag_nonvanishing);
    } else if (lag_nonvanishing) {
        throw ParseError("'nonvanishing lagrangian' without a 'lagrangian' directive");
    }
    return pf;
}

}  // namespace lepage
