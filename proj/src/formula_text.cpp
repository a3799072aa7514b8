#include <cctype>
#include <map>

#include "formula.hpp"

namespace ppcalc {

namespace {

struct Token {
    enum Kind { integer, ident, sym, end } kind;
    std::string text;
    size_t pos;
};

struct Lexer {
    const std::string& s;
    size_t i = 0;

    explicit Lexer(const std::string& text) : s(text) {}

    Token next() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i >= s.size()) return {Token::end, "", i};
        size_t start = i;
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            return {Token::integer, s.substr(start, i - start), start};
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
            return {Token::ident, s.substr(start, i - start), start};
        }
        if (std::string("&=+-*|.").find(c) != std::string::npos) {
            ++i;
            return {Token::sym, std::string(1, c), start};
        }
        fail(Error::Code::parse, "unexpected character '" + std::string(1, c) + "' at position " +
                                     std::to_string(start));
    }
};

[[noreturn]] void parse_fail(const Token& t, const std::string& msg) {
    fail(Error::Code::parse, msg + " at position " + std::to_string(t.pos));
}

// A linear combination split into x-coefficients, y-coefficients and a constant.
struct LinComb {
    std::map<int, Int> x;  // 1-based index -> coefficient
    std::map<int, Int> y;
    Int constant = 0;
};

struct Parser {
    Lexer lex;
    Token tok;
    int declared_m = 0;
    int max_x = 0;
    int sugar_vars = 0;

    struct Equation {
        LinComb lhs, rhs;
    };
    struct Sugar {
        Int divisor;
        bool is_x;
        int index;
    };
    struct Row {
        bool is_sugar;
        Equation eq;
        Sugar sugar;
    };
    std::vector<Row> rows;

    explicit Parser(const std::string& text) : lex(text) { tok = lex.next(); }

    void advance() { tok = lex.next(); }

    bool at_sym(const char* s) const { return tok.kind == Token::sym && tok.text == s; }

    std::pair<bool, int> var_index(const Token& t) {
        // returns (is_x, 1-based index)
        if (t.text.size() < 2 || (t.text[0] != 'x' && t.text[0] != 'y'))
            parse_fail(t, "expected a variable like x1 or y2");
        for (size_t j = 1; j < t.text.size(); ++j)
            if (!std::isdigit(static_cast<unsigned char>(t.text[j])))
                parse_fail(t, "expected a variable like x1 or y2");
        int idx = std::stoi(t.text.substr(1));
        if (idx < 1) parse_fail(t, "variable indices start at 1");
        return {t.text[0] == 'x', idx};
    }

    void parse() {
        // optional quantifier prefix: E y1 y2 ... .
        if (tok.kind == Token::ident && tok.text == "E") {
            advance();
            while (tok.kind == Token::ident) {
                auto [is_x, idx] = var_index(tok);
                if (is_x) parse_fail(tok, "only y-variables may be bound");
                if (idx != declared_m + 1)
                    parse_fail(tok, "bound variables must be declared in order y1, y2, ...");
                ++declared_m;
                advance();
            }
            if (!at_sym(".")) parse_fail(tok, "expected '.' after the bound-variable list");
            advance();
            if (declared_m == 0) parse_fail(tok, "quantifier prefix declares no variables");
        }
        parse_equation();
        while (at_sym("&")) {
            advance();
            parse_equation();
        }
        if (tok.kind != Token::end) parse_fail(tok, "unexpected trailing input");
    }

    void parse_equation() {
        // lookahead for the sugar form INT '|' var
        if (tok.kind == Token::integer) {
            size_t save_pos = lex.i;
            Token save_tok = tok;
            Int divisor(tok.text);
            advance();
            if (at_sym("|")) {
                advance();
                if (tok.kind != Token::ident) parse_fail(tok, "expected a variable after '|'");
                auto [is_x, idx] = var_index(tok);
                if (is_x) max_x = std::max(max_x, idx);
                else check_bound(tok, idx);
                advance();
                Row r;
                r.is_sugar = true;
                r.sugar = Sugar{divisor, is_x, idx};
                ++sugar_vars;
                rows.push_back(std::move(r));
                return;
            }
            lex.i = save_pos;
            tok = save_tok;
        }
        Row r;
        r.is_sugar = false;
        r.eq.lhs = parse_lin();
        if (!at_sym("=")) parse_fail(tok, "expected '=' in equation");
        advance();
        r.eq.rhs = parse_lin();
        rows.push_back(std::move(r));
    }

    void check_bound(const Token& t, int idx) {
        if (idx > declared_m)
            parse_fail(t, "bound variable y" + std::to_string(idx) + " is not declared");
    }

    LinComb parse_lin() {
        LinComb out;
        bool negate = false;
        // leading sign
        if (at_sym("-")) {
            negate = true;
            advance();
        } else if (at_sym("+")) {
            advance();
        }
        parse_term(out, negate);
        while (at_sym("+") || at_sym("-")) {
            bool neg = tok.text == "-";
            advance();
            parse_term(out, neg);
        }
        return out;
    }

    void parse_term(LinComb& out, bool negate) {
        Int coeff = 1;
        bool have_coeff = false;
        if (tok.kind == Token::integer) {
            coeff = Int(tok.text);
            have_coeff = true;
            advance();
            if (at_sym("*")) {
                advance();
                if (tok.kind != Token::ident) parse_fail(tok, "expected a variable after '*'");
            } else if (tok.kind != Token::ident) {
                // bare constant
                out.constant += negate ? -coeff : coeff;
                return;
            }
        }
        if (tok.kind != Token::ident) parse_fail(tok, "expected a term");
        auto [is_x, idx] = var_index(tok);
        if (negate) coeff = -coeff;
        if (is_x) {
            max_x = std::max(max_x, idx);
            out.x[idx] += coeff;
        } else {
            check_bound(tok, idx);
            out.y[idx] += coeff;
        }
        advance();
        (void)have_coeff;
    }

    PpFormula build() {
        int n = max_x;
        int m = declared_m + sugar_vars;
        IntMatrix A(static_cast<int>(rows.size()), n), B(static_cast<int>(rows.size()), m);
        int next_sugar = declared_m;  // fresh witnesses appended after declared ones
        for (size_t r = 0; r < rows.size(); ++r) {
            int ri = static_cast<int>(r);
            if (rows[r].is_sugar) {
                // v = d * y_fresh
                const Sugar& s = rows[r].sugar;
                if (s.is_x) A.at(ri, s.index - 1) = 1;
                else B.at(ri, s.index - 1) = -1;
                B.at(ri, next_sugar) = s.divisor;
                ++next_sugar;
                continue;
            }
            const Equation& eq = rows[r].eq;
            if (eq.lhs.constant != eq.rhs.constant)
                fail(Error::Code::parse, "constant terms do not cancel in equation " +
                                             std::to_string(r + 1));
            for (const auto& [idx, c] : eq.lhs.x) A.at(ri, idx - 1) += c;
            for (const auto& [idx, c] : eq.rhs.x) A.at(ri, idx - 1) -= c;
            // A x = B y: y-terms on the right contribute positively
            for (const auto& [idx, c] : eq.rhs.y) B.at(ri, idx - 1) += c;
            for (const auto& [idx, c] : eq.lhs.y) B.at(ri, idx - 1) -= c;
        }
        return PpFormula(n, m, A, B);
    }
};

void append_side(std::string& out, const IntMatrix& mat, int row, char name) {
    bool first = true;
    for (int j = 0; j < mat.cols; ++j) {
        const Int& c = mat.at(row, j);
        if (c == 0) continue;
        Int a = c < 0 ? Int(-c) : c;
        std::string var = std::string(1, name) + std::to_string(j + 1);
        std::string term = (a == 1) ? var : a.str() + "*" + var;
        if (first) {
            if (c < 0) out += "-";
            out += term;
            first = false;
        } else {
            out += (c < 0) ? " - " : " + ";
            out += term;
        }
    }
    if (first) out += "0";
}

}  // namespace

PpFormula parse_formula(const std::string& text) {
    Parser p(text);
    p.parse();
    return p.build();
}

std::string format_formula(const PpFormula& f) {
    std::string out;
    if (f.m > 0) {
        out += "E";
        for (int j = 1; j <= f.m; ++j) out += " y" + std::to_string(j);
        out += " . ";
    }
    for (int r = 0; r < f.equations(); ++r) {
        if (r) out += " & ";
        append_side(out, f.A, r, 'x');
        out += " = ";
        append_side(out, f.B, r, 'y');
    }
    if (f.equations() == 0) out += f.n > 0 ? "0*x" + std::to_string(f.n) + " = 0" : "0 = 0";
    else if (f.n > 0) {
        // pin the free arity if the last variable is never mentioned
        bool mentioned = false;
        for (int r = 0; r < f.equations() && !mentioned; ++r)
            if (f.A.at(r, f.n - 1) != 0) mentioned = true;
        if (!mentioned) out += " & 0*x" + std::to_string(f.n) + " = 0";
    }
    return out;
}

}  // namespace ppcalc
