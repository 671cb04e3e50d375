#include "frolicher/model_format.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace frolicher {

namespace {

struct Cursor {
    const std::string& text;
    int line;
    size_t pos = 0;

    bool done() const { return pos >= text.size(); }
    char peek() const { return done() ? '\0' : text[pos]; }
    char take() { return done() ? '\0' : text[pos++]; }
    int column() const { return static_cast<int>(pos) + 1; }
    void skip_ws() {
        while (!done() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, column()); }
};

double parse_number(Cursor& c) {
    const size_t start = c.pos;
    while (!c.done() && (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '.'))
        c.take();
    if (c.pos == start) c.fail("expected a number");
    try {
        return std::stod(c.text.substr(start, c.pos - start));
    } catch (...) {
        c.fail("malformed number '" + c.text.substr(start, c.pos - start) + "'");
    }
}

/// literal := number ['i'] | 'i' | '(' [sign] number ['i'] [(+|-) number ['i']] ')'
Cplx parse_literal(Cursor& c) {
    if (c.peek() == '(') {
        c.take();
        Cplx value{0, 0};
        bool first = true;
        while (true) {
            c.skip_ws();
            double sign = 1.0;
            if (c.peek() == '+' || c.peek() == '-') {
                if (c.take() == '-') sign = -1.0;
            } else if (!first) {
                c.fail("expected '+', '-' or ')' in complex literal");
            }
            c.skip_ws();
            if (c.peek() == 'i') {
                c.take();
                value += Cplx(0, sign);
            } else {
                const double mag = parse_number(c);
                if (c.peek() == 'i') {
                    c.take();
                    value += Cplx(0, sign * mag);
                } else {
                    value += Cplx(sign * mag, 0);
                }
            }
            c.skip_ws();
            if (c.peek() == ')') {
                c.take();
                return value;
            }
            first = false;
        }
    }
    if (c.peek() == 'i') {
        c.take();
        return {0, 1};
    }
    const double mag = parse_number(c);
    if (c.peek() == 'i') {
        c.take();
        return {0, mag};
    }
    return {mag, 0};
}

struct ParsedTerm {
    StructureTerm::Kind kind = StructureTerm::HolHol;
    int a = 0;
    int b = 0;
    TPoly coeff;
};

void multiply_poly(TPoly& poly, int dt, int dtbar, Cplx c) {
    TPoly out;
    for (const auto& [key, value] : poly)
        out[{key.first + dt, key.second + dtbar}] += value * c;
    poly = std::move(out);
}

/// term := [factor '*']* monomial ; factor := literal | t | tbar | t^k | tbar^k
ParsedTerm parse_term(Cursor& c, bool family_mode, double sign) {
    ParsedTerm term;
    term.coeff[{0, 0}] = Cplx(sign, 0);

    while (true) {
        c.skip_ws();
        if (c.peek() == 't') {
            const size_t save = c.pos;
            c.take();
            int dt = 1, dtbar = 0;
            if (c.peek() == 'b') {
                if (c.text.compare(c.pos, 3, "bar") != 0) c.fail("expected 'tbar'");
                c.pos += 3;
                dt = 0;
                dtbar = 1;
            }
            int power = 1;
            if (c.peek() == '^') {
                c.take();
                power = static_cast<int>(parse_number(c));
                if (power < 1) c.fail("power must be >= 1");
            }
            if (!family_mode) {
                c.pos = save;
                c.fail("'t' is only allowed after a 'family' declaration");
            }
            multiply_poly(term.coeff, dt * power, dtbar * power, Cplx(1, 0));
            c.skip_ws();
            if (c.peek() == '*') {
                c.take();
                continue;
            }
            break;
        }
        if (c.peek() == '(' || c.peek() == 'i' || c.peek() == '.' ||
            std::isdigit(static_cast<unsigned char>(c.peek()))) {
            // lookahead: a bare index pair like "12" or "1'2'" is the monomial
            const size_t save = c.pos;
            bool is_monomial = false;
            if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
                size_t look = c.pos + 1;
                if (look < c.text.size() && c.text[look] == '\'') ++look;
                if (look < c.text.size() && std::isdigit(static_cast<unsigned char>(c.text[look]))) {
                    ++look;
                    if (look < c.text.size() && c.text[look] == '\'') ++look;
                    // monomial must end the factor chain
                    size_t after = look;
                    while (after < c.text.size() &&
                           (c.text[after] == ' ' || c.text[after] == '\t'))
                        ++after;
                    if (after >= c.text.size() || c.text[after] == '+' || c.text[after] == '-')
                        is_monomial = true;
                }
            }
            if (!is_monomial) {
                const Cplx lit = parse_literal(c);
                multiply_poly(term.coeff, 0, 0, lit);
                c.skip_ws();
                if (c.peek() == '*') {
                    c.take();
                    continue;
                }
                c.fail(std::string("expected '*' and a wedge monomial after a "
                                   "coefficient, got '") +
                       c.peek() + "'");
            }
            c.pos = save;
        }
        break;
    }

    // monomial: two indices, each optionally barred
    c.skip_ws();
    auto read_index = [&](bool& barred) {
        if (!std::isdigit(static_cast<unsigned char>(c.peek())))
            c.fail(std::string("expected a coframe index, got '") + c.peek() + "'");
        const int idx = c.take() - '0';
        if (idx < 1) c.fail("coframe indices start at 1");
        barred = false;
        if (c.peek() == '\'') {
            c.take();
            barred = true;
        }
        return idx - 1;
    };
    bool bar_a = false, bar_b = false;
    term.a = read_index(bar_a);
    term.b = read_index(bar_b);
    if (!bar_a && !bar_b)
        term.kind = StructureTerm::HolHol;
    else if (!bar_a && bar_b)
        term.kind = StructureTerm::HolAnti;
    else if (bar_a && bar_b)
        term.kind = StructureTerm::AntiAnti;
    else {
        // phibar^a ^ phi^b: reorder to -phi^b ^ phibar^a
        term.kind = StructureTerm::HolAnti;
        std::swap(term.a, term.b);
        multiply_poly(term.coeff, 0, 0, Cplx(-1, 0));
    }
    return term;
}

}  // namespace

CatalogEntry parse_model_text(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;

    int n = -1;
    bool family_mode = false;
    double radius = 1.0;
    std::map<int, std::vector<ParsedTerm>> equations;

    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        Cursor c{raw, line_no};
        c.skip_ws();
        if (c.done()) continue;

        if (c.text.compare(c.pos, 6, "family") == 0) {
            c.pos += 6;
            c.skip_ws();
            if (c.take() != 't') c.fail("family parameter must be named 't'");
            c.skip_ws();
            if (c.text.compare(c.pos, 2, "in") != 0) c.fail("expected 'in disc(<radius>)'");
            c.pos += 2;
            c.skip_ws();
            if (c.text.compare(c.pos, 5, "disc(") != 0) c.fail("expected 'disc(<radius>)'");
            c.pos += 5;
            radius = parse_number(c);
            if (c.take() != ')') c.fail("expected ')'");
            family_mode = true;
            continue;
        }

        if (c.peek() == 'n') {
            c.take();
            c.skip_ws();
            if (c.take() != '=') c.fail("expected '=' after 'n'");
            c.skip_ws();
            n = static_cast<int>(parse_number(c));
            if (n < 1 || n > 9) c.fail("n must be between 1 and 9");
            continue;
        }

        if (c.peek() == 'd') {
            c.take();
            if (!std::isdigit(static_cast<unsigned char>(c.peek())))
                c.fail("expected a generator index after 'd'");
            const int gen = c.take() - '0';
            if (gen < 1) c.fail("generator indices start at 1");
            c.skip_ws();
            if (c.take() != '=') c.fail("expected '='");
            c.skip_ws();
            if (c.peek() == '0' && c.pos + 1 >= c.text.size()) {
                c.take();
                equations[gen];  // present, empty
                continue;
            }
            if (c.peek() == '0') {
                const size_t save = c.pos;
                c.take();
                c.skip_ws();
                if (c.done()) {
                    equations[gen];
                    continue;
                }
                c.pos = save;
            }
            std::vector<ParsedTerm> terms;
            double sign = 1.0;
            if (c.peek() == '+' || c.peek() == '-') sign = (c.take() == '-') ? -1.0 : 1.0;
            while (true) {
                terms.push_back(parse_term(c, family_mode, sign));
                c.skip_ws();
                if (c.done()) break;
                const char op = c.take();
                if (op == '+')
                    sign = 1.0;
                else if (op == '-')
                    sign = -1.0;
                else
                    c.fail(std::string("expected '+' or '-', got '") + op + "'");
                c.skip_ws();
            }
            equations[gen] = std::move(terms);
            continue;
        }
        c.fail(std::string("unexpected token '") + c.peek() + "'");
    }

    if (n < 1) throw ParseError("missing 'n = <dim>' declaration", line_no, 1);
    for (const auto& [gen, terms] : equations)
        if (gen > n)
            throw ParseError("equation d" + std::to_string(gen) + " exceeds n = " +
                                 std::to_string(n),
                             line_no, 1);

    if (family_mode) {
        FamilySpec fam;
        fam.n = n;
        fam.disc_radius = radius;
        fam.equations.resize(n);
        for (const auto& [gen, terms] : equations)
            for (const auto& t : terms)
                fam.equations[gen - 1].push_back({t.kind, t.a, t.b, t.coeff});
        return fam;
    }
    StructureSpec spec;
    spec.n = n;
    spec.equations.resize(n);
    for (const auto& [gen, terms] : equations)
        for (const auto& t : terms) {
            Cplx c{0, 0};
            for (const auto& [key, value] : t.coeff) {
                if (key != std::pair<int, int>{0, 0})
                    throw ParseError("family coefficient outside family mode", 0, 0);
                c += value;
            }
            spec.equations[gen - 1].push_back({t.kind, t.a, t.b, c});
        }
    return spec;
}

CatalogEntry parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open model file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model_text(buffer.str());
}

namespace {

std::string fmt_cplx(Cplx c) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.17g%+.17gi", c.real(), c.imag());
    return buf;
}

char kind_char(StructureTerm::Kind k) {
    switch (k) {
        case StructureTerm::HolHol: return 'h';
        case StructureTerm::HolAnti: return 'm';
        case StructureTerm::AntiAnti: return 'a';
    }
    return '?';
}

}  // namespace

std::string canonical_spec(const StructureSpec& spec) {
    std::string s = "n=" + std::to_string(spec.n) + ";";
    for (size_t i = 0; i < spec.equations.size(); ++i) {
        s += "d" + std::to_string(i + 1) + ":";
        for (const auto& t : spec.equations[i])
            s += std::string(1, kind_char(t.kind)) + std::to_string(t.a) +
                 std::to_string(t.b) + "=" + fmt_cplx(t.coeff) + ",";
        s += ";";
    }
    return s;
}

std::string canonical_spec(const FamilySpec& fam) {
    char radius[40];
    std::snprintf(radius, sizeof(radius), "%.17g", fam.disc_radius);
    std::string s = "family;n=" + std::to_string(fam.n) + ";disc=" + radius + ";";
    for (size_t i = 0; i < fam.equations.size(); ++i) {
        s += "d" + std::to_string(i + 1) + ":";
        for (const auto& t : fam.equations[i]) {
            s += std::string(1, kind_char(t.kind)) + std::to_string(t.a) +
                 std::to_string(t.b) + "=";
            for (const auto& [key, value] : t.coeff)
                s += "t" + std::to_string(key.first) + "b" + std::to_string(key.second) +
                     "*" + fmt_cplx(value) + "|";
            s += ",";
        }
        s += ";";
    }
    return s;
}

}  // namespace frolicher
