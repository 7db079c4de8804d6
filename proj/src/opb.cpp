#include "pbls/opb.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>              // IWYU pragma: keep
#include <sstream>
#include <string_view>

namespace pbls {

namespace {

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string_view> split_tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

bool looks_like_int(std::string_view t) {
    if (!t.empty() && (t[0] == '+' || t[0] == '-')) t.remove_prefix(1);
    return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::int64_t parse_int(std::string_view t, int line) {
    std::string_view body = t;
    if (!body.empty() && body[0] == '+') body.remove_prefix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc{} || ptr != body.data() + body.size())
        throw ParseError("malformed integer '" + std::string(t) + "'", line);
    return v;
}

// "x12" or "~x12"
std::optional<Literal> parse_var_token(std::string_view t, int line) {
    Literal lit{0, false};
    if (!t.empty() && t[0] == '~') {
        lit.negated = true;
        t.remove_prefix(1);
    }
    if (t.size() < 2 || t[0] != 'x') return std::nullopt;
    t.remove_prefix(1);
    if (!std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); })) return std::nullopt;
    int idx = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), idx);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw ParseError("variable index out of range", line);
    if (idx < 1) throw ParseError("variable index must be >= 1", line);
    lit.var = idx;
    return lit;
}

std::optional<int> header_count(std::string_view line, std::string_view key) {
    std::size_t pos = line.find(key);
    if (pos == std::string_view::npos) return std::nullopt;
    std::size_t i = pos + key.size();
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    if (j == i) return std::nullopt;
    int v = 0;
    std::from_chars(line.data() + i, line.data() + j, v);
    return v;
}

struct StatementParser {
    OpbDocument& doc;
    int line;

    void run(std::string_view stmt) {
        std::vector<std::string_view> tokens = split_tokens(stmt);
        std::size_t start = 0;
        bool is_objective = false;
        if (!tokens.empty() && tokens[0] == "min:") {
            is_objective = true;
            start = 1;
        } else if (tokens.size() >= 2 && tokens[0] == "min" && tokens[1] == ":") {
            is_objective = true;
            start = 2;
        }
        if (is_objective && doc.objective)
            throw ParseError("duplicate objective line", line);

        std::vector<RawTerm> terms;
        std::int64_t pending = 0;
        bool has_pending = false;
        bool last_was_var = false;
        std::optional<RelOp> op;
        std::optional<std::int64_t> rhs;

        for (std::size_t i = start; i < tokens.size(); ++i) {
            std::string_view t = tokens[i];
            if (t == ">=" || t == "<=" || t == "=") {
                if (is_objective) throw ParseError("relational operator in objective line", line);
                if (op) throw ParseError("second relational operator", line);
                if (has_pending) throw ParseError("dangling coefficient before operator", line);
                op = t == ">=" ? RelOp::Ge : (t == "<=" ? RelOp::Le : RelOp::Eq);
                continue;
            }
            if (op) {
                if (rhs) throw ParseError("trailing token after right-hand side", line);
                if (!looks_like_int(t)) throw ParseError("malformed integer '" + std::string(t) + "'", line);
                rhs = parse_int(t, line);
                continue;
            }
            if (looks_like_int(t)) {
                if (has_pending) throw ParseError("expected variable after coefficient", line);
                pending = parse_int(t, line);
                has_pending = true;
                last_was_var = false;
                continue;
            }
            if (auto lit = parse_var_token(t, line)) {
                if (!has_pending) {
                    if (last_was_var) throw UnsupportedNonlinearError(line);
                    throw ParseError("term without coefficient", line);
                }
                if (doc.declared_vars && lit->var > *doc.declared_vars)
                    throw ParseError("variable index exceeds declared count", line);
                doc.max_var = std::max(doc.max_var, lit->var);
                terms.push_back({pending, *lit});
                has_pending = false;
                last_was_var = true;
                continue;
            }
            throw ParseError("unrecognized token '" + std::string(t) + "'", line);
        }
        if (has_pending) throw ParseError("dangling coefficient at end of statement", line);

        if (is_objective) {
            doc.objective = std::move(terms);
            return;
        }
        if (!op) throw ParseError("constraint without relational operator", line);
        if (!rhs) throw ParseError("constraint without right-hand side", line);
        doc.constraints.push_back({{std::move(terms), *op, *rhs}, line});
    }
};

}  // namespace

OpbDocument parse_opb_document(std::istream& in) {
    OpbDocument doc;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string_view line(raw);
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos) continue;
        if (line[first] == '*') {
            if (line_no == 1) {
                doc.declared_vars = header_count(line, "#variable=");
                doc.declared_constraints = header_count(line, "#constraint=");
            }
            continue;
        }
        // Statements are line-terminated; every ';' closes one.
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t semi = line.find(';', pos);
            if (semi == std::string_view::npos) {
                if (!blank(line.substr(pos)))
                    throw ParseError("statement not terminated by ';'", line_no);
                break;
            }
            std::string_view stmt = line.substr(pos, semi - pos);
            if (!blank(stmt)) StatementParser{doc, line_no}.run(stmt);
            pos = semi + 1;
        }
    }
    return doc;
}

ParseResult parse_opb(std::istream& in) {
    OpbDocument doc = parse_opb_document(in);
    ParseResult result;
    PBOInstance& inst = result.instance;

    inst.num_vars = doc.declared_vars.value_or(doc.max_var);
    if (doc.declared_vars && *doc.declared_vars != doc.max_var)
        result.warnings.push_back("header declares " + std::to_string(*doc.declared_vars) +
                                  " variables, highest index used is " + std::to_string(doc.max_var));
    if (doc.declared_constraints && *doc.declared_constraints != static_cast<int>(doc.constraints.size()))
        result.warnings.push_back("header declares " + std::to_string(*doc.declared_constraints) +
                                  " constraints, file contains " + std::to_string(doc.constraints.size()));

    for (const OpbDocument::Line& cl : doc.constraints) {
        std::vector<PBConstraint> normalized = normalize_constraint(cl.constraint, cl.line);
        for (PBConstraint& c : normalized) {
            c.id = static_cast<int>(inst.hard.size());
            inst.hard.push_back(std::move(c));
        }
    }
    if (doc.objective) inst.objective = normalize_objective(*doc.objective);
    inst.rebuild_occurrence_index();
    return result;
}

namespace {

// Folds a positive-coefficient literal back into a signed coefficient on the
// positive variable; returns the rhs correction.
std::int64_t append_signed_term(std::string& out, const Term& t) {
    std::int64_t signed_coeff = t.lit.negated ? -t.coeff : t.coeff;
    out += signed_coeff >= 0 ? " +" : " ";
    out += std::to_string(signed_coeff);
    out += " x";
    out += std::to_string(t.lit.var);
    return t.lit.negated ? t.coeff : 0;
}

}  // namespace

void emit_instance(std::ostream& out, const PBOInstance& inst) {
    out << "* #variable= " << inst.num_vars << " #constraint= " << inst.hard.size() << "\n";
    if (!inst.objective.empty()) {
        std::int64_t folded = 0;
        std::string line = "min:";
        for (const Term& t : inst.objective.terms) folded += append_signed_term(line, t);
        if (inst.objective.constant_offset + folded != 0)
            throw Error("objective constant offset is not representable in OPB output");
        out << line << " ;\n";
    }
    for (const PBConstraint& c : inst.hard) {
        std::int64_t folded = 0;
        std::string line;
        for (const Term& t : c.terms) folded += append_signed_term(line, t);
        out << line.substr(line.empty() ? 0 : 1) << " >= " << (c.bound - folded) << " ;\n";
    }
}

void emit_solution(std::ostream& out, bool feasible, const std::optional<EmittedSolution>& best,
                   bool has_objective, std::optional<std::int64_t> announced_cost) {
    if (!feasible || !best) {
        out << "s UNKNOWN\n" << std::flush;
        return;
    }
    if (has_objective && announced_cost != best->cost) out << "o " << best->cost << "\n";
    out << "s SATISFIABLE\n";
    constexpr std::size_t kLineLimit = 4096;
    std::string line = "v";
    for (int v = 1; v <= best->assignment.num_vars(); ++v) {
        std::string tok = best->assignment.value(v) ? "x" + std::to_string(v) : "-x" + std::to_string(v);
        if (line.size() + 1 + tok.size() > kLineLimit) {
            out << line << "\n";
            line = "v";
        }
        line += ' ';
        line += tok;
    }
    if (line.size() > 1) out << line << "\n";
    out << std::flush;
}

Assignment parse_solution_vlines(std::istream& in, int num_vars) {
    Assignment a(num_vars);
    std::string raw;
    while (std::getline(in, raw)) {
        std::vector<std::string_view> tokens = split_tokens(raw);
        if (tokens.empty() || tokens[0] != "v") continue;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            std::string_view t = tokens[i];
            int value = 1;
            if (!t.empty() && t[0] == '-') {
                value = 0;
                t.remove_prefix(1);
            }
            auto lit = parse_var_token(t, 0);
            if (!lit || lit->negated) throw ParseError("bad solution literal '" + std::string(tokens[i]) + "'", 0);
            if (lit->var > num_vars) throw ParseError("solution references unknown variable x" + std::to_string(lit->var), 0);
            a.set(lit->var, value);
        }
    }
    return a;
}

}  // namespace pbls
