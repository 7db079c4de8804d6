#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pbls/model.hpp"

namespace pbls {

// Raw parse of one OPB file, before normalization.
struct OpbDocument {
    std::optional<int> declared_vars;
    std::optional<int> declared_constraints;
    std::optional<std::vector<RawTerm>> objective;
    struct Line {
        RawConstraint constraint;
        int line = 0;
    };
    std::vector<Line> constraints;
    int max_var = 0;
};

OpbDocument parse_opb_document(std::istream& in);

struct ParseResult {
    PBOInstance instance;
    std::vector<std::string> warnings;  // header-count drift and the like
};

// Full pipeline: raw parse, then normalization of every constraint and the
// objective. Throws ParseError / UnsupportedNonlinearError (with line
// numbers), TriviallyUnsatError (with the offending source line), or
// TooLargeError.
ParseResult parse_opb(std::istream& in);

// Writer used for round-trip testing. Normalized negated literals are folded
// back into signed coefficients; throws Error for an objective whose constant
// offset cannot be represented that way (never the case for parsed input).
void emit_instance(std::ostream& out, const PBOInstance& inst);

struct EmittedSolution {
    Assignment assignment;
    std::int64_t cost = 0;
};

// Final competition-style output: "o <cost>" (objective instances only),
// "s SATISFIABLE" / "s UNKNOWN", and "v" lines covering every variable,
// wrapped at <= 4096 characters. The o line is skipped when announced_cost
// already equals the best cost (the caller streamed it during search).
void emit_solution(std::ostream& out, bool feasible, const std::optional<EmittedSolution>& best,
                   bool has_objective, std::optional<std::int64_t> announced_cost = std::nullopt);

// One "v"-line stream (possibly wrapped) back into an assignment; used by the
// verify subcommand. Lines not starting with "v" are ignored.
Assignment parse_solution_vlines(std::istream& in, int num_vars);

}  // namespace pbls
