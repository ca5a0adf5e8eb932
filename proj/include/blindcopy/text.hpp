#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "blindcopy/term.hpp"

namespace blindcopy {

/// Input error with a position. Lines and columns are 1-based.
struct ParseError : InputError {
  ParseError(int line, int col, const std::string& msg)
      : InputError("line " + std::to_string(line) + ":" + std::to_string(col) +
                   ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

/// Parse a clause file. Grammar, one item per line (comments start with #):
///
///   fun f/2.
///   pred P/1.
///   P(f(x1,a)) | -Q(x1).
///   false.
///
/// Variables match x[0-9]+; every function and predicate must be declared
/// before use; arity violations are reported with their position. Quoted
/// identifiers ("P@g(x3)") are accepted for generated symbol names.
std::vector<Clause> parse_clauses(World& w, std::string_view text);

/// Parse a single term, declaring unseen function symbols with the observed
/// arity (used by one-off CLI inputs).
TermId parse_term_inferring(World& w, std::string_view text);

/// Parse an atom over already-declared symbols.
AtomId parse_atom(World& w, std::string_view text);

/// Render declarations plus clauses back into the file format.
std::string write_clause_file(const World& w, const std::vector<Clause>& cs);

std::string read_file(const std::string& path);

}  // namespace blindcopy
