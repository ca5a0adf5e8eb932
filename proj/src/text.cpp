#include "blindcopy/text.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "blindcopy/lexer.hpp"

namespace blindcopy {

namespace detail {

bool is_variable_name(const std::string& s, int* index) {
  if (s.size() < 2 || s[0] != 'x') return false;
  for (size_t i = 1; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  *index = std::stoi(s.substr(1));
  return true;
}

}  // namespace detail

namespace {

using detail::Lexer;

TermId parse_term(World& w, Lexer& lx, bool infer) {
  int line = lx.line, col = lx.col;
  std::string name = lx.ident();
  int vi;
  if (detail::is_variable_name(name, &vi)) {
    if (vi < 1) throw ParseError(line, col, "variable index must be at least 1");
    return w.var(vi);
  }
  std::vector<TermId> args;
  if (lx.eat('(')) {
    if (!lx.eat(')')) {
      do {
        args.push_back(parse_term(w, lx, infer));
      } while (lx.eat(','));
      lx.expect(')');
    }
  }
  auto f = w.find_fun(name);
  if (!f) {
    if (!infer)
      throw ParseError(line, col, "undeclared function symbol '" + name + "'");
    f = w.fun(name, static_cast<int>(args.size()));
  }
  if (w.fun_arity(*f) != static_cast<int>(args.size()))
    throw ParseError(line, col, "function '" + name + "' expects " +
                                    std::to_string(w.fun_arity(*f)) +
                                    " arguments, got " +
                                    std::to_string(args.size()));
  return w.app(*f, args);
}

LitId parse_literal(World& w, Lexer& lx) {
  bool neg = lx.eat('-');
  int line = lx.line, col = lx.col;
  std::string name = lx.ident();
  std::vector<TermId> args;
  if (lx.eat('(')) {
    if (!lx.eat(')')) {
      do {
        args.push_back(parse_term(w, lx, /*infer=*/false));
      } while (lx.eat(','));
      lx.expect(')');
    }
  }
  auto p = w.find_pred(name);
  if (!p) throw ParseError(line, col, "undeclared predicate '" + name + "'");
  if (w.pred_arity(*p) != static_cast<int>(args.size()))
    throw ParseError(line, col, "predicate '" + name + "' expects " +
                                    std::to_string(w.pred_arity(*p)) +
                                    " arguments, got " +
                                    std::to_string(args.size()));
  return make_lit(w.atom(*p, args), neg);
}

}  // namespace

std::vector<Clause> parse_clauses(World& w, std::string_view text) {
  Lexer lx{text};
  std::vector<Clause> out;
  while (!lx.done()) {
    int line = lx.line, col = lx.col;
    size_t save_pos = lx.pos;
    int save_line = lx.line, save_col = lx.col;
    if (std::isalpha(static_cast<unsigned char>(lx.peek())) || lx.peek() == '_') {
      std::string head = lx.ident();
      if (head == "fun" || head == "pred") {
        std::string name = lx.ident();
        lx.expect('/');
        int arity = lx.number();
        lx.expect('.');
        try {
          if (head == "fun")
            w.fun(name, arity);
          else
            w.pred(name, arity);
        } catch (const InputError& e) {
          throw ParseError(line, col, e.what());
        }
        continue;
      }
      if (head == "false") {
        lx.expect('.');
        out.push_back({});
        continue;
      }
      // Not a declaration: rewind and parse a clause.
      lx.pos = save_pos;
      lx.line = save_line;
      lx.col = save_col;
    }
    Clause c;
    do {
      c.push_back(parse_literal(w, lx));
    } while (lx.eat('|'));
    lx.expect('.');
    normalize_clause(c);
    out.push_back(std::move(c));
  }
  return out;
}

TermId parse_term_inferring(World& w, std::string_view text) {
  Lexer lx{text};
  TermId t = parse_term(w, lx, /*infer=*/true);
  if (!lx.done()) lx.fail("trailing input after term");
  return t;
}

AtomId parse_atom(World& w, std::string_view text) {
  Lexer lx{text};
  LitId l = parse_literal(w, lx);
  if (!lx.done()) lx.fail("trailing input after atom");
  if (lit_neg(l)) lx.fail("expected an atom, not a negative literal");
  return lit_atom(l);
}

std::string write_clause_file(const World& w, const std::vector<Clause>& cs) {
  // Emit declarations for exactly the symbols the clauses use.
  std::set<FunId> funs;
  std::set<PredId> preds;
  std::vector<TermId> stack;
  for (const Clause& c : cs) {
    for (LitId l : c) {
      AtomId a = lit_atom(l);
      preds.insert(w.atom_pred(a));
      for (TermId t : w.atom_args(a)) stack.push_back(t);
    }
  }
  while (!stack.empty()) {
    TermId t = stack.back();
    stack.pop_back();
    if (w.is_var(t)) continue;
    funs.insert(w.term_fun(t));
    for (TermId a : w.term_args(t)) stack.push_back(a);
  }
  auto quoted = [](const std::string& name) -> std::string {
    for (char c : name)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
        return "\"" + name + "\"";
    return name;
  };
  std::ostringstream os;
  for (FunId f : funs)
    os << "fun " << quoted(w.fun_name(f)) << "/" << w.fun_arity(f) << ".\n";
  for (PredId p : preds)
    os << "pred " << quoted(w.pred_name(p)) << "/" << w.pred_arity(p) << ".\n";
  for (const Clause& c : cs) {
    if (c.empty()) {
      os << "false.\n";
      continue;
    }
    for (size_t i = 0; i < c.size(); ++i) {
      if (i) os << " | ";
      LitId l = c[i];
      if (lit_neg(l)) os << "-";
      AtomId a = lit_atom(l);
      os << quoted(w.pred_name(w.atom_pred(a)));
      auto args = w.atom_args(a);
      if (!args.empty()) {
        os << "(";
        for (size_t j = 0; j < args.size(); ++j) {
          if (j) os << ",";
          os << w.show(args[j]);
        }
        os << ")";
      }
    }
    os << ".\n";
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace blindcopy
