#include "blindcopy/protocol.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "blindcopy/classify.hpp"
#include "blindcopy/lexer.hpp"

namespace blindcopy {

namespace {

using detail::Lexer;

struct ProtoParser {
  World& w;
  Lexer lx;
  std::set<std::string> constants;  // declared message constants
  std::set<std::string> states;     // state symbols seen

  explicit ProtoParser(World& w, std::string_view text) : w(w), lx{text} {}

  TermId constant(const std::string& name, int line, int col) {
    if (!constants.count(name))
      throw ParseError(line, col, "undeclared constant '" + name + "'");
    return w.app(*w.find_fun(name), {});
  }

  // Message terms: enc/pair, declared constants, variables.
  TermId message() {
    int line = lx.line, col = lx.col;
    std::string name = lx.ident();
    int vi;
    if (detail::is_variable_name(name, &vi)) {
      if (vi < 1)
        throw ParseError(line, col, "variable index must be at least 1");
      return w.var(vi);
    }
    if (name == "enc" || name == "pair") {
      lx.expect('(');
      TermId a = message();
      lx.expect(',');
      TermId b = message();
      lx.expect(')');
      return w.app(name == "enc" ? enc_fun(w) : pair_fun(w), {a, b});
    }
    if (name == "none") return none_term(w);
    return constant(name, line, col);
  }

  TermId state_term() {
    int line = lx.line, col = lx.col;
    std::string name = lx.ident();
    int vi;
    if (detail::is_variable_name(name, &vi))
      throw ParseError(line, col, "state symbol expected");
    std::vector<TermId> args;
    if (lx.eat('(')) {
      if (!lx.eat(')')) {
        do {
          args.push_back(message());
        } while (lx.eat(','));
        lx.expect(')');
      }
    }
    if (constants.count(name))
      throw ParseError(line, col,
                       "'" + name + "' is a constant, not a control point");
    states.insert(name);
    FunId f;
    try {
      f = w.fun(name, static_cast<int>(args.size()));
    } catch (const InputError& e) {
      throw ParseError(line, col, e.what());
    }
    return w.app(f, args);
  }

  std::optional<TermId> recv_or_send(const char* keyword) {
    int line = lx.line, col = lx.col;
    std::string word = lx.ident();
    if (word != keyword)
      throw ParseError(line, col, std::string("expected '") + keyword + "'");
    lx.expect('(');
    std::optional<TermId> out;
    if (!lx.eat_word("none")) out = message();
    lx.expect(')');
    return out;
  }

  ProtocolSpec parse() {
    ProtocolSpec spec;
    std::set<std::string> public_names;
    while (!lx.done()) {
      int line = lx.line, col = lx.col;
      std::string head = lx.ident();
      if (head == "agent" || head == "const") {
        std::string name = lx.ident();
        constants.insert(name);
        w.fun(name, 0);
        if (lx.eat_word("public")) public_names.insert(name);
        lx.expect('.');
      } else if (head == "public") {
        std::string name = lx.ident();
        constants.insert(name);
        w.fun(name, 0);
        public_names.insert(name);
        lx.expect('.');
      } else if (head == "keypair") {
        std::string k = lx.ident();
        lx.expect('/');
        std::string kinv = lx.ident();
        lx.expect('.');
        constants.insert(k);
        constants.insert(kinv);
        w.fun(k, 0);
        w.fun(kinv, 0);
        spec.keypairs.push_back(
            {w.app(*w.find_fun(k), {}), w.app(*w.find_fun(kinv), {})});
      } else if (head == "init") {
        TermId st = state_term();
        if (!w.ground(st))
          throw ParseError(line, col, "initialization state must be ground");
        spec.init_states.push_back(st);
        lx.expect('.');
      } else if (head == "rule") {
        ProtocolRule rule;
        rule.from = state_term();
        lx.expect(':');
        rule.recv = recv_or_send("recv");
        lx.expect('-');
        lx.expect('>');
        rule.to = state_term();
        lx.expect(':');
        rule.send = recv_or_send("send");
        lx.expect('.');
        // Single blind copying: at most one distinct variable per rule.
        std::set<int> vars;
        auto scan = [&](TermId t) {
          for (int v : w.term_fv(t)) vars.insert(v);
        };
        scan(rule.from);
        scan(rule.to);
        if (rule.recv) scan(*rule.recv);
        if (rule.send) scan(*rule.send);
        if (vars.size() > 1)
          throw ParseError(line, col,
                           "rule uses more than one distinct variable");
        spec.cp_edges.push_back({w.term_fun(rule.from), w.term_fun(rule.to)});
        spec.rules.push_back(rule);
      } else if (head == "advfun") {
        std::string name = lx.ident();
        lx.expect('/');
        int arity = lx.number();
        lx.expect('.');
        spec.adv_funs.push_back({w.fun(name, arity), arity});
      } else if (head == "secret") {
        TermId m = message();
        lx.expect('.');
        if (!w.ground(m))
          throw ParseError(line, col, "secret must be a ground message");
        spec.secret = m;
      } else {
        throw ParseError(line, col, "unknown declaration '" + head + "'");
      }
    }
    // Control-point order: the declared edges must be acyclic.
    std::map<FunId, std::vector<FunId>> succ;
    for (auto [a, b] : spec.cp_edges) {
      if (a == b) throw InputError("control point order is reflexive at " +
                                   w.fun_name(a));
      succ[a].push_back(b);
    }
    std::map<FunId, int> mark;
    std::function<void(FunId)> visit = [&](FunId f) {
      if (mark[f] == 2) return;
      if (mark[f] == 1)
        throw InputError("control point order has a cycle at " +
                         w.fun_name(f));
      mark[f] = 1;
      for (FunId g : succ[f]) visit(g);
      mark[f] = 2;
    };
    for (auto& [f, _] : succ) visit(f);
    for (const std::string& name : public_names)
      spec.public_data.push_back(w.app(*w.find_fun(name), {}));
    return spec;
  }
};

}  // namespace

FunId enc_fun(World& w) { return w.fun("enc", 2); }
FunId pair_fun(World& w) { return w.fun("pair", 2); }
TermId none_term(World& w) { return w.app(w.fun("none", 0), {}); }

ProtocolSpec parse_protocol(World& w, std::string_view text) {
  ProtoParser parser(w, text);
  return parser.parse();
}

std::vector<Clause> compile_to_horn(World& w, const ProtocolSpec& spec,
                                    TermId secret) {
  PredId reach = w.pred("reach", 1);
  PredId known = w.pred("known", 1);
  FunId enc = enc_fun(w);
  FunId pr = pair_fun(w);
  TermId x1 = w.var(1), x2 = w.var(2);
  TermId dummy = none_term(w);

  std::vector<Clause> out;
  auto clause = [&](std::initializer_list<LitId> lits) {
    Clause c(lits);
    normalize_clause(c);
    out.push_back(std::move(c));
  };
  auto pos = [&](PredId p, TermId t) { return make_lit(w.atom(p, {t}), false); };
  auto neg = [&](PredId p, TermId t) { return make_lit(w.atom(p, {t}), true); };

  for (TermId st : spec.init_states) clause({pos(reach, st)});
  for (const ProtocolRule& rule : spec.rules) {
    TermId recv = rule.recv.value_or(dummy);
    TermId send = rule.send.value_or(dummy);
    clause({pos(known, send), neg(reach, rule.from), neg(known, recv)});
    clause({pos(reach, rule.to), neg(reach, rule.from), neg(known, recv)});
  }

  // Adversary theory: encryption and pairing always; generic decryption
  // only when no asymmetric pairs are declared, per-pair decryption
  // otherwise.
  TermId enc12 = w.app(enc, {x1, x2});
  TermId pair12 = w.app(pr, {x1, x2});
  clause({pos(known, enc12), neg(known, x1), neg(known, x2)});
  clause({pos(known, pair12), neg(known, x1), neg(known, x2)});
  clause({pos(known, x1), neg(known, pair12)});
  clause({pos(known, x2), neg(known, pair12)});
  if (spec.keypairs.empty()) {
    clause({pos(known, x1), neg(known, enc12), neg(known, x2)});
  } else {
    for (auto [key, inv] : spec.keypairs) {
      clause({pos(known, x1), neg(known, w.app(enc, {x1, key})),
              neg(known, inv)});
    }
  }
  for (auto [f, arity] : spec.adv_funs) {
    std::vector<TermId> args;
    Clause c;
    for (int i = 1; i <= arity; ++i) args.push_back(w.var(i));
    c.push_back(make_lit(w.atom(known, {w.app(f, args)}), false));
    for (TermId a : args) c.push_back(make_lit(w.atom(known, {a}), true));
    normalize_clause(c);
    out.push_back(std::move(c));
  }
  for (TermId pub : spec.public_data) clause({pos(known, pub)});
  clause({pos(known, dummy)});
  clause({neg(known, secret)});
  return out;
}

const char* secrecy_name(Secrecy s) {
  switch (s) {
    case Secrecy::Secret: return "secret";
    case Secrecy::Leak: return "leak";
    case Secrecy::Unknown: return "unknown";
  }
  return "?";
}

Secrecy check_secrecy(World& w, const ProtocolSpec& spec, TermId secret,
                      const EngineOptions& opt) {
  std::vector<Clause> horn = compile_to_horn(w, spec, secret);
  switch (decide_c_horn(w, horn, opt)) {
    case Verdict::Unsat: return Secrecy::Leak;
    case Verdict::Sat: return Secrecy::Secret;
    case Verdict::Unknown: return Secrecy::Unknown;
  }
  return Secrecy::Unknown;
}

}  // namespace blindcopy
