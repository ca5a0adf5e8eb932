#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "blindcopy/apds.hpp"
#include "blindcopy/classify.hpp"
#include "blindcopy/engine.hpp"
#include "blindcopy/normalize.hpp"
#include "blindcopy/onevar.hpp"
#include "blindcopy/protocol.hpp"
#include "blindcopy/saturate.hpp"
#include "blindcopy/term.hpp"
#include "blindcopy/text.hpp"

namespace bc = blindcopy;

namespace {

// Exit codes: 0 sat/secret/success, 1 unsat/leak, 2 unknown or budget,
// 64 usage error, 65 parse error.
constexpr int kExitSat = 0;
constexpr int kExitUnsat = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;
constexpr int kExitParse = 65;

int verdict_exit(bc::Verdict v) {
  switch (v) {
    case bc::Verdict::Sat: return kExitSat;
    case bc::Verdict::Unsat: return kExitUnsat;
    case bc::Verdict::Unknown: return kExitUnknown;
  }
  return kExitUnknown;
}

std::optional<std::chrono::steady_clock::time_point> deadline_from(
    double seconds) {
  if (seconds <= 0) return std::nullopt;
  return std::chrono::steady_clock::now() +
         std::chrono::milliseconds(static_cast<long>(seconds * 1000));
}

// One-variable pipeline: encode away n-ary predicates, decompose and split,
// then saturate each branch.
bc::Verdict run_onevar(bc::World& w, const std::vector<bc::Clause>& input,
                       const bc::SaturateOptions& sopt) {
  for (const bc::Clause& c : input)
    if (!bc::is_onevar_clause(w, c))
      throw bc::InputError("not a one-variable clause: " + w.show_clause(c));
  std::vector<bc::Clause> unary = bc::unarize(w, input);
  auto branches = bc::preprocess_onevar(w, unary);
  bool unknown = false;
  for (const auto& branch : branches) {
    bc::Verdict v = bc::decide_onevar(w, branch, sopt);
    if (v == bc::Verdict::Sat) return bc::Verdict::Sat;
    if (v == bc::Verdict::Unknown) unknown = true;
  }
  return unknown ? bc::Verdict::Unknown : bc::Verdict::Unsat;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saturation-based decision procedures for flat and "
               "one-variable clause sets, with a protocol secrecy front end"};
  app.require_subcommand(1);
  unsigned seed = 0;
  app.add_option("--seed", seed, "RNG seed for generator-based commands");

  std::string file, term_text, goal_text, emit_path, procedure = "auto",
                                                     via = "horn";
  int depth = 3;
  double budget = 0;
  bool trace = false, preprocess = false;

  CLI::App* classify = app.add_subcommand("classify", "print per-clause tags");
  classify->add_option("file", file)->required();
  classify->add_flag("--preprocess", preprocess,
                     "emit the flat/one-variable form instead");

  CLI::App* decompose =
      app.add_subcommand("decompose", "print the factorization of a term");
  decompose->add_option("term", term_text)->required();

  CLI::App* sat = app.add_subcommand("sat", "decide satisfiability");
  sat->add_option("file", file)->required();
  sat->add_option("--procedure", procedure,
                  "onevar|flat|c|c-horn|oracle|auto");
  sat->add_option("--depth", depth, "instantiation depth for the oracle");
  sat->add_option("--budget", budget, "time budget in seconds");
  sat->add_flag("--trace", trace, "print the derivation log");

  CLI::App* secrecy = app.add_subcommand("secrecy", "decide protocol secrecy");
  secrecy->add_option("file", file)->required();
  secrecy->add_option("--procedure", procedure, "c-horn|normalize");
  secrecy->add_option("--budget", budget, "time budget in seconds");
  secrecy->add_flag("--trace", trace, "print the derivation log");

  CLI::App* apds = app.add_subcommand("apds", "pushdown system reachability");
  apds->add_option("file", file)->required();
  apds->add_option("--goal", goal_text, "ground goal atom, e.g. 'P(a)'")
      ->required();
  apds->add_option("--depth", depth, "fixpoint depth bound");
  apds->add_option("--via", via, "horn|protocol|fixpoint");

  CLI::App* normalize =
      app.add_subcommand("normalize", "saturate into normal clauses");
  normalize->add_option("file", file)->required();
  normalize->add_option("--emit", emit_path, "write the result to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  bc::World w;
  try {
    if (*classify) {
      std::vector<bc::Clause> cs = bc::parse_clauses(w, bc::read_file(file));
      if (preprocess) {
        std::vector<bc::Clause> flat = bc::c_to_flat_onevar(w, cs);
        std::cout << bc::write_clause_file(w, flat);
        return kExitSat;
      }
      for (const bc::Clause& c : cs)
        std::cout << bc::clause_class_name(bc::classify(w, c)) << "\t"
                  << w.show_clause(c) << "\n";
      return kExitSat;
    }
    if (*decompose) {
      bc::TermId t = bc::parse_term_inferring(w, term_text);
      for (bc::TermId part : bc::decompose(w, t))
        std::cout << w.show(part) << "\n";
      return kExitSat;
    }
    if (*sat) {
      std::vector<bc::Clause> cs = bc::parse_clauses(w, bc::read_file(file));
      bc::DerivationLog log;
      bc::EngineOptions eopt;
      eopt.deadline = deadline_from(budget);
      if (trace) eopt.log = &log;
      bc::SaturateOptions sopt;
      sopt.deadline = eopt.deadline;
      if (trace) sopt.log = &log;
      if (procedure == "auto") {
        bool horn = true;
        for (const bc::Clause& c : cs) {
          int pos = 0;
          for (bc::LitId l : c)
            if (!bc::lit_neg(l)) ++pos;
          if (pos > 1) horn = false;
        }
        procedure = horn ? "c-horn" : "c";
      }
      bc::Verdict v;
      if (procedure == "onevar") {
        v = run_onevar(w, cs, sopt);
      } else if (procedure == "flat") {
        v = bc::decide_flat(w, cs, eopt);
      } else if (procedure == "c") {
        v = bc::decide_c(w, cs, eopt);
      } else if (procedure == "c-horn") {
        v = bc::decide_c_horn(w, cs, eopt);
      } else if (procedure == "oracle") {
        v = bc::ground_saturation_oracle(w, cs, depth);
      } else {
        std::cerr << "error: unknown procedure '" << procedure << "'\n";
        return kExitUsage;
      }
      if (trace) std::cout << log.render(w);
      std::cout << bc::verdict_name(v) << "\n";
      return verdict_exit(v);
    }
    if (*secrecy) {
      bc::ProtocolSpec spec = bc::parse_protocol(w, bc::read_file(file));
      if (spec.secret == bc::kNoTerm)
        throw bc::InputError("protocol file declares no secret");
      if (procedure == "normalize") {
        std::vector<bc::Clause> horn =
            bc::compile_to_horn(w, spec, spec.secret);
        bc::NormalSet n = bc::normalize(w, horn);
        bool leak =
            bc::accepts(w, n, n.state_of(w.pred("known", 1)), spec.secret);
        std::cout << (leak ? "leak" : "secret") << "\n";
        return leak ? kExitUnsat : kExitSat;
      }
      bc::DerivationLog log;
      bc::EngineOptions eopt;
      eopt.deadline = deadline_from(budget);
      if (trace) eopt.log = &log;
      bc::Secrecy s = bc::check_secrecy(w, spec, spec.secret, eopt);
      if (trace) std::cout << log.render(w);
      std::cout << bc::secrecy_name(s) << "\n";
      if (s == bc::Secrecy::Secret) return kExitSat;
      return s == bc::Secrecy::Leak ? kExitUnsat : kExitUnknown;
    }
    if (*apds) {
      std::vector<bc::Clause> cs = bc::parse_clauses(w, bc::read_file(file));
      bc::Apds a = bc::make_apds(w, cs);
      bc::AtomId goal = bc::parse_atom(w, goal_text);
      if (via == "fixpoint") {
        bool closed = false;
        bc::Reach r = bc::apds_reach_fixpoint(w, a, goal, depth, &closed);
        if (r == bc::Reach::Reachable) {
          std::cout << "reachable\n";
          return kExitUnsat;
        }
        std::cout << (closed ? "unreachable\n" : "unknown\n");
        return closed ? kExitSat : kExitUnknown;
      }
      if (via == "horn") {
        bc::Verdict v = bc::decide_c_horn(w, bc::apds_to_horn(w, a, goal));
        std::cout << (v == bc::Verdict::Unsat
                          ? "reachable"
                          : v == bc::Verdict::Sat ? "unreachable" : "unknown")
                  << "\n";
        return verdict_exit(v == bc::Verdict::Unsat
                                ? bc::Verdict::Unsat
                                : v);
      }
      if (via == "protocol") {
        auto [spec, secret] = bc::apds_to_protocol(w, a, goal);
        bc::Secrecy s = bc::check_secrecy(w, spec, secret);
        std::cout << (s == bc::Secrecy::Leak
                          ? "reachable"
                          : s == bc::Secrecy::Secret ? "unreachable"
                                                     : "unknown")
                  << "\n";
        if (s == bc::Secrecy::Leak) return kExitUnsat;
        return s == bc::Secrecy::Secret ? kExitSat : kExitUnknown;
      }
      std::cerr << "error: unknown --via '" << via << "'\n";
      return kExitUsage;
    }
    if (*normalize) {
      std::vector<bc::Clause> cs = bc::parse_clauses(w, bc::read_file(file));
      bc::NormalSet n = bc::normalize(w, cs);
      std::string out = bc::write_clause_file(w, n.clauses);
      if (emit_path.empty()) {
        std::cout << out;
      } else {
        std::ofstream f(emit_path);
        if (!f) throw bc::InputError("cannot write " + emit_path);
        f << out;
      }
      return kExitSat;
    }
  } catch (const bc::ParseError& e) {
    std::cerr << "error: " << file << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const bc::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnknown;
  } catch (const bc::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const bc::InternalError& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 70;
  }
  return kExitUsage;
}
