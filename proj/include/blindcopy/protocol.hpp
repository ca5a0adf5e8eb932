#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blindcopy/engine.hpp"
#include "blindcopy/term.hpp"

namespace blindcopy {

/// A state-transition rule: an agent in state `from` receiving `recv` moves
/// to state `to` and sends `send`. Absent messages stand for the dummy
/// "nothing", replaced by a public constant during compilation. The whole
/// rule carries at most one distinct variable.
struct ProtocolRule {
  TermId from;
  TermId to;
  std::optional<TermId> recv;
  std::optional<TermId> send;
};

struct ProtocolSpec {
  std::vector<TermId> init_states;  // ground state terms
  std::vector<ProtocolRule> rules;
  std::vector<TermId> public_data;  // ground terms known to everyone
  std::vector<std::pair<FunId, int>> adv_funs;
  std::vector<std::pair<TermId, TermId>> keypairs;  // (key, inverse)
  TermId secret = kNoTerm;
  std::vector<std::pair<FunId, FunId>> cp_edges;  // control point order
};

/// Parse a protocol file:
///
///   agent a. agent b. agent i public.
///   const k. public c.
///   keypair k / kinv.
///   init Init0(a, n1ab).
///   rule Resp0(b, n2) : recv(enc(pair(a,x1), kb))
///     -> Resp1(b, x1, n2) : send(enc(pair(x1, n2), ka)).
///   advfun h/1.
///   secret n2.
///
/// `none` in recv/send positions stands for "nothing". Constants are
/// declared by agent/const/public/keypair lines; state symbols are declared
/// by use. Each rule may contain at most one distinct variable; init states
/// are ground; the control-point order must be a strict partial order.
ProtocolSpec parse_protocol(World& w, std::string_view text);

/// Builtin message constructors.
FunId enc_fun(World& w);
FunId pair_fun(World& w);
/// The public constant standing for the dummy message.
TermId none_term(World& w);

/// Translate the protocol into Horn clauses over reach/known, together
/// with the adversary theory and the negated secrecy goal. Every emitted
/// clause is one-variable or flat.
std::vector<Clause> compile_to_horn(World& w, const ProtocolSpec& spec,
                                    TermId secret);

enum class Secrecy { Secret, Leak, Unknown };
const char* secrecy_name(Secrecy s);

/// Leak iff the compiled clause set is unsatisfiable.
Secrecy check_secrecy(World& w, const ProtocolSpec& spec, TermId secret,
                      const EngineOptions& opt = {});

}  // namespace blindcopy
