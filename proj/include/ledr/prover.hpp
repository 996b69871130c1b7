#pragma once
// Backward cut-free proof search for the display calculus of an LE signature,
// and a forward checker for its derivation trees. Cut is not part of the
// search or the checker.
//
// The search explores display-equivalence classes of the goal: on each class
// member it tries the axioms, then the single-premise unfoldings, then the
// branching logical rules, then the two weakening-style structural rules.
// A per-branch visited set stops display cycles; failures are memoized only
// when they did not depend on that loop check.

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ledr/display.hpp"
#include "ledr/syntax.hpp"

namespace ledr {

enum class ProofRule : uint8_t {
  Id,
  TopW,
  BotW,
  TopL,
  TopR,
  BotL,
  BotR,
  AndL1,
  AndL2,
  AndR,
  OrL,
  OrR1,
  OrR2,
  FL,
  FR,
  GL,
  GR,
  Display,
};

inline const char* to_string(ProofRule r) {
  switch (r) {
    case ProofRule::Id: return "Id";
    case ProofRule::TopW: return "⊤_W";
    case ProofRule::BotW: return "⊥_W";
    case ProofRule::TopL: return "⊤_L";
    case ProofRule::TopR: return "⊤_R";
    case ProofRule::BotL: return "⊥_L";
    case ProofRule::BotR: return "⊥_R";
    case ProofRule::AndL1: return "∧_L1";
    case ProofRule::AndL2: return "∧_L2";
    case ProofRule::AndR: return "∧_R";
    case ProofRule::OrL: return "∨_L";
    case ProofRule::OrR1: return "∨_R1";
    case ProofRule::OrR2: return "∨_R2";
    case ProofRule::FL: return "f_L";
    case ProofRule::FR: return "f_R";
    case ProofRule::GL: return "g_L";
    case ProofRule::GR: return "g_R";
    case ProofRule::Display: return "display";
  }
  return "?";
}

struct DerivationTree {
  Sequent conclusion;
  ProofRule rule = ProofRule::Id;
  std::optional<DisplayMove> move;  // Display nodes only
  std::vector<DerivationTree> premises;
};

namespace detail {

// eps-directed sequent: X |-^eps Y is X |- Y when eps = 1 and Y |- X when
// eps = d. Both engines build premises through this.
inline Sequent directed(const StructurePtr& x, const StructurePtr& y,
                        Tonicity eps, Turnstile kind) {
  if (eps == Tonicity::Mono) return Sequent{x, y, kind};
  return Sequent{y, x, kind};
}

inline std::vector<StructurePtr> formula_leaves(
    const std::vector<FormulaPtr>& fs) {
  std::vector<StructurePtr> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(Structure::leaf(f));
  return out;
}

}  // namespace detail

// --- Forward checking ---------------------------------------------------------

namespace detail {
inline bool check_derivation_node(const DerivationTree& t,
                                  const Signature& sig) {
  const Sequent& c = t.conclusion;
  if (c.kind != Turnstile::Proves) return false;
  for (const DerivationTree& p : t.premises)
    if (!check_derivation_node(p, sig)) return false;
  auto prem = [&](size_t i) -> const Sequent& {
    return t.premises[i].conclusion;
  };
  auto arity_ok = [&](size_t n) { return t.premises.size() == n; };

  switch (t.rule) {
    case ProofRule::Id:
      return arity_ok(0) && is_atom_leaf(c.pre) && is_atom_leaf(c.suc) &&
             c.pre->formula->label == c.suc->formula->label;
    case ProofRule::TopR:
      return arity_ok(0) && c.pre->kind == Structure::Kind::StructTop &&
             is_formula_kind(c.suc, Formula::Kind::Top);
    case ProofRule::BotL:
      return arity_ok(0) && is_formula_kind(c.pre, Formula::Kind::Bot) &&
             c.suc->kind == Structure::Kind::StructBot;
    case ProofRule::TopW:
      return arity_ok(1) && prem(0).pre->kind == Structure::Kind::StructTop &&
             equal(prem(0).suc, c.suc);
    case ProofRule::BotW:
      return arity_ok(1) && prem(0).suc->kind == Structure::Kind::StructBot &&
             equal(prem(0).pre, c.pre);
    case ProofRule::TopL:
      return arity_ok(1) && is_formula_kind(c.pre, Formula::Kind::Top) &&
             prem(0).pre->kind == Structure::Kind::StructTop &&
             equal(prem(0).suc, c.suc);
    case ProofRule::BotR:
      return arity_ok(1) && is_formula_kind(c.suc, Formula::Kind::Bot) &&
             prem(0).suc->kind == Structure::Kind::StructBot &&
             equal(prem(0).pre, c.pre);
    case ProofRule::AndL1:
    case ProofRule::AndL2: {
      if (!arity_ok(1) || !is_formula_kind(c.pre, Formula::Kind::And))
        return false;
      const FormulaPtr& pick =
          c.pre->formula->args[t.rule == ProofRule::AndL1 ? 0 : 1];
      return equal(prem(0).pre, Structure::leaf(pick)) &&
             equal(prem(0).suc, c.suc);
    }
    case ProofRule::OrR1:
    case ProofRule::OrR2: {
      if (!arity_ok(1) || !is_formula_kind(c.suc, Formula::Kind::Or))
        return false;
      const FormulaPtr& pick =
          c.suc->formula->args[t.rule == ProofRule::OrR1 ? 0 : 1];
      return equal(prem(0).suc, Structure::leaf(pick)) &&
             equal(prem(0).pre, c.pre);
    }
    case ProofRule::AndR: {
      if (!arity_ok(2) || !is_formula_kind(c.suc, Formula::Kind::And))
        return false;
      const auto& args = c.suc->formula->args;
      return equal(prem(0).pre, c.pre) && equal(prem(1).pre, c.pre) &&
             equal(prem(0).suc, Structure::leaf(args[0])) &&
             equal(prem(1).suc, Structure::leaf(args[1]));
    }
    case ProofRule::OrL: {
      if (!arity_ok(2) || !is_formula_kind(c.pre, Formula::Kind::Or))
        return false;
      const auto& args = c.pre->formula->args;
      return equal(prem(0).suc, c.suc) && equal(prem(1).suc, c.suc) &&
             equal(prem(0).pre, Structure::leaf(args[0])) &&
             equal(prem(1).pre, Structure::leaf(args[1]));
    }
    case ProofRule::FL: {
      if (!arity_ok(1) || !is_formula_kind(c.pre, Formula::Kind::App))
        return false;
      const Connective& conn = sig.at(c.pre->formula->label);
      if (conn.family != Family::F || conn.residual) return false;
      StructurePtr hat = Structure::app(
          conn.name, detail::formula_leaves(c.pre->formula->args));
      return equal(prem(0).pre, hat) && equal(prem(0).suc, c.suc);
    }
    case ProofRule::GR: {
      if (!arity_ok(1) || !is_formula_kind(c.suc, Formula::Kind::App))
        return false;
      const Connective& conn = sig.at(c.suc->formula->label);
      if (conn.family != Family::G || conn.residual) return false;
      StructurePtr chk = Structure::app(
          conn.name, detail::formula_leaves(c.suc->formula->args));
      return equal(prem(0).suc, chk) && equal(prem(0).pre, c.pre);
    }
    case ProofRule::FR: {
      // ^f(Y1..Yn) |- f(phi1..phin), premises Yi |-^eps(i) phii in order
      if (c.pre->kind != Structure::Kind::App ||
          !is_formula_kind(c.suc, Formula::Kind::App))
        return false;
      if (c.pre->conn != c.suc->formula->label) return false;
      const Connective& conn = sig.at(c.pre->conn);
      if (conn.family != Family::F || conn.residual) return false;
      if (!arity_ok(static_cast<size_t>(conn.arity()))) return false;
      for (int i = 0; i < conn.arity(); ++i) {
        Sequent want = detail::directed(c.pre->args[i],
                                        Structure::leaf(c.suc->formula->args[i]),
                                        conn.order_type[i], Turnstile::Proves);
        if (!(prem(i) == want)) return false;
      }
      return true;
    }
    case ProofRule::GL: {
      if (c.suc->kind != Structure::Kind::App ||
          !is_formula_kind(c.pre, Formula::Kind::App))
        return false;
      if (c.suc->conn != c.pre->formula->label) return false;
      const Connective& conn = sig.at(c.suc->conn);
      if (conn.family != Family::G || conn.residual) return false;
      if (!arity_ok(static_cast<size_t>(conn.arity()))) return false;
      for (int i = 0; i < conn.arity(); ++i) {
        Sequent want = detail::directed(Structure::leaf(c.pre->formula->args[i]),
                                        c.suc->args[i], conn.order_type[i],
                                        Turnstile::Proves);
        if (!(prem(i) == want)) return false;
      }
      return true;
    }
    case ProofRule::Display: {
      if (!arity_ok(1) || !t.move) return false;
      auto r = apply_move(prem(0), *t.move, sig);
      return r && *r == c;
    }
  }
  return false;
}
}  // namespace detail

// True iff every node instantiates its rule schema exactly. Cut is not a
// recognized rule. Malformed trees are rejected, never thrown on.
inline bool check_derivation(const DerivationTree& t, const Signature& sig) {
  try {
    return detail::check_derivation_node(t, sig);
  } catch (const Error&) {
    return false;
  }
}

// --- Backward search ------------------------------------------------------------

struct ProverOptions {
  long depth_limit = 4096;   // hard backstop, must not fire on sane inputs
  long node_limit = 4000000; // search size backstop
};

struct SearchLimitError : Error {
  using Error::Error;
};

namespace detail {

class ProofSearch {
 public:
  ProofSearch(const Signature& sig, ProverOptions opt) : sig_(sig), opt_(opt) {}

  std::optional<DerivationTree> run(const Sequent& goal) {
    std::unordered_set<Sequent, SequentHash> path;
    Outcome out = search(goal, path, 0);
    if (out.state == State::Proved) return std::move(out.tree);
    if (out.limited)
      throw SearchLimitError("proof search hit the depth limit");
    return std::nullopt;
  }

 private:
  enum class State { Proved, Failed, Blocked };
  struct Outcome {
    State state;
    bool limited = false;  // some branch hit the hard depth limit
    DerivationTree tree;
  };

  Outcome search(const Sequent& goal, std::unordered_set<Sequent, SequentHash>& path,
                 long depth) {
    if (auto it = proved_.find(goal); it != proved_.end())
      return {State::Proved, false, it->second};
    if (failed_.count(goal)) return {State::Failed, false, {}};
    if (path.count(goal)) return {State::Blocked, false, {}};
    if (depth > opt_.depth_limit || ++nodes_ > opt_.node_limit)
      return {State::Failed, true, {}};

    path.insert(goal);
    bool tainted = false;
    std::optional<DerivationTree> found;

    std::vector<Sequent> members{goal};
    std::vector<std::vector<DisplayMove>> paths{{}};
    expand_class(goal, members, paths);

    for (size_t mi = 0; mi < members.size() && !found; ++mi) {
      const Sequent& m = members[mi];
      auto finish = [&](DerivationTree core) {
        found = wrap_display(goal, members[mi], paths[mi], std::move(core));
      };

      // axioms
      if (is_atom_leaf(m.pre) && is_atom_leaf(m.suc) &&
          m.pre->formula->label == m.suc->formula->label) {
        finish(DerivationTree{m, ProofRule::Id, {}, {}});
        break;
      }
      if (m.pre->kind == Structure::Kind::StructTop &&
          is_formula_kind(m.suc, Formula::Kind::Top)) {
        finish(DerivationTree{m, ProofRule::TopR, {}, {}});
        break;
      }
      if (is_formula_kind(m.pre, Formula::Kind::Bot) &&
          m.suc->kind == Structure::Kind::StructBot) {
        finish(DerivationTree{m, ProofRule::BotL, {}, {}});
        break;
      }

      // candidate backward steps on this member, in priority order
      struct Step {
        ProofRule rule;
        std::vector<Sequent> premises;
      };
      std::vector<Step> steps;

      if (is_formula_kind(m.pre, Formula::Kind::App)) {
        const Connective& c = sig_.at(m.pre->formula->label);
        if (c.family == Family::F && !c.residual)
          steps.push_back({ProofRule::FL,
                           {Sequent{Structure::app(c.name,
                                                   formula_leaves(m.pre->formula->args)),
                                    m.suc, m.kind}}});
      }
      if (is_formula_kind(m.suc, Formula::Kind::App)) {
        const Connective& c = sig_.at(m.suc->formula->label);
        if (c.family == Family::G && !c.residual)
          steps.push_back({ProofRule::GR,
                           {Sequent{m.pre,
                                    Structure::app(c.name,
                                                   formula_leaves(m.suc->formula->args)),
                                    m.kind}}});
      }
      if (is_formula_kind(m.pre, Formula::Kind::Top))
        steps.push_back(
            {ProofRule::TopL, {Sequent{Structure::struct_top(), m.suc, m.kind}}});
      if (is_formula_kind(m.suc, Formula::Kind::Bot))
        steps.push_back(
            {ProofRule::BotR, {Sequent{m.pre, Structure::struct_bot(), m.kind}}});

      if (is_formula_kind(m.pre, Formula::Kind::And)) {
        const auto& args = m.pre->formula->args;
        steps.push_back({ProofRule::AndL1,
                         {Sequent{Structure::leaf(args[0]), m.suc, m.kind}}});
        steps.push_back({ProofRule::AndL2,
                         {Sequent{Structure::leaf(args[1]), m.suc, m.kind}}});
      }
      if (is_formula_kind(m.suc, Formula::Kind::Or)) {
        const auto& args = m.suc->formula->args;
        steps.push_back({ProofRule::OrR1,
                         {Sequent{m.pre, Structure::leaf(args[0]), m.kind}}});
        steps.push_back({ProofRule::OrR2,
                         {Sequent{m.pre, Structure::leaf(args[1]), m.kind}}});
      }
      if (is_formula_kind(m.suc, Formula::Kind::And)) {
        const auto& args = m.suc->formula->args;
        steps.push_back({ProofRule::AndR,
                         {Sequent{m.pre, Structure::leaf(args[0]), m.kind},
                          Sequent{m.pre, Structure::leaf(args[1]), m.kind}}});
      }
      if (is_formula_kind(m.pre, Formula::Kind::Or)) {
        const auto& args = m.pre->formula->args;
        steps.push_back({ProofRule::OrL,
                         {Sequent{Structure::leaf(args[0]), m.suc, m.kind},
                          Sequent{Structure::leaf(args[1]), m.suc, m.kind}}});
      }
      // f_R / g_L on matching structural and operational heads
      if (m.pre->kind == Structure::Kind::App &&
          is_formula_kind(m.suc, Formula::Kind::App) &&
          m.pre->conn == m.suc->formula->label) {
        const Connective& c = sig_.at(m.pre->conn);
        if (c.family == Family::F && !c.residual) {
          Step st{ProofRule::FR, {}};
          for (int i = 0; i < c.arity(); ++i)
            st.premises.push_back(
                directed(m.pre->args[i], Structure::leaf(m.suc->formula->args[i]),
                         c.order_type[i], m.kind));
          steps.push_back(std::move(st));
        }
      }
      if (m.suc->kind == Structure::Kind::App &&
          is_formula_kind(m.pre, Formula::Kind::App) &&
          m.suc->conn == m.pre->formula->label) {
        const Connective& c = sig_.at(m.suc->conn);
        if (c.family == Family::G && !c.residual) {
          Step st{ProofRule::GL, {}};
          for (int i = 0; i < c.arity(); ++i)
            st.premises.push_back(
                directed(Structure::leaf(m.pre->formula->args[i]), m.suc->args[i],
                         c.order_type[i], m.kind));
          steps.push_back(std::move(st));
        }
      }
      // weakening-style structural rules, last
      if (m.pre->kind != Structure::Kind::StructTop)
        steps.push_back(
            {ProofRule::TopW, {Sequent{Structure::struct_top(), m.suc, m.kind}}});
      if (m.suc->kind != Structure::Kind::StructBot)
        steps.push_back(
            {ProofRule::BotW, {Sequent{m.pre, Structure::struct_bot(), m.kind}}});

      for (Step& st : steps) {
        std::vector<DerivationTree> subs;
        bool ok = true;
        for (const Sequent& p : st.premises) {
          Outcome out = search(p, path, depth + 1);
          if (out.limited) tainted = true;
          if (out.state == State::Blocked) tainted = true;
          if (out.state != State::Proved) {
            ok = false;
            break;
          }
          subs.push_back(std::move(out.tree));
        }
        if (ok) {
          finish(DerivationTree{m, st.rule, {}, std::move(subs)});
          break;
        }
      }
    }

    path.erase(goal);
    if (found) {
      proved_.emplace(goal, *found);
      return {State::Proved, false, std::move(*found)};
    }
    if (!tainted) failed_.insert(goal);
    return {tainted ? State::Blocked : State::Failed, false, {}};
  }

  void expand_class(const Sequent& s, std::vector<Sequent>& members,
                    std::vector<std::vector<DisplayMove>>& paths) {
    std::unordered_set<Sequent, SequentHash> seen{s};
    for (size_t i = 0; i < members.size(); ++i) {
      for (auto& [mv, n] : display_neighbors(members[i], sig_)) {
        if (!seen.insert(n).second) continue;
        std::vector<DisplayMove> p = paths[i];
        p.push_back(mv);
        members.push_back(n);
        paths.push_back(std::move(p));
      }
    }
  }

  // Wrap `core` (conclusion = member) in display nodes back to the goal.
  DerivationTree wrap_display(const Sequent& goal, const Sequent& member,
                              const std::vector<DisplayMove>& moves,
                              DerivationTree core) {
    DerivationTree cur = std::move(core);
    Sequent at = member;
    for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
      auto back = apply_move(at, it->inverse(), sig_);
      if (!back) throw Error("display path failed to reverse");
      DerivationTree node{*back, ProofRule::Display, it->inverse(), {}};
      node.premises.push_back(std::move(cur));
      cur = std::move(node);
      at = *back;
    }
    if (!(at == goal)) throw Error("display path did not return to the goal");
    return cur;
  }

  const Signature& sig_;
  ProverOptions opt_;
  long nodes_ = 0;
  std::unordered_map<Sequent, DerivationTree, SequentHash> proved_;
  std::unordered_set<Sequent, SequentHash> failed_;
};

}  // namespace detail

// Cut-free backward proof search. The input must be residual-free; the
// result, when present, passes check_derivation.
inline std::optional<DerivationTree> prove(const Sequent& s,
                                           const Signature& sig,
                                           ProverOptions opt = {}) {
  if (!residual_free(s, sig))
    throw Error("prove: input contains residuals");
  validate(s, sig);
  detail::ProofSearch search(sig, opt);
  return search.run(s.with_kind(Turnstile::Proves));
}

// --- Export ----------------------------------------------------------------------

inline void derivation_text(const DerivationTree& t, const Signature& sig,
                            std::string& out, int indent = 0) {
  out.append(indent * 2, ' ');
  out += to_string(t.conclusion, sig);
  out += "   [";
  out += to_string(t.rule);
  if (t.move) out += " " + to_string(*t.move, sig);
  out += "]\n";
  for (const DerivationTree& p : t.premises)
    derivation_text(p, sig, out, indent + 1);
}

inline std::string to_text(const DerivationTree& t, const Signature& sig) {
  std::string out;
  derivation_text(t, sig, out);
  return out;
}

inline nlohmann::json to_json(const DerivationTree& t, const Signature& sig) {
  nlohmann::json j;
  j["sequent"] = to_string(t.conclusion, sig);
  j["rule"] = to_string(t.rule);
  if (t.move) j["move"] = to_string(*t.move, sig);
  nlohmann::json prems = nlohmann::json::array();
  for (const DerivationTree& p : t.premises) prems.push_back(to_json(p, sig));
  j["premises"] = prems;
  return j;
}

namespace detail {
inline void derivation_dot(const DerivationTree& t, const Signature& sig,
                           std::string& out, int& id) {
  int me = id++;
  out += "  n" + std::to_string(me) + " [label=\"" + to_string(t.conclusion, sig) +
         "\\n" + to_string(t.rule) + "\"];\n";
  for (const DerivationTree& p : t.premises) {
    int child = id;
    derivation_dot(p, sig, out, id);
    out += "  n" + std::to_string(me) + " -> n" + std::to_string(child) + ";\n";
  }
}
}  // namespace detail

inline std::string to_dot(const DerivationTree& t, const Signature& sig) {
  std::string out = "digraph derivation {\n  node [shape=box];\n";
  int id = 0;
  detail::derivation_dot(t, sig, out, id);
  out += "}\n";
  return out;
}

}  // namespace ledr
