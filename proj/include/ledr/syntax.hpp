#pragma once
// Formulas, structures and (anti)sequents, with the derived syntax machinery:
// printing, complexity, signed generation trees, the branching test, and
// positional substitution.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ledr/signature.hpp"

namespace ledr {

struct TypingError : Error {
  using Error::Error;
};

namespace detail {
inline size_t hash_combine(size_t seed, size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}
inline size_t hash_str(const std::string& s) {
  return std::hash<std::string>{}(s);
}
}  // namespace detail

// --- Formulas ---------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind : uint8_t { Atom, Top, Bot, And, Or, App };

  Kind kind;
  std::string label;  // atom name or connective name (App)
  std::vector<FormulaPtr> args;
  size_t hash = 0;

  static FormulaPtr atom(std::string name) {
    return make(Kind::Atom, std::move(name), {});
  }
  static FormulaPtr top() { return make(Kind::Top, "", {}); }
  static FormulaPtr bot() { return make(Kind::Bot, "", {}); }
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b) {
    return make(Kind::And, "", {std::move(a), std::move(b)});
  }
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b) {
    return make(Kind::Or, "", {std::move(a), std::move(b)});
  }
  static FormulaPtr app(std::string conn, std::vector<FormulaPtr> args) {
    return make(Kind::App, std::move(conn), std::move(args));
  }

  static FormulaPtr make(Kind k, std::string label,
                         std::vector<FormulaPtr> args) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->label = std::move(label);
    f->args = std::move(args);
    size_t h = detail::hash_combine(static_cast<size_t>(k) + 0x51,
                                    detail::hash_str(f->label));
    for (const auto& a : f->args) h = detail::hash_combine(h, a->hash);
    f->hash = h;
    return f;
  }
};

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->hash != b->hash || a->kind != b->kind || a->label != b->label ||
      a->args.size() != b->args.size())
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!equal(a->args[i], b->args[i])) return false;
  return true;
}

// --- Structures --------------------------------------------------------------

struct Structure;
using StructurePtr = std::shared_ptr<const Structure>;

// A structure tree: formulas are its leaves; the internal nodes are structural
// connectives. StructTop/StructBot are the structural constants of the two
// polarities; App nodes carry a name resolved in F* or G* of the signature.
struct Structure {
  enum class Kind : uint8_t { Leaf, StructTop, StructBot, App };

  Kind kind;
  FormulaPtr formula;  // Leaf only
  std::string conn;    // App only
  std::vector<StructurePtr> args;
  size_t hash = 0;

  static StructurePtr leaf(FormulaPtr f) {
    auto s = std::make_shared<Structure>();
    s->kind = Kind::Leaf;
    s->formula = std::move(f);
    s->hash = detail::hash_combine(0xA1, s->formula->hash);
    return s;
  }
  static StructurePtr struct_top() {
    auto s = std::make_shared<Structure>();
    s->kind = Kind::StructTop;
    s->hash = 0x709;
    return s;
  }
  static StructurePtr struct_bot() {
    auto s = std::make_shared<Structure>();
    s->kind = Kind::StructBot;
    s->hash = 0xB07;
    return s;
  }
  static StructurePtr app(std::string conn, std::vector<StructurePtr> args) {
    auto s = std::make_shared<Structure>();
    s->kind = Kind::App;
    s->conn = std::move(conn);
    s->args = std::move(args);
    size_t h = detail::hash_combine(0xAB, detail::hash_str(s->conn));
    for (const auto& a : s->args) h = detail::hash_combine(h, a->hash);
    s->hash = h;
    return s;
  }
};

inline bool equal(const StructurePtr& a, const StructurePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->hash != b->hash || a->kind != b->kind) return false;
  switch (a->kind) {
    case Structure::Kind::Leaf:
      return equal(a->formula, b->formula);
    case Structure::Kind::StructTop:
    case Structure::Kind::StructBot:
      return true;
    case Structure::Kind::App:
      if (a->conn != b->conn || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i])) return false;
      return true;
  }
  return false;
}

// --- Sequents ----------------------------------------------------------------

enum class Turnstile : uint8_t { Proves, Refutes };

struct Sequent {
  StructurePtr pre;
  StructurePtr suc;
  Turnstile kind = Turnstile::Proves;

  size_t hash() const {
    size_t h = detail::hash_combine(pre->hash, suc->hash);
    return detail::hash_combine(h, kind == Turnstile::Proves ? 1 : 2);
  }
  Sequent with_kind(Turnstile k) const { return Sequent{pre, suc, k}; }
};

inline bool operator==(const Sequent& a, const Sequent& b) {
  return a.kind == b.kind && equal(a.pre, b.pre) && equal(a.suc, b.suc);
}
inline bool operator!=(const Sequent& a, const Sequent& b) { return !(a == b); }

struct SequentHash {
  size_t operator()(const Sequent& s) const { return s.hash(); }
};

// --- Printing ----------------------------------------------------------------

namespace detail {
// precedence: 0 sequent level, 1 = |, 2 = &, 3 = atomic
inline void print_formula(std::string& out, const FormulaPtr& f, int parent) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      out += f->label;
      return;
    case Formula::Kind::Top:
      out += "top";
      return;
    case Formula::Kind::Bot:
      out += "bot";
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      bool is_and = f->kind == Formula::Kind::And;
      int prec = is_and ? 2 : 1;
      bool parens = prec < parent;
      if (parens) out += "(";
      print_formula(out, f->args[0], prec);
      out += is_and ? " & " : " | ";
      // right operand printed at prec+1 so nesting on the right keeps parens
      print_formula(out, f->args[1], prec + 1);
      if (parens) out += ")";
      return;
    }
    case Formula::Kind::App: {
      out += f->label;
      out += "(";
      for (size_t i = 0; i < f->args.size(); ++i) {
        if (i) out += ", ";
        print_formula(out, f->args[i], 0);
      }
      out += ")";
      return;
    }
  }
}
}  // namespace detail

inline std::string to_string(const FormulaPtr& f) {
  std::string out;
  detail::print_formula(out, f, 0);
  return out;
}

// Structural syntax: ^T / ~B for the structural constants, ^name(...) for
// F*-connectives, ~name(...) for G*-connectives.
inline std::string to_string(const StructurePtr& s, const Signature& sig) {
  switch (s->kind) {
    case Structure::Kind::Leaf:
      return to_string(s->formula);
    case Structure::Kind::StructTop:
      return "^T";
    case Structure::Kind::StructBot:
      return "~B";
    case Structure::Kind::App: {
      const Connective& c = sig.at(s->conn);
      std::string out = (c.family == Family::F ? "^" : "~") + s->conn + "(";
      for (size_t i = 0; i < s->args.size(); ++i) {
        if (i) out += ", ";
        out += to_string(s->args[i], sig);
      }
      return out + ")";
    }
  }
  return {};
}

inline std::string to_string(const Sequent& s, const Signature& sig) {
  return to_string(s.pre, sig) +
         (s.kind == Turnstile::Proves ? " |- " : " -|/ ") +
         to_string(s.suc, sig);
}

// --- Shape helpers -----------------------------------------------------------

inline bool is_atom_leaf(const StructurePtr& s) {
  return s->kind == Structure::Kind::Leaf &&
         s->formula->kind == Formula::Kind::Atom;
}
inline bool is_formula_kind(const StructurePtr& s, Formula::Kind k) {
  return s->kind == Structure::Kind::Leaf && s->formula->kind == k;
}

// The leaf formula of an App node of the given family, if any.
inline const Connective* app_connective(const StructurePtr& s,
                                        const Signature& sig) {
  if (s->kind != Structure::Kind::App) return nullptr;
  return &sig.at(s->conn);
}

// --- Residual-freeness -------------------------------------------------------

inline bool residual_free(const FormulaPtr& f, const Signature& sig) {
  if (f->kind == Formula::Kind::App && sig.at(f->label).residual) return false;
  for (const auto& a : f->args)
    if (!residual_free(a, sig)) return false;
  return true;
}

inline bool residual_free(const StructurePtr& s, const Signature& sig) {
  switch (s->kind) {
    case Structure::Kind::Leaf:
      return residual_free(s->formula, sig);
    case Structure::Kind::StructTop:
    case Structure::Kind::StructBot:
      return true;
    case Structure::Kind::App:
      if (sig.at(s->conn).residual) return false;
      for (const auto& a : s->args)
        if (!residual_free(a, sig)) return false;
      return true;
  }
  return true;
}

inline bool residual_free(const Sequent& s, const Signature& sig) {
  return residual_free(s.pre, sig) && residual_free(s.suc, sig);
}

// --- Polarity typing ---------------------------------------------------------

// Checks the mutually recursive precedent/succedent grammars: a precedent
// structure is a formula, ^T, or an F*-connective node whose i-th argument is
// a precedent structure when eps(i)=1 and a succedent structure when
// eps(i)=d; dually for succedents.
inline void validate_formula(const FormulaPtr& f, const Signature& sig) {
  if (f->kind == Formula::Kind::App) {
    const Connective& c = sig.at(f->label);
    if (static_cast<int>(f->args.size()) != c.arity())
      throw TypingError("arity mismatch for " + f->label);
  }
  for (const auto& a : f->args) validate_formula(a, sig);
}

inline void validate_structure(const StructurePtr& s, bool precedent,
                               const Signature& sig) {
  switch (s->kind) {
    case Structure::Kind::Leaf:
      validate_formula(s->formula, sig);
      return;
    case Structure::Kind::StructTop:
      if (!precedent) throw TypingError("^T used in succedent position");
      return;
    case Structure::Kind::StructBot:
      if (precedent) throw TypingError("~B used in precedent position");
      return;
    case Structure::Kind::App: {
      const Connective& c = sig.at(s->conn);
      bool want_f = precedent;
      if ((c.family == Family::F) != want_f)
        throw TypingError("structural " + s->conn + " on the wrong side");
      if (static_cast<int>(s->args.size()) != c.arity())
        throw TypingError("arity mismatch for structural " + s->conn);
      for (int i = 0; i < c.arity(); ++i) {
        bool child_pre =
            c.order_type[i] == Tonicity::Mono ? precedent : !precedent;
        validate_structure(s->args[i], child_pre, sig);
      }
      return;
    }
  }
}

inline void validate(const Sequent& s, const Signature& sig) {
  validate_structure(s.pre, true, sig);
  validate_structure(s.suc, false, sig);
}

inline bool well_typed(const Sequent& s, const Signature& sig) {
  try {
    validate(s, sig);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// --- Complexity ---------------------------------------------------------------

// (# logical connectives) + (# connectives, logical and structural, nullary
// ones included) + 2 * (# atom occurrences). Atoms are not connectives.
namespace detail {
struct Counts {
  long logical = 0;
  long structural = 0;
  long atoms = 0;
};

inline void count(const FormulaPtr& f, Counts& c) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      c.atoms++;
      return;
    case Formula::Kind::Top:
    case Formula::Kind::Bot:
      c.logical++;
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::App:
      c.logical++;
      for (const auto& a : f->args) count(a, c);
      return;
  }
}

inline void count(const StructurePtr& s, Counts& c) {
  switch (s->kind) {
    case Structure::Kind::Leaf:
      count(s->formula, c);
      return;
    case Structure::Kind::StructTop:
    case Structure::Kind::StructBot:
      c.structural++;
      return;
    case Structure::Kind::App:
      c.structural++;
      for (const auto& a : s->args) count(a, c);
      return;
  }
}
}  // namespace detail

inline long complexity(const Sequent& s) {
  detail::Counts c;
  detail::count(s.pre, c);
  detail::count(s.suc, c);
  return 2 * c.logical + c.structural + 2 * c.atoms;
}

inline long connective_count(const Sequent& s) {
  detail::Counts c;
  detail::count(s.pre, c);
  detail::count(s.suc, c);
  return c.logical + c.structural;
}

inline long atom_count(const Sequent& s) {
  detail::Counts c;
  detail::count(s.pre, c);
  detail::count(s.suc, c);
  return c.atoms;
}

// --- Signed generation trees ---------------------------------------------------

// Node labels follow the printed syntax: "&", "|", "top", "bot", connective
// names, "^name"/"~name" for structural nodes, "^T", "~B", atom names.
struct SignedNode {
  std::string label;
  bool positive = true;
  bool structural = false;                  // structural connective node
  Formula::Kind formula_kind = Formula::Kind::Atom;  // meaningful when !structural
  std::vector<SignedNode> children;
};

namespace detail {
inline SignedNode signed_tree(const FormulaPtr& f, bool pos,
                              const Signature& sig) {
  SignedNode n;
  n.positive = pos;
  n.formula_kind = f->kind;
  switch (f->kind) {
    case Formula::Kind::Atom:
      n.label = f->label;
      return n;
    case Formula::Kind::Top:
      n.label = "top";
      return n;
    case Formula::Kind::Bot:
      n.label = "bot";
      return n;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      n.label = f->kind == Formula::Kind::And ? "&" : "|";
      n.children.push_back(signed_tree(f->args[0], pos, sig));
      n.children.push_back(signed_tree(f->args[1], pos, sig));
      return n;
    case Formula::Kind::App: {
      n.label = f->label;
      const Connective& c = sig.at(f->label);
      for (int i = 0; i < c.arity(); ++i) {
        bool child_pos = c.order_type[i] == Tonicity::Mono ? pos : !pos;
        n.children.push_back(signed_tree(f->args[i], child_pos, sig));
      }
      return n;
    }
  }
  return n;
}

inline SignedNode signed_tree(const StructurePtr& s, bool pos,
                              const Signature& sig) {
  switch (s->kind) {
    case Structure::Kind::Leaf:
      return signed_tree(s->formula, pos, sig);
    case Structure::Kind::StructTop: {
      SignedNode n;
      n.label = "^T";
      n.positive = pos;
      n.structural = true;
      return n;
    }
    case Structure::Kind::StructBot: {
      SignedNode n;
      n.label = "~B";
      n.positive = pos;
      n.structural = true;
      return n;
    }
    case Structure::Kind::App: {
      const Connective& c = sig.at(s->conn);
      SignedNode n;
      n.label = (c.family == Family::F ? "^" : "~") + s->conn;
      n.positive = pos;
      n.structural = true;
      for (int i = 0; i < c.arity(); ++i) {
        bool child_pos = c.order_type[i] == Tonicity::Mono ? pos : !pos;
        n.children.push_back(signed_tree(s->args[i], child_pos, sig));
      }
      return n;
    }
  }
  return {};
}
}  // namespace detail

inline SignedNode signed_tree(const StructurePtr& s, bool positive_root,
                              const Signature& sig) {
  return detail::signed_tree(s, positive_root, sig);
}

inline nlohmann::json signed_tree_json(const SignedNode& n) {
  nlohmann::json j;
  j["node"] = n.label;
  j["sign"] = n.positive ? "+" : "-";
  nlohmann::json kids = nlohmann::json::array();
  for (const auto& c : n.children) kids.push_back(signed_tree_json(c));
  j["children"] = kids;
  return j;
}

// --- Branching test -------------------------------------------------------------

// A sequent is branching when its signed trees (precedent signed +, succedent
// signed -) contain a +| or -& node all of whose strict ancestors are
// labelled +f, +^f, -g or -~g for primitive f in F and g in G.
namespace detail {
inline bool guard_label(const SignedNode& n, const Signature& sig) {
  if (n.structural) {
    if (n.label == "^T" || n.label == "~B") return false;
    std::string name = n.label.substr(1);
    const Connective& c = sig.at(name);
    if (c.residual) return false;
    return (c.family == Family::F && n.positive) ||
           (c.family == Family::G && !n.positive);
  }
  if (n.formula_kind != Formula::Kind::App) return false;
  const Connective& c = sig.at(n.label);
  if (c.residual) return false;
  return (c.family == Family::F && n.positive) ||
         (c.family == Family::G && !n.positive);
}

inline bool branching_node(const SignedNode& n) {
  if (n.structural) return false;
  return (n.formula_kind == Formula::Kind::Or && n.positive) ||
         (n.formula_kind == Formula::Kind::And && !n.positive);
}

inline bool branching_walk(const SignedNode& n, bool guarded,
                           const Signature& sig) {
  if (guarded && branching_node(n)) return true;
  bool child_guard = guarded && guard_label(n, sig);
  for (const auto& c : n.children)
    if (branching_walk(c, child_guard, sig)) return true;
  return false;
}
}  // namespace detail

inline bool is_branching(const StructurePtr& s, bool positive_root,
                         const Signature& sig) {
  return detail::branching_walk(signed_tree(s, positive_root, sig), true, sig);
}

inline bool is_branching(const Sequent& s, const Signature& sig) {
  return is_branching(s.pre, true, sig) || is_branching(s.suc, false, sig);
}

// --- Positions and substitution ---------------------------------------------------

enum class Side : uint8_t { Precedent, Succedent };
enum class Polarity : uint8_t { Pre, Suc };

// A position addresses a node of the structure tree (structural connectives
// and formula leaves; subformulas of a leaf are not addressable). Its
// polarity is the side's sign composed with the tonicity product of the path.
struct Position {
  Side side = Side::Precedent;
  std::vector<int> path;  // 0-based coordinates
  Polarity polarity = Polarity::Pre;
};

namespace detail {
inline void collect_positions(const StructurePtr& s, const Signature& sig,
                              Side side, std::vector<int>& path, bool pos,
                              std::vector<Position>& out) {
  out.push_back(Position{side, path, pos ? Polarity::Pre : Polarity::Suc});
  if (s->kind == Structure::Kind::App) {
    const Connective& c = sig.at(s->conn);
    for (int i = 0; i < c.arity(); ++i) {
      path.push_back(i);
      bool child_pos = c.order_type[i] == Tonicity::Mono ? pos : !pos;
      collect_positions(s->args[i], sig, side, path, child_pos, out);
      path.pop_back();
    }
  }
}
}  // namespace detail

inline std::vector<Position> positions(const Sequent& s, const Signature& sig) {
  std::vector<Position> out;
  std::vector<int> path;
  detail::collect_positions(s.pre, sig, Side::Precedent, path, true, out);
  detail::collect_positions(s.suc, sig, Side::Succedent, path, false, out);
  return out;
}

inline const StructurePtr& subtree_at(const Sequent& s, const Position& at) {
  const StructurePtr* cur = at.side == Side::Precedent ? &s.pre : &s.suc;
  for (int i : at.path) {
    if ((*cur)->kind != Structure::Kind::App ||
        i >= static_cast<int>((*cur)->args.size()))
      throw TypingError("position does not address a subtree");
    cur = &(*cur)->args[i];
  }
  return *cur;
}

namespace detail {
inline StructurePtr replace(const StructurePtr& s, const std::vector<int>& path,
                            size_t depth, const StructurePtr& repl) {
  if (depth == path.size()) return repl;
  if (s->kind != Structure::Kind::App)
    throw TypingError("position does not address a subtree");
  std::vector<StructurePtr> args = s->args;
  int i = path[depth];
  if (i >= static_cast<int>(args.size()))
    throw TypingError("position does not address a subtree");
  args[i] = replace(args[i], path, depth + 1, repl);
  return Structure::app(s->conn, std::move(args));
}
}  // namespace detail

// Positional substitution. The replacement must be typable at the position's
// polarity; the whole result is re-validated.
inline Sequent substitute(const Sequent& s, const Position& at,
                          const StructurePtr& replacement,
                          const Signature& sig) {
  Sequent out = s;
  if (at.side == Side::Precedent)
    out.pre = detail::replace(s.pre, at.path, 0, replacement);
  else
    out.suc = detail::replace(s.suc, at.path, 0, replacement);
  validate(out, sig);
  return out;
}

}  // namespace ledr
