#pragma once
// Display postulates as single-step rewrites on sequents, the enumeration of
// display-equivalence classes, and displaying a chosen substructure.
//
// Each postulate is indexed by a primitive connective and a coordinate. The
// monotone coordinates of f move the argument across the turnstile through
// the residual f#i (placed on the succedent side); antitone coordinates swap
// through the Galois companion f#i on the precedent side. The g@i duals
// mirror this on the succedent. A residual-rooted side admits exactly one
// move, back through its parent postulate.

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ledr/syntax.hpp"

namespace ledr {

struct DisplayMove {
  std::string conn;  // primitive connective owning the postulate
  int coord = 1;     // 1-based coordinate
  bool forward = true;

  DisplayMove inverse() const { return DisplayMove{conn, coord, !forward}; }
};

inline bool operator==(const DisplayMove& a, const DisplayMove& b) {
  return a.conn == b.conn && a.coord == b.coord && a.forward == b.forward;
}

inline std::string to_string(const DisplayMove& m, const Signature& sig) {
  const Connective& c = sig.at(m.conn);
  Tonicity t = c.order_type[m.coord - 1];
  std::string tag;
  if (c.family == Family::F)
    tag = t == Tonicity::Mono ? "F_RES" : "F_GAL";
  else
    tag = t == Tonicity::Mono ? "G_RES" : "G_GAL";
  tag += "(" + m.conn + "," + std::to_string(m.coord) + ")";
  if (!m.forward) tag += "^-1";
  return tag;
}

namespace detail {
inline std::vector<StructurePtr> with_slot(const std::vector<StructurePtr>& args,
                                           int i, StructurePtr repl) {
  std::vector<StructurePtr> out = args;
  out[i] = std::move(repl);
  return out;
}
}  // namespace detail

// Applies one postulate in the given direction; nullopt when the sequent does
// not match the move's pattern. Works identically for both turnstile kinds.
inline std::optional<Sequent> apply_move(const Sequent& s, const DisplayMove& m,
                                         const Signature& sig) {
  const Connective& c = sig.at(m.conn);
  if (c.residual || m.coord < 1 || m.coord > c.arity()) return std::nullopt;
  int j = m.coord - 1;
  Tonicity t = c.order_type[j];
  const std::string rname = residual_name(c, m.coord);

  auto app_args = [&](const StructurePtr& st,
                      const std::string& name) -> const std::vector<StructurePtr>* {
    if (st->kind != Structure::Kind::App || st->conn != name) return nullptr;
    return &st->args;
  };

  if (c.family == Family::F) {
    if (m.forward) {
      const auto* args = app_args(s.pre, c.name);
      if (!args) return std::nullopt;
      if (t == Tonicity::Mono)
        return Sequent{(*args)[j],
                       Structure::app(rname, detail::with_slot(*args, j, s.suc)),
                       s.kind};
      return Sequent{Structure::app(rname, detail::with_slot(*args, j, s.suc)),
                     (*args)[j], s.kind};
    }
    if (t == Tonicity::Mono) {
      const auto* args = app_args(s.suc, rname);
      if (!args) return std::nullopt;
      return Sequent{Structure::app(c.name, detail::with_slot(*args, j, s.pre)),
                     (*args)[j], s.kind};
    }
    const auto* args = app_args(s.pre, rname);
    if (!args) return std::nullopt;
    return Sequent{Structure::app(c.name, detail::with_slot(*args, j, s.suc)),
                   (*args)[j], s.kind};
  }

  // G family
  if (m.forward) {
    const auto* args = app_args(s.suc, c.name);
    if (!args) return std::nullopt;
    if (t == Tonicity::Mono)
      return Sequent{Structure::app(rname, detail::with_slot(*args, j, s.pre)),
                     (*args)[j], s.kind};
    return Sequent{(*args)[j],
                   Structure::app(rname, detail::with_slot(*args, j, s.pre)),
                   s.kind};
  }
  if (t == Tonicity::Mono) {
    const auto* args = app_args(s.pre, rname);
    if (!args) return std::nullopt;
    return Sequent{(*args)[j],
                   Structure::app(c.name, detail::with_slot(*args, j, s.suc)),
                   s.kind};
  }
  const auto* args = app_args(s.suc, rname);
  if (!args) return std::nullopt;
  return Sequent{(*args)[j],
                 Structure::app(c.name, detail::with_slot(*args, j, s.pre)),
                 s.kind};
}

// All sequents reachable by exactly one postulate application.
inline std::vector<std::pair<DisplayMove, Sequent>> display_neighbors(
    const Sequent& s, const Signature& sig) {
  std::vector<std::pair<DisplayMove, Sequent>> out;
  auto try_move = [&](DisplayMove m) {
    if (auto r = apply_move(s, m, sig)) out.emplace_back(m, *r);
  };
  auto from_root = [&](const StructurePtr& root, bool precedent) {
    if (root->kind != Structure::Kind::App) return;
    const Connective& c = sig.at(root->conn);
    if (!c.residual) {
      if ((c.family == Family::F) != precedent) return;
      for (int i = 1; i <= c.arity(); ++i)
        try_move(DisplayMove{c.name, i, true});
    } else {
      try_move(DisplayMove{c.parent, c.coord, false});
    }
  };
  from_root(s.pre, true);
  from_root(s.suc, false);
  return out;
}

// Closure of {s} under single moves, in BFS discovery order.
inline std::vector<Sequent> equivalence_class(const Sequent& s,
                                              const Signature& sig) {
  std::vector<Sequent> order{s};
  std::unordered_set<Sequent, SequentHash> seen{s};
  for (size_t i = 0; i < order.size(); ++i) {
    for (auto& [m, n] : display_neighbors(order[i], sig)) {
      if (seen.insert(n).second) order.push_back(n);
    }
  }
  return order;
}

// Number of edges of the generation tree of s: the structural edges of both
// sides plus the turnstile edge. Formula leaves are single vertices.
namespace detail {
inline long struct_edges(const StructurePtr& s) {
  if (s->kind != Structure::Kind::App) return 0;
  long n = static_cast<long>(s->args.size());
  for (const auto& a : s->args) n += struct_edges(a);
  return n;
}
}  // namespace detail

inline long generation_tree_edges(const Sequent& s) {
  return detail::struct_edges(s.pre) + detail::struct_edges(s.suc) + 1;
}

// Displays the substructure at `at`: returns the unique class member in which
// it is the entire precedent (polarity Pre) or succedent (polarity Suc),
// together with the move sequence that got there.
inline std::pair<Sequent, std::vector<DisplayMove>> display_path(
    const Sequent& s, const Position& at, const Signature& sig) {
  StructurePtr target = subtree_at(s, at);
  Sequent cur = s;
  Side side = at.side;
  std::vector<int> path = at.path;
  std::vector<DisplayMove> moves;

  auto step = [&](const DisplayMove& m) {
    auto n = apply_move(cur, m, sig);
    if (!n) throw Error("display_at: postulate failed to apply");
    moves.push_back(m);
    cur = *n;
  };

  while (!path.empty()) {
    const StructurePtr& root = side == Side::Precedent ? cur.pre : cur.suc;
    if (root->kind != Structure::Kind::App)
      throw Error("display_at: position does not address a subtree");
    const Connective& c = sig.at(root->conn);
    int j0 = path.front();
    if (!c.residual) {
      Tonicity t = c.order_type[j0];
      step(DisplayMove{c.name, j0 + 1, true});
      path.erase(path.begin());
      if (c.family == Family::F)
        side = t == Tonicity::Mono ? Side::Precedent : Side::Succedent;
      else
        side = t == Tonicity::Mono ? Side::Succedent : Side::Precedent;
    } else {
      // a residual root admits only the move back through its parent
      const Connective& parent = sig.at(c.parent);
      bool displayed = j0 == c.coord - 1;
      step(DisplayMove{c.parent, c.coord, false});
      if (displayed) {
        path.erase(path.begin());
        side = parent.family == Family::F ? Side::Succedent : Side::Precedent;
      } else {
        side = parent.family == Family::F ? Side::Precedent : Side::Succedent;
      }
    }
  }

  const StructurePtr& shown = side == Side::Precedent ? cur.pre : cur.suc;
  if (!equal(shown, target))
    throw Error("display_at: displayed subtree does not match the target");
  Polarity pol = side == Side::Precedent ? Polarity::Pre : Polarity::Suc;
  if (pol != at.polarity)
    throw Error("display_at: polarity disagrees with the position");
  return {cur, std::move(moves)};
}

inline Sequent display_at(const Sequent& s, const Position& at,
                          const Signature& sig) {
  return display_path(s, at, sig).first;
}

// display_at, replace the displayed side, then reverse the moves. Equals the
// direct positional substitution.
inline Sequent subst_displayed(const Sequent& s, const Position& at,
                               const StructurePtr& replacement,
                               const Signature& sig) {
  auto [shown, moves] = display_path(s, at, sig);
  Sequent cur = at.polarity == Polarity::Pre
                    ? Sequent{replacement, shown.suc, shown.kind}
                    : Sequent{shown.pre, replacement, shown.kind};
  for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
    auto n = apply_move(cur, it->inverse(), sig);
    if (!n) throw Error("subst_displayed: inverse move failed");
    cur = *n;
  }
  validate(cur, sig);
  Sequent direct = substitute(s, at, replacement, sig);
  if (!(cur == direct))
    throw Error("subst_displayed: disagrees with positional substitution");
  return cur;
}

// DOT export of an equivalence class: nodes are sequents, edges are moves.
inline std::string class_dot(const Sequent& s, const Signature& sig) {
  std::vector<Sequent> members = equivalence_class(s, sig);
  auto index_of = [&](const Sequent& q) {
    for (size_t i = 0; i < members.size(); ++i)
      if (members[i] == q) return i;
    return members.size();
  };
  std::string out = "graph display_class {\n";
  for (size_t i = 0; i < members.size(); ++i)
    out += "  n" + std::to_string(i) + " [label=\"" +
           to_string(members[i], sig) + "\"];\n";
  for (size_t i = 0; i < members.size(); ++i)
    for (auto& [m, n] : display_neighbors(members[i], sig)) {
      size_t j = index_of(n);
      if (j > i && j < members.size())
        out += "  n" + std::to_string(i) + " -- n" + std::to_string(j) +
               " [label=\"" + to_string(m, sig) + "\"];\n";
    }
  out += "}\n";
  return out;
}

}  // namespace ledr
