#pragma once
// The refutation calculus: backward refutation search deriving antisequents,
// and a forward checker for refutation trees including every side condition.
//
// The search recursion follows the completeness argument for the calculus:
//   (a) a displayable bot in precedent position or top in succedent position
//       means the underlying sequent is derivable: fail;
//   (b) a displayable conjunction on the succedent side (dually disjunction
//       on the precedent side) is split with ∧_R1/∧_R2 (∨_L1/∨_L2), wrapped
//       in the display moves that put the occurrence in display;
//   (c) a displayable f-formula in precedent position is unfolded with f_L
//       (dually g_R, ⊤_L, ⊥_R);
//   (d) otherwise the sequent itself is matched against the axiomatic,
//       structural and logical rule shapes.
// Every recursive step consumes a logical connective, so the complexity
// measure strictly decreases and the recursion terminates.

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ledr/display.hpp"
#include "ledr/syntax.hpp"

namespace ledr {

enum class RefRule : uint8_t {
  Ax1,
  Ax2,
  Ax3,
  Ax4,
  Display,
  FHatBot,   // f̂⊥̌
  TopHatG,   // ⊤̂ǧ
  FHatAtom,  // f̂p
  AtomG,     // pǧ
  FHatG,     // f̂ǧ
  GBot,      // g⊥̌
  GAtom,     // gp
  AtomF,     // pf
  TopHatF,   // ⊤̂f
  FL,        // f_L
  GF,        // gf
  GR,        // g_R
  FR,        // f_R
  GL,        // g_L
  FRNeq,     // f_R≠
  GLNeq,     // g_L≠
  TopL,      // ⊤_L
  OrL1,
  OrL2,
  AndR1,
  AndR2,
  BotR,  // ⊥_R
  AndL,  // ∧_L
  OrR,   // ∨_R
};

inline const char* to_string(RefRule r) {
  switch (r) {
    case RefRule::Ax1: return "Ax1";
    case RefRule::Ax2: return "Ax2";
    case RefRule::Ax3: return "Ax3";
    case RefRule::Ax4: return "Ax4";
    case RefRule::Display: return "display";
    case RefRule::FHatBot: return "f̂⊥̌";
    case RefRule::TopHatG: return "⊤̂ǧ";
    case RefRule::FHatAtom: return "f̂p";
    case RefRule::AtomG: return "pǧ";
    case RefRule::FHatG: return "f̂ǧ";
    case RefRule::GBot: return "g⊥̌";
    case RefRule::GAtom: return "gp";
    case RefRule::AtomF: return "pf";
    case RefRule::TopHatF: return "⊤̂f";
    case RefRule::FL: return "f_L";
    case RefRule::GF: return "gf";
    case RefRule::GR: return "g_R";
    case RefRule::FR: return "f_R";
    case RefRule::GL: return "g_L";
    case RefRule::FRNeq: return "f_R≠";
    case RefRule::GLNeq: return "g_L≠";
    case RefRule::TopL: return "⊤_L";
    case RefRule::OrL1: return "∨_L1";
    case RefRule::OrL2: return "∨_L2";
    case RefRule::AndR1: return "∧_R1";
    case RefRule::AndR2: return "∧_R2";
    case RefRule::BotR: return "⊥_R";
    case RefRule::AndL: return "∧_L";
    case RefRule::OrR: return "∨_R";
  }
  return "?";
}

struct RefutationTree {
  Sequent conclusion;
  RefRule rule = RefRule::Ax1;
  std::optional<DisplayMove> move;  // Display nodes only
  int aux_coord = 0;                // chosen j for FR / GL (1-based)
  std::vector<Position> family_and; // I occurrences for AndL / OrR
  std::vector<Position> family_or;  // J occurrences for AndL / OrR
  std::vector<RefutationTree> premises;
};

namespace detail {

struct LeafOcc {
  Position pos;
  FormulaPtr formula;
};

inline void collect_leaves(const StructurePtr& s, const Signature& sig,
                           Side side, std::vector<int>& path, bool pos,
                           std::vector<LeafOcc>& out) {
  if (s->kind == Structure::Kind::Leaf) {
    out.push_back(
        {Position{side, path, pos ? Polarity::Pre : Polarity::Suc}, s->formula});
    return;
  }
  if (s->kind == Structure::Kind::App) {
    const Connective& c = sig.at(s->conn);
    for (int i = 0; i < c.arity(); ++i) {
      path.push_back(i);
      bool child_pos = c.order_type[i] == Tonicity::Mono ? pos : !pos;
      collect_leaves(s->args[i], sig, side, path, child_pos, out);
      path.pop_back();
    }
  }
}

// All formula leaves of the sequent with their displayable polarity, in
// canonical order (precedent first, pre-order).
inline std::vector<LeafOcc> formula_occurrences(const Sequent& s,
                                                const Signature& sig) {
  std::vector<LeafOcc> out;
  std::vector<int> path;
  collect_leaves(s.pre, sig, Side::Precedent, path, true, out);
  collect_leaves(s.suc, sig, Side::Succedent, path, false, out);
  return out;
}

// Occurrence families for the big lattice rules, scanned over one side of
// the conclusion: conjunction leaves of precedent polarity and disjunction
// leaves of succedent polarity.
inline void occurrence_families(const Sequent& s, const Signature& sig,
                                Side side, std::vector<Position>& fam_and,
                                std::vector<Position>& fam_or) {
  std::vector<LeafOcc> all;
  std::vector<int> path;
  if (side == Side::Precedent)
    collect_leaves(s.pre, sig, Side::Precedent, path, true, all);
  else
    collect_leaves(s.suc, sig, Side::Succedent, path, false, all);
  for (const LeafOcc& o : all) {
    if (o.formula->kind == Formula::Kind::And && o.pos.polarity == Polarity::Pre)
      fam_and.push_back(o.pos);
    if (o.formula->kind == Formula::Kind::Or && o.pos.polarity == Polarity::Suc)
      fam_or.push_back(o.pos);
  }
}

inline Sequent directed_anti(const StructurePtr& x, const StructurePtr& y,
                             Tonicity eps) {
  if (eps == Tonicity::Mono) return Sequent{x, y, Turnstile::Refutes};
  return Sequent{y, x, Turnstile::Refutes};
}

// Premise Υi ⊬^eps(i) ⊥̌^eps(i): monotone coordinates face the structural
// bottom, antitone ones flip against the structural top.
inline Sequent bot_premise(const StructurePtr& arg, Tonicity eps) {
  if (eps == Tonicity::Mono)
    return Sequent{arg, Structure::struct_bot(), Turnstile::Refutes};
  return Sequent{Structure::struct_top(), arg, Turnstile::Refutes};
}

// Premise ⊤̂^eps(i) ⊬^eps(i) Υi.
inline Sequent top_premise(const StructurePtr& arg, Tonicity eps) {
  if (eps == Tonicity::Mono)
    return Sequent{Structure::struct_top(), arg, Turnstile::Refutes};
  return Sequent{arg, Structure::struct_bot(), Turnstile::Refutes};
}

}  // namespace detail

// --- Search ------------------------------------------------------------------

namespace detail {

class RefutationSearch {
 public:
  explicit RefutationSearch(const Signature& sig) : sig_(sig) {}

  std::optional<RefutationTree> run(const Sequent& goal) { return refute(goal); }

 private:
  using MaybeTree = std::optional<RefutationTree>;

  MaybeTree refute(const Sequent& s) {
    if (auto it = memo_.find(s); it != memo_.end()) return it->second;
    MaybeTree out = refute_uncached(s);
    memo_.emplace(s, out);
    return out;
  }

  MaybeTree refute_uncached(const Sequent& s) {
    std::vector<LeafOcc> leaves = formula_occurrences(s, sig_);

    // (a) vacuously underivable antisequents do not exist for these shapes
    for (const LeafOcc& o : leaves) {
      if (o.formula->kind == Formula::Kind::Bot && o.pos.polarity == Polarity::Pre)
        return std::nullopt;
      if (o.formula->kind == Formula::Kind::Top && o.pos.polarity == Polarity::Suc)
        return std::nullopt;
    }

    // (b) displayable succedent conjunction or precedent disjunction
    for (const LeafOcc& o : leaves) {
      bool suc_and = o.formula->kind == Formula::Kind::And &&
                     o.pos.polarity == Polarity::Suc;
      bool pre_or = o.formula->kind == Formula::Kind::Or &&
                    o.pos.polarity == Polarity::Pre;
      if (!suc_and && !pre_or) continue;
      for (int k = 0; k < 2; ++k) {
        Sequent sub = substitute(
            s, o.pos, Structure::leaf(o.formula->args[k]), sig_);
        MaybeTree inner = refute(sub);
        if (!inner) continue;
        RefRule rule = suc_and ? (k == 0 ? RefRule::AndR1 : RefRule::AndR2)
                               : (k == 0 ? RefRule::OrL1 : RefRule::OrL2);
        return wrap_at(s, o.pos, rule, std::move(*inner));
      }
      return std::nullopt;
    }

    // (c) unfold a displayable f / g / top / bot formula
    for (const LeafOcc& o : leaves) {
      StructurePtr repl;
      RefRule rule;
      if (o.pos.polarity == Polarity::Pre) {
        if (o.formula->kind == Formula::Kind::App) {
          const Connective& c = sig_.at(o.formula->label);
          if (c.family != Family::F || c.residual) continue;
          std::vector<StructurePtr> args;
          for (const auto& a : o.formula->args) args.push_back(Structure::leaf(a));
          repl = Structure::app(c.name, std::move(args));
          rule = RefRule::FL;
        } else if (o.formula->kind == Formula::Kind::Top) {
          repl = Structure::struct_top();
          rule = RefRule::TopL;
        } else {
          continue;
        }
      } else {
        if (o.formula->kind == Formula::Kind::App) {
          const Connective& c = sig_.at(o.formula->label);
          if (c.family != Family::G || c.residual) continue;
          std::vector<StructurePtr> args;
          for (const auto& a : o.formula->args) args.push_back(Structure::leaf(a));
          repl = Structure::app(c.name, std::move(args));
          rule = RefRule::GR;
        } else if (o.formula->kind == Formula::Kind::Bot) {
          repl = Structure::struct_bot();
          rule = RefRule::BotR;
        } else {
          continue;
        }
      }
      Sequent sub = substitute(s, o.pos, repl, sig_);
      MaybeTree inner = refute(sub);
      if (!inner) return std::nullopt;
      return wrap_at(s, o.pos, rule, std::move(*inner));
    }

    // (d) match the root shapes directly
    return base_case(s);
  }

  // All premises must be refutable; returns nullopt otherwise.
  MaybeTree all_of(const Sequent& concl, RefRule rule,
                   const std::vector<Sequent>& premises) {
    RefutationTree t{concl, rule, {}, 0, {}, {}, {}};
    for (const Sequent& p : premises) {
      MaybeTree sub = refute(p);
      if (!sub) return std::nullopt;
      t.premises.push_back(std::move(*sub));
    }
    return t;
  }

  MaybeTree base_case(const Sequent& s) {
    const StructurePtr& P = s.pre;
    const StructurePtr& S = s.suc;
    auto leaf_app = [&](const StructurePtr& x, Family fam) -> const Connective* {
      if (!is_formula_kind(x, Formula::Kind::App)) return nullptr;
      const Connective& c = sig_.at(x->formula->label);
      return (c.family == fam && !c.residual) ? &c : nullptr;
    };
    const Connective* pre_g = leaf_app(P, Family::G);
    const Connective* suc_f = leaf_app(S, Family::F);
    bool pre_tophat = P->kind == Structure::Kind::StructTop;
    bool pre_atom = is_atom_leaf(P);
    bool pre_and = is_formula_kind(P, Formula::Kind::And);
    const Connective* pre_fhat =
        P->kind == Structure::Kind::App ? &sig_.at(P->conn) : nullptr;
    const Connective* suc_gcheck =
        S->kind == Structure::Kind::App ? &sig_.at(S->conn) : nullptr;

    auto axiom = [&](RefRule r) -> MaybeTree {
      return RefutationTree{s, r, {}, 0, {}, {}, {}};
    };

    if (S->kind == Structure::Kind::StructBot) {
      if (pre_tophat) return axiom(RefRule::Ax1);
      if (pre_atom) return axiom(RefRule::Ax2);
      if (pre_g) return axiom(RefRule::GBot);
      if (pre_and) return and_left(s);
      if (pre_fhat) return structural_f(s, *pre_fhat, RefRule::FHatBot);
      return std::nullopt;
    }
    if (is_atom_leaf(S)) {
      if (pre_tophat) return axiom(RefRule::Ax3);
      if (pre_atom)
        return P->formula->label != S->formula->label ? axiom(RefRule::Ax4)
                                                      : std::nullopt;
      if (pre_g) return axiom(RefRule::GAtom);
      if (pre_and) return and_left(s);
      if (pre_fhat) return structural_f(s, *pre_fhat, RefRule::FHatAtom);
      return std::nullopt;
    }
    if (is_formula_kind(S, Formula::Kind::Or)) return or_right(s);
    if (suc_f) {
      if (pre_tophat) return axiom(RefRule::TopHatF);
      if (pre_atom) return axiom(RefRule::AtomF);
      if (pre_g) return axiom(RefRule::GF);
      if (pre_and) return and_left(s);
      if (pre_fhat) {
        if (pre_fhat->name == suc_f->name) return f_right(s, *pre_fhat);
        return structural_f(s, *pre_fhat, RefRule::FRNeq);
      }
      return std::nullopt;
    }
    if (suc_gcheck) {
      if (pre_tophat) return structural_g(s, *suc_gcheck, RefRule::TopHatG);
      if (pre_atom) return structural_g(s, *suc_gcheck, RefRule::AtomG);
      if (pre_g) {
        if (pre_g->name == suc_gcheck->name) return g_left(s, *suc_gcheck);
        return structural_g(s, *suc_gcheck, RefRule::GLNeq);
      }
      if (pre_and) return and_left(s);
      if (pre_fhat) return f_hat_g(s, *pre_fhat, *suc_gcheck);
      return std::nullopt;
    }
    return std::nullopt;
  }

  MaybeTree structural_f(const Sequent& s, const Connective& f, RefRule rule) {
    std::vector<Sequent> prem;
    for (int i = 0; i < f.arity(); ++i)
      prem.push_back(bot_premise(s.pre->args[i], f.order_type[i]));
    return all_of(s, rule, prem);
  }

  MaybeTree structural_g(const Sequent& s, const Connective& g, RefRule rule) {
    std::vector<Sequent> prem;
    for (int i = 0; i < g.arity(); ++i)
      prem.push_back(top_premise(s.suc->args[i], g.order_type[i]));
    return all_of(s, rule, prem);
  }

  MaybeTree f_hat_g(const Sequent& s, const Connective& f, const Connective& g) {
    std::vector<Sequent> prem;
    for (int i = 0; i < f.arity(); ++i)
      prem.push_back(bot_premise(s.pre->args[i], f.order_type[i]));
    for (int i = 0; i < g.arity(); ++i)
      prem.push_back(top_premise(s.suc->args[i], g.order_type[i]));
    return all_of(s, RefRule::FHatG, prem);
  }

  MaybeTree f_right(const Sequent& s, const Connective& f) {
    std::vector<Sequent> bots;
    for (int i = 0; i < f.arity(); ++i)
      bots.push_back(bot_premise(s.pre->args[i], f.order_type[i]));
    MaybeTree base = all_of(s, RefRule::FR, bots);
    if (!base) return std::nullopt;
    if (f.arity() == 0) return std::nullopt;  // no coordinate to pick
    for (int j = 0; j < f.arity(); ++j) {
      Sequent side = directed_anti(s.pre->args[j],
                                   Structure::leaf(s.suc->formula->args[j]),
                                   f.order_type[j]);
      MaybeTree sub = refute(side);
      if (!sub) continue;
      base->aux_coord = j + 1;
      base->premises.push_back(std::move(*sub));
      return base;
    }
    return std::nullopt;
  }

  MaybeTree g_left(const Sequent& s, const Connective& g) {
    std::vector<Sequent> tops;
    for (int i = 0; i < g.arity(); ++i)
      tops.push_back(top_premise(s.suc->args[i], g.order_type[i]));
    MaybeTree base = all_of(s, RefRule::GL, tops);
    if (!base) return std::nullopt;
    if (g.arity() == 0) return std::nullopt;
    for (int j = 0; j < g.arity(); ++j) {
      Sequent side = directed_anti(Structure::leaf(s.pre->formula->args[j]),
                                   s.suc->args[j], g.order_type[j]);
      MaybeTree sub = refute(side);
      if (!sub) continue;
      base->aux_coord = j + 1;
      base->premises.push_back(std::move(*sub));
      return base;
    }
    return std::nullopt;
  }

  MaybeTree and_left(const Sequent& s) {
    const FormulaPtr& conj = s.pre->formula;
    std::vector<Position> fam_and, fam_or;
    occurrence_families(s, sig_, Side::Succedent, fam_and, fam_or);
    if (is_branching(s.suc, false, sig_))
      throw Error("and_left reached a branching succedent context");
    std::vector<Sequent> prem;
    prem.push_back(Sequent{Structure::leaf(conj->args[0]), s.suc, s.kind});
    prem.push_back(Sequent{Structure::leaf(conj->args[1]), s.suc, s.kind});
    for (const Position& pos : fam_and) {
      const FormulaPtr& occ = subtree_at(s, pos)->formula;
      prem.push_back(substitute(s, pos, Structure::leaf(occ->args[0]), sig_));
      prem.push_back(substitute(s, pos, Structure::leaf(occ->args[1]), sig_));
    }
    for (const Position& pos : fam_or) {
      const FormulaPtr& occ = subtree_at(s, pos)->formula;
      prem.push_back(substitute(s, pos, Structure::leaf(occ->args[0]), sig_));
      prem.push_back(substitute(s, pos, Structure::leaf(occ->args[1]), sig_));
    }
    MaybeTree t = all_of(s, RefRule::AndL, prem);
    if (t) {
      t->family_and = fam_and;
      t->family_or = fam_or;
    }
    return t;
  }

  MaybeTree or_right(const Sequent& s) {
    const FormulaPtr& disj = s.suc->formula;
    std::vector<Position> fam_and, fam_or;
    occurrence_families(s, sig_, Side::Precedent, fam_and, fam_or);
    if (is_branching(s.pre, true, sig_))
      throw Error("or_right reached a branching precedent context");
    std::vector<Sequent> prem;
    prem.push_back(Sequent{s.pre, Structure::leaf(disj->args[0]), s.kind});
    prem.push_back(Sequent{s.pre, Structure::leaf(disj->args[1]), s.kind});
    for (const Position& pos : fam_and) {
      const FormulaPtr& occ = subtree_at(s, pos)->formula;
      prem.push_back(substitute(s, pos, Structure::leaf(occ->args[0]), sig_));
      prem.push_back(substitute(s, pos, Structure::leaf(occ->args[1]), sig_));
    }
    for (const Position& pos : fam_or) {
      const FormulaPtr& occ = subtree_at(s, pos)->formula;
      prem.push_back(substitute(s, pos, Structure::leaf(occ->args[0]), sig_));
      prem.push_back(substitute(s, pos, Structure::leaf(occ->args[1]), sig_));
    }
    MaybeTree t = all_of(s, RefRule::OrR, prem);
    if (t) {
      t->family_and = fam_and;
      t->family_or = fam_or;
    }
    return t;
  }

  // Wraps `inner` (whose conclusion is s with the occurrence at `pos`
  // replaced) in: display moves up to the displayed member, the given rule,
  // and the reversed display moves back down to s.
  RefutationTree wrap_at(const Sequent& s, const Position& pos, RefRule rule,
                         RefutationTree inner) {
    auto [member, moves] = display_path(s, pos, sig_);
    RefutationTree t = std::move(inner);
    Sequent cur = t.conclusion;
    for (const DisplayMove& m : moves) {
      auto next = apply_move(cur, m, sig_);
      if (!next) throw Error("refuter: display move failed");
      RefutationTree node{*next, RefRule::Display, m, 0, {}, {}, {}};
      node.premises.push_back(std::move(t));
      t = std::move(node);
      cur = *next;
    }
    RefutationTree node{member, rule, {}, 0, {}, {}, {}};
    node.premises.push_back(std::move(t));
    t = std::move(node);
    cur = member;
    for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
      DisplayMove inv = it->inverse();
      auto next = apply_move(cur, inv, sig_);
      if (!next) throw Error("refuter: inverse display move failed");
      RefutationTree back{*next, RefRule::Display, inv, 0, {}, {}, {}};
      back.premises.push_back(std::move(t));
      t = std::move(back);
      cur = *next;
    }
    if (!(cur == s)) throw Error("refuter: display wrap did not close");
    return t;
  }

  const Signature& sig_;
  std::unordered_map<Sequent, MaybeTree, SequentHash> memo_;
};

}  // namespace detail

// Backward refutation search. Accepts either turnstile kind; a proves-kind
// input is flipped. Succeeds iff the underlying sequent is underivable.
inline std::optional<RefutationTree> refute(const Sequent& s,
                                            const Signature& sig) {
  if (!residual_free(s, sig))
    throw Error("refute: input contains residuals");
  validate(s, sig);
  detail::RefutationSearch search(sig);
  return search.run(s.with_kind(Turnstile::Refutes));
}

// --- Forward checking ------------------------------------------------------------

namespace detail {

inline bool struct_root(const StructurePtr& s, const Signature& sig,
                        Family fam, const Connective** out) {
  if (s->kind != Structure::Kind::App) return false;
  const Connective& c = sig.at(s->conn);
  if (c.family != fam) return false;
  *out = &c;
  return true;
}

}  // namespace detail

namespace detail {
inline bool check_refutation_node(const RefutationTree& t,
                                  const Signature& sig) {
  const Sequent& c = t.conclusion;
  if (c.kind != Turnstile::Refutes) return false;
  for (const RefutationTree& p : t.premises)
    if (!check_refutation_node(p, sig)) return false;

  auto prem_eq = [&](const std::vector<Sequent>& want) {
    if (t.premises.size() != want.size()) return false;
    for (size_t i = 0; i < want.size(); ++i)
      if (!(t.premises[i].conclusion == want[i])) return false;
    return true;
  };
  auto none = [&]() { return t.premises.empty(); };
  const StructurePtr& P = c.pre;
  const StructurePtr& S = c.suc;

  auto leaf_app = [&](const StructurePtr& x, Family fam) -> const Connective* {
    if (!is_formula_kind(x, Formula::Kind::App)) return nullptr;
    const Connective& cn = sig.at(x->formula->label);
    return (cn.family == fam && !cn.residual) ? &cn : nullptr;
  };

  switch (t.rule) {
    case RefRule::Ax1:
      return none() && P->kind == Structure::Kind::StructTop &&
             S->kind == Structure::Kind::StructBot;
    case RefRule::Ax2:
      return none() && is_atom_leaf(P) && S->kind == Structure::Kind::StructBot;
    case RefRule::Ax3:
      return none() && P->kind == Structure::Kind::StructTop && is_atom_leaf(S);
    case RefRule::Ax4:
      return none() && is_atom_leaf(P) && is_atom_leaf(S) &&
             P->formula->label != S->formula->label;
    case RefRule::GBot:
      return none() && leaf_app(P, Family::G) &&
             S->kind == Structure::Kind::StructBot;
    case RefRule::GAtom:
      return none() && leaf_app(P, Family::G) && is_atom_leaf(S);
    case RefRule::AtomF:
      return none() && is_atom_leaf(P) && leaf_app(S, Family::F);
    case RefRule::TopHatF:
      return none() && P->kind == Structure::Kind::StructTop &&
             leaf_app(S, Family::F);
    case RefRule::GF:
      return none() && leaf_app(P, Family::G) && leaf_app(S, Family::F);
    case RefRule::Display: {
      if (t.premises.size() != 1 || !t.move) return false;
      auto r = apply_move(t.premises[0].conclusion, *t.move, sig);
      return r && *r == c;
    }
    case RefRule::TopL: {
      if (t.premises.size() != 1 || !is_formula_kind(P, Formula::Kind::Top))
        return false;
      return prem_eq({Sequent{Structure::struct_top(), S, c.kind}});
    }
    case RefRule::BotR: {
      if (t.premises.size() != 1 || !is_formula_kind(S, Formula::Kind::Bot))
        return false;
      return prem_eq({Sequent{P, Structure::struct_bot(), c.kind}});
    }
    case RefRule::OrL1:
    case RefRule::OrL2: {
      if (t.premises.size() != 1 || !is_formula_kind(P, Formula::Kind::Or))
        return false;
      const FormulaPtr& pick =
          P->formula->args[t.rule == RefRule::OrL1 ? 0 : 1];
      return prem_eq({Sequent{Structure::leaf(pick), S, c.kind}});
    }
    case RefRule::AndR1:
    case RefRule::AndR2: {
      if (t.premises.size() != 1 || !is_formula_kind(S, Formula::Kind::And))
        return false;
      const FormulaPtr& pick =
          S->formula->args[t.rule == RefRule::AndR1 ? 0 : 1];
      return prem_eq({Sequent{P, Structure::leaf(pick), c.kind}});
    }
    case RefRule::FL: {
      const Connective* f = leaf_app(P, Family::F);
      if (!f || t.premises.size() != 1) return false;
      std::vector<StructurePtr> args;
      for (const auto& a : P->formula->args) args.push_back(Structure::leaf(a));
      return prem_eq({Sequent{Structure::app(f->name, std::move(args)), S,
                              c.kind}});
    }
    case RefRule::GR: {
      const Connective* g = leaf_app(S, Family::G);
      if (!g || t.premises.size() != 1) return false;
      std::vector<StructurePtr> args;
      for (const auto& a : S->formula->args) args.push_back(Structure::leaf(a));
      return prem_eq({Sequent{P, Structure::app(g->name, std::move(args)),
                              c.kind}});
    }
    case RefRule::FHatBot:
    case RefRule::FHatAtom: {
      const Connective* f = nullptr;
      if (!detail::struct_root(P, sig, Family::F, &f)) return false;
      if (t.rule == RefRule::FHatBot &&
          S->kind != Structure::Kind::StructBot)
        return false;
      if (t.rule == RefRule::FHatAtom && !is_atom_leaf(S)) return false;
      if (!residual_free(c, sig)) return false;
      std::vector<Sequent> want;
      for (int i = 0; i < f->arity(); ++i)
        want.push_back(detail::bot_premise(P->args[i], f->order_type[i]));
      return prem_eq(want);
    }
    case RefRule::TopHatG:
    case RefRule::AtomG: {
      const Connective* g = nullptr;
      if (!detail::struct_root(S, sig, Family::G, &g)) return false;
      if (t.rule == RefRule::TopHatG &&
          P->kind != Structure::Kind::StructTop)
        return false;
      if (t.rule == RefRule::AtomG && !is_atom_leaf(P)) return false;
      if (!residual_free(c, sig)) return false;
      std::vector<Sequent> want;
      for (int i = 0; i < g->arity(); ++i)
        want.push_back(detail::top_premise(S->args[i], g->order_type[i]));
      return prem_eq(want);
    }
    case RefRule::FHatG: {
      const Connective* f = nullptr;
      const Connective* g = nullptr;
      if (!detail::struct_root(P, sig, Family::F, &f) ||
          !detail::struct_root(S, sig, Family::G, &g))
        return false;
      if (!residual_free(c, sig)) return false;
      std::vector<Sequent> want;
      for (int i = 0; i < f->arity(); ++i)
        want.push_back(detail::bot_premise(P->args[i], f->order_type[i]));
      for (int i = 0; i < g->arity(); ++i)
        want.push_back(detail::top_premise(S->args[i], g->order_type[i]));
      return prem_eq(want);
    }
    case RefRule::FR: {
      const Connective* f = nullptr;
      if (!detail::struct_root(P, sig, Family::F, &f)) return false;
      const Connective* sf = leaf_app(S, Family::F);
      if (!sf || sf->name != f->name) return false;
      if (!residual_free(c, sig)) return false;
      int j = t.aux_coord;
      if (j < 1 || j > f->arity()) return false;
      std::vector<Sequent> want;
      for (int i = 0; i < f->arity(); ++i)
        want.push_back(detail::bot_premise(P->args[i], f->order_type[i]));
      want.push_back(detail::directed_anti(
          P->args[j - 1], Structure::leaf(S->formula->args[j - 1]),
          f->order_type[j - 1]));
      return prem_eq(want);
    }
    case RefRule::GL: {
      const Connective* g = nullptr;
      if (!detail::struct_root(S, sig, Family::G, &g)) return false;
      const Connective* pg = leaf_app(P, Family::G);
      if (!pg || pg->name != g->name) return false;
      if (!residual_free(c, sig)) return false;
      int j = t.aux_coord;
      if (j < 1 || j > g->arity()) return false;
      std::vector<Sequent> want;
      for (int i = 0; i < g->arity(); ++i)
        want.push_back(detail::top_premise(S->args[i], g->order_type[i]));
      want.push_back(detail::directed_anti(
          Structure::leaf(P->formula->args[j - 1]), S->args[j - 1],
          g->order_type[j - 1]));
      return prem_eq(want);
    }
    case RefRule::FRNeq: {
      const Connective* f1 = nullptr;
      if (!detail::struct_root(P, sig, Family::F, &f1)) return false;
      const Connective* f2 = leaf_app(S, Family::F);
      if (!f2 || f2->name == f1->name) return false;
      if (!residual_free(c, sig)) return false;
      std::vector<Sequent> want;
      for (int i = 0; i < f1->arity(); ++i)
        want.push_back(detail::bot_premise(P->args[i], f1->order_type[i]));
      return prem_eq(want);
    }
    case RefRule::GLNeq: {
      const Connective* g2 = nullptr;
      if (!detail::struct_root(S, sig, Family::G, &g2)) return false;
      const Connective* g1 = leaf_app(P, Family::G);
      if (!g1 || g1->name == g2->name) return false;
      if (!residual_free(c, sig)) return false;
      std::vector<Sequent> want;
      for (int i = 0; i < g2->arity(); ++i)
        want.push_back(detail::top_premise(S->args[i], g2->order_type[i]));
      return prem_eq(want);
    }
    case RefRule::AndL: {
      if (!is_formula_kind(P, Formula::Kind::And)) return false;
      if (!residual_free(c, sig)) return false;
      if (is_branching(S, false, sig)) return false;
      std::vector<Position> fam_and, fam_or;
      detail::occurrence_families(c, sig, Side::Succedent, fam_and, fam_or);
      std::vector<Sequent> want;
      want.push_back(Sequent{Structure::leaf(P->formula->args[0]), S, c.kind});
      want.push_back(Sequent{Structure::leaf(P->formula->args[1]), S, c.kind});
      for (const auto& fam : {fam_and, fam_or})
        for (const Position& pos : fam) {
          const FormulaPtr& occ = subtree_at(c, pos)->formula;
          want.push_back(
              substitute(c, pos, Structure::leaf(occ->args[0]), sig));
          want.push_back(
              substitute(c, pos, Structure::leaf(occ->args[1]), sig));
        }
      return prem_eq(want);
    }
    case RefRule::OrR: {
      if (!is_formula_kind(S, Formula::Kind::Or)) return false;
      if (!residual_free(c, sig)) return false;
      if (is_branching(P, true, sig)) return false;
      std::vector<Position> fam_and, fam_or;
      detail::occurrence_families(c, sig, Side::Precedent, fam_and, fam_or);
      std::vector<Sequent> want;
      want.push_back(Sequent{P, Structure::leaf(S->formula->args[0]), c.kind});
      want.push_back(Sequent{P, Structure::leaf(S->formula->args[1]), c.kind});
      for (const auto& fam : {fam_and, fam_or})
        for (const Position& pos : fam) {
          const FormulaPtr& occ = subtree_at(c, pos)->formula;
          want.push_back(
              substitute(c, pos, Structure::leaf(occ->args[0]), sig));
          want.push_back(
              substitute(c, pos, Structure::leaf(occ->args[1]), sig));
        }
      return prem_eq(want);
    }
  }
  return false;
}
}  // namespace detail

// True iff every node instantiates its rule schema, including residual
// freeness of the endsequents of the structural rules and of f_R, f_R≠, g_L,
// g_L≠, ∧_L, ∨_R; the non-branching condition on the ∧_L/∨_R context; the
// distinctness conditions of Ax4, f_R≠ and g_L≠; and exact occurrence
// families for ∧_L/∨_R. Malformed trees are rejected, never thrown on.
inline bool check_refutation(const RefutationTree& t, const Signature& sig) {
  try {
    return detail::check_refutation_node(t, sig);
  } catch (const Error&) {
    return false;
  }
}

// --- Export ------------------------------------------------------------------------

inline void refutation_text(const RefutationTree& t, const Signature& sig,
                            std::string& out, int indent = 0) {
  out.append(indent * 2, ' ');
  out += to_string(t.conclusion, sig);
  out += "   [";
  out += to_string(t.rule);
  if (t.move) out += " " + to_string(*t.move, sig);
  if (t.aux_coord) out += " j=" + std::to_string(t.aux_coord);
  out += "]\n";
  for (const RefutationTree& p : t.premises)
    refutation_text(p, sig, out, indent + 1);
}

inline std::string to_text(const RefutationTree& t, const Signature& sig) {
  std::string out;
  refutation_text(t, sig, out);
  return out;
}

inline nlohmann::json to_json(const RefutationTree& t, const Signature& sig) {
  nlohmann::json j;
  j["sequent"] = to_string(t.conclusion, sig);
  j["rule"] = to_string(t.rule);
  if (t.move) j["move"] = to_string(*t.move, sig);
  if (t.aux_coord) j["coordinate"] = t.aux_coord;
  nlohmann::json prems = nlohmann::json::array();
  for (const RefutationTree& p : t.premises) prems.push_back(to_json(p, sig));
  j["premises"] = prems;
  return j;
}

namespace detail {
inline void refutation_dot(const RefutationTree& t, const Signature& sig,
                           std::string& out, int& id) {
  int me = id++;
  out += "  n" + std::to_string(me) + " [label=\"" + to_string(t.conclusion, sig) +
         "\\n" + to_string(t.rule) + "\"];\n";
  for (const RefutationTree& p : t.premises) {
    int child = id;
    refutation_dot(p, sig, out, id);
    out += "  n" + std::to_string(me) + " -> n" + std::to_string(child) + ";\n";
  }
}
}  // namespace detail

inline std::string to_dot(const RefutationTree& t, const Signature& sig) {
  std::string out = "digraph refutation {\n  node [shape=box];\n";
  int id = 0;
  detail::refutation_dot(t, sig, out, id);
  out += "}\n";
  return out;
}

// Rule multiset of a refutation tree, display steps excluded on request.
inline void rule_multiset(const RefutationTree& t,
                          std::map<std::string, int>& out,
                          bool include_display = true) {
  if (include_display || t.rule != RefRule::Display)
    out[to_string(t.rule)]++;
  for (const RefutationTree& p : t.premises)
    rule_multiset(p, out, include_display);
}

}  // namespace ledr
