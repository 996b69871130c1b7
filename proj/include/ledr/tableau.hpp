#pragma once
// The tableau procedure: forward rule application producing terminated trees,
// open/closed branch classification, and the validity decision.
//
// Rules are the contrapositives of the refutation calculus. A rule instance
// carries one or more premise groups: a single group extends the branch
// conjunctively (a chain of nodes), several groups split it disjunctively.
// An instance is satisfied on a branch once some group is fully present;
// a branch is terminated when every applicable instance is satisfied. The
// residuation side condition (do not re-derive a sequent already on the
// branch) is this same satisfaction check.
//
// A terminated branch is open when it contains a sequent that is refutable
// by a premise-free refutation rule; closed otherwise. A terminated tree
// certifies validity exactly when at least one branch is closed.

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ledr/display.hpp"
#include "ledr/syntax.hpp"

namespace ledr {

struct BudgetError : Error {
  using Error::Error;
};

enum class TabRule : uint8_t {
  FL,
  GR,
  TopL,
  BotR,
  AndRChain,
  OrLChain,
  AndLSplit,
  OrRSplit,
  FR,
  GL,
  FRNeq,
  GLNeq,
  FHatBot,
  TopHatG,
  FHatAtom,
  AtomG,
  FHatG,
  Residuation,
};

inline const char* to_string(TabRule r) {
  switch (r) {
    case TabRule::FL: return "f_L";
    case TabRule::GR: return "g_R";
    case TabRule::TopL: return "⊤_L";
    case TabRule::BotR: return "⊥_R";
    case TabRule::AndRChain: return "∧_R";
    case TabRule::OrLChain: return "∨_L";
    case TabRule::AndLSplit: return "∧_L";
    case TabRule::OrRSplit: return "∨_R";
    case TabRule::FR: return "f_R";
    case TabRule::GL: return "g_L";
    case TabRule::FRNeq: return "f_R≠";
    case TabRule::GLNeq: return "g_L≠";
    case TabRule::FHatBot: return "f̂⊥̌";
    case TabRule::TopHatG: return "⊤̂ǧ";
    case TabRule::FHatAtom: return "f̂p";
    case TabRule::AtomG: return "pǧ";
    case TabRule::FHatG: return "f̂ǧ";
    case TabRule::Residuation: return "display";
  }
  return "?";
}

struct TabInstance {
  TabRule rule;
  std::optional<DisplayMove> move;          // residuation only
  std::vector<std::vector<Sequent>> groups; // disjunctive alternatives
};

enum class BranchStatus : uint8_t { Open, Closed, Unterminated };

struct TableauNode {
  Sequent sequent;
  std::optional<TabRule> rule_applied;  // rule that generated the children
  bool split = false;                   // children on new branches if true
  std::vector<std::unique_ptr<TableauNode>> children;
};

struct BranchInfo {
  std::vector<Sequent> sequents;
  BranchStatus status = BranchStatus::Open;
  std::vector<Sequent> witnesses;  // open-shape sequents found on the branch
};

struct TableauStats {
  long nodes = 0;
  long branches = 0;
  long closed_branches = 0;
  bool revisit = false;            // a branch re-added a sequent (never expected)
  long nonresidual_steps = 0;      // non-residuation child additions checked
  bool complexity_decreases = true;
};

struct TableauOptions {
  long max_nodes = 500000;
  // test hook: drop one open shape from classification to emulate a rule
  // mutation; exercised by the self test's fault injection mode
  bool inject_fault = false;
};

enum class Validity : uint8_t { Valid, Invalid };

struct TableauResult {
  Validity status = Validity::Invalid;
  std::unique_ptr<TableauNode> root;
  std::vector<BranchInfo> branches;
  TableauStats stats;
};

// --- Open shapes -----------------------------------------------------------------

// A sequent refutable by a premise-free refutation rule: the axiomatic rules,
// the premise-free logical rules, and the degenerate nullary instances of the
// structural and f_R≠/g_L≠ rules.
inline bool zero_premise_refutable(const Sequent& s, const Signature& sig,
                                   bool inject_fault = false) {
  const StructurePtr& P = s.pre;
  const StructurePtr& S = s.suc;
  auto leaf_app = [&](const StructurePtr& x, Family fam) -> const Connective* {
    if (!is_formula_kind(x, Formula::Kind::App)) return nullptr;
    const Connective& c = sig.at(x->formula->label);
    return (c.family == fam && !c.residual) ? &c : nullptr;
  };
  bool pre_top = P->kind == Structure::Kind::StructTop;
  bool suc_bot = S->kind == Structure::Kind::StructBot;
  bool pre_atom = is_atom_leaf(P);
  bool suc_atom = is_atom_leaf(S);
  const Connective* pre_g = leaf_app(P, Family::G);
  const Connective* suc_f = leaf_app(S, Family::F);

  if (pre_top && suc_bot) return true;                      // Ax1
  if (pre_atom && suc_bot) return !inject_fault;            // Ax2
  if (pre_top && suc_atom) return true;                     // Ax3
  if (pre_atom && suc_atom)
    return P->formula->label != S->formula->label;          // Ax4
  if (pre_g && suc_bot) return true;                        // g⊥̌
  if (pre_g && suc_atom) return true;                       // gp
  if (pre_atom && suc_f) return true;                       // pf
  if (pre_top && suc_f) return true;                        // ⊤̂f
  if (pre_g && suc_f) return true;                          // gf

  // degenerate nullary instances: all premise groups empty
  if (!residual_free(s, sig)) return false;
  auto nullary_struct = [&](const StructurePtr& x, Family fam) {
    if (x->kind != Structure::Kind::App) return false;
    const Connective& c = sig.at(x->conn);
    return c.family == fam && c.arity() == 0;
  };
  bool pre_f0 = nullary_struct(P, Family::F);
  bool suc_g0 = nullary_struct(S, Family::G);
  if (pre_f0 && (suc_bot || suc_atom)) return true;         // f̂⊥̌ / f̂p
  if (suc_g0 && (pre_top || pre_atom)) return true;         // ⊤̂ǧ / pǧ
  if (pre_f0 && suc_g0) return true;                        // f̂ǧ
  if (pre_f0 && suc_f && P->conn != S->formula->label) return true;  // f_R≠
  if (suc_g0 && pre_g && S->conn != P->formula->label) return true;  // g_L≠
  return false;
}

// --- Rule instances ----------------------------------------------------------------

namespace detail {

inline Sequent tab_directed(const StructurePtr& x, const StructurePtr& y,
                            Tonicity eps) {
  if (eps == Tonicity::Mono) return Sequent{x, y, Turnstile::Proves};
  return Sequent{y, x, Turnstile::Proves};
}

inline Sequent tab_bot_premise(const StructurePtr& arg, Tonicity eps) {
  if (eps == Tonicity::Mono)
    return Sequent{arg, Structure::struct_bot(), Turnstile::Proves};
  return Sequent{Structure::struct_top(), arg, Turnstile::Proves};
}

inline Sequent tab_top_premise(const StructurePtr& arg, Tonicity eps) {
  if (eps == Tonicity::Mono)
    return Sequent{Structure::struct_top(), arg, Turnstile::Proves};
  return Sequent{arg, Structure::struct_bot(), Turnstile::Proves};
}

inline void lattice_occurrences(const Sequent& s, const Signature& sig,
                                Side side, std::vector<Position>& fam_and,
                                std::vector<Position>& fam_or) {
  for (const Position& pos : positions(s, sig)) {
    if (pos.side != side) continue;
    const StructurePtr& sub = subtree_at(s, pos);
    if (sub->kind != Structure::Kind::Leaf) continue;
    if (sub->formula->kind == Formula::Kind::And &&
        pos.polarity == Polarity::Pre)
      fam_and.push_back(pos);
    if (sub->formula->kind == Formula::Kind::Or &&
        pos.polarity == Polarity::Suc)
      fam_or.push_back(pos);
  }
}

}  // namespace detail

// All rule instances applicable to the sequent, independent of any branch.
// Instances whose premise set is empty are not produced; such shapes are
// open-branch witnesses instead.
inline std::vector<TabInstance> tableau_instances(const Sequent& s,
                                                  const Signature& sig) {
  std::vector<TabInstance> out;
  const StructurePtr& P = s.pre;
  const StructurePtr& S = s.suc;
  bool rf = residual_free(s, sig);
  auto leaf_app = [&](const StructurePtr& x, Family fam) -> const Connective* {
    if (!is_formula_kind(x, Formula::Kind::App)) return nullptr;
    const Connective& c = sig.at(x->formula->label);
    return (c.family == fam && !c.residual) ? &c : nullptr;
  };
  auto leaves = [&](const std::vector<FormulaPtr>& fs) {
    std::vector<StructurePtr> out_;
    for (const auto& f : fs) out_.push_back(Structure::leaf(f));
    return out_;
  };

  // logical unfolds
  if (rf) {
    if (const Connective* f = leaf_app(P, Family::F))
      out.push_back({TabRule::FL,
                     {},
                     {{Sequent{Structure::app(f->name, leaves(P->formula->args)),
                               S, s.kind}}}});
    if (const Connective* g = leaf_app(S, Family::G))
      out.push_back({TabRule::GR,
                     {},
                     {{Sequent{P, Structure::app(g->name, leaves(S->formula->args)),
                               s.kind}}}});
    if (is_formula_kind(P, Formula::Kind::Top))
      out.push_back(
          {TabRule::TopL, {}, {{Sequent{Structure::struct_top(), S, s.kind}}}});
    if (is_formula_kind(S, Formula::Kind::Bot))
      out.push_back(
          {TabRule::BotR, {}, {{Sequent{P, Structure::struct_bot(), s.kind}}}});
  }

  // lattice rules
  if (is_formula_kind(S, Formula::Kind::And)) {
    const auto& args = S->formula->args;
    out.push_back({TabRule::AndRChain,
                   {},
                   {{Sequent{P, Structure::leaf(args[0]), s.kind},
                     Sequent{P, Structure::leaf(args[1]), s.kind}}}});
  }
  if (is_formula_kind(P, Formula::Kind::Or)) {
    const auto& args = P->formula->args;
    out.push_back({TabRule::OrLChain,
                   {},
                   {{Sequent{Structure::leaf(args[0]), S, s.kind},
                     Sequent{Structure::leaf(args[1]), S, s.kind}}}});
  }
  if (rf && is_formula_kind(P, Formula::Kind::And) &&
      !is_branching(S, false, sig)) {
    TabInstance inst{TabRule::AndLSplit, {}, {}};
    inst.groups.push_back(
        {Sequent{Structure::leaf(P->formula->args[0]), S, s.kind}});
    inst.groups.push_back(
        {Sequent{Structure::leaf(P->formula->args[1]), S, s.kind}});
    std::vector<Position> fam_and, fam_or;
    detail::lattice_occurrences(s, sig, Side::Succedent, fam_and, fam_or);
    for (const auto& fam : {fam_and, fam_or})
      for (const Position& pos : fam) {
        const FormulaPtr& occ = subtree_at(s, pos)->formula;
        inst.groups.push_back(
            {substitute(s, pos, Structure::leaf(occ->args[0]), sig)});
        inst.groups.push_back(
            {substitute(s, pos, Structure::leaf(occ->args[1]), sig)});
      }
    out.push_back(std::move(inst));
  }
  if (rf && is_formula_kind(S, Formula::Kind::Or) &&
      !is_branching(P, true, sig)) {
    TabInstance inst{TabRule::OrRSplit, {}, {}};
    inst.groups.push_back(
        {Sequent{P, Structure::leaf(S->formula->args[0]), s.kind}});
    inst.groups.push_back(
        {Sequent{P, Structure::leaf(S->formula->args[1]), s.kind}});
    std::vector<Position> fam_and, fam_or;
    detail::lattice_occurrences(s, sig, Side::Precedent, fam_and, fam_or);
    for (const auto& fam : {fam_and, fam_or})
      for (const Position& pos : fam) {
        const FormulaPtr& occ = subtree_at(s, pos)->formula;
        inst.groups.push_back(
            {substitute(s, pos, Structure::leaf(occ->args[0]), sig)});
        inst.groups.push_back(
            {substitute(s, pos, Structure::leaf(occ->args[1]), sig)});
      }
    out.push_back(std::move(inst));
  }

  // f/g introduction and structural rules
  const Connective* phat =
      P->kind == Structure::Kind::App && !sig.at(P->conn).residual
          ? &sig.at(P->conn)
          : nullptr;
  const Connective* gchk =
      S->kind == Structure::Kind::App && !sig.at(S->conn).residual
          ? &sig.at(S->conn)
          : nullptr;
  const Connective* suc_f = leaf_app(S, Family::F);
  const Connective* pre_g = leaf_app(P, Family::G);

  if (rf && phat && suc_f && phat->name == suc_f->name && phat->arity() > 0) {
    TabInstance inst{TabRule::FR, {}, {}};
    for (int i = 0; i < phat->arity(); ++i)
      inst.groups.push_back(
          {detail::tab_bot_premise(P->args[i], phat->order_type[i])});
    std::vector<Sequent> chain;
    for (int j = 0; j < phat->arity(); ++j)
      chain.push_back(detail::tab_directed(P->args[j],
                                           Structure::leaf(S->formula->args[j]),
                                           phat->order_type[j]));
    inst.groups.push_back(std::move(chain));
    out.push_back(std::move(inst));
  }
  if (rf && gchk && pre_g && gchk->name == pre_g->name && gchk->arity() > 0) {
    TabInstance inst{TabRule::GL, {}, {}};
    std::vector<Sequent> chain;
    for (int j = 0; j < gchk->arity(); ++j)
      chain.push_back(detail::tab_directed(Structure::leaf(P->formula->args[j]),
                                           S->args[j], gchk->order_type[j]));
    inst.groups.push_back(std::move(chain));
    for (int i = 0; i < gchk->arity(); ++i)
      inst.groups.push_back(
          {detail::tab_top_premise(S->args[i], gchk->order_type[i])});
    out.push_back(std::move(inst));
  }
  if (rf && phat && suc_f && phat->name != suc_f->name && phat->arity() > 0) {
    TabInstance inst{TabRule::FRNeq, {}, {}};
    for (int i = 0; i < phat->arity(); ++i)
      inst.groups.push_back(
          {detail::tab_bot_premise(P->args[i], phat->order_type[i])});
    out.push_back(std::move(inst));
  }
  if (rf && gchk && pre_g && gchk->name != pre_g->name && gchk->arity() > 0) {
    TabInstance inst{TabRule::GLNeq, {}, {}};
    for (int i = 0; i < gchk->arity(); ++i)
      inst.groups.push_back(
          {detail::tab_top_premise(S->args[i], gchk->order_type[i])});
    out.push_back(std::move(inst));
  }
  if (rf && phat && phat->family == Family::F && phat->arity() > 0) {
    if (S->kind == Structure::Kind::StructBot || is_atom_leaf(S)) {
      TabInstance inst{S->kind == Structure::Kind::StructBot
                           ? TabRule::FHatBot
                           : TabRule::FHatAtom,
                       {},
                       {}};
      for (int i = 0; i < phat->arity(); ++i)
        inst.groups.push_back(
            {detail::tab_bot_premise(P->args[i], phat->order_type[i])});
      out.push_back(std::move(inst));
    }
  }
  if (rf && gchk && gchk->family == Family::G && gchk->arity() > 0) {
    if (P->kind == Structure::Kind::StructTop || is_atom_leaf(P)) {
      TabInstance inst{P->kind == Structure::Kind::StructTop ? TabRule::TopHatG
                                                             : TabRule::AtomG,
                       {},
                       {}};
      for (int i = 0; i < gchk->arity(); ++i)
        inst.groups.push_back(
            {detail::tab_top_premise(S->args[i], gchk->order_type[i])});
      out.push_back(std::move(inst));
    }
  }
  if (rf && phat && gchk && phat->arity() + gchk->arity() > 0) {
    TabInstance inst{TabRule::FHatG, {}, {}};
    for (int i = 0; i < phat->arity(); ++i)
      inst.groups.push_back(
          {detail::tab_bot_premise(P->args[i], phat->order_type[i])});
    for (int i = 0; i < gchk->arity(); ++i)
      inst.groups.push_back(
          {detail::tab_top_premise(S->args[i], gchk->order_type[i])});
    out.push_back(std::move(inst));
  }

  // residuation moves last
  for (auto& [m, n] : display_neighbors(s, sig))
    out.push_back({TabRule::Residuation, m, {{n}}});

  return out;
}

// The spec-level expansion operation: applicable instances respecting the
// per-branch residuation side condition.
inline std::vector<TabInstance> expand(
    const Sequent& s, const std::unordered_set<Sequent, SequentHash>& history,
    const Signature& sig) {
  std::vector<TabInstance> out;
  for (TabInstance& inst : tableau_instances(s, sig)) {
    if (inst.rule == TabRule::Residuation && history.count(inst.groups[0][0]))
      continue;
    out.push_back(std::move(inst));
  }
  return out;
}

// --- Saturation --------------------------------------------------------------------

namespace detail {

class TableauBuilder {
 public:
  TableauBuilder(const Signature& sig, TableauOptions opt)
      : sig_(sig), opt_(opt) {}

  TableauResult run(const Sequent& root_seq) {
    TableauResult res;
    res.root = std::make_unique<TableauNode>();
    res.root->sequent = root_seq;
    stats_ = {};
    stats_.nodes = 1;
    branches_.clear();
    std::vector<Sequent> ord{root_seq};
    std::unordered_set<Sequent, SequentHash> have{root_seq};
    extend(res.root.get(), ord, have);
    res.branches = std::move(branches_);
    res.stats = stats_;
    res.stats.branches = static_cast<long>(res.branches.size());
    bool any_closed = false;
    for (const BranchInfo& b : res.branches) {
      if (b.status == BranchStatus::Closed) any_closed = true;
    }
    res.stats.closed_branches = 0;
    for (const BranchInfo& b : res.branches)
      if (b.status == BranchStatus::Closed) res.stats.closed_branches++;
    res.status = any_closed ? Validity::Valid : Validity::Invalid;
    return res;
  }

 private:
  const std::vector<TabInstance>& instances(const Sequent& s) {
    auto it = cache_.find(s);
    if (it == cache_.end())
      it = cache_.emplace(s, tableau_instances(s, sig_)).first;
    return it->second;
  }

  bool satisfied(const TabInstance& inst,
                 const std::unordered_set<Sequent, SequentHash>& have) const {
    for (const auto& group : inst.groups) {
      bool all = true;
      for (const Sequent& q : group)
        if (!have.count(q)) {
          all = false;
          break;
        }
      if (all) return true;
    }
    return false;
  }

  void extend(TableauNode* leaf, std::vector<Sequent>& ord,
              std::unordered_set<Sequent, SequentHash>& have) {
    while (true) {
      const TabInstance* todo = nullptr;
      const Sequent* target = nullptr;
      for (size_t i = 0; i < ord.size() && !todo; ++i) {
        for (const TabInstance& inst : instances(ord[i])) {
          if (satisfied(inst, have)) continue;
          todo = &inst;
          target = &ord[i];
          break;
        }
      }
      if (!todo) {
        record_branch(ord);
        return;
      }

      long target_cx = complexity(*target);
      std::vector<std::vector<Sequent>> chains;
      for (const auto& group : todo->groups) {
        std::vector<Sequent> chain;
        for (const Sequent& q : group) {
          if (have.count(q)) continue;
          bool dup = false;
          for (const Sequent& c : chain)
            if (c == q) dup = true;
          if (!dup) chain.push_back(q);
        }
        if (!chain.empty()) chains.push_back(std::move(chain));
      }
      if (chains.empty()) {
        // cannot happen: unsatisfied instances have a fresh group
        stats_.revisit = true;
        record_branch(ord);
        return;
      }
      if (todo->rule != TabRule::Residuation) {
        for (const auto& chain : chains)
          for (const Sequent& q : chain) {
            stats_.nonresidual_steps++;
            if (complexity(q) >= target_cx) stats_.complexity_decreases = false;
          }
      }

      leaf->rule_applied = todo->rule;
      leaf->split = chains.size() > 1;
      if (chains.size() == 1) {
        for (const Sequent& q : chains[0]) {
          leaf = append(leaf, q);
          ord.push_back(q);
          have.insert(q);
        }
        continue;
      }
      for (auto& chain : chains) {
        std::vector<Sequent> ord2 = ord;
        std::unordered_set<Sequent, SequentHash> have2 = have;
        TableauNode* child = leaf;
        for (const Sequent& q : chain) {
          child = append(child, q);
          ord2.push_back(q);
          have2.insert(q);
        }
        extend(child, ord2, have2);
      }
      return;
    }
  }

  TableauNode* append(TableauNode* parent, const Sequent& q) {
    if (++stats_.nodes > opt_.max_nodes)
      throw BudgetError("tableau node budget exhausted");
    auto node = std::make_unique<TableauNode>();
    node->sequent = q;
    TableauNode* raw = node.get();
    parent->children.push_back(std::move(node));
    return raw;
  }

  void record_branch(const std::vector<Sequent>& ord) {
    BranchInfo info;
    info.sequents = ord;
    for (const Sequent& q : ord)
      if (zero_premise_refutable(q, sig_, opt_.inject_fault))
        info.witnesses.push_back(q);
    info.status =
        info.witnesses.empty() ? BranchStatus::Closed : BranchStatus::Open;
    branches_.push_back(std::move(info));
  }

  const Signature& sig_;
  TableauOptions opt_;
  TableauStats stats_;
  std::vector<BranchInfo> branches_;
  std::unordered_map<Sequent, std::vector<TabInstance>, SequentHash> cache_;
};

}  // namespace detail

// Classification of an explicit branch: Unterminated when a rule instance is
// still unsatisfied, otherwise open iff an open shape occurs.
inline BranchStatus classify_branch(const std::vector<Sequent>& branch,
                                    const Signature& sig) {
  std::unordered_set<Sequent, SequentHash> have(branch.begin(), branch.end());
  for (const Sequent& q : branch)
    for (const TabInstance& inst : tableau_instances(q, sig)) {
      bool sat = false;
      for (const auto& group : inst.groups) {
        bool all = true;
        for (const Sequent& g : group)
          if (!have.count(g)) all = false;
        if (all) sat = true;
      }
      if (!sat) return BranchStatus::Unterminated;
    }
  for (const Sequent& q : branch)
    if (zero_premise_refutable(q, sig)) return BranchStatus::Open;
  return BranchStatus::Closed;
}

// Builds the terminated tableau tree for the sequent and classifies it.
// The input must be residual-free; a proves-kind reading is used throughout.
inline TableauResult decide(const Sequent& s, const Signature& sig,
                            TableauOptions opt = {}) {
  if (!residual_free(s, sig))
    throw Error("decide: input contains residuals");
  validate(s, sig);
  detail::TableauBuilder builder(sig, opt);
  return builder.run(s.with_kind(Turnstile::Proves));
}

// --- Export ------------------------------------------------------------------------

inline nlohmann::json to_json(const TableauNode& n, const Signature& sig) {
  nlohmann::json j;
  j["sequent"] = to_string(n.sequent, sig);
  if (n.rule_applied) j["rule_applied"] = to_string(*n.rule_applied);
  j["branch_link"] = n.split ? "new-branch" : "same-branch";
  nlohmann::json kids = nlohmann::json::array();
  for (const auto& c : n.children) kids.push_back(to_json(*c, sig));
  j["children"] = kids;
  return j;
}

namespace detail {
inline void tableau_dot(const TableauNode& n, const Signature& sig,
                        const Signature& full, std::string& out, int& id) {
  int me = id++;
  std::string color;
  if (n.children.empty())
    color = zero_premise_refutable(n.sequent, sig) ? "red" : "green";
  out += "  n" + std::to_string(me) + " [label=\"" + to_string(n.sequent, sig) +
         "\"" + (color.empty() ? "" : ", color=" + color) + "];\n";
  for (const auto& c : n.children) {
    int child = id;
    tableau_dot(*c, sig, full, out, id);
    out += "  n" + std::to_string(me) + " -> n" + std::to_string(child);
    if (n.rule_applied)
      out += " [label=\"" + std::string(to_string(*n.rule_applied)) + "\"]";
    out += ";\n";
  }
}
}  // namespace detail

// DOT export with branch colouring: open leaves red, closed leaves green.
inline std::string to_dot(const TableauResult& res, const Signature& sig) {
  std::string out = "digraph tableau {\n  node [shape=box];\n";
  int id = 0;
  detail::tableau_dot(*res.root, sig, sig, out, id);
  out += "}\n";
  return out;
}

}  // namespace ledr
