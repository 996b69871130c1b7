#pragma once
// Finite complete lattice expansions: lattice enumeration up to isomorphism,
// enumeration of normal operation tables, residual tables computed from the
// adjunction, structure evaluation and countermodel search. This module is
// the semantic oracle the proof engines are checked against.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ledr/syntax.hpp"

namespace ledr {

struct SemanticsError : Error {
  using Error::Error;
};

using Elem = int;

struct FiniteLattice {
  int size = 0;
  std::vector<uint8_t> leq;   // size*size, row-major: leq[a*size+b] = a <= b
  std::vector<Elem> join;     // size*size
  std::vector<Elem> meet;     // size*size
  Elem bot = 0, top = 0;

  bool le(Elem a, Elem b) const { return leq[a * size + b] != 0; }
  Elem lub(Elem a, Elem b) const { return join[a * size + b]; }
  Elem glb(Elem a, Elem b) const { return meet[a * size + b]; }
};

namespace detail {

// Least upper bound if it exists: the unique minimal common upper bound.
inline std::optional<Elem> bound(const std::vector<uint8_t>& leq, int n, Elem a,
                                 Elem b, bool upper) {
  std::optional<Elem> best;
  for (Elem c = 0; c < n; ++c) {
    bool common = upper ? (leq[a * n + c] && leq[b * n + c])
                        : (leq[c * n + a] && leq[c * n + b]);
    if (!common) continue;
    if (!best) {
      best = c;
      continue;
    }
    if (upper ? leq[c * n + *best] : leq[*best * n + c]) best = c;
  }
  if (!best) return std::nullopt;
  // verify extremality against every common bound
  for (Elem c = 0; c < n; ++c) {
    bool common = upper ? (leq[a * n + c] && leq[b * n + c])
                        : (leq[c * n + a] && leq[c * n + b]);
    if (common && !(upper ? leq[*best * n + c] : leq[c * n + *best]))
      return std::nullopt;
  }
  return best;
}

inline std::string canonical_key(const std::vector<uint8_t>& leq, int n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  do {
    std::string key(n * n, '0');
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (leq[perm[a] * n + perm[b]]) key[a * n + b] = '1';
    if (best.empty() || key < best) best = key;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace detail

// All bounded lattices with exactly n elements, one per isomorphism class.
// Elements are numbered so that a < b implies the integer order, hence 0 is
// the bottom and n-1 the top.
inline std::vector<FiniteLattice> enumerate_lattices_of_size(int n) {
  if (n < 1) return {};
  std::vector<FiniteLattice> out;
  std::vector<std::string> seen;
  int bits = n * (n - 1) / 2;
  std::vector<std::pair<int, int>> slots;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) slots.push_back({a, b});

  for (long mask = 0; mask < (1L << bits); ++mask) {
    std::vector<uint8_t> leq(n * n, 0);
    for (int a = 0; a < n; ++a) leq[a * n + a] = 1;
    for (int i = 0; i < bits; ++i)
      if (mask & (1L << i)) leq[slots[i].first * n + slots[i].second] = 1;
    // transitivity
    bool ok = true;
    for (int a = 0; a < n && ok; ++a)
      for (int b = 0; b < n && ok; ++b)
        if (leq[a * n + b])
          for (int c = 0; c < n; ++c)
            if (leq[b * n + c] && !leq[a * n + c]) {
              ok = false;
              break;
            }
    if (!ok) continue;
    // bounds
    for (int a = 0; a < n && ok; ++a)
      ok = leq[0 * n + a] && leq[a * n + (n - 1)];
    if (!ok) continue;

    FiniteLattice lat;
    lat.size = n;
    lat.leq = leq;
    lat.bot = 0;
    lat.top = n - 1;
    lat.join.assign(n * n, 0);
    lat.meet.assign(n * n, 0);
    for (int a = 0; a < n && ok; ++a)
      for (int b = 0; b < n; ++b) {
        auto j = detail::bound(leq, n, a, b, true);
        auto m = detail::bound(leq, n, a, b, false);
        if (!j || !m) {
          ok = false;
          break;
        }
        lat.join[a * n + b] = *j;
        lat.meet[a * n + b] = *m;
      }
    if (!ok) continue;

    std::string key = detail::canonical_key(leq, n);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    out.push_back(std::move(lat));
  }
  // deterministic order: by canonical key
  std::vector<int> idx(out.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return seen[a] < seen[b]; });
  std::vector<FiniteLattice> sorted;
  for (int i : idx) sorted.push_back(std::move(out[i]));
  return sorted;
}

inline std::vector<FiniteLattice> enumerate_lattices(int max_size,
                                                     int hard_cap = 5) {
  if (max_size > hard_cap)
    throw SemanticsError("lattice size cap exceeded");
  std::vector<FiniteLattice> out;
  for (int n = 1; n <= max_size; ++n)
    for (FiniteLattice& l : enumerate_lattices_of_size(n))
      out.push_back(std::move(l));
  return out;
}

// --- Operation tables --------------------------------------------------------

// n-ary table over lat.size elements, row-major in argument order.
struct OpTable {
  int arity = 0;
  int size = 0;
  std::vector<Elem> data;

  Elem at(const std::vector<Elem>& args) const {
    int idx = 0;
    for (int i = 0; i < arity; ++i) idx = idx * size + args[i];
    return data[idx];
  }
};

namespace detail {

inline std::vector<Elem> join_irreducibles(const FiniteLattice& lat) {
  std::vector<Elem> out;
  for (Elem x = 0; x < lat.size; ++x) {
    if (x == lat.bot) continue;
    int covers = 0;
    // x is join irreducible iff it has exactly one lower cover
    for (Elem y = 0; y < lat.size; ++y) {
      if (y == x || !lat.le(y, x)) continue;
      bool cover = true;
      for (Elem z = 0; z < lat.size; ++z)
        if (z != x && z != y && lat.le(y, z) && lat.le(z, x)) {
          cover = false;
          break;
        }
      if (cover) covers++;
    }
    if (covers == 1) out.push_back(x);
  }
  return out;
}

inline std::vector<Elem> meet_irreducibles(const FiniteLattice& lat) {
  std::vector<Elem> out;
  for (Elem x = 0; x < lat.size; ++x) {
    if (x == lat.top) continue;
    int covers = 0;
    for (Elem y = 0; y < lat.size; ++y) {
      if (y == x || !lat.le(x, y)) continue;
      bool cover = true;
      for (Elem z = 0; z < lat.size; ++z)
        if (z != x && z != y && lat.le(x, z) && lat.le(z, y)) {
          cover = false;
          break;
        }
      if (cover) covers++;
    }
    if (covers == 1) out.push_back(x);
  }
  return out;
}

// Exhaustive normality check of a candidate table.
inline bool normal_table(const FiniteLattice& lat, const OpTable& t,
                         Family fam, const OrderType& ot) {
  int n = lat.size;
  int arity = t.arity;
  std::vector<Elem> args(arity, 0);
  // iterate over all argument tuples
  long total = 1;
  for (int i = 0; i < arity; ++i) total *= n;
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (int i = arity - 1; i >= 0; --i) {
      args[i] = static_cast<Elem>(c % n);
      c /= n;
    }
    Elem base = t.at(args);
    for (int i = 0; i < arity; ++i) {
      bool mono = ot[i] == Tonicity::Mono;
      // unit law in coordinate i
      std::vector<Elem> u = args;
      u[i] = mono == (fam == Family::F) ? lat.bot : lat.top;
      Elem unit_val = fam == Family::F ? lat.bot : lat.top;
      if (t.at(u) != unit_val) return false;
      // binary law in coordinate i against every partner value
      for (Elem b = 0; b < n; ++b) {
        std::vector<Elem> v = args;
        bool join_side = mono == (fam == Family::F);
        v[i] = join_side ? lat.lub(args[i], b) : lat.glb(args[i], b);
        std::vector<Elem> w = args;
        w[i] = b;
        Elem lhs = t.at(v);
        Elem rhs = fam == Family::F ? lat.lub(base, t.at(w))
                                    : lat.glb(base, t.at(w));
        if (lhs != rhs) return false;
      }
    }
  }
  return true;
}

}  // namespace detail

// All tables normal for the family and order type, at most `cap` of them, in
// a deterministic order. The table is generated from its values on the
// per-coordinate irreducibles (join irreducibles on coordinates the operation
// preserves joins in, meet irreducibles where it reverses meets, and dually
// for the G family) and then verified exhaustively.
inline std::vector<OpTable> enumerate_normal_ops(const FiniteLattice& lat,
                                                 Family fam,
                                                 const OrderType& ot,
                                                 long cap = 64,
                                                 long probe_cap = 300000) {
  int n = lat.size;
  int arity = static_cast<int>(ot.size());
  std::vector<OpTable> out;

  if (arity == 0) {
    for (Elem e = 0; e < n; ++e)
      out.push_back(OpTable{0, n, {e}});
    if (static_cast<long>(out.size()) > cap) out.resize(cap);
    return out;
  }
  if (arity > 2) throw SemanticsError("operation arity cap is 2");

  std::vector<Elem> ji = detail::join_irreducibles(lat);
  std::vector<Elem> mi = detail::meet_irreducibles(lat);

  // generator set per coordinate
  std::vector<std::vector<Elem>> base(arity);
  for (int i = 0; i < arity; ++i) {
    bool join_coord = (ot[i] == Tonicity::Mono) == (fam == Family::F);
    base[i] = join_coord ? ji : mi;
  }
  long cells = 1;
  for (int i = 0; i < arity; ++i) cells *= static_cast<long>(base[i].size());

  // assignment: cells entries, each in [0, n)
  std::vector<Elem> assign(cells, 0);
  long probes = 0;

  auto build = [&]() -> OpTable {
    OpTable t;
    t.arity = arity;
    t.size = n;
    long total = 1;
    for (int i = 0; i < arity; ++i) total *= n;
    t.data.assign(total, 0);
    std::vector<Elem> args(arity, 0);
    for (long code = 0; code < total; ++code) {
      long c = code;
      for (int i = arity - 1; i >= 0; --i) {
        args[i] = static_cast<Elem>(c % n);
        c /= n;
      }
      // fold the generator grid: join (F) or meet (G) over the selected cells
      bool f = fam == Family::F;
      Elem acc = f ? lat.bot : lat.top;
      std::vector<long> pick(arity, 0);
      std::function<void(int, long)> walk = [&](int i, long cell) {
        if (i == arity) {
          Elem v = assign[cell];
          acc = f ? lat.lub(acc, v) : lat.glb(acc, v);
          return;
        }
        bool join_coord = (ot[i] == Tonicity::Mono) == f;
        for (size_t k = 0; k < base[i].size(); ++k) {
          Elem g = base[i][k];
          bool sel = join_coord ? lat.le(g, args[i]) : lat.le(args[i], g);
          if (sel) walk(i + 1, cell * base[i].size() + k);
        }
      };
      walk(0, 0);
      t.data[code] = acc;
    }
    return t;
  };

  std::vector<std::vector<Elem>> seen;
  while (true) {
    if (++probes > probe_cap) break;
    OpTable t = build();
    if (detail::normal_table(lat, t, fam, ot) &&
        std::find(seen.begin(), seen.end(), t.data) == seen.end()) {
      seen.push_back(t.data);
      out.push_back(std::move(t));
      if (static_cast<long>(out.size()) >= cap) break;
    }
    // next assignment in lexicographic order
    int i = static_cast<int>(cells) - 1;
    while (i >= 0 && assign[i] == n - 1) assign[i--] = 0;
    if (i < 0) break;
    assign[i]++;
  }
  return out;
}

// --- Expansions ----------------------------------------------------------------

struct LatticeExpansion {
  const FiniteLattice* lattice = nullptr;
  std::map<std::string, OpTable> ops;                       // primitive name -> table
  mutable std::map<std::pair<std::string, int>, OpTable> residual_ops;

  const OpTable& op(const std::string& name) const {
    auto it = ops.find(name);
    if (it == ops.end())
      throw SemanticsError("no operation table for " + name);
    return it->second;
  }
};

// The unique residual table in coordinate i, from the adjunction. For a
// monotone coordinate of f the residual value is the join of all candidates c
// with f(args[c]_i) <= b; antitone coordinates and the g duals take the other
// three extremal forms. Verified against the biconditional exhaustively.
inline OpTable residual_table(const LatticeExpansion& exp,
                              const Connective& parent, int coord,
                              bool verify = true) {
  const FiniteLattice& lat = *exp.lattice;
  const OpTable& base = exp.op(parent.name);
  int n = lat.size;
  int arity = parent.arity();
  int j = coord - 1;
  Tonicity t = parent.order_type[j];
  bool f_fam = parent.family == Family::F;

  OpTable res;
  res.arity = arity;
  res.size = n;
  long total = 1;
  for (int i = 0; i < arity; ++i) total *= n;
  res.data.assign(total, 0);

  std::vector<Elem> args(arity, 0);
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (int i = arity - 1; i >= 0; --i) {
      args[i] = static_cast<Elem>(c % n);
      c /= n;
    }
    Elem b = args[j];  // the result slot of the residual holds b
    // fold candidates c with the defining inequality
    bool join_fold = f_fam == (t == Tonicity::Mono);
    Elem acc = join_fold ? lat.bot : lat.top;
    for (Elem cand = 0; cand < n; ++cand) {
      std::vector<Elem> inner = args;
      inner[j] = cand;
      bool holds = f_fam ? lat.le(base.at(inner), b) : lat.le(b, base.at(inner));
      if (holds) acc = join_fold ? lat.lub(acc, cand) : lat.glb(acc, cand);
    }
    res.data[code] = acc;
  }

  if (verify) {
    // check the biconditional on every tuple
    for (long code = 0; code < total; ++code) {
      long c = code;
      for (int i = arity - 1; i >= 0; --i) {
        args[i] = static_cast<Elem>(c % n);
        c /= n;
      }
      for (Elem b = 0; b < n; ++b) {
        std::vector<Elem> inner = args;
        Elem cand = args[j];
        inner[j] = b;
        Elem rv = res.at(inner);
        bool lhs = f_fam ? lat.le(base.at(args), b) : lat.le(b, base.at(args));
        bool rhs = t == Tonicity::Mono
                       ? (f_fam ? lat.le(cand, rv) : lat.le(rv, cand))
                       : (f_fam ? lat.le(rv, cand) : lat.le(cand, rv));
        if (lhs != rhs)
          throw SemanticsError("residuation check failed for " + parent.name);
      }
    }
  }
  return res;
}

inline const OpTable& residual_op(const LatticeExpansion& exp,
                                  const Signature& sig,
                                  const std::string& rname) {
  const Connective& r = sig.at(rname);
  auto key = std::make_pair(r.parent, r.coord);
  auto it = exp.residual_ops.find(key);
  if (it == exp.residual_ops.end()) {
    OpTable t = residual_table(exp, sig.at(r.parent), r.coord);
    it = exp.residual_ops.emplace(key, std::move(t)).first;
  }
  return it->second;
}

// --- Evaluation -----------------------------------------------------------------

using Valuation = std::map<std::string, Elem>;

inline Elem eval(const LatticeExpansion& exp, const Signature& sig,
                 const Valuation& v, const FormulaPtr& f) {
  const FiniteLattice& lat = *exp.lattice;
  switch (f->kind) {
    case Formula::Kind::Atom: {
      auto it = v.find(f->label);
      if (it == v.end()) throw SemanticsError("unvalued atom: " + f->label);
      return it->second;
    }
    case Formula::Kind::Top:
      return lat.top;
    case Formula::Kind::Bot:
      return lat.bot;
    case Formula::Kind::And:
      return lat.glb(eval(exp, sig, v, f->args[0]), eval(exp, sig, v, f->args[1]));
    case Formula::Kind::Or:
      return lat.lub(eval(exp, sig, v, f->args[0]), eval(exp, sig, v, f->args[1]));
    case Formula::Kind::App: {
      const Connective& c = sig.at(f->label);
      std::vector<Elem> args;
      args.reserve(f->args.size());
      for (const auto& a : f->args) args.push_back(eval(exp, sig, v, a));
      const OpTable& t =
          c.residual ? residual_op(exp, sig, c.name) : exp.op(c.name);
      return t.at(args);
    }
  }
  throw SemanticsError("unreachable");
}

// Structural connectives evaluate through their operational counterparts:
// ^T as top, ~B as bottom, ^f as f, ~g as g, residual structurals through the
// residual tables.
inline Elem eval(const LatticeExpansion& exp, const Signature& sig,
                 const Valuation& v, const StructurePtr& s) {
  const FiniteLattice& lat = *exp.lattice;
  switch (s->kind) {
    case Structure::Kind::Leaf:
      return eval(exp, sig, v, s->formula);
    case Structure::Kind::StructTop:
      return lat.top;
    case Structure::Kind::StructBot:
      return lat.bot;
    case Structure::Kind::App: {
      const Connective& c = sig.at(s->conn);
      std::vector<Elem> args;
      args.reserve(s->args.size());
      for (const auto& a : s->args) args.push_back(eval(exp, sig, v, a));
      const OpTable& t =
          c.residual ? residual_op(exp, sig, c.name) : exp.op(c.name);
      return t.at(args);
    }
  }
  throw SemanticsError("unreachable");
}

inline bool holds(const LatticeExpansion& exp, const Signature& sig,
                  const Valuation& v, const Sequent& seq) {
  return exp.lattice->le(eval(exp, sig, v, seq.pre), eval(exp, sig, v, seq.suc));
}

// --- Countermodel search ---------------------------------------------------------

struct Countermodel {
  FiniteLattice lattice;
  std::map<std::string, OpTable> ops;
  Valuation valuation;
};

namespace detail {
inline void collect_atoms(const FormulaPtr& f, std::vector<std::string>& out) {
  if (f->kind == Formula::Kind::Atom) {
    if (std::find(out.begin(), out.end(), f->label) == out.end())
      out.push_back(f->label);
  }
  for (const auto& a : f->args) collect_atoms(a, out);
}
inline void collect_atoms(const StructurePtr& s, std::vector<std::string>& out) {
  if (s->kind == Structure::Kind::Leaf) collect_atoms(s->formula, out);
  for (const auto& a : s->args) collect_atoms(a, out);
}
inline void collect_conns(const FormulaPtr& f, const Signature& sig,
                          std::vector<std::string>& out) {
  if (f->kind == Formula::Kind::App) {
    const Connective& c = sig.at(f->label);
    const std::string& name = c.residual ? c.parent : c.name;
    if (std::find(out.begin(), out.end(), name) == out.end())
      out.push_back(name);
  }
  for (const auto& a : f->args) collect_conns(a, sig, out);
}
inline void collect_conns(const StructurePtr& s, const Signature& sig,
                          std::vector<std::string>& out) {
  if (s->kind == Structure::Kind::Leaf) collect_conns(s->formula, sig, out);
  if (s->kind == Structure::Kind::App) {
    const Connective& c = sig.at(s->conn);
    const std::string& name = c.residual ? c.parent : c.name;
    if (std::find(out.begin(), out.end(), name) == out.end())
      out.push_back(name);
  }
  for (const auto& a : s->args) collect_conns(a, sig, out);
}
}  // namespace detail

inline std::vector<std::string> sequent_atoms(const Sequent& s) {
  std::vector<std::string> out;
  detail::collect_atoms(s.pre, out);
  detail::collect_atoms(s.suc, out);
  std::sort(out.begin(), out.end());
  return out;
}

// First model and valuation falsifying the sequent over the enumerated
// lattices, operations (within the table cap) and valuations, in a fixed
// deterministic order. Absence of a countermodel within the bound is
// inconclusive, never a validity proof.
inline std::optional<Countermodel> find_countermodel(const Sequent& seq,
                                                     const Signature& sig,
                                                     int max_size,
                                                     long op_cap = 64) {
  std::vector<std::string> atoms = sequent_atoms(seq);
  std::vector<std::string> conns;
  detail::collect_conns(seq.pre, sig, conns);
  detail::collect_conns(seq.suc, sig, conns);
  std::sort(conns.begin(), conns.end());

  Sequent proves = seq.with_kind(Turnstile::Proves);

  for (int n = 1; n <= max_size; ++n) {
    for (const FiniteLattice& lat : enumerate_lattices_of_size(n)) {
      // operation tables per connective occurring in the sequent
      std::vector<std::vector<OpTable>> tables;
      bool empty = false;
      for (const std::string& c : conns) {
        const Connective& d = sig.at(c);
        tables.push_back(
            enumerate_normal_ops(lat, d.family, d.order_type, op_cap));
        if (tables.back().empty()) empty = true;
      }
      if (empty) continue;
      std::vector<size_t> pick(conns.size(), 0);
      while (true) {
        LatticeExpansion exp;
        exp.lattice = &lat;
        for (size_t i = 0; i < conns.size(); ++i)
          exp.ops[conns[i]] = tables[i][pick[i]];
        // valuations in lexicographic order
        long vals = 1;
        for (size_t i = 0; i < atoms.size(); ++i) vals *= n;
        for (long code = 0; code < vals; ++code) {
          Valuation v;
          long c = code;
          for (int i = static_cast<int>(atoms.size()) - 1; i >= 0; --i) {
            v[atoms[i]] = static_cast<Elem>(c % n);
            c /= n;
          }
          if (!holds(exp, sig, v, proves)) {
            Countermodel cm;
            cm.lattice = lat;
            cm.valuation = v;
            for (auto& [k, t] : exp.ops) cm.ops[k] = t;
            return cm;
          }
        }
        // next op assignment
        int i = static_cast<int>(conns.size()) - 1;
        while (i >= 0 && pick[i] + 1 >= tables[i].size()) pick[i--] = 0;
        if (i < 0) break;
        pick[i]++;
      }
    }
  }
  return std::nullopt;
}

// --- Export ----------------------------------------------------------------------

inline nlohmann::json to_json(const FiniteLattice& lat) {
  nlohmann::json j;
  j["size"] = lat.size;
  nlohmann::json rows = nlohmann::json::array();
  for (int a = 0; a < lat.size; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (int b = 0; b < lat.size; ++b)
      row.push_back(lat.le(a, b) ? 1 : 0);
    rows.push_back(row);
  }
  j["leq"] = rows;
  return j;
}

inline nlohmann::json to_json(const OpTable& t) {
  nlohmann::json j;
  j["arity"] = t.arity;
  j["table"] = t.data;
  return j;
}

inline nlohmann::json to_json(const Countermodel& cm) {
  nlohmann::json j;
  j["lattice"] = to_json(cm.lattice);
  nlohmann::json ops;
  for (auto& [name, t] : cm.ops) ops[name] = to_json(t);
  j["ops"] = ops;
  nlohmann::json val;
  for (auto& [a, e] : cm.valuation) val[a] = e;
  j["valuation"] = val;
  return j;
}

}  // namespace ledr
