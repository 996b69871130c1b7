#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <random>

#include "ledr/display.hpp"
#include "ledr/parser.hpp"

using namespace ledr;

namespace {

Signature unary(Tonicity f_t = Tonicity::Mono, Tonicity g_t = Tonicity::Mono) {
  Connective f;
  f.name = "f";
  f.family = Family::F;
  f.order_type = {f_t};
  Connective g;
  g.name = "g";
  g.family = Family::G;
  g.order_type = {g_t};
  return Signature::from_primitives({f, g});
}

Signature mixed() {
  return load_signature(R"({"connectives": [
    {"name": "f", "family": "F", "order_type": ["1", "d"]},
    {"name": "g", "family": "G", "order_type": ["d", "1"]}
  ]})");
}

StructurePtr atom_s(const char* n) { return Structure::leaf(Formula::atom(n)); }

}  // namespace

TEST_CASE("single residuation steps") {
  Signature sig = unary();
  Sequent s{Structure::app("f", {atom_s("p")}), atom_s("q"), Turnstile::Proves};
  auto nbs = display_neighbors(s, sig);
  REQUIRE(nbs.size() == 1);
  CHECK(to_string(nbs[0].second, sig) == "p |- ~f#1(q)");
  CHECK(to_string(nbs[0].first, sig) == "F_RES(f,1)");

  // Galois case: p |- ~g(q) with eps_g = (d) moves to q |- ~g@1(p)
  Signature anti = unary(Tonicity::Mono, Tonicity::Anti);
  Sequent gal{atom_s("p"), Structure::app("g", {atom_s("q")}),
              Turnstile::Proves};
  auto gnbs = display_neighbors(gal, anti);
  REQUIRE(gnbs.size() == 1);
  CHECK(to_string(gnbs[0].second, anti) == "q |- ~g@1(p)");
  CHECK(to_string(gnbs[0].first, anti) == "G_GAL(g,1)");

  // no structural connectives, no neighbors
  CHECK(display_neighbors(parse_sequent("p |- q", sig), sig).empty());
}

TEST_CASE("equivalence classes and the edge count") {
  Signature sig = unary();
  Sequent pq = parse_sequent("p |- q", sig);
  CHECK(equivalence_class(pq, sig).size() == 1);
  CHECK(generation_tree_edges(pq) == 1);

  Sequent s{Structure::app("f", {atom_s("p")}), atom_s("q"), Turnstile::Proves};
  CHECK(equivalence_class(s, sig).size() == 2);
  CHECK(generation_tree_edges(s) == 2);

  Signature fanti = unary(Tonicity::Anti, Tonicity::Mono);
  Sequent g{Structure::app("f", {Structure::struct_bot()}), atom_s("t"),
            Turnstile::Proves};
  validate(g, fanti);
  auto cls = equivalence_class(g, fanti);
  CHECK(cls.size() == 2);
  bool found = false;
  for (const Sequent& m : cls)
    if (to_string(m, fanti) == "^f#1(t) |- ~B") found = true;
  CHECK(found);
}

TEST_CASE("move involution") {
  Signature sig = mixed();
  Sequent s{Structure::app("f", {atom_s("p"), Structure::struct_bot()}),
            Structure::app("g", {Structure::struct_top(), atom_s("q")}),
            Turnstile::Refutes};
  validate(s, sig);
  for (auto& [m, n] : display_neighbors(s, sig)) {
    auto back = apply_move(n, m.inverse(), sig);
    REQUIRE(back.has_value());
    CHECK(*back == s);
  }
}

TEST_CASE("display_at") {
  Signature sig = unary();
  FormulaPtr porq = parse_formula("p | q", sig);
  Sequent s{Structure::app("f", {Structure::leaf(porq)}),
            Structure::struct_bot(), Turnstile::Proves};
  auto pos = positions(s, sig);
  REQUIRE(pos.size() == 3);
  Sequent shown = display_at(s, pos[1], sig);
  CHECK(to_string(shown, sig) == "p | q |- ~f#1(~B)");

  // identity at the precedent root
  CHECK(display_at(s, pos[0], sig) == s);

  // p |- ~g(q, r) with eps_g = (1,1): displaying q gives ^g@1(p, r) |- q
  Signature bin = load_signature(R"({"connectives": [
    {"name": "g", "family": "G", "order_type": ["1", "1"]}]})");
  Sequent s2{atom_s("p"), Structure::app("g", {atom_s("q"), atom_s("r")}),
             Turnstile::Proves};
  validate(s2, bin);
  auto pos2 = positions(s2, bin);
  REQUIRE(pos2.size() == 4);
  CHECK(pos2[2].path == std::vector<int>{0});
  Sequent shown2 = display_at(s2, pos2[2], bin);
  CHECK(to_string(shown2, bin) == "^g@1(p, r) |- q");
}

TEST_CASE("subst_displayed") {
  Signature sig = unary();
  Sequent s{Structure::app("f", {Structure::leaf(parse_formula("p | q", sig))}),
            Structure::struct_bot(), Turnstile::Proves};
  auto pos = positions(s, sig);
  Sequent out = subst_displayed(s, pos[1], atom_s("p"), sig);
  CHECK(to_string(out, sig) == "^f(p) |- ~B");
  CHECK_THROWS_AS(subst_displayed(s, pos[1], Structure::struct_bot(), sig),
                  Error);
}

TEST_CASE("class size equals edge count on random structures") {
  Signature sig = mixed();
  std::mt19937_64 rng(23);
  std::vector<std::string> atoms{"p", "q"};

  std::function<StructurePtr(int, bool)> gen = [&](int depth,
                                                   bool pre) -> StructurePtr {
    // leaves: atoms, constants of the right polarity
    int choices = depth <= 1 ? 2 : 4;
    switch (rng() % choices) {
      case 0:
        return Structure::leaf(Formula::atom(atoms[rng() % 2]));
      case 1:
        return pre ? Structure::struct_top() : Structure::struct_bot();
      default: {
        // pick any structural connective of the right family, residuals too
        std::vector<const Connective*> cands;
        for (const Connective& c : sig.primitives())
          if ((c.family == Family::F) == pre) cands.push_back(&c);
        for (const Connective& c : sig.residuals())
          if ((c.family == Family::F) == pre) cands.push_back(&c);
        const Connective* c = cands[rng() % cands.size()];
        std::vector<StructurePtr> args;
        for (int i = 0; i < c->arity(); ++i) {
          bool child_pre =
              c->order_type[i] == Tonicity::Mono ? pre : !pre;
          args.push_back(gen(depth - 1, child_pre));
        }
        return Structure::app(c->name, std::move(args));
      }
    }
  };

  for (int i = 0; i < 300; ++i) {
    Sequent s{gen(4, true), gen(4, false), Turnstile::Proves};
    validate(s, sig);
    auto cls = equivalence_class(s, sig);
    CHECK(static_cast<long>(cls.size()) == generation_tree_edges(s));
    // involution on every move of every member
    for (const Sequent& m : cls)
      for (auto& [mv, n] : display_neighbors(m, sig)) {
        auto back = apply_move(n, mv.inverse(), sig);
        REQUIRE(back.has_value());
        CHECK(*back == m);
      }
    // every member is well typed
    for (const Sequent& m : cls) validate(m, sig);
  }
}

TEST_CASE("dot export mentions every member") {
  Signature sig = unary();
  Sequent s{Structure::app("f", {atom_s("p")}), atom_s("q"), Turnstile::Proves};
  std::string dot = class_dot(s, sig);
  CHECK(dot.find("^f(p) |- q") != std::string::npos);
  CHECK(dot.find("p |- ~f#1(q)") != std::string::npos);
  CHECK(dot.find("F_RES(f,1)") != std::string::npos);
}
