#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <random>

#include "ledr/display.hpp"
#include "ledr/parser.hpp"
#include "ledr/syntax.hpp"

using namespace ledr;

namespace {

Signature mixed() {
  return load_signature(R"({"connectives": [
    {"name": "f", "family": "F", "order_type": ["1", "d"]},
    {"name": "g", "family": "G", "order_type": ["d", "1"]}
  ]})");
}

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

// Brute-force branching oracle: materialize the signed trees, then for every
// node check the defining condition by walking its ancestor list.
void collect(const SignedNode& n, std::vector<const SignedNode*> ancestors,
             std::vector<std::pair<const SignedNode*,
                                   std::vector<const SignedNode*>>>& out) {
  out.push_back({&n, ancestors});
  ancestors.push_back(&n);
  for (const auto& c : n.children) collect(c, ancestors, out);
}

bool branching_oracle(const Sequent& s, const Signature& sig) {
  for (auto [root, positive] :
       {std::pair{s.pre, true}, std::pair{s.suc, false}}) {
    SignedNode tree = signed_tree(root, positive, sig);
    std::vector<std::pair<const SignedNode*, std::vector<const SignedNode*>>>
        nodes;
    collect(tree, {}, nodes);
    for (auto& [n, anc] : nodes) {
      bool hit = !n->structural &&
                 ((n->formula_kind == Formula::Kind::Or && n->positive) ||
                  (n->formula_kind == Formula::Kind::And && !n->positive));
      if (!hit) continue;
      bool ok = true;
      for (const SignedNode* a : anc) {
        bool guard = false;
        if (a->structural) {
          if (a->label != "^T" && a->label != "~B") {
            const Connective& c = sig.at(a->label.substr(1));
            guard = !c.residual && ((c.family == Family::F && a->positive) ||
                                    (c.family == Family::G && !a->positive));
          }
        } else if (a->formula_kind == Formula::Kind::App) {
          const Connective& c = sig.at(a->label);
          guard = !c.residual && ((c.family == Family::F && a->positive) ||
                                  (c.family == Family::G && !a->positive));
        }
        if (!guard) {
          ok = false;
          break;
        }
      }
      if (ok) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("parsing and printing") {
  Signature sig = mixed();
  Sequent s = parse_sequent("p & q |- p", sig);
  CHECK(s.kind == Turnstile::Proves);
  CHECK(is_formula_kind(s.pre, Formula::Kind::And));
  CHECK(to_string(s, sig) == "p & q |- p");

  Signature usig = unary();
  Sequent ex1 = parse_sequent("g(p | q) -|/ g(p) | g(q)", usig);
  CHECK(ex1.kind == Turnstile::Refutes);
  CHECK(to_string(ex1, usig) == "g(p | q) -|/ g(p) | g(q)");

  CHECK_THROWS_AS(parse_sequent("f(p, q |- p", sig), ParseError);
  CHECK_THROWS_AS(parse_sequent("f(p) |- p", sig), ParseError);  // arity
  CHECK_THROWS_AS(parse_sequent("h(p) |- p", sig), ParseError);
  CHECK_THROWS_AS(parse_formula("p &", sig), ParseError);
}

TEST_CASE("structural round trip") {
  Signature sig = mixed();
  // ^f(p, ~g(q, r)) |- ~f#1(~B, p)
  StructurePtr st = Structure::app(
      "f", {Structure::leaf(Formula::atom("p")),
            Structure::app("g", {Structure::leaf(Formula::atom("q")),
                                 Structure::leaf(Formula::atom("r"))})});
  StructurePtr su = Structure::app(
      "f#1", {Structure::struct_bot(), Structure::leaf(Formula::atom("p"))});
  Sequent s{st, su, Turnstile::Proves};
  validate(s, sig);
  std::string text = to_string(s, sig);
  Sequent back = parse_sequent(text, sig);
  CHECK(back == s);
}

TEST_CASE("parser printer round trip on random formulas") {
  Signature sig = mixed();
  std::mt19937_64 rng(7);
  std::vector<std::string> atoms{"p", "q", "r"};
  std::function<FormulaPtr(int)> gen = [&](int depth) -> FormulaPtr {
    int pick = static_cast<int>(rng() % (depth <= 1 ? 4 : 8));
    switch (pick) {
      case 0: return Formula::top();
      case 1: return Formula::bot();
      case 2:
      case 3: return Formula::atom(atoms[rng() % atoms.size()]);
      case 4: return Formula::conj(gen(depth - 1), gen(depth - 1));
      case 5: return Formula::disj(gen(depth - 1), gen(depth - 1));
      case 6: return Formula::app("f", {gen(depth - 1), gen(depth - 1)});
      default: return Formula::app("g", {gen(depth - 1), gen(depth - 1)});
    }
  };
  for (int i = 0; i < 500; ++i) {
    FormulaPtr f = gen(4);
    FormulaPtr back = parse_formula(to_string(f), sig);
    CHECK(equal(f, back));
  }
}

TEST_CASE("complexity") {
  Signature sig = mixed();
  Signature usig = unary();
  CHECK(complexity(parse_sequent("p |- q", sig)) == 4);
  CHECK(complexity(parse_sequent("f(p) |- q", usig)) == 6);
  Sequent hat{Structure::app("f", {Structure::leaf(Formula::atom("p"))}),
              Structure::leaf(Formula::atom("q")), Turnstile::Proves};
  CHECK(complexity(hat) == 5);
  CHECK(complexity(parse_sequent("top |- bot", sig)) == 4);
}

TEST_CASE("signed trees") {
  Signature usig = unary();
  // f^(p | q) with eps_f = (1): all nodes positive
  Sequent s{Structure::app("f", {Structure::leaf(parse_formula("p | q", usig))}),
            Structure::struct_bot(), Turnstile::Proves};
  SignedNode t = signed_tree(s.pre, true, usig);
  CHECK(t.label == "^f");
  CHECK(t.positive);
  CHECK(t.children[0].label == "|");
  CHECK(t.children[0].positive);
  CHECK(t.children[0].children[0].positive);

  // g with eps = (d), signed negative: -g, +p
  Signature anti = unary(Tonicity::Mono, Tonicity::Anti);
  SignedNode g = signed_tree(Structure::leaf(parse_formula("g(p)", anti)),
                             false, anti);
  CHECK_FALSE(g.positive);
  CHECK(g.children[0].positive);

  // f(s, t) with eps = (1, d) signed positive: +f, +s, -t
  Signature m = mixed();
  SignedNode fm =
      signed_tree(Structure::leaf(parse_formula("f(s, t)", m)), true, m);
  CHECK(fm.positive);
  CHECK(fm.children[0].positive);
  CHECK_FALSE(fm.children[1].positive);

  nlohmann::json j = signed_tree_json(fm);
  CHECK(j["node"] == "f");
  CHECK(j["children"][1]["sign"] == "-");
}

TEST_CASE("branching") {
  Signature usig = unary();
  Sequent b{Structure::app("f", {Structure::leaf(parse_formula("p | q", usig))}),
            Structure::struct_bot(), Turnstile::Proves};
  CHECK(is_branching(b, usig));
  CHECK(branching_oracle(b, usig));

  Sequent nb = parse_sequent("p & q |- r", usig);
  CHECK_FALSE(is_branching(nb, usig));
  CHECK_FALSE(branching_oracle(nb, usig));

  // +g is not a guard label
  Sequent g = parse_sequent("g(p | q) |- r", usig);
  CHECK_FALSE(is_branching(g, usig));
  CHECK_FALSE(branching_oracle(g, usig));

  // succedent side: -g(p & q) is branching
  Sequent s2 = parse_sequent("r |- g(p & q)", usig);
  CHECK(is_branching(s2, usig));
  CHECK(branching_oracle(s2, usig));
}

TEST_CASE("branching agrees with oracle on random sequents") {
  Signature sig = mixed();
  std::mt19937_64 rng(11);
  std::vector<std::string> atoms{"p", "q"};
  std::function<FormulaPtr(int)> gen = [&](int depth) -> FormulaPtr {
    int pick = static_cast<int>(rng() % (depth <= 1 ? 3 : 7));
    switch (pick) {
      case 0: return Formula::top();
      case 1:
      case 2: return Formula::atom(atoms[rng() % atoms.size()]);
      case 3: return Formula::conj(gen(depth - 1), gen(depth - 1));
      case 4: return Formula::disj(gen(depth - 1), gen(depth - 1));
      case 5: return Formula::app("f", {gen(depth - 1), gen(depth - 1)});
      default: return Formula::app("g", {gen(depth - 1), gen(depth - 1)});
    }
  };
  for (int i = 0; i < 400; ++i) {
    Sequent s{Structure::leaf(gen(3)), Structure::leaf(gen(3)),
              Turnstile::Proves};
    CHECK(is_branching(s, sig) == branching_oracle(s, sig));
  }
}

TEST_CASE("positions and substitution") {
  Signature usig = unary();
  Sequent s{Structure::app("f", {Structure::leaf(parse_formula("p | q", usig))}),
            Structure::struct_bot(), Turnstile::Proves};
  auto pos = positions(s, usig);
  // ^f node, the leaf p|q, and ~B
  REQUIRE(pos.size() == 3);
  CHECK(pos[0].polarity == Polarity::Pre);
  CHECK(pos[1].path == std::vector<int>{0});
  CHECK(pos[1].polarity == Polarity::Pre);
  CHECK(pos[2].side == Side::Succedent);
  CHECK(pos[2].polarity == Polarity::Suc);

  Sequent t = substitute(s, pos[1], Structure::leaf(Formula::atom("p")), usig);
  CHECK(to_string(t, usig) == "^f(p) |- ~B");

  // substituting a succedent-typed tree at a Pre position fails
  CHECK_THROWS_AS(substitute(s, pos[1], Structure::struct_bot(), usig),
                  TypingError);

  // p |- ~g(q): replace q by ~B
  Sequent s2{Structure::leaf(Formula::atom("p")),
             Structure::app("g", {Structure::leaf(Formula::atom("q"))}),
             Turnstile::Proves};
  Signature u1 = unary();
  auto pos2 = positions(s2, u1);
  REQUIRE(pos2.size() == 3);
  CHECK(pos2[2].polarity == Polarity::Suc);
  Sequent t2 = substitute(s2, pos2[2], Structure::struct_bot(), u1);
  CHECK(to_string(t2, u1) == "p |- ~g(~B)");
}

TEST_CASE("atoms keep complexity positive") {
  Signature sig = mixed();
  for (const char* text : {"p |- q", "f(p, q) |- top", "bot |- g(p, p)"}) {
    CHECK(complexity(parse_sequent(text, sig)) > 0);
  }
}

TEST_CASE("residual freeness") {
  Signature sig = mixed();
  Sequent plain = parse_sequent("f(p, q) |- g(q, p)", sig);
  CHECK(residual_free(plain, sig));
  Sequent res{Structure::leaf(Formula::atom("p")),
              Structure::app("f#1", {Structure::leaf(Formula::atom("q")),
                                     Structure::leaf(Formula::atom("r"))}),
              Turnstile::Proves};
  validate(res, sig);
  CHECK_FALSE(residual_free(res, sig));
  // operational residual formulas are representable and detected
  FormulaPtr rf = Formula::app("f#1", {Formula::atom("p"), Formula::atom("q")});
  CHECK_FALSE(residual_free(rf, sig));
}
