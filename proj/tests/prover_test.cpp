#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "ledr/parser.hpp"
#include "ledr/prover.hpp"
#include "ledr/semantics.hpp"

using namespace ledr;

namespace {
Signature unary() {
  return load_signature(R"({"connectives": [
    {"name": "f", "family": "F", "order_type": ["1"]},
    {"name": "g", "family": "G", "order_type": ["1"]}
  ]})");
}
Signature mixed() {
  return load_signature(R"({"connectives": [
    {"name": "f", "family": "F", "order_type": ["1", "d"]},
    {"name": "g", "family": "G", "order_type": ["d", "1"]}
  ]})");
}
}  // namespace

TEST_CASE("identity and simple axioms") {
  Signature sig = unary();
  auto t = prove(parse_sequent("p |- p", sig), sig);
  REQUIRE(t.has_value());
  CHECK(t->rule == ProofRule::Id);
  CHECK(check_derivation(*t, sig));

  CHECK(prove(parse_sequent("bot |- p", sig), sig).has_value());
  CHECK(prove(parse_sequent("p |- top", sig), sig).has_value());
  CHECK(prove(parse_sequent("top |- top", sig), sig).has_value());
  CHECK(prove(parse_sequent("bot |- bot", sig), sig).has_value());
  CHECK(prove(parse_sequent("p & q |- p", sig), sig).has_value());
  CHECK(prove(parse_sequent("p & q |- q | r", sig), sig).has_value());
  CHECK_FALSE(prove(parse_sequent("p |- q", sig), sig).has_value());
  CHECK_FALSE(prove(parse_sequent("p | q |- p & q", sig), sig).has_value());
  CHECK_FALSE(prove(parse_sequent("top |- bot", sig), sig).has_value());
}

TEST_CASE("paper example sequents") {
  Signature sig = unary();
  // valid
  auto a = prove(parse_sequent("g(p) & g(q) |- g(p & q)", sig), sig);
  REQUIRE(a.has_value());
  CHECK(check_derivation(*a, sig));
  auto b = prove(parse_sequent("f(p) |- f(p)", sig), sig);
  REQUIRE(b.has_value());
  CHECK(check_derivation(*b, sig));
  // invalid: a refutation exists, so no derivation
  CHECK_FALSE(
      prove(parse_sequent("g(p | q) |- g(p) | g(q)", sig), sig).has_value());
  // the duals
  CHECK(prove(parse_sequent("f(p | q) |- f(p) | f(q)", sig), sig).has_value());
  CHECK(prove(parse_sequent("f(p) | f(q) |- f(p | q)", sig), sig).has_value());
  CHECK(prove(parse_sequent("g(p & q) |- g(p) & g(q)", sig), sig).has_value());
  CHECK_FALSE(
      prove(parse_sequent("f(p) & f(q) |- f(p & q)", sig), sig).has_value());
}

TEST_CASE("mixed tonicity provables") {
  Signature sig = mixed();
  // tonicity: f monotone in 1, antitone in 2
  CHECK(prove(parse_sequent("f(p, p | q) |- f(p | q, p)", sig), sig)
            .has_value());
  CHECK(prove(parse_sequent("f(p & q, p) |- f(p, p & q)", sig), sig)
            .has_value());
  CHECK_FALSE(
      prove(parse_sequent("f(p, q) |- f(q, p)", sig), sig).has_value());
  // normality: f distributes over | in its first coordinate
  CHECK(prove(parse_sequent("f(p | q, r) |- f(p, r) | f(q, r)", sig), sig)
            .has_value());
  CHECK(prove(parse_sequent("f(bot, p) |- bot", sig), sig).has_value());
  CHECK(prove(parse_sequent("f(p, top) |- bot", sig), sig).has_value());
  CHECK(prove(parse_sequent("top |- g(bot, top)", sig), sig).has_value());
  // g reverses joins in coordinate 1
  CHECK(prove(parse_sequent("g(p, r) & g(q, r) |- g(p | q, r)", sig), sig)
            .has_value());
}

TEST_CASE("structural inputs and display wrapping") {
  Signature sig = unary();
  Sequent s{Structure::app("f", {Structure::leaf(Formula::bot())}),
            Structure::leaf(Formula::atom("q")), Turnstile::Proves};
  validate(s, sig);
  auto t = prove(s, sig);
  REQUIRE(t.has_value());
  CHECK(check_derivation(*t, sig));

  Sequent s2{Structure::struct_top(),
             Structure::app("g", {Structure::leaf(Formula::top())}),
             Turnstile::Proves};
  auto t2 = prove(s2, sig);
  REQUIRE(t2.has_value());
  CHECK(check_derivation(*t2, sig));
}

TEST_CASE("checker rejects mutations") {
  Signature sig = unary();
  auto t = prove(parse_sequent("p |- p", sig), sig);
  REQUIRE(t.has_value());
  DerivationTree bad = *t;
  bad.conclusion = parse_sequent("p |- q", sig);
  CHECK_FALSE(check_derivation(bad, sig));

  // no rule shape covers a cut-like node
  DerivationTree fake;
  fake.conclusion = parse_sequent("p |- q", sig);
  fake.rule = ProofRule::Id;
  CHECK_FALSE(check_derivation(fake, sig));

  // display node must match the recorded move
  auto f = prove(parse_sequent("f(p) |- f(p)", sig), sig);
  REQUIRE(f.has_value());
  CHECK(check_derivation(*f, sig));
  std::function<bool(DerivationTree&)> flip = [&](DerivationTree& n) {
    if (n.rule == ProofRule::Display) {
      n.move = DisplayMove{"g", 1, true};
      return true;
    }
    for (auto& p : n.premises)
      if (flip(p)) return true;
    return false;
  };
  DerivationTree fbad = *f;
  if (flip(fbad)) CHECK_FALSE(check_derivation(fbad, sig));
}

TEST_CASE("nullary connectives") {
  Signature sig = load_signature(R"({"connectives": [
    {"name": "c", "family": "F", "order_type": []},
    {"name": "d", "family": "G", "order_type": []}
  ]})");
  // ^c |- c and d |- ~d are the nullary introduction axioms
  Sequent a{Structure::app("c", {}),
            Structure::leaf(Formula::app("c", {})), Turnstile::Proves};
  auto t = prove(a, sig);
  REQUIRE(t.has_value());
  CHECK(check_derivation(*t, sig));
  CHECK(prove(parse_sequent("c() |- c()", sig), sig).has_value());
  CHECK(prove(parse_sequent("d() |- d()", sig), sig).has_value());
  CHECK_FALSE(prove(parse_sequent("c() |- d()", sig), sig).has_value());
}

TEST_CASE("residuals in the input are rejected") {
  Signature sig = unary();
  Sequent s{Structure::leaf(Formula::atom("p")),
            Structure::app("f#1", {Structure::leaf(Formula::atom("q"))}),
            Turnstile::Proves};
  CHECK_THROWS_AS(prove(s, sig), Error);
}

TEST_CASE("proved sequents hold in every small model") {
  Signature sig = unary();
  std::vector<const char*> proving = {
      "p |- p", "p & q |- p", "p |- p | q", "g(p) & g(q) |- g(p & q)",
      "f(p | q) |- f(p) | f(q)"};
  auto lattices = enumerate_lattices(3);
  for (const char* text : proving) {
    Sequent s = parse_sequent(text, sig);
    REQUIRE(prove(s, sig).has_value());
    auto atoms = sequent_atoms(s);
    for (const FiniteLattice& lat : lattices) {
      auto fops = enumerate_normal_ops(lat, Family::F, {Tonicity::Mono}, 16);
      auto gops = enumerate_normal_ops(lat, Family::G, {Tonicity::Mono}, 16);
      for (const OpTable& ft : fops)
        for (const OpTable& gt : gops) {
          LatticeExpansion exp;
          exp.lattice = &lat;
          exp.ops["f"] = ft;
          exp.ops["g"] = gt;
          long combos = 1;
          for (size_t i = 0; i < atoms.size(); ++i) combos *= lat.size;
          for (long code = 0; code < combos; ++code) {
            Valuation v;
            long c = code;
            for (int i = static_cast<int>(atoms.size()) - 1; i >= 0; --i) {
              v[atoms[i]] = static_cast<Elem>(c % lat.size);
              c /= lat.size;
            }
            CHECK(holds(exp, sig, v, s));
          }
        }
    }
  }
}

TEST_CASE("derivation exports") {
  Signature sig = unary();
  auto t = prove(parse_sequent("f(p) |- f(p)", sig), sig);
  REQUIRE(t.has_value());
  std::string text = to_text(*t, sig);
  CHECK(text.find("f_R") != std::string::npos);
  nlohmann::json j = to_json(*t, sig);
  CHECK(j["sequent"] == "f(p) |- f(p)");
  std::string dot = to_dot(*t, sig);
  CHECK(dot.find("digraph") != std::string::npos);
}
