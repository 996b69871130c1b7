#include <catch2/catch_amalgamated.hpp>

#include "ledr/signature.hpp"

using namespace ledr;

namespace {
Connective prim(std::string name, Family fam, OrderType ot) {
  Connective c;
  c.name = std::move(name);
  c.family = fam;
  c.order_type = std::move(ot);
  return c;
}
}  // namespace

TEST_CASE("order type arithmetic") {
  CHECK(opposite(opposite(Tonicity::Mono)) == Tonicity::Mono);
  CHECK(opposite(opposite(Tonicity::Anti)) == Tonicity::Anti);
  CHECK(product(Tonicity::Mono, Tonicity::Mono) == Tonicity::Mono);
  CHECK(product(Tonicity::Mono, Tonicity::Anti) == Tonicity::Anti);
  CHECK(product(Tonicity::Anti, Tonicity::Anti) == Tonicity::Mono);

  OrderType ot{Tonicity::Mono, Tonicity::Anti};
  CHECK(opposite(ot) == OrderType{Tonicity::Anti, Tonicity::Mono});
  CHECK(opposite(OrderType{}) == OrderType{});
  CHECK(opposite(OrderType{Tonicity::Anti, Tonicity::Anti}) ==
        OrderType{Tonicity::Mono, Tonicity::Mono});
}

TEST_CASE("unary residual closure") {
  auto sig = Signature::from_primitives(
      {prim("dia", Family::F, {Tonicity::Mono})});
  const Connective& r = sig.residual_of("dia", 1);
  CHECK(r.name == "dia#1");
  CHECK(r.family == Family::G);
  CHECK(r.order_type == OrderType{Tonicity::Mono});
  CHECK(r.residual);
  CHECK(r.parent == "dia");
}

TEST_CASE("mixed tonicity residuals match the worked example") {
  auto sig = Signature::from_primitives(
      {prim("f", Family::F, {Tonicity::Mono, Tonicity::Anti}),
       prim("g", Family::G, {Tonicity::Anti, Tonicity::Mono})});

  // eps_f = (1,d): f#1 in G* with (1,1); f#2 in F* with (1,d)
  const Connective& f1 = sig.residual_of("f", 1);
  CHECK(f1.family == Family::G);
  CHECK(f1.order_type == OrderType{Tonicity::Mono, Tonicity::Mono});
  const Connective& f2 = sig.residual_of("f", 2);
  CHECK(f2.family == Family::F);
  CHECK(f2.order_type == OrderType{Tonicity::Mono, Tonicity::Anti});

  // eps_g = (d,1): g@1 in G* with (d,1); g@2 in F* with (1,1)
  const Connective& g1 = sig.residual_of("g", 1);
  CHECK(g1.name == "g@1");
  CHECK(g1.family == Family::G);
  CHECK(g1.order_type == OrderType{Tonicity::Anti, Tonicity::Mono});
  const Connective& g2 = sig.residual_of("g", 2);
  CHECK(g2.family == Family::F);
  CHECK(g2.order_type == OrderType{Tonicity::Mono, Tonicity::Mono});
}

TEST_CASE("closure size and recomputation") {
  auto sig = Signature::from_primitives(
      {prim("f", Family::F, {Tonicity::Mono, Tonicity::Anti}),
       prim("g", Family::G, {Tonicity::Anti, Tonicity::Mono}),
       prim("c", Family::F, {})});
  // sum of arities, one level only
  CHECK(sig.residuals().size() == 4);
  for (const Connective& r : sig.residuals()) {
    Connective again = Signature::make_residual(sig.at(r.parent), r.coord);
    CHECK(again.order_type == r.order_type);
    CHECK(again.family == r.family);
  }
  CHECK_THROWS_AS(sig.residual_of("f#1", 1), SignatureError);
  CHECK_THROWS_AS(sig.residual_of("f", 3), SignatureError);
  CHECK_THROWS_AS(sig.residual_of("nope", 1), SignatureError);
}

TEST_CASE("json load and canonical print round trip") {
  const char* doc = R"({"connectives": [
    {"name": "g", "family": "G", "arity": 2, "order_type": ["d", "1"]},
    {"name": "f", "family": "F", "arity": 2, "order_type": ["1", "d"]}
  ]})";
  Signature sig = load_signature(doc);
  CHECK(sig.primitives().size() == 2);
  CHECK(sig.at("f").family == Family::F);

  std::string printed = print_signature(sig);
  Signature again = load_signature(printed);
  CHECK(print_signature(again) == printed);
  CHECK(again.residuals().size() == sig.residuals().size());
}

TEST_CASE("load rejections") {
  CHECK_THROWS_AS(load_signature("{"), SignatureError);
  CHECK_THROWS_AS(
      load_signature(R"({"connectives":[{"name":"top","family":"F","order_type":[]}]})"),
      SignatureError);
  CHECK_THROWS_AS(
      load_signature(
          R"({"connectives":[{"name":"f","family":"F","arity":1,"order_type":["1","d"]}]})"),
      SignatureError);
  CHECK_THROWS_AS(
      load_signature(
          R"({"connectives":[{"name":"f","family":"F","order_type":["1"]},
                             {"name":"f","family":"G","order_type":["1"]}]})"),
      SignatureError);
}
