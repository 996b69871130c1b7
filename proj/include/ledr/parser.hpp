#pragma once
// Concrete grammar for formulas, structures and sequents.
//
//   sequent   := structure ("|-" | "-|/") structure
//   structure := formula | "^T" | "~B" | ("^"|"~") name "(" structures ")"
//   formula   := disj
//   disj      := conj ("|" conj)*            left associative
//   conj      := primary ("&" primary)*      binds tighter than |
//   primary   := atom | "top" | "bot" | name "(" formulas ")" | "(" formula ")"
//
// Atoms and connective names are lowercase identifiers; residual connective
// names additionally carry a "#i" or "@i" suffix. Structural notation is
// emitted by the printers and accepted back by the parser.

#include <string>
#include <vector>

#include "ledr/syntax.hpp"

namespace ledr {

struct ParseError : Error {
  using Error::Error;
};

namespace detail {

struct Token {
  enum class Kind {
    Ident,    // atom / connective, possibly with #i/@i suffix
    Hat,      // ^
    Tilde,    // ~
    LParen,
    RParen,
    Comma,
    Amp,
    Bar,
    Proves,   // |-
    Refutes,  // -|/
    End,
  };
  Kind kind;
  std::string text;
  size_t pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_])))
      i_++;
    size_t start = i_;
    if (i_ >= src_.size()) {
      tok_ = {Token::Kind::End, "", start};
      return;
    }
    char c = src_[i_];
    auto one = [&](Token::Kind k) {
      i_++;
      tok_ = {k, std::string(1, c), start};
    };
    switch (c) {
      case '(': one(Token::Kind::LParen); return;
      case ')': one(Token::Kind::RParen); return;
      case ',': one(Token::Kind::Comma); return;
      case '&': one(Token::Kind::Amp); return;
      case '^': one(Token::Kind::Hat); return;
      case '~': one(Token::Kind::Tilde); return;
      case '|':
        if (i_ + 1 < src_.size() && src_[i_ + 1] == '-') {
          i_ += 2;
          tok_ = {Token::Kind::Proves, "|-", start};
        } else {
          one(Token::Kind::Bar);
        }
        return;
      case '-':
        if (i_ + 2 < src_.size() && src_[i_ + 1] == '|' && src_[i_ + 2] == '/') {
          i_ += 3;
          tok_ = {Token::Kind::Refutes, "-|/", start};
          return;
        }
        throw ParseError("unexpected '-' at offset " + std::to_string(start));
      default:
        break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) && std::islower(static_cast<unsigned char>(c))) {
      size_t j = i_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
        j++;
      // optional residual suffix  #i or @i
      if (j < src_.size() && (src_[j] == '#' || src_[j] == '@')) {
        size_t k = j + 1;
        while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k])))
          k++;
        if (k > j + 1) j = k;
      }
      tok_ = {Token::Kind::Ident, src_.substr(i_, j - i_), start};
      i_ = j;
      return;
    }
    // uppercase single letters appear only after ^/~ (handled by the parser)
    if (c == 'T' || c == 'B') {
      i_++;
      tok_ = {Token::Kind::Ident, std::string(1, c), start};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "' at offset " +
                     std::to_string(start));
  }

  const std::string& src_;
  size_t i_ = 0;
  Token tok_{Token::Kind::End, "", 0};
};

class Parser {
 public:
  Parser(const std::string& src, const Signature& sig) : lex_(src), sig_(sig) {}

  FormulaPtr formula() {
    FormulaPtr f = disj();
    expect_end();
    return f;
  }

  StructurePtr structure() {
    StructurePtr s = struct_term();
    expect_end();
    return s;
  }

  Sequent sequent() {
    StructurePtr pre = struct_term();
    Turnstile kind;
    Token t = lex_.next();
    if (t.kind == Token::Kind::Proves)
      kind = Turnstile::Proves;
    else if (t.kind == Token::Kind::Refutes)
      kind = Turnstile::Refutes;
    else
      throw ParseError("expected '|-' or '-|/'");
    StructurePtr suc = struct_term();
    expect_end();
    Sequent s{pre, suc, kind};
    validate(s, sig_);
    return s;
  }

 private:
  void expect_end() {
    if (lex_.peek().kind != Token::Kind::End)
      throw ParseError("trailing input at offset " +
                       std::to_string(lex_.peek().pos));
  }

  void expect(Token::Kind k, const char* what) {
    if (lex_.peek().kind != k)
      throw ParseError(std::string("expected ") + what + " at offset " +
                       std::to_string(lex_.peek().pos));
    lex_.next();
  }

  StructurePtr struct_term() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Hat || t.kind == Token::Kind::Tilde) {
      bool hat = t.kind == Token::Kind::Hat;
      lex_.next();
      Token name = lex_.next();
      if (name.kind != Token::Kind::Ident)
        throw ParseError("expected structural name after marker");
      if (hat && name.text == "T") return Structure::struct_top();
      if (!hat && name.text == "B") return Structure::struct_bot();
      const Connective* c = sig_.find(name.text);
      if (!c) throw ParseError("unknown structural connective: " + name.text);
      if ((c->family == Family::F) != hat)
        throw ParseError("marker does not match family of " + name.text);
      expect(Token::Kind::LParen, "'('");
      std::vector<StructurePtr> args;
      if (lex_.peek().kind != Token::Kind::RParen) {
        args.push_back(struct_term());
        while (lex_.peek().kind == Token::Kind::Comma) {
          lex_.next();
          args.push_back(struct_term());
        }
      }
      expect(Token::Kind::RParen, "')'");
      if (static_cast<int>(args.size()) != c->arity())
        throw ParseError("arity mismatch for structural " + name.text);
      return Structure::app(name.text, std::move(args));
    }
    return Structure::leaf(disj());
  }

  FormulaPtr disj() {
    FormulaPtr f = conj();
    while (lex_.peek().kind == Token::Kind::Bar) {
      lex_.next();
      f = Formula::disj(f, conj());
    }
    return f;
  }

  FormulaPtr conj() {
    FormulaPtr f = primary();
    while (lex_.peek().kind == Token::Kind::Amp) {
      lex_.next();
      f = Formula::conj(f, primary());
    }
    return f;
  }

  FormulaPtr primary() {
    Token t = lex_.next();
    if (t.kind == Token::Kind::LParen) {
      FormulaPtr f = disj();
      expect(Token::Kind::RParen, "')'");
      return f;
    }
    if (t.kind != Token::Kind::Ident)
      throw ParseError("expected a formula at offset " + std::to_string(t.pos));
    if (t.text == "top") return Formula::top();
    if (t.text == "bot") return Formula::bot();
    if (lex_.peek().kind == Token::Kind::LParen) {
      const Connective* c = sig_.find(t.text);
      if (!c) throw ParseError("unknown connective: " + t.text);
      lex_.next();
      std::vector<FormulaPtr> args;
      if (lex_.peek().kind != Token::Kind::RParen) {
        args.push_back(disj());
        while (lex_.peek().kind == Token::Kind::Comma) {
          lex_.next();
          args.push_back(disj());
        }
      }
      expect(Token::Kind::RParen, "')'");
      if (static_cast<int>(args.size()) != c->arity())
        throw ParseError("arity mismatch for " + t.text + ": got " +
                         std::to_string(args.size()) + ", want " +
                         std::to_string(c->arity()));
      return Formula::app(t.text, std::move(args));
    }
    if (sig_.find(t.text))
      throw ParseError("connective " + t.text + " used without arguments");
    return Formula::atom(t.text);
  }

  Lexer lex_;
  const Signature& sig_;
};

}  // namespace detail

inline FormulaPtr parse_formula(const std::string& text, const Signature& sig) {
  detail::Parser p(text, sig);
  FormulaPtr f = p.formula();
  validate_formula(f, sig);
  return f;
}

inline StructurePtr parse_structure(const std::string& text,
                                    const Signature& sig) {
  detail::Parser p(text, sig);
  return p.structure();
}

inline Sequent parse_sequent(const std::string& text, const Signature& sig) {
  detail::Parser p(text, sig);
  return p.sequent();
}

}  // namespace ledr
