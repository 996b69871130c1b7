#pragma once
// LE signatures: two disjoint families of connectives (F: join-type,
// G: meet-type), each with an arity and a per-coordinate tonicity, plus the
// one-level residual closure F*/G* that the display rules operate on.

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ledr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SignatureError : Error {
  using Error::Error;
};

// Tonicity of a single coordinate: monotone ("1") or antitone ("d").
enum class Tonicity : uint8_t { Mono, Anti };

inline Tonicity opposite(Tonicity t) {
  return t == Tonicity::Mono ? Tonicity::Anti : Tonicity::Mono;
}

// Tonicity product, isomorphic to {+1,-1} multiplication.
inline Tonicity product(Tonicity a, Tonicity b) {
  return a == b ? Tonicity::Mono : Tonicity::Anti;
}

using OrderType = std::vector<Tonicity>;

inline OrderType opposite(const OrderType& ot) {
  OrderType out;
  out.reserve(ot.size());
  for (Tonicity t : ot) out.push_back(opposite(t));
  return out;
}

inline std::string to_string(const OrderType& ot) {
  std::string s = "(";
  for (size_t i = 0; i < ot.size(); ++i) {
    if (i) s += ",";
    s += ot[i] == Tonicity::Mono ? "1" : "d";
  }
  return s + ")";
}

enum class Family : uint8_t { F, G };

inline Family dual(Family f) { return f == Family::F ? Family::G : Family::F; }

// One connective of F* or G*. Primitive connectives have residual == false;
// residual connectives record which primitive and coordinate they adjoin.
struct Connective {
  std::string name;
  Family family = Family::F;
  OrderType order_type;
  bool residual = false;
  std::string parent;  // set iff residual
  int coord = 0;       // 1-based, set iff residual

  int arity() const { return static_cast<int>(order_type.size()); }
};

// Residual naming: f#i for residuals of F-connectives, g@i for G-connectives.
inline std::string residual_name(const Connective& parent, int i) {
  return parent.name + (parent.family == Family::F ? "#" : "@") +
         std::to_string(i);
}

inline bool valid_connective_name(const std::string& name) {
  if (name.empty() || !std::islower(static_cast<unsigned char>(name[0])))
    return false;
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

class Signature {
 public:
  Signature() = default;

  static Signature from_primitives(std::vector<Connective> prims) {
    Signature sig;
    for (auto& c : prims) {
      if (!valid_connective_name(c.name))
        throw SignatureError("invalid connective name: '" + c.name + "'");
      if (c.name == "top" || c.name == "bot" || c.name == "and" ||
          c.name == "or")
        throw SignatureError("reserved name used as connective: " + c.name);
      if (c.residual)
        throw SignatureError("primitive marked residual: " + c.name);
      if (sig.index_.count(c.name))
        throw SignatureError("duplicate connective name: " + c.name);
      sig.index_[c.name] = {true, static_cast<int>(sig.primitives_.size())};
      sig.primitives_.push_back(std::move(c));
    }
    for (const Connective& c : sig.primitives_)
      for (int i = 1; i <= c.arity(); ++i) {
        Connective r = make_residual(c, i);
        if (sig.index_.count(r.name))
          throw SignatureError("residual name collides: " + r.name);
        sig.index_[r.name] = {false, static_cast<int>(sig.residuals_.size())};
        sig.residuals_.push_back(std::move(r));
      }
    return sig;
  }

  // The descriptor of the i-th residual of primitive f or g. The residual of
  // f in coordinate i lands in G* when eps_f(i)=1 and in F* when eps_f(i)=d;
  // dually for g. In coordinate i the residual keeps the parent tonicity, in
  // the remaining coordinates it is the parent tonicity times the opposite of
  // the parent's i-th tonicity.
  static Connective make_residual(const Connective& c, int i) {
    if (i < 1 || i > c.arity())
      throw SignatureError("residual coordinate out of range for " + c.name);
    Connective r;
    r.name = residual_name(c, i);
    r.residual = true;
    r.parent = c.name;
    r.coord = i;
    r.order_type = c.order_type;
    Tonicity flip = opposite(c.order_type[i - 1]);
    for (int j = 0; j < c.arity(); ++j)
      if (j != i - 1) r.order_type[j] = product(c.order_type[j], flip);
    bool mono = c.order_type[i - 1] == Tonicity::Mono;
    if (c.family == Family::F)
      r.family = mono ? Family::G : Family::F;
    else
      r.family = mono ? Family::F : Family::G;
    return r;
  }

  const Connective* find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return nullptr;
    return it->second.first ? &primitives_[it->second.second]
                            : &residuals_[it->second.second];
  }

  const Connective& at(const std::string& name) const {
    const Connective* c = find(name);
    if (!c) throw SignatureError("unknown connective: " + name);
    return *c;
  }

  const Connective& residual_of(const std::string& name, int i) const {
    const Connective& parent = at(name);
    if (parent.residual)
      throw SignatureError("residual of a residual is not formed: " + name);
    if (i < 1 || i > parent.arity())
      throw SignatureError("coordinate out of range: " + name + " @" +
                           std::to_string(i));
    return at(residual_name(parent, i));
  }

  const std::vector<Connective>& primitives() const { return primitives_; }
  const std::vector<Connective>& residuals() const { return residuals_; }

 private:
  std::vector<Connective> primitives_;
  std::vector<Connective> residuals_;
  std::map<std::string, std::pair<bool, int>> index_;  // (primitive?, idx)
};

// --- JSON configuration ---------------------------------------------------
//
// {"connectives": [{"name": "f", "family": "F", "arity": 2,
//                   "order_type": ["1", "d"]}]}

inline Signature load_signature(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SignatureError(std::string("signature is not valid JSON: ") +
                         e.what());
  }
  if (!doc.is_object() || !doc.contains("connectives") ||
      !doc["connectives"].is_array())
    throw SignatureError("signature document needs a 'connectives' array");
  std::vector<Connective> prims;
  for (const auto& item : doc["connectives"]) {
    Connective c;
    if (!item.contains("name") || !item["name"].is_string())
      throw SignatureError("connective without a name");
    c.name = item["name"].get<std::string>();
    std::string fam = item.value("family", std::string());
    if (fam == "F")
      c.family = Family::F;
    else if (fam == "G")
      c.family = Family::G;
    else
      throw SignatureError("connective " + c.name +
                           ": family must be \"F\" or \"G\"");
    if (!item.contains("order_type") || !item["order_type"].is_array())
      throw SignatureError("connective " + c.name + ": missing order_type");
    for (const auto& t : item["order_type"]) {
      std::string s = t.get<std::string>();
      if (s == "1")
        c.order_type.push_back(Tonicity::Mono);
      else if (s == "d")
        c.order_type.push_back(Tonicity::Anti);
      else
        throw SignatureError("connective " + c.name +
                             ": order_type entries must be \"1\" or \"d\"");
    }
    if (item.contains("arity") &&
        item["arity"].get<int>() != static_cast<int>(c.order_type.size()))
      throw SignatureError("connective " + c.name +
                           ": arity does not match order_type length");
    prims.push_back(std::move(c));
  }
  return Signature::from_primitives(std::move(prims));
}

// Canonical emitter: primitives only (the closure is recomputed on load),
// sorted by name. load_signature(print_signature(s)) == s.
inline std::string print_signature(const Signature& sig) {
  std::vector<const Connective*> prims;
  for (const Connective& c : sig.primitives()) prims.push_back(&c);
  std::sort(prims.begin(), prims.end(),
            [](const Connective* a, const Connective* b) {
              return a->name < b->name;
            });
  nlohmann::json arr = nlohmann::json::array();
  for (const Connective* c : prims) {
    nlohmann::json item;
    item["name"] = c->name;
    item["family"] = c->family == Family::F ? "F" : "G";
    item["arity"] = c->arity();
    nlohmann::json ot = nlohmann::json::array();
    for (Tonicity t : c->order_type) ot.push_back(t == Tonicity::Mono ? "1" : "d");
    item["order_type"] = ot;
    arr.push_back(item);
  }
  nlohmann::json doc;
  doc["connectives"] = arr;
  return doc.dump(2);
}

}  // namespace ledr
