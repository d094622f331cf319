// words.hpp -- the free model of the inhomogeneous Hopf algebra.
//
// Letters are the generators Lambda^n_m and p^n together with their iterated
// antipodes; words are products of letters; an Element is a finite linear
// combination of words.  No commutation relations are imposed here: equality
// modulo relations is the pairing oracle's job (evaluator.hpp).
//
// Canonical form: P letters carry antipode degree 0 or 1 only.  S^2(p^n)
// rewrites to -sum_k S(p^k) S^2(Lambda^n_k), which follows from applying the
// antipode to S(p^n) = -sum_k S(Lambda^n_k) p^k.  Lambda letters keep
// arbitrary antipode degree.
//
// Debug serialization grammar (stable, for golden tests):
//   element := term ((" + " | " - ") term)*        zero element prints "0"
//   term    := [coef " "] word                     coef omitted when 1
//   word    := letter (" " letter)* | "I"
//   letter  := "L[a,b]" | "P[a]" | "S(" letter ")"
//   coef    := rational | rational"i" | "(" rational "+"|"-" rational"i" ")"
// Terms are ordered by the word ordering below (degree, then lexicographic).

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlie/scalar.hpp"

namespace qlie {

enum class LetterKind : std::uint8_t { Lambda, P };

struct Letter {
  LetterKind kind = LetterKind::Lambda;
  std::uint8_t s = 0;   // antipode degree
  std::uint8_t up = 0;  // n  (row index)
  std::uint8_t dn = 0;  // m  (column index; unused for P)

  static Letter lambda(int n, int m, int s_deg = 0) {
    return Letter{LetterKind::Lambda, static_cast<std::uint8_t>(s_deg),
                  static_cast<std::uint8_t>(n), static_cast<std::uint8_t>(m)};
  }
  static Letter p(int n, int s_deg = 0) {
    return Letter{LetterKind::P, static_cast<std::uint8_t>(s_deg),
                  static_cast<std::uint8_t>(n), 0};
  }
  std::uint32_t packed() const {
    return (static_cast<std::uint32_t>(kind) << 24) | (static_cast<std::uint32_t>(s) << 16) |
           (static_cast<std::uint32_t>(up) << 8) | dn;
  }
  friend bool operator==(const Letter& a, const Letter& b) { return a.packed() == b.packed(); }
  friend bool operator<(const Letter& a, const Letter& b) { return a.packed() < b.packed(); }
};

using Word = std::vector<Letter>;  // empty word is the unit I

inline bool word_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct WordLess {
  bool operator()(const Word& a, const Word& b) const { return word_less(a, b); }
};

inline Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

inline int p_degree(const Word& w) {
  int d = 0;
  for (const auto& l : w)
    if (l.kind == LetterKind::P) ++d;
  return d;
}

inline bool lambda_only(const Word& w) { return p_degree(w) == 0; }

template <typename S>
class Element {
 public:
  using Terms = std::map<Word, S, WordLess>;

  Element() = default;
  static Element unit() { return single(Word{}, scalar_ops<S>::one()); }
  static Element single(Word w, S c = scalar_ops<S>::one()) {
    Element e;
    e.add(std::move(w), std::move(c));
    return e;
  }
  static Element letter(Letter l) { return single(Word{l}); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(Word w, S c) {
    if (c == scalar_ops<S>::zero()) return;
    auto it = terms_.find(w);
    if (it == terms_.end()) {
      terms_.emplace(std::move(w), std::move(c));
    } else {
      it->second += c;
      if (it->second == scalar_ops<S>::zero()) terms_.erase(it);
    }
  }

  Element& operator+=(const Element& o) {
    for (const auto& [w, c] : o.terms_) add(w, c);
    return *this;
  }
  Element& operator-=(const Element& o) {
    for (const auto& [w, c] : o.terms_) add(w, -c);
    return *this;
  }
  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(const S& c, const Element& a) {
    Element out;
    for (const auto& [w, v] : a.terms_) out.add(w, c * v);
    return out;
  }
  friend Element operator*(const Element& a, const Element& b) {
    Element out;
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) out.add(concat(wa, wb), ca * cb);
    return out;
  }
  friend bool operator==(const Element& a, const Element& b) { return a.terms_ == b.terms_; }

 private:
  Terms terms_;
};

/// Finite map (Word, ..., Word) -> S with a fixed number of slots; carrier
/// for iterated coproducts and the adjoint coaction.
template <typename S>
class TensorElement {
 public:
  using Key = std::vector<Word>;
  struct KeyLess {
    bool operator()(const Key& a, const Key& b) const {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), word_less);
    }
  };
  using Terms = std::map<Key, S, KeyLess>;

  explicit TensorElement(int slots = 2) : slots_(slots) {}

  int slots() const { return slots_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(Key k, S c) {
    if (static_cast<int>(k.size()) != slots_)
      throw std::invalid_argument("TensorElement: slot count mismatch");
    if (c == scalar_ops<S>::zero()) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(std::move(k), std::move(c));
    } else {
      it->second += c;
      if (it->second == scalar_ops<S>::zero()) terms_.erase(it);
    }
  }

  friend bool operator==(const TensorElement& a, const TensorElement& b) {
    return a.slots_ == b.slots_ && a.terms_ == b.terms_;
  }

 private:
  int slots_;
  Terms terms_;
};

// --- coproduct ------------------------------------------------------------

/// Delta of a single letter as a list of (left word, right word) pairs, all
/// with coefficient +1.  Uses Delta.S = (S (x) S) flip Delta, so for
/// even antipode degree Delta(S^s Lambda^n_m) = sum_k S^s L^n_k (x) S^s L^k_m
/// and for odd degree the two slots swap roles.
inline std::vector<std::pair<Word, Word>> letter_coproduct(const Letter& l, int n_dim) {
  std::vector<std::pair<Word, Word>> out;
  if (l.kind == LetterKind::Lambda) {
    for (int k = 0; k < n_dim; ++k) {
      Letter a = Letter::lambda(l.up, k, l.s);
      Letter b = Letter::lambda(k, l.dn, l.s);
      if (l.s % 2 == 0)
        out.emplace_back(Word{a}, Word{b});
      else
        out.emplace_back(Word{b}, Word{a});
    }
  } else if (l.s == 0) {
    // Delta(p^n) = Lambda^n_k (x) p^k + p^n (x) I
    for (int k = 0; k < n_dim; ++k)
      out.emplace_back(Word{Letter::lambda(l.up, k, 0)}, Word{Letter::p(k, 0)});
    out.emplace_back(Word{l}, Word{});
  } else if (l.s == 1) {
    // Delta(S(p^n)) = S(p^k) (x) S(Lambda^n_k) + I (x) S(p^n)
    for (int k = 0; k < n_dim; ++k)
      out.emplace_back(Word{Letter::p(k, 1)}, Word{Letter::lambda(l.up, k, 1)});
    out.emplace_back(Word{}, Word{l});
  } else {
    throw std::logic_error("letter_coproduct: non-canonical P letter");
  }
  return out;
}

template <typename S>
TensorElement<S> coproduct(const Element<S>& x, int n_dim) {
  TensorElement<S> out(2);
  for (const auto& [w, c] : x.terms()) {
    // product of letter coproducts
    std::vector<std::pair<Word, Word>> acc{{Word{}, Word{}}};
    for (const auto& l : w) {
      std::vector<std::pair<Word, Word>> next;
      auto lc = letter_coproduct(l, n_dim);
      next.reserve(acc.size() * lc.size());
      for (const auto& [u1, u2] : acc)
        for (const auto& [v1, v2] : lc) next.emplace_back(concat(u1, v1), concat(u2, v2));
      acc = std::move(next);
    }
    for (auto& [u1, u2] : acc) out.add({std::move(u1), std::move(u2)}, c);
  }
  return out;
}

// --- counit ---------------------------------------------------------------

template <typename S>
S counit_word(const Word& w) {
  S v = scalar_ops<S>::one();
  for (const auto& l : w) {
    if (l.kind == LetterKind::P) return scalar_ops<S>::zero();
    if (l.up != l.dn) return scalar_ops<S>::zero();
  }
  return v;
}

template <typename S>
S counit(const Element<S>& x) {
  S v = scalar_ops<S>::zero();
  for (const auto& [w, c] : x.terms()) v += c * counit_word<S>(w);
  return v;
}

// --- antipode -------------------------------------------------------------

/// S of a single letter, canonicalized.  The only non-letter case is a P
/// letter reaching degree 2: S^2(p^n) = -sum_k S(p^k) S^2(Lambda^n_k).
template <typename S>
Element<S> antipode_letter(const Letter& l, int n_dim) {
  if (l.kind == LetterKind::Lambda)
    return Element<S>::letter(Letter::lambda(l.up, l.dn, l.s + 1));
  if (l.s == 0) return Element<S>::letter(Letter::p(l.up, 1));
  Element<S> out;
  for (int k = 0; k < n_dim; ++k)
    out.add(Word{Letter::p(k, 1), Letter::lambda(l.up, k, 2)}, -scalar_ops<S>::one());
  return out;
}

template <typename S>
Element<S> antipode(const Element<S>& x, int n_dim) {
  Element<S> out;
  for (const auto& [w, c] : x.terms()) {
    Element<S> acc = Element<S>::single(Word{}, c);
    for (auto it = w.rbegin(); it != w.rend(); ++it)  // S(uv) = S(v)S(u)
      acc = acc * antipode_letter<S>(*it, n_dim);
    out += acc;
  }
  return out;
}

// --- iterated coproduct and adjoint coaction --------------------------------

/// Applies Delta to one slot of a TensorElement.
template <typename S>
TensorElement<S> coproduct_at_slot(const TensorElement<S>& t, int slot, int n_dim) {
  TensorElement<S> out(t.slots() + 1);
  for (const auto& [key, c] : t.terms()) {
    TensorElement<S> split = coproduct(Element<S>::single(key[slot]), n_dim);
    for (const auto& [pair_key, pc] : split.terms()) {
      std::vector<Word> nk;
      nk.reserve(key.size() + 1);
      for (int i = 0; i < slot; ++i) nk.push_back(key[i]);
      nk.push_back(pair_key[0]);
      nk.push_back(pair_key[1]);
      for (std::size_t i = slot + 1; i < key.size(); ++i) nk.push_back(key[i]);
      out.add(std::move(nk), c * pc);
    }
  }
  return out;
}

/// Delta^(k-1): k >= 2 slots.  `left_bracketing` selects which slot gets
/// split at each stage; coassociativity makes the result independent of the
/// choice, and tests exercise both.
template <typename S>
TensorElement<S> iterated_coproduct(const Element<S>& x, int k, int n_dim,
                                    bool left_bracketing = true) {
  if (k < 2) throw std::invalid_argument("iterated_coproduct: k must be >= 2");
  TensorElement<S> t = coproduct(x, n_dim);
  while (t.slots() < k) t = coproduct_at_slot(t, left_bracketing ? 0 : t.slots() - 1, n_dim);
  return t;
}

/// Ad(a) = a_(1) S(a_(3)) (x) a_(2).
template <typename S>
TensorElement<S> adjoint_coaction(const Element<S>& x, int n_dim) {
  TensorElement<S> d3 = iterated_coproduct(x, 3, n_dim);
  TensorElement<S> out(2);
  for (const auto& [key, c] : d3.terms()) {
    Element<S> lhs =
        Element<S>::single(key[0], c) * antipode(Element<S>::single(key[2]), n_dim);
    for (const auto& [w, cc] : lhs.terms()) out.add({w, key[1]}, cc);
  }
  return out;
}

/// (Delta (x) id)Ad and (id (x) Ad)Ad as three-slot tensors; these agree for a
/// Hopf algebra and the equality is the engine precondition for the Jacobi
/// check.
template <typename S>
TensorElement<S> ad_then_delta_left(const Element<S>& x, int n_dim) {
  TensorElement<S> ad = adjoint_coaction(x, n_dim);
  return coproduct_at_slot(ad, 0, n_dim);
}

template <typename S>
TensorElement<S> ad_then_ad_right(const Element<S>& x, int n_dim) {
  TensorElement<S> ad = adjoint_coaction(x, n_dim);
  TensorElement<S> out(3);
  for (const auto& [key, c] : ad.terms()) {
    TensorElement<S> inner = adjoint_coaction(Element<S>::single(key[1]), n_dim);
    for (const auto& [ik, ic] : inner.terms()) out.add({key[0], ik[0], ik[1]}, c * ic);
  }
  return out;
}

// --- printing ---------------------------------------------------------------

inline std::string letter_str(const Letter& l) {
  std::ostringstream os;
  for (int i = 0; i < l.s; ++i) os << "S(";
  if (l.kind == LetterKind::Lambda)
    os << "L[" << int(l.up) << "," << int(l.dn) << "]";
  else
    os << "P[" << int(l.up) << "]";
  for (int i = 0; i < l.s; ++i) os << ")";
  return os.str();
}

inline std::string word_str(const Word& w) {
  if (w.empty()) return "I";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += " ";
    s += letter_str(w[i]);
  }
  return s;
}

template <typename S>
std::string element_str(const Element<S>& e) {
  if (e.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : e.terms()) {
    S coef = c;
    bool negative = false;
    if constexpr (scalar_ops<S>::exact) {
      if (coef.im == 0 && coef.re < 0) {
        negative = true;
        coef = -coef;
      }
    }
    if (first) {
      if (negative) os << "-";
      first = false;
    } else {
      os << (negative ? " - " : " + ");
    }
    if (!(coef == scalar_ops<S>::one())) os << scalar_ops<S>::str(coef) << " ";
    os << word_str(w);
  }
  return os.str();
}

}  // namespace qlie
