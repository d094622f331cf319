// lie.hpp -- the quantum Lie algebra attached to an instance: the invariant
// one-form basis, the generators L, the braiding on invariant forms, the
// brackets by three routes, and the twisted Leibniz / Jacobi checks.
//
// Form indices: the D = N^2 + N invariant forms are ordered all Theta^a_b
// (lexicographic in (a,b)) followed by all Pi^a.  The generator attached to
// Theta^a_b is L^b_a -- the pairing transposes the matrix indices -- and the
// generator attached to Pi^a is L_a.
//
//   L^a_b = V^a_b eps - V^c_d (f~^a_c * f^d_b) o S,   V^a_b = f~^a_k(Lambda^k_b)
//   L_a   =          - V^c_d (eta~_c * f^d_a) o S
//
// The braiding coefficients sigma[A][B][C][D], meaning
// sigma(Pi^A (x) Pi^B) = sum sigma^{AB}_{CD} Pi^C (x) Pi^D, come from the
// four displayed sector blocks; the Pi (x) Theta output block of the mixed
// input sector is reconstructed (the display is damaged in the source) and
// flagged as such.  Route-equivalence checks arbitrate the reconstruction.
//
// Brackets: [L_A, L_B](w) is evaluated three ways --
//   adjoint    (L_A (x) L_B) Ad(w)
//   sigma_conv (L_A * L_B)(w) - sigma^{CD}_{AB} (L_C * L_D)(w)
//   closed     sum_G C[A][B][G] L_G(w), constants read off the expanded
//              bracket displays (their proof-chain form, which fixes one
//              sign that the theorem display garbles).

#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlie/evaluator.hpp"

namespace qlie {

struct FormIndex {
  bool theta = true;
  int a = 0, b = 0;  // Theta(a,b) or Pi(a)

  static FormIndex th(int a, int b) { return {true, a, b}; }
  static FormIndex pi(int a) { return {false, a, 0}; }
  std::string str() const {
    if (theta) return "Theta[" + std::to_string(a) + "," + std::to_string(b) + "]";
    return "Pi[" + std::to_string(a) + "]";
  }
};

inline int form_count(int n) { return n * n + n; }
inline int form_ordinal(const FormIndex& f, int n) {
  return f.theta ? f.a * n + f.b : n * n + f.a;
}
inline FormIndex form_from_ordinal(int idx, int n) {
  if (idx < n * n) return FormIndex::th(idx / n, idx % n);
  return FormIndex::pi(idx - n * n);
}

template <typename S>
struct LGenerator {
  FormIndex index;
  FunctionalExpr<S> expr;
};

struct BracketRecord {
  int a_idx, b_idx;
  Word word;
  std::string route;
  std::string value;
};

template <typename S>
class QuantumLie {
 public:
  explicit QuantumLie(Evaluator<S>& ev) : ev_(ev), n_(ev.dim()), d_(form_count(ev.dim())) {
    compute_v();
  }

  Evaluator<S>& evaluator() { return ev_; }
  int dim() const { return n_; }
  int form_dim() const { return d_; }
  const DenseTensor<S>& V() const { return v_; }

  // --- generators -------------------------------------------------------------

  /// Values of every generator on one word, indexed by form ordinal.
  const std::vector<S>& l_values(const Word& w) {
    auto it = lval_memo_.find(w);
    if (it != lval_memo_.end()) return it->second;
    std::vector<S> vals(d_, scalar_ops<S>::zero());
    const CompBundle<S>& sb = ev_.sbundle(w);
    S eps_w = counit_word<S>(w);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        // L^b_a attached to Theta(a,b)
        S acc = scalar_ops<S>::zero();
        if (!(eps_w == scalar_ops<S>::zero())) acc += v_.at({b, a}) * eps_w;
        for (int c = 0; c < n_; ++c)
          for (int dd = 0; dd < n_; ++dd) {
            const S& vv = v_.at({c, dd});
            if (vv == scalar_ops<S>::zero()) continue;
            acc -= vv * sb.cff.at({dd, b, c, a});
          }
        vals[form_ordinal(FormIndex::th(a, b), n_)] = acc;
      }
    for (int a = 0; a < n_; ++a) {
      S acc = scalar_ops<S>::zero();
      for (int c = 0; c < n_; ++c)
        for (int dd = 0; dd < n_; ++dd) {
          const S& vv = v_.at({c, dd});
          if (vv == scalar_ops<S>::zero()) continue;
          acc -= vv * sb.cfd.at({dd, c, a});
        }
      vals[form_ordinal(FormIndex::pi(a), n_)] = acc;
    }
    auto [pos, inserted] = lval_memo_.emplace(w, std::move(vals));
    (void)inserted;
    return pos->second;
  }

  S l_value(const FormIndex& A, const Word& w) { return l_values(w)[form_ordinal(A, n_)]; }

  S l_value_elem(const FormIndex& A, const Element<S>& e) {
    S acc = scalar_ops<S>::zero();
    for (const auto& [w, c] : e.terms()) acc += c * l_value(A, w);
    return acc;
  }

  /// The generators as formal functional expressions (evaluated through the
  /// primitive path; used as the independent cross-route in tests and in the
  /// dual-coproduct check).
  std::vector<LGenerator<S>> build_l() const {
    std::vector<LGenerator<S>> out;
    for (int idx = 0; idx < d_; ++idx) {
      FormIndex A = form_from_ordinal(idx, n_);
      LGenerator<S> g;
      g.index = A;
      if (A.theta) {
        const int a = A.b, b = A.a;  // L^a_b with (a,b) = (A.b, A.a)
        g.expr.add(v_.at({a, b}), false, {});
        for (int c = 0; c < n_; ++c)
          for (int dd = 0; dd < n_; ++dd)
            g.expr.add(-v_.at({c, dd}), true,
                       {PrimitiveFunctional::ft(a, c), PrimitiveFunctional::f(dd, b)});
      } else {
        for (int c = 0; c < n_; ++c)
          for (int dd = 0; dd < n_; ++dd)
            g.expr.add(-v_.at({c, dd}), true,
                       {PrimitiveFunctional::eta_down(c), PrimitiveFunctional::f(dd, A.a)});
      }
      out.push_back(std::move(g));
    }
    return out;
  }

  // --- braiding ----------------------------------------------------------------

  /// sigma[A][B][C][D]: coefficient of Pi^C (x) Pi^D in sigma(Pi^A (x) Pi^B).
  const DenseTensor<S>& sigma() {
    if (!sigma_) build_sigma();
    return *sigma_;
  }

  /// Entries produced by the reconstructed Pi (x) Theta output block carry a
  /// provenance flag for reports.
  bool sigma_has_reconstructed_block() const { return true; }

  // --- structure constants --------------------------------------------------------

  /// C[A][B][G] with [L_A, L_B] = sum_G C[A][B][G] L_G.
  const DenseTensor<S>& structure_constants() {
    if (!cconst_) build_constants();
    return *cconst_;
  }

  // --- brackets ---------------------------------------------------------------------

  /// (L_A (x) L_B) applied to a two-slot tensor element.
  S apply_ll(const FormIndex& A, const FormIndex& B, const TensorElement<S>& t) {
    S acc = scalar_ops<S>::zero();
    const int ia = form_ordinal(A, n_), ib = form_ordinal(B, n_);
    for (const auto& [key, c] : t.terms()) {
      const S la = l_values(key[0])[ia];
      if (la == scalar_ops<S>::zero()) continue;
      const S lb = l_values(key[1])[ib];
      if (lb == scalar_ops<S>::zero()) continue;
      acc += c * la * lb;
    }
    return acc;
  }

  /// Grid of (L_X (x) L_Y) values over all pairs, for one two-slot tensor.
  std::vector<S> ll_grid(const TensorElement<S>& t) {
    std::vector<S> grid(static_cast<std::size_t>(d_) * d_, scalar_ops<S>::zero());
    for (const auto& [key, c] : t.terms()) {
      const std::vector<S>& l1 = l_values(key[0]);
      const std::vector<S>& l2 = l_values(key[1]);
      for (int x = 0; x < d_; ++x) {
        if (l1[x] == scalar_ops<S>::zero()) continue;
        const S cx = c * l1[x];
        for (int y = 0; y < d_; ++y)
          if (!(l2[y] == scalar_ops<S>::zero()))
            grid[static_cast<std::size_t>(x) * d_ + y] += cx * l2[y];
      }
    }
    return grid;
  }

  std::vector<S> lll_grid(const TensorElement<S>& t) {
    std::vector<S> grid(static_cast<std::size_t>(d_) * d_ * d_, scalar_ops<S>::zero());
    for (const auto& [key, c] : t.terms()) {
      const std::vector<S>& l1 = l_values(key[0]);
      const std::vector<S>& l2 = l_values(key[1]);
      const std::vector<S>& l3 = l_values(key[2]);
      for (int x = 0; x < d_; ++x) {
        if (l1[x] == scalar_ops<S>::zero()) continue;
        const S cx = c * l1[x];
        for (int y = 0; y < d_; ++y) {
          if (l2[y] == scalar_ops<S>::zero()) continue;
          const S cxy = cx * l2[y];
          for (int z = 0; z < d_; ++z)
            if (!(l3[z] == scalar_ops<S>::zero()))
              grid[(static_cast<std::size_t>(x) * d_ + y) * d_ + z] += cxy * l3[z];
        }
      }
    }
    return grid;
  }

  /// Bracket grids for one word: adjoint route, sigma-convolution route and
  /// closed-form route, each a D x D value table.
  struct BracketGrids {
    std::vector<S> adjoint, sigma_conv, closed_form;
  };

  BracketGrids bracket_grids(const Word& w) {
    BracketGrids g;
    g.adjoint = ll_grid(adjoint_coaction(Element<S>::single(w), n_));
    // convolution grid K[X][Y] = (L_X * L_Y)(w)
    std::vector<S> conv = ll_grid(coproduct(Element<S>::single(w), n_));
    const DenseTensor<S>& sg = sigma();
    g.sigma_conv.assign(conv.size(), scalar_ops<S>::zero());
    for (int a = 0; a < d_; ++a)
      for (int b = 0; b < d_; ++b) {
        S acc = conv[static_cast<std::size_t>(a) * d_ + b];
        for (int c = 0; c < d_; ++c)
          for (int e = 0; e < d_; ++e) {
            const S& sv = sg.at({c, e, a, b});
            if (sv == scalar_ops<S>::zero()) continue;
            acc -= sv * conv[static_cast<std::size_t>(c) * d_ + e];
          }
        g.sigma_conv[static_cast<std::size_t>(a) * d_ + b] = acc;
      }
    const DenseTensor<S>& cc = structure_constants();
    const std::vector<S>& lv = l_values(w);
    g.closed_form.assign(conv.size(), scalar_ops<S>::zero());
    for (int a = 0; a < d_; ++a)
      for (int b = 0; b < d_; ++b) {
        S acc = scalar_ops<S>::zero();
        for (int gg = 0; gg < d_; ++gg) {
          const S& cv = cc.at({a, b, gg});
          if (!(cv == scalar_ops<S>::zero())) acc += cv * lv[gg];
        }
        g.closed_form[static_cast<std::size_t>(a) * d_ + b] = acc;
      }
    return g;
  }

  S bracket(const FormIndex& A, const FormIndex& B, const Word& w, const std::string& route) {
    BracketGrids g = bracket_grids(w);
    const std::size_t idx = static_cast<std::size_t>(form_ordinal(A, n_)) * d_ +
                            form_ordinal(B, n_);
    if (route == "adjoint") return g.adjoint[idx];
    if (route == "sigma_conv") return g.sigma_conv[idx];
    if (route == "closed_form") return g.closed_form[idx];
    throw EngineError("bracket: unknown route '" + route + "'");
  }

  // --- differential ------------------------------------------------------------------

  /// d(w) = sum_A Pi^A (w * L_A): the coefficient element per form index.
  std::map<int, Element<S>> differential(const Word& w) {
    std::map<int, Element<S>> out;
    TensorElement<S> d = coproduct(Element<S>::single(w), n_);
    for (const auto& [key, c] : d.terms()) {
      const std::vector<S>& lv = l_values(key[0]);
      for (int idx = 0; idx < d_; ++idx)
        if (!(lv[idx] == scalar_ops<S>::zero())) out[idx].add(key[1], c * lv[idx]);
    }
    return out;
  }

  /// Bimodule push of one invariant form through an element:
  /// Pi^A x = sum_B (x * phi^A_B) Pi^B with the composite coefficient
  /// functionals of the form-exchange relations.
  std::map<int, Element<S>> push_form_right(const FormIndex& A, const Element<S>& x) {
    std::map<int, Element<S>> out;
    TensorElement<S> d = coproduct(x, n_);
    for (const auto& [key, c] : d.terms()) {
      const CompBundle<S>& b1 = ev_.bundle(key[0]);
      if (A.theta) {
        for (int k = 0; k < n_; ++k) {
          const S& pv = b1.cfd.at({A.a, A.b, k});
          if (!(pv == scalar_ops<S>::zero()))
            out[form_ordinal(FormIndex::pi(k), n_)].add(key[1], c * pv);
          for (int l = 0; l < n_; ++l) {
            const S& tv = b1.cff.at({A.a, l, A.b, k});
            if (!(tv == scalar_ops<S>::zero()))
              out[form_ordinal(FormIndex::th(k, l), n_)].add(key[1], c * tv);
          }
        }
      } else {
        for (int k = 0; k < n_; ++k) {
          const S& pv = b1.cf.at({A.a, k});
          if (!(pv == scalar_ops<S>::zero()))
            out[form_ordinal(FormIndex::pi(k), n_)].add(key[1], c * pv);
          for (int l = 0; l < n_; ++l) {
            const S& tv = b1.cfu.at({A.a, l, k});
            if (!(tv == scalar_ops<S>::zero()))
              out[form_ordinal(FormIndex::th(k, l), n_)].add(key[1], c * tv);
          }
        }
      }
    }
    return out;
  }

  // --- checks ---------------------------------------------------------------------------

  /// Trace invariance identity, as a pairing identity per free index pair:
  /// Lambda^c_b S(Lambda^n_k) f~^k_m(Lambda^m_c) = f~^n_m(Lambda^m_b) I.
  CheckEntry quantum_trace_check(int pairing_order) {
    CheckEntry e;
    e.id = "trace_invariance";
    e.description = "Lambda^c_b S(Lambda^n_k) V^k_c = V^n_b I (pairing identity)";
    e.pass = true;
    for (int nn = 0; nn < n_ && e.pass; ++nn)
      for (int b = 0; b < n_ && e.pass; ++b) {
        Element<S> lhs;
        for (int c = 0; c < n_; ++c)
          for (int k = 0; k < n_; ++k) {
            const S& vv = v_.at({k, c});
            if (vv == scalar_ops<S>::zero()) continue;
            lhs.add(Word{Letter::lambda(c, b, 0), Letter::lambda(nn, k, 1)}, vv);
          }
        Element<S> rhs = Element<S>::single(Word{}, v_.at({nn, b}));
        std::string fw;
        if (!ev_.pairing_equal(lhs, rhs, pairing_order, &fw)) {
          e.pass = false;
          e.witness = "n=" + std::to_string(nn) + " b=" + std::to_string(b) + " vs " + fw;
        }
      }
    return e;
  }

  /// Route equivalence + closed-form closure on a word grid.
  std::vector<CheckEntry> check_brackets(const std::vector<Word>& words) {
    CheckEntry eq{"bracket_routes", "adjoint route = sigma convolution route", 0.0, true};
    CheckEntry cf{"bracket_closed_form", "closed-form constants reproduce the adjoint route",
                  0.0, true};
    CheckEntry tt{"bracket_translation",
                  "[L_a, L_b] vanishes on words of p-degree <= 1 and is compared on "
                  "p-degree-2 words", 0.0, true};
    for (const auto& w : words) {
      BracketGrids g = bracket_grids(w);
      for (int a = 0; a < d_ && (eq.pass || cf.pass || tt.pass); ++a)
        for (int b = 0; b < d_; ++b) {
          const std::size_t idx = static_cast<std::size_t>(a) * d_ + b;
          S d1 = g.adjoint[idx] - g.sigma_conv[idx];
          S d2 = g.adjoint[idx] - g.closed_form[idx];
          eq.residual = std::max(eq.residual, scalar_ops<S>::norm(d1));
          cf.residual = std::max(cf.residual, scalar_ops<S>::norm(d2));
          if (eq.pass && !ev_.is_zero(d1)) {
            eq.pass = false;
            eq.witness = form_from_ordinal(a, n_).str() + "," + form_from_ordinal(b, n_).str() +
                         " on " + word_str(w);
          }
          if (cf.pass && !ev_.is_zero(d2)) {
            cf.pass = false;
            cf.witness = form_from_ordinal(a, n_).str() + "," + form_from_ordinal(b, n_).str() +
                         " on " + word_str(w);
          }
          // the translation-translation bracket must vanish below p-degree 2
          if (a >= n_ * n_ && b >= n_ * n_ && p_degree(w) <= 1) {
            if (tt.pass && !ev_.is_zero(g.adjoint[idx])) {
              tt.pass = false;
              tt.witness = form_from_ordinal(a, n_).str() + "," + form_from_ordinal(b, n_).str() +
                           " on " + word_str(w);
            }
            tt.residual = std::max(tt.residual, scalar_ops<S>::norm(g.adjoint[idx]));
          }
        }
    }
    return {eq, cf, tt};
  }

  /// sigma-twisted Jacobi identity on a word grid, all index triples.
  /// Nested brackets are evaluated in the adjoint picture; the two outer
  /// compositions come from the two coproduct orderings, which is where the
  /// engine's Ad-coassociativity enters.
  CheckEntry check_jacobi(const std::vector<Word>& words) {
    CheckEntry e{"jacobi", "[L_A,[L_B,L_C]] = [[L_A,L_B],L_C] + sigma^{EF}_{AB} [L_E,[L_F,L_C]]",
                 0.0, true};
    const DenseTensor<S>& sg = sigma();
    for (const auto& w : words) {
      Element<S> x = Element<S>::single(w);
      std::vector<S> ga = lll_grid(ad_then_ad_right(x, n_));
      std::vector<S> gb = lll_grid(ad_then_delta_left(x, n_));
      auto at3 = [&](const std::vector<S>& g, int x1, int y1, int z1) -> const S& {
        return g[(static_cast<std::size_t>(x1) * d_ + y1) * d_ + z1];
      };
      for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b)
          for (int c = 0; c < d_; ++c) {
            // [[L_A,L_B],L_C] = [(L_A*L_B),L_C] - sigma^{DE}_{AB} [(L_D*L_E),L_C]
            S mid = at3(gb, a, b, c);
            for (int dd = 0; dd < d_; ++dd)
              for (int ee = 0; ee < d_; ++ee) {
                const S& sv = sg.at({dd, ee, a, b});
                if (sv == scalar_ops<S>::zero()) continue;
                mid -= sv * at3(gb, dd, ee, c);
              }
            S twist = scalar_ops<S>::zero();
            for (int ee = 0; ee < d_; ++ee)
              for (int ff = 0; ff < d_; ++ff) {
                const S& sv = sg.at({ee, ff, a, b});
                if (sv == scalar_ops<S>::zero()) continue;
                twist += sv * at3(ga, ee, ff, c);
              }
            S res = at3(ga, a, b, c) - mid - twist;
            e.residual = std::max(e.residual, scalar_ops<S>::norm(res));
            if (e.pass && !ev_.is_zero(res)) {
              e.pass = false;
              e.witness = form_from_ordinal(a, n_).str() + "," + form_from_ordinal(b, n_).str() +
                          "," + form_from_ordinal(c, n_).str() + " on " + word_str(w);
            }
          }
    }
    return e;
  }

  /// Twisted Leibniz rules, coefficient lines of the derivation:
  ///  L^a_b(uv) = L^a_b(u) eps(v) + (f~^a_c * f^d_b)(S(u)) L^c_d(v)
  ///                              + (eta~^a * f^c_b)(S(u)) L_c(v)
  ///  L_a(uv)   = L_a(u) eps(v)   + f^b_a(S(u)) L_b(v)
  ///                              + (eta~_c * f^d_a)(S(u)) L^c_d(v)
  CheckEntry check_twisted_leibniz(const std::vector<std::pair<Word, Word>>& pairs) {
    CheckEntry e{"twisted_leibniz", "L(uv) expands by the twisted Leibniz rules", 0.0, true};
    for (const auto& [u, v] : pairs) {
      Word uv = concat(u, v);
      const std::vector<S>& luv = l_values(uv);
      const std::vector<S>& lu = l_values(u);
      const std::vector<S>& lv = l_values(v);
      const CompBundle<S>& su = ev_.sbundle(u);
      const S eps_v = counit_word<S>(v);
      for (int a = 0; a < n_ && e.pass; ++a)
        for (int b = 0; b < n_; ++b) {
          // L^a_b is attached to Theta(b,a)
          S rhs = lu[form_ordinal(FormIndex::th(b, a), n_)] * eps_v;
          for (int c = 0; c < n_; ++c) {
            for (int dd = 0; dd < n_; ++dd)
              rhs += su.cff.at({dd, a, c, b}) * lv[form_ordinal(FormIndex::th(dd, c), n_)];
            rhs += su.cfu.at({c, a, b}) * lv[form_ordinal(FormIndex::pi(c), n_)];
          }
          S res = luv[form_ordinal(FormIndex::th(b, a), n_)] - rhs;
          e.residual = std::max(e.residual, scalar_ops<S>::norm(res));
          if (!ev_.is_zero(res)) {
            e.pass = false;
            e.witness = "L^" + std::to_string(a) + "_" + std::to_string(b) + " on (" +
                        word_str(u) + ", " + word_str(v) + ")";
            break;
          }
        }
      for (int a = 0; a < n_ && e.pass; ++a) {
        S rhs = lu[form_ordinal(FormIndex::pi(a), n_)] * eps_v;
        for (int b = 0; b < n_; ++b) rhs += su.cf.at({b, a}) * lv[form_ordinal(FormIndex::pi(b), n_)];
        for (int c = 0; c < n_; ++c)
          for (int dd = 0; dd < n_; ++dd)
            rhs += su.cfd.at({dd, c, a}) * lv[form_ordinal(FormIndex::th(dd, c), n_)];
        S res = luv[form_ordinal(FormIndex::pi(a), n_)] - rhs;
        e.residual = std::max(e.residual, scalar_ops<S>::norm(res));
        if (!ev_.is_zero(res)) {
          e.pass = false;
          e.witness = "L_" + std::to_string(a) + " on (" + word_str(u) + ", " + word_str(v) + ")";
        }
      }
      if (!e.pass) break;
    }
    return e;
  }

  /// The dual coproduct of the generators,
  ///   D'(L^a_b) = L^a_b (x) eps + S'(f^{da}_{cb}) (x) L^c_d + S'(f^{ca}_b) (x) L_c
  ///   D'(L_a)   = L_a (x) eps   + S'(f^b_a) (x) L_b        + S'(f^d_{ca}) (x) L^c_d
  /// evaluated on word pairs.  Same content as the twisted Leibniz rules but
  /// transcribed from the coproduct display and evaluated through the
  /// primitive convolution path, so it double-checks both transcriptions.
  /// Also asserts eps'(L) = 0.
  CheckEntry check_l_coproduct(const std::vector<std::pair<Word, Word>>& pairs) {
    CheckEntry e{"l_coproduct", "D'(L) rows evaluated on word pairs; eps'(L) = 0", 0.0, true};
    std::vector<LGenerator<S>> gens = build_l();
    auto lexpr = [&](const FormIndex& A) -> const FunctionalExpr<S>& {
      return gens[form_ordinal(A, n_)].expr;
    };
    // eps'(L) = 0
    for (int idx = 0; idx < d_ && e.pass; ++idx) {
      S v = ev_.evaluate_expr(gens[idx].expr, Element<S>::unit());
      e.residual = std::max(e.residual, scalar_ops<S>::norm(v));
      if (!ev_.is_zero(v)) {
        e.pass = false;
        e.witness = "eps'(" + gens[idx].index.str() + ") != 0";
      }
    }
    for (const auto& [u, v] : pairs) {
      if (!e.pass) break;
      Element<S> ue = Element<S>::single(u), ve = Element<S>::single(v);
      Element<S> uve = Element<S>::single(concat(u, v));
      const Element<S>& su = ev_.antipoded_word(u);
      const S eps_v = counit_word<S>(v);
      for (int a = 0; a < n_ && e.pass; ++a)
        for (int b = 0; b < n_; ++b) {
          S lhs = ev_.evaluate_expr(lexpr(FormIndex::th(b, a)), uve);
          S rhs = ev_.evaluate_expr(lexpr(FormIndex::th(b, a)), ue) * eps_v;
          for (int c = 0; c < n_; ++c) {
            for (int dd = 0; dd < n_; ++dd) {
              S coef = scalar_ops<S>::zero();
              for (const auto& [w, cc] : su.terms())
                coef += cc * ev_.conv_word(
                                 {PrimitiveFunctional::ft(a, c), PrimitiveFunctional::f(dd, b)}, w);
              if (!(coef == scalar_ops<S>::zero()))
                rhs += coef * ev_.evaluate_expr(lexpr(FormIndex::th(dd, c)), ve);
            }
            S coef = scalar_ops<S>::zero();
            for (const auto& [w, cc] : su.terms())
              coef += cc * ev_.conv_word(
                               {PrimitiveFunctional::eta_up(a), PrimitiveFunctional::f(c, b)}, w);
            if (!(coef == scalar_ops<S>::zero()))
              rhs += coef * ev_.evaluate_expr(lexpr(FormIndex::pi(c)), ve);
          }
          S res = lhs - rhs;
          e.residual = std::max(e.residual, scalar_ops<S>::norm(res));
          if (!ev_.is_zero(res)) {
            e.pass = false;
            e.witness = "D'(L^" + std::to_string(a) + "_" + std::to_string(b) + ") on (" +
                        word_str(u) + ", " + word_str(v) + ")";
            break;
          }
        }
      for (int a = 0; a < n_ && e.pass; ++a) {
        S lhs = ev_.evaluate_expr(lexpr(FormIndex::pi(a)), uve);
        S rhs = ev_.evaluate_expr(lexpr(FormIndex::pi(a)), ue) * eps_v;
        for (int b = 0; b < n_; ++b) {
          S coef = scalar_ops<S>::zero();
          for (const auto& [w, cc] : su.terms())
            coef += cc * ev_.evaluate(PrimitiveFunctional::f(b, a), w);
          if (!(coef == scalar_ops<S>::zero()))
            rhs += coef * ev_.evaluate_expr(lexpr(FormIndex::pi(b)), ve);
        }
        for (int c = 0; c < n_; ++c)
          for (int dd = 0; dd < n_; ++dd) {
            S coef = scalar_ops<S>::zero();
            for (const auto& [w, cc] : su.terms())
              coef += cc * ev_.conv_word(
                               {PrimitiveFunctional::eta_down(c), PrimitiveFunctional::f(dd, a)},
                               w);
            if (!(coef == scalar_ops<S>::zero()))
              rhs += coef * ev_.evaluate_expr(lexpr(FormIndex::th(dd, c)), ve);
          }
        S res = lhs - rhs;
        e.residual = std::max(e.residual, scalar_ops<S>::norm(res));
        if (!ev_.is_zero(res)) {
          e.pass = false;
          e.witness = "D'(L_" + std::to_string(a) + ") on (" + word_str(u) + ", " + word_str(v) +
                      ")";
        }
      }
    }
    return e;
  }

  /// Integration test for the derivative: d(uv) = d(u) v + u d(v) with the
  /// left term pushed through v by the bimodule relations; coefficients are
  /// compared with the pairing oracle.
  CheckEntry check_differential_leibniz(const std::vector<std::pair<Word, Word>>& pairs,
                                        int pairing_order) {
    CheckEntry e{"differential_leibniz", "d(uv) = d(u) v + u d(v) coefficientwise", 0.0, true};
    for (const auto& [u, v] : pairs) {
      if (!e.pass) break;
      Word uv = concat(u, v);
      std::map<int, Element<S>> duv = differential(uv);
      std::map<int, Element<S>> du = differential(u);
      std::map<int, Element<S>> dv = differential(v);
      Element<S> ue = Element<S>::single(u), ve = Element<S>::single(v);
      for (int bidx = 0; bidx < d_; ++bidx) {
        Element<S> lhs = duv.count(bidx) ? duv[bidx] : Element<S>();
        Element<S> rhs;
        if (dv.count(bidx)) rhs += ue * dv[bidx];
        for (auto& [aidx, coefu] : du) {
          std::map<int, Element<S>> pushed = push_form_right(form_from_ordinal(aidx, n_), ve);
          if (pushed.count(bidx)) rhs += coefu * pushed[bidx];
        }
        std::string fw;
        if (!ev_.pairing_equal(lhs, rhs, pairing_order, &fw)) {
          e.pass = false;
          e.witness = form_from_ordinal(bidx, n_).str() + " on (" + word_str(u) + ", " +
                      word_str(v) + ") vs " + fw;
          break;
        }
      }
    }
    return e;
  }

  /// Ad coassociativity (the engine precondition for the Jacobi chain).
  CheckEntry check_ad_coassociativity(const std::vector<Word>& words) {
    CheckEntry e{"ad_coassoc", "(Delta x id)Ad = (id x Ad)Ad", 0.0, true};
    for (const auto& w : words) {
      Element<S> x = Element<S>::single(w);
      if (!(ad_then_delta_left(x, n_) == ad_then_ad_right(x, n_))) {
        e.pass = false;
        e.witness = word_str(w);
        break;
      }
    }
    return e;
  }

  // --- JSON emission ------------------------------------------------------------

  /// sigma as a flat D^4 array in the documented form ordering, plus sparse
  /// structure constants [A, B, G, value].
  nlohmann::json to_json() {
    nlohmann::json j;
    j["n"] = n_;
    j["form_dim"] = d_;
    j["form_order"] = "Theta[a,b] lexicographic, then Pi[a]";
    j["sigma_meaning"] = "sigma[A][B][C][D]: coefficient of Pi^C x Pi^D in sigma(Pi^A x Pi^B)";
    j["sigma_reconstructed_block"] = "Pi x Theta output sector of the Pi x Theta input block";
    nlohmann::json sig = nlohmann::json::array();
    const DenseTensor<S>& sg = sigma();
    for (const auto& v : sg.data()) sig.push_back(scalar_to_json(v));
    j["sigma"] = sig;
    nlohmann::json cons = nlohmann::json::array();
    const DenseTensor<S>& cc = structure_constants();
    for (int a = 0; a < d_; ++a)
      for (int b = 0; b < d_; ++b)
        for (int g = 0; g < d_; ++g) {
          const S& v = cc.at({a, b, g});
          if (v == scalar_ops<S>::zero()) continue;
          cons.push_back(nlohmann::json::array({a, b, g, scalar_to_json(v)}));
        }
    j["structure_constants"] = cons;
    return j;
  }

  static std::pair<DenseTensor<S>, DenseTensor<S>> from_json(const nlohmann::json& j) {
    const int d = j.at("form_dim").get<int>();
    DenseTensor<S> sg(std::vector<int>{d, d, d, d});
    const auto& sig = j.at("sigma");
    for (std::size_t i = 0; i < sg.size(); ++i) sg.data()[i] = scalar_from_json<S>(sig.at(i));
    DenseTensor<S> cc(std::vector<int>{d, d, d});
    for (const auto& row : j.at("structure_constants"))
      cc.at({row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<int>()}) =
          scalar_from_json<S>(row.at(3));
    return {sg, cc};
  }

 private:
  Evaluator<S>& ev_;
  int n_, d_;
  DenseTensor<S> v_;
  std::optional<DenseTensor<S>> sigma_;
  std::optional<DenseTensor<S>> cconst_;
  std::unordered_map<Word, std::vector<S>, WordHash, WordEq> lval_memo_;

  void compute_v() {
    v_ = DenseTensor<S>(std::vector<int>{n_, n_});
    const DenseTensor<S>& ft0 = ev_.lambda_table(Fam::Ftilde, 0);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        S acc = scalar_ops<S>::zero();
        for (int k = 0; k < n_; ++k) acc += ft0.at({a, k, k, b});
        v_(a, b) = acc;
      }
  }

  void build_sigma() {
    DenseTensor<S> sg(std::vector<int>{d_, d_, d_, d_});
    auto set = [&](const FormIndex& A, const FormIndex& B, const FormIndex& C, const FormIndex& D,
                   const S& v) {
      if (!(v == scalar_ops<S>::zero()))
        sg.at({form_ordinal(A, n_), form_ordinal(B, n_), form_ordinal(C, n_),
               form_ordinal(D, n_)}) = v;
    };
    // Theta x Theta -> Theta x Theta only
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        for (int c = 0; c < n_; ++c)
          for (int dd = 0; dd < n_; ++dd) {
            for (int e = 0; e < n_; ++e)
              for (int f = 0; f < n_; ++f) {
                const CompBundle<S>& arg =
                    ev_.sbundle(Word{Letter::lambda(a, e, 0), Letter::lambda(f, b, 1)});
                for (int g = 0; g < n_; ++g)
                  for (int h = 0; h < n_; ++h)
                    set(FormIndex::th(a, b), FormIndex::th(c, dd), FormIndex::th(h, g),
                        FormIndex::th(e, f), arg.cff.at({c, g, dd, h}));
              }
          }
    // Theta x Pi
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        for (int c = 0; c < n_; ++c)
          for (int dd = 0; dd < n_; ++dd)
            for (int e = 0; e < n_; ++e) {
              const CompBundle<S>& arg =
                  ev_.sbundle(Word{Letter::lambda(a, dd, 0), Letter::lambda(e, b, 1)});
              for (int f = 0; f < n_; ++f) {
                set(FormIndex::th(a, b), FormIndex::pi(c), FormIndex::pi(f),
                    FormIndex::th(dd, e), arg.cf.at({c, f}));
                for (int g = 0; g < n_; ++g)
                  set(FormIndex::th(a, b), FormIndex::pi(c), FormIndex::th(f, g),
                      FormIndex::th(dd, e), arg.cfu.at({c, g, f}));
              }
            }
    // Pi x Theta
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        for (int c = 0; c < n_; ++c) {
          for (int f = 0; f < n_; ++f) {
            const CompBundle<S>& arg1 = ev_.sbundle(Word{Letter::lambda(a, f, 0)});
            for (int dd = 0; dd < n_; ++dd)
              for (int e = 0; e < n_; ++e)
                set(FormIndex::pi(a), FormIndex::th(b, c), FormIndex::th(dd, e),
                    FormIndex::pi(f), arg1.cff.at({b, e, c, dd}));
            for (int g = 0; g < n_; ++g) {
              const CompBundle<S>& arg2 =
                  ev_.sbundle(Word{Letter::lambda(a, f, 0), Letter::p(g, 1)});
              for (int dd = 0; dd < n_; ++dd) {
                // reconstructed Pi x Theta output block
                set(FormIndex::pi(a), FormIndex::th(b, c), FormIndex::pi(dd),
                    FormIndex::th(f, g), arg2.cfd.at({b, c, dd}));
                for (int e = 0; e < n_; ++e)
                  set(FormIndex::pi(a), FormIndex::th(b, c), FormIndex::th(dd, e),
                      FormIndex::th(f, g), arg2.cff.at({b, e, c, dd}));
              }
            }
          }
        }
    // Pi x Pi
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        for (int dd = 0; dd < n_; ++dd) {
          const CompBundle<S>& arg1 = ev_.sbundle(Word{Letter::lambda(a, dd, 0)});
          for (int c = 0; c < n_; ++c) {
            set(FormIndex::pi(a), FormIndex::pi(b), FormIndex::pi(c), FormIndex::pi(dd),
                arg1.cf.at({b, c}));
            for (int e = 0; e < n_; ++e)
              set(FormIndex::pi(a), FormIndex::pi(b), FormIndex::th(c, e), FormIndex::pi(dd),
                  arg1.cfu.at({b, e, c}));
          }
          for (int e = 0; e < n_; ++e) {
            const CompBundle<S>& arg2 = ev_.sbundle(Word{Letter::lambda(a, dd, 0), Letter::p(e, 1)});
            for (int c = 0; c < n_; ++c) {
              set(FormIndex::pi(a), FormIndex::pi(b), FormIndex::pi(c), FormIndex::th(dd, e),
                  arg2.cf.at({b, c}));
              for (int f = 0; f < n_; ++f)
                set(FormIndex::pi(a), FormIndex::pi(b), FormIndex::th(c, f), FormIndex::th(dd, e),
                    arg2.cfu.at({b, f, c}));
            }
          }
        }
      }
    sigma_ = std::move(sg);
  }

  void build_constants() {
    DenseTensor<S> cc(std::vector<int>{d_, d_, d_});
    const S zero = scalar_ops<S>::zero();
    auto vsum_cff = [&](const CompBundle<S>& arg, int b, int a) {
      S acc = zero;
      for (int k = 0; k < n_; ++k)
        for (int nn = 0; nn < n_; ++nn) {
          const S& vv = v_.at({k, nn});
          if (!(vv == zero)) acc += vv * arg.cff.at({nn, b, k, a});
        }
      return acc;
    };
    auto vsum_cfd = [&](const CompBundle<S>& arg, int a) {
      S acc = zero;
      for (int k = 0; k < n_; ++k)
        for (int nn = 0; nn < n_; ++nn) {
          const S& vv = v_.at({k, nn});
          if (!(vv == zero)) acc += vv * arg.cfd.at({nn, k, a});
        }
      return acc;
    };
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        // [L^b_a, L^d_c]: Theta x Theta inputs
        for (int c = 0; c < n_; ++c)
          for (int dd = 0; dd < n_; ++dd) {
            for (int g = 0; g < n_; ++g) {
              for (int h = 0; h < n_; ++h) {
                S val = zero;
                if (g == c && dd == h) val += v_.at({b, a});
                val -= vsum_cff(
                    ev_.sbundle(Word{Letter::lambda(g, c, 0), Letter::lambda(dd, h, 1)}), b, a);
                if (!(val == zero))
                  cc.at({form_ordinal(FormIndex::th(a, b), n_),
                         form_ordinal(FormIndex::th(c, dd), n_),
                         form_ordinal(FormIndex::th(g, h), n_)}) = val;
              }
              S val = -vsum_cff(ev_.sbundle(Word{Letter::lambda(g, c, 0), Letter::p(dd, 1)}), b, a);
              if (!(val == zero))
                cc.at({form_ordinal(FormIndex::th(a, b), n_),
                       form_ordinal(FormIndex::th(c, dd), n_),
                       form_ordinal(FormIndex::pi(g), n_)}) = val;
            }
          }
        // [L^b_a, L_c]: Theta x Pi inputs
        for (int c = 0; c < n_; ++c)
          for (int g = 0; g < n_; ++g) {
            S val = zero;
            if (g == c) val += v_.at({b, a});
            val -= vsum_cff(ev_.sbundle(Word{Letter::lambda(g, c, 0)}), b, a);
            if (!(val == zero))
              cc.at({form_ordinal(FormIndex::th(a, b), n_), form_ordinal(FormIndex::pi(c), n_),
                     form_ordinal(FormIndex::pi(g), n_)}) = val;
          }
      }
    // [L_a, L^d_c]: Pi x Theta inputs (sign fixed by the proof chain);
    // [L_a, L_b] contributes no constants.
    for (int a = 0; a < n_; ++a)
      for (int c = 0; c < n_; ++c)
        for (int dd = 0; dd < n_; ++dd)
          for (int g = 0; g < n_; ++g) {
            S val = -vsum_cfd(ev_.sbundle(Word{Letter::lambda(g, c, 0), Letter::p(dd, 1)}), a);
            if (!(val == zero))
              cc.at({form_ordinal(FormIndex::pi(a), n_), form_ordinal(FormIndex::th(c, dd), n_),
                     form_ordinal(FormIndex::pi(g), n_)}) = val;
          }
    cconst_ = std::move(cc);
  }
};

}  // namespace qlie
