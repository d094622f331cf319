// tensor.hpp -- dense multi-index tensors over an arbitrary scalar field.
//
// Storage is row-major over the index list in declared order.  Index
// conventions for the named tensors of an instance (R, Z, Z~, T) live in
// instance.hpp; this file only provides the containers and the contraction
// machinery.
//
// Operator convention used throughout: a tensor of rank 2k read as an
// operator on V^(x)k has its k output indices first and its k input indices
// last, <out_1..out_k | M | in_1..in_k>.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qlie/scalar.hpp"

namespace qlie {

template <typename S>
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<int> shape)
      : shape_(std::move(shape)), data_(size_of(shape_), scalar_ops<S>::zero()) {}

  static std::size_t size_of(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int e : shape) {
      if (e <= 0) throw std::invalid_argument("tensor extent must be positive");
      n *= static_cast<std::size_t>(e);
    }
    return n;
  }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::size_t size() const { return data_.size(); }
  const std::vector<S>& data() const { return data_; }
  std::vector<S>& data() { return data_; }

  std::size_t offset(const std::vector<int>& idx) const {
    if (idx.size() != shape_.size()) throw std::invalid_argument("index rank mismatch");
    std::size_t off = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0 || idx[i] >= shape_[i]) throw std::out_of_range("tensor index out of range");
      off = off * static_cast<std::size_t>(shape_[i]) + static_cast<std::size_t>(idx[i]);
    }
    return off;
  }

  S& at(const std::vector<int>& idx) { return data_[offset(idx)]; }
  const S& at(const std::vector<int>& idx) const { return data_[offset(idx)]; }

  template <typename... I>
  S& operator()(I... idx) {
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <typename... I>
  const S& operator()(I... idx) const {
    return data_[offset({static_cast<int>(idx)...})];
  }

  bool operator==(const DenseTensor& o) const { return shape_ == o.shape_ && data_ == o.data_; }

 private:
  std::vector<int> shape_;
  std::vector<S> data_;
};

namespace detail {

inline void advance_multi_index(std::vector<int>& idx, const std::vector<int>& shape) {
  for (int d = static_cast<int>(shape.size()) - 1; d >= 0; --d) {
    if (++idx[d] < shape[d]) return;
    idx[d] = 0;
  }
  idx.assign(shape.size(), -1);  // signals wrap-around / done
}

}  // namespace detail

/// Einstein contraction over the listed (a-index, b-index) pairs.  Remaining
/// indices keep declared order: a's free indices first, then b's.
template <typename S>
DenseTensor<S> contract(const DenseTensor<S>& a, const DenseTensor<S>& b,
                        const std::vector<std::pair<int, int>>& pairs) {
  std::vector<bool> a_bound(a.rank(), false), b_bound(b.rank(), false);
  for (auto [ia, ib] : pairs) {
    if (ia < 0 || ia >= a.rank() || ib < 0 || ib >= b.rank())
      throw std::invalid_argument("contract: pair index out of range");
    if (a.shape()[ia] != b.shape()[ib])
      throw std::invalid_argument("contract: paired extents differ");
    if (a_bound[ia] || b_bound[ib]) throw std::invalid_argument("contract: repeated index in pairs");
    a_bound[ia] = b_bound[ib] = true;
  }
  std::vector<int> a_free, b_free, out_shape, sum_shape;
  for (int i = 0; i < a.rank(); ++i)
    if (!a_bound[i]) {
      a_free.push_back(i);
      out_shape.push_back(a.shape()[i]);
    }
  for (int i = 0; i < b.rank(); ++i)
    if (!b_bound[i]) {
      b_free.push_back(i);
      out_shape.push_back(b.shape()[i]);
    }
  for (auto [ia, ib] : pairs) sum_shape.push_back(a.shape()[ia]);

  DenseTensor<S> out(out_shape.empty() ? std::vector<int>{1} : out_shape);
  const bool scalar_out = out_shape.empty();

  std::vector<int> aidx(a.rank(), 0), bidx(b.rank(), 0);
  std::vector<int> free_idx(out_shape.size(), 0), sum_idx(sum_shape.size(), 0);
  if (out_shape.empty()) free_idx.clear();

  // Loop over free indices, then contracted ones.
  while (true) {
    for (std::size_t i = 0; i < a_free.size(); ++i) aidx[a_free[i]] = free_idx[i];
    for (std::size_t i = 0; i < b_free.size(); ++i) bidx[b_free[i]] = free_idx[a_free.size() + i];
    S acc = scalar_ops<S>::zero();
    sum_idx.assign(sum_shape.size(), 0);
    while (true) {
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        aidx[pairs[k].first] = sum_idx[k];
        bidx[pairs[k].second] = sum_idx[k];
      }
      const S& av = a.at(aidx);
      if (!(av == scalar_ops<S>::zero())) acc += av * b.at(bidx);
      if (sum_shape.empty()) break;
      detail::advance_multi_index(sum_idx, sum_shape);
      if (sum_idx[0] < 0) break;
    }
    if (scalar_out)
      out.data()[0] = acc;
    else
      out.at(free_idx) = acc;
    if (free_idx.empty()) break;
    detail::advance_multi_index(free_idx, out_shape);
    if (free_idx[0] < 0) break;
  }
  return out;
}

/// Identity operator on V^(x)k, rank-2k tensor.
template <typename S>
DenseTensor<S> identity_op(int n, int k) {
  std::vector<int> shape(2 * k, n);
  DenseTensor<S> t(shape);
  std::vector<int> idx(2 * k, 0), half(k, 0);
  std::vector<int> half_shape(k, n);
  while (true) {
    for (int i = 0; i < k; ++i) idx[i] = idx[k + i] = half[i];
    t.at(idx) = scalar_ops<S>::one();
    detail::advance_multi_index(half, half_shape);
    if (half[0] < 0) break;
  }
  return t;
}

template <typename S>
using OpMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

/// Flatten a rank-2k operator tensor to its matrix under the
/// <out|M|in> convention.
template <typename S>
OpMatrix<S> as_matrix(const DenseTensor<S>& t) {
  if (t.rank() % 2 != 0) throw std::invalid_argument("as_matrix: operator needs even rank");
  const int k = t.rank() / 2;
  int rows = 1, cols = 1;
  for (int i = 0; i < k; ++i) rows *= t.shape()[i];
  for (int i = k; i < 2 * k; ++i) cols *= t.shape()[i];
  OpMatrix<S> m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m(r, c) = t.data()[static_cast<std::size_t>(r) * cols + c];
  return m;
}

template <typename S>
DenseTensor<S> from_matrix(const OpMatrix<S>& m, const std::vector<int>& shape) {
  DenseTensor<S> t(shape);
  if (static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(m.cols()) != t.size())
    throw std::invalid_argument("from_matrix: shape/size mismatch");
  const int cols = static_cast<int>(m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < cols; ++c)
      t.data()[static_cast<std::size_t>(r) * cols + c] = m(r, c);
  return t;
}

/// Composition a after b of two operators V^(x)k -> V^(x)k.
template <typename S>
DenseTensor<S> operator_compose(const DenseTensor<S>& a, const DenseTensor<S>& b) {
  if (a.rank() != b.rank() || a.rank() % 2 != 0)
    throw std::invalid_argument("operator_compose: rank mismatch");
  if (a.shape() != b.shape()) throw std::invalid_argument("operator_compose: shape mismatch");
  OpMatrix<S> m = as_matrix(a) * as_matrix(b);
  return from_matrix(m, a.shape());
}

template <typename S>
DenseTensor<S> operator+(const DenseTensor<S>& a, const DenseTensor<S>& b) {
  if (a.shape() != b.shape()) throw std::invalid_argument("tensor add: shape mismatch");
  DenseTensor<S> out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

template <typename S>
DenseTensor<S> operator-(const DenseTensor<S>& a, const DenseTensor<S>& b) {
  if (a.shape() != b.shape()) throw std::invalid_argument("tensor sub: shape mismatch");
  DenseTensor<S> out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

template <typename S>
DenseTensor<S> operator*(const S& c, const DenseTensor<S>& a) {
  DenseTensor<S> out = a;
  for (auto& v : out.data()) v = c * v;
  return out;
}

/// Largest |entry| as a double; report metric only.
template <typename S>
double max_abs(const DenseTensor<S>& t) {
  double m = 0.0;
  for (const auto& v : t.data()) m = std::max(m, scalar_ops<S>::norm(v));
  return m;
}

template <typename S>
bool all_zero(const DenseTensor<S>& t, double tol = 0.0) {
  for (const auto& v : t.data())
    if (!scalar_ops<S>::is_zero(v, tol)) return false;
  return true;
}

/// Exact (field) inverse of an operator tensor; throws if singular.
template <typename S>
DenseTensor<S> operator_inverse(const DenseTensor<S>& t) {
  OpMatrix<S> m = as_matrix(t);
  Eigen::FullPivLU<OpMatrix<S>> lu(m);
  if (!lu.isInvertible()) throw std::domain_error("operator_inverse: singular operator");
  OpMatrix<S> inv = lu.solve(OpMatrix<S>::Identity(m.rows(), m.cols()));
  return from_matrix(inv, t.shape());
}

template <typename S>
bool is_invertible_op(const DenseTensor<S>& t) {
  Eigen::FullPivLU<OpMatrix<S>> lu(as_matrix(t));
  return lu.isInvertible();
}

/// Solve A x = b where A may be rectangular (stacked constraints).  Returns
/// false if the system is inconsistent (checked by exact/tolerant residual).
template <typename S>
bool solve_linear(const OpMatrix<S>& A, const Eigen::Matrix<S, Eigen::Dynamic, 1>& b,
                  Eigen::Matrix<S, Eigen::Dynamic, 1>& x, double tol = 0.0) {
  Eigen::FullPivLU<OpMatrix<S>> lu(A);
  x = lu.solve(b);
  Eigen::Matrix<S, Eigen::Dynamic, 1> r = A * x - b;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (!scalar_ops<S>::is_zero(r(i), tol)) return false;
  return true;
}

}  // namespace qlie
