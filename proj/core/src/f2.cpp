#include "khora/f2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>

#include "khora/util.hpp"

namespace khora {

BitMatrix::BitMatrix(std::size_t r, std::size_t c)
    : rows(r), cols(c), words((c + 63) / 64), bits(r * words, 0) {}

void BitMatrix::xor_rows(std::size_t dst, std::size_t src) {
  std::uint64_t* d = row(dst);
  const std::uint64_t* s = row(src);
  for (std::size_t w = 0; w < words; ++w) d[w] ^= s[w];
}

void BitMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  std::uint64_t* pa = row(a);
  std::uint64_t* pb = row(b);
  for (std::size_t w = 0; w < words; ++w) std::swap(pa[w], pb[w]);
}

void BitMatrix::append_row() {
  bits.resize(bits.size() + words, 0);
  ++rows;
}

void BitMatrix::append_row(const std::vector<std::uint32_t>& support) {
  append_row();
  for (auto j : support) set(rows - 1, j);
}

bool BitMatrix::row_empty(std::size_t i) const {
  const std::uint64_t* p = row(i);
  for (std::size_t w = 0; w < words; ++w)
    if (p[w]) return false;
  return true;
}

std::vector<std::uint32_t> BitMatrix::row_support(std::size_t i) const {
  std::vector<std::uint32_t> out;
  const std::uint64_t* p = row(i);
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t v = p[w];
    while (v) {
      unsigned b = std::countr_zero(v);
      out.push_back(static_cast<std::uint32_t>(w * 64 + b));
      v &= v - 1;
    }
  }
  return out;
}

BitMatrix to_dense(const SparseRows& rows, std::size_t cols) {
  BitMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (auto j : rows[i]) {
      if (j >= cols) throw std::out_of_range("to_dense: column index past width");
      m.set(i, j);
    }
  return m;
}

std::vector<std::uint32_t> support_xor(const std::vector<std::uint32_t>& a,
                                       const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      out.push_back(a[i++]);
    else if (b[j] < a[i])
      out.push_back(b[j++]);
    else {
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), a.begin() + i, a.end());
  out.insert(out.end(), b.begin() + j, b.end());
  return out;
}

std::vector<std::size_t> rref(BitMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t sel = r;
    while (sel < m.rows && !m.get(sel, c)) ++sel;
    if (sel == m.rows) continue;
    m.swap_rows(sel, r);
    for (std::size_t i = 0; i < m.rows; ++i)
      if (i != r && m.get(i, c)) m.xor_rows(i, r);
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::size_t rank_dense(BitMatrix m) { return rref(m).size(); }

std::size_t rank_sparse(SparseRows rows) {
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> by_pivot;
  std::size_t rank = 0;
  for (auto& r : rows) {
    std::vector<std::uint32_t> cur = std::move(r);
    while (!cur.empty()) {
      auto it = by_pivot.find(cur.front());
      if (it == by_pivot.end()) break;
      cur = support_xor(cur, it->second);
    }
    if (!cur.empty()) {
      std::uint32_t p = cur.front();
      by_pivot.emplace(p, std::move(cur));
      ++rank;
    }
  }
  return rank;
}

std::size_t f2_rank(const SparseRows& rows, std::size_t cols) {
  if (cols <= kDenseColLimit) return rank_dense(to_dense(rows, cols));
  return rank_sparse(rows);
}

std::size_t rank_checked(const SparseRows& rows, std::size_t cols) {
  std::size_t a = rank_dense(to_dense(rows, cols));
  std::size_t b = rank_sparse(rows);
  if (a != b)
    throw std::logic_error(cat("rank_checked: dense ", a, " vs sparse ", b));
  return a;
}

BitMatrix kernel_basis(const BitMatrix& m) {
  BitMatrix red = m;
  std::vector<std::size_t> pivots = rref(red);
  std::vector<char> is_pivot(m.cols, 0);
  for (auto c : pivots) is_pivot[c] = 1;

  BitMatrix out(0, m.cols);
  for (std::size_t f = 0; f < m.cols; ++f) {
    if (is_pivot[f]) continue;
    out.append_row();
    std::size_t i = out.rows - 1;
    out.set(i, f);
    for (std::size_t r = 0; r < pivots.size(); ++r)
      if (red.get(r, f)) out.set(i, pivots[r]);
  }
  return out;
}

std::vector<std::uint32_t> Eliminator::reduce(std::vector<std::uint32_t> v) const {
  while (!v.empty()) {
    auto it = by_pivot.find(v.front());
    if (it == by_pivot.end()) break;
    v = support_xor(v, it->second);
  }
  return v;
}

bool Eliminator::add(std::vector<std::uint32_t> v) {
  v = reduce(std::move(v));
  if (v.empty()) return false;
  std::uint32_t p = v.front();
  by_pivot.emplace(p, std::move(v));
  return true;
}

bool in_row_span(BitMatrix m, const std::vector<std::uint32_t>& v) {
  std::vector<std::size_t> pivots = rref(m);
  std::vector<std::uint32_t> cur = v;
  std::sort(cur.begin(), cur.end());
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    if (std::binary_search(cur.begin(), cur.end(), pivots[r]))
      cur = support_xor(cur, m.row_support(r));
  }
  return cur.empty();
}

}  // namespace khora
