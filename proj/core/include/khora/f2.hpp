#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

namespace khora {

// Dense matrix over F2, each row a block of 64-bit words.
struct BitMatrix {
  std::size_t rows = 0, cols = 0, words = 0;
  std::vector<std::uint64_t> bits;

  BitMatrix() = default;
  BitMatrix(std::size_t r, std::size_t c);

  bool get(std::size_t i, std::size_t j) const {
    return (bits[i * words + (j >> 6)] >> (j & 63)) & 1u;
  }
  void set(std::size_t i, std::size_t j) {
    bits[i * words + (j >> 6)] |= std::uint64_t(1) << (j & 63);
  }
  void flip(std::size_t i, std::size_t j) {
    bits[i * words + (j >> 6)] ^= std::uint64_t(1) << (j & 63);
  }
  std::uint64_t* row(std::size_t i) { return bits.data() + i * words; }
  const std::uint64_t* row(std::size_t i) const { return bits.data() + i * words; }

  void xor_rows(std::size_t dst, std::size_t src);
  void swap_rows(std::size_t a, std::size_t b);
  void append_row();
  void append_row(const std::vector<std::uint32_t>& support);
  bool row_empty(std::size_t i) const;
  std::vector<std::uint32_t> row_support(std::size_t i) const;
};

// Sparse alternative: each row is a sorted list of column indices.
using SparseRows = std::vector<std::vector<std::uint32_t>>;

BitMatrix to_dense(const SparseRows& rows, std::size_t cols);

// symmetric difference of two sorted index lists
std::vector<std::uint32_t> support_xor(const std::vector<std::uint32_t>& a,
                                       const std::vector<std::uint32_t>& b);

// In-place reduced row echelon form. Returns the pivot columns in row order.
std::vector<std::size_t> rref(BitMatrix& m);

std::size_t rank_dense(BitMatrix m);
std::size_t rank_sparse(SparseRows rows);

// Dense wins on anything narrow enough to fit comfortably; the sparse
// eliminator takes over on wide matrices where rows^2 words would hurt.
inline constexpr std::size_t kDenseColLimit = 4096;
std::size_t f2_rank(const SparseRows& rows, std::size_t cols);

// Runs both eliminations and throws if they ever disagree.
std::size_t rank_checked(const SparseRows& rows, std::size_t cols);

// Basis of the right kernel {x : m x = 0}, one vector per row of the result.
BitMatrix kernel_basis(const BitMatrix& m);

// Is v in the row span of m? (m by value, it gets reduced.)
bool in_row_span(BitMatrix m, const std::vector<std::uint32_t>& v);

// Incremental sparse elimination: feed vectors, watch the rank grow.
struct Eliminator {
  std::map<std::uint32_t, std::vector<std::uint32_t>> by_pivot;

  // v reduced against everything added so far; empty means dependent
  std::vector<std::uint32_t> reduce(std::vector<std::uint32_t> v) const;
  bool add(std::vector<std::uint32_t> v);  // true iff the rank went up
  std::size_t rank() const { return by_pivot.size(); }
};

}  // namespace khora
