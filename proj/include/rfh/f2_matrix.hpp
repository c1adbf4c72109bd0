#pragma once

// Dense bit-packed matrices over the two-element field.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfh/errors.hpp"

namespace rfh {

class F2Matrix {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  F2Matrix() = default;
  F2Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_per_row_((cols + kWordBits - 1) / kWordBits),
        bits_(rows * words_per_row_, 0) {}

  static F2Matrix zero(std::size_t rows, std::size_t cols) { return F2Matrix(rows, cols); }

  static F2Matrix identity(std::size_t n) {
    F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  static F2Matrix all_ones(std::size_t rows, std::size_t cols) {
    F2Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m.set(i, j, true);
    return m;
  }

  // I + sum_{j<m} e_{(j+1)j} + e_{1m}: identity plus the cyclic down-shift.
  // Column j has ones in rows j and j+1 (mod m); for m = 1 the two cancel.
  static F2Matrix identity_plus_shift(std::size_t m) {
    F2Matrix a = identity(m);
    for (std::size_t j = 0; j < m; ++j) a.flip((j + 1) % m, j);
    return a;
  }

  static F2Matrix from_rows(const std::vector<std::vector<int>>& rows, std::size_t cols) {
    F2Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols)
        throw DimensionError("F2Matrix::from_rows: ragged row " + std::to_string(i));
      for (std::size_t j = 0; j < cols; ++j) {
        if (rows[i][j] != 0 && rows[i][j] != 1)
          throw DimensionError("F2Matrix::from_rows: entries must be 0 or 1");
        m.set(i, j, rows[i][j] == 1);
      }
    }
    return m;
  }

  // Text grid of '0'/'1', one row per line. Blank lines are skipped, so an
  // empty string parses to the 0x0 matrix.
  static F2Matrix parse(std::string_view text) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (!line.empty()) lines.push_back(line);
    }
    const std::size_t cols = lines.empty() ? 0 : lines.front().size();
    F2Matrix m(lines.size(), cols);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].size() != cols) throw DimensionError("F2Matrix::parse: ragged grid");
      for (std::size_t j = 0; j < cols; ++j) {
        const char c = lines[i][j];
        if (c != '0' && c != '1') throw DimensionError("F2Matrix::parse: expected 0 or 1");
        m.set(i, j, c == '1');
      }
    }
    return m;
  }

  std::string to_string() const {
    std::string out;
    out.reserve(rows_ * (cols_ + 1));
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) out.push_back(get(i, j) ? '1' : '0');
      out.push_back('\n');
    }
    return out;
  }

  std::vector<std::vector<int>> to_rows() const {
    std::vector<std::vector<int>> out(rows_, std::vector<int>(cols_, 0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i][j] = get(i, j) ? 1 : 0;
    return out;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  bool get(std::size_t i, std::size_t j) const {
    return (bits_[i * words_per_row_ + j / kWordBits] >> (j % kWordBits)) & Word{1};
  }
  void set(std::size_t i, std::size_t j, bool value) {
    Word& w = bits_[i * words_per_row_ + j / kWordBits];
    const Word mask = Word{1} << (j % kWordBits);
    w = value ? (w | mask) : (w & ~mask);
  }
  void flip(std::size_t i, std::size_t j) {
    bits_[i * words_per_row_ + j / kWordBits] ^= Word{1} << (j % kWordBits);
  }

  bool is_zero() const {
    return std::all_of(bits_.begin(), bits_.end(), [](Word w) { return w == 0; });
  }

  std::size_t count_ones() const {
    std::size_t c = 0;
    for (Word w : bits_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  F2Matrix transpose() const {
    F2Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (get(i, j)) t.set(j, i, true);
    return t;
  }

  // First (row, col) holding a one, in row-major order.
  std::pair<std::size_t, std::size_t> first_nonzero() const {
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (get(i, j)) return {i, j};
    return {rows_, cols_};
  }

  friend bool operator==(const F2Matrix& a, const F2Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.bits_ == b.bits_;
  }

  F2Matrix& operator+=(const F2Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
      throw DimensionError("F2Matrix::operator+=: shape mismatch");
    for (std::size_t w = 0; w < bits_.size(); ++w) bits_[w] ^= other.bits_[w];
    return *this;
  }
  friend F2Matrix operator+(F2Matrix a, const F2Matrix& b) { return a += b; }

  // Row access in packed form, used by elimination.
  Word* row_words(std::size_t i) { return bits_.data() + i * words_per_row_; }
  const Word* row_words(std::size_t i) const { return bits_.data() + i * words_per_row_; }
  std::size_t words_per_row() const noexcept { return words_per_row_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<Word> bits_;
};

namespace detail {

// Reduced row echelon form in place; returns pivot columns in order.
inline std::vector<std::size_t> row_reduce(F2Matrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t next_row = 0;
  const std::size_t wpr = m.words_per_row();
  for (std::size_t col = 0; col < m.cols() && next_row < m.rows(); ++col) {
    std::size_t pivot = next_row;
    while (pivot < m.rows() && !m.get(pivot, col)) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != next_row)
      std::swap_ranges(m.row_words(pivot), m.row_words(pivot) + wpr, m.row_words(next_row));
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == next_row || !m.get(r, col)) continue;
      F2Matrix::Word* dst = m.row_words(r);
      const F2Matrix::Word* src = m.row_words(next_row);
      for (std::size_t w = 0; w < wpr; ++w) dst[w] ^= src[w];
    }
    pivots.push_back(col);
    ++next_row;
  }
  return pivots;
}

}  // namespace detail

inline std::size_t rank(const F2Matrix& m) {
  F2Matrix work = m;
  return detail::row_reduce(work).size();
}

inline std::size_t nullspace_dim(const F2Matrix& m) { return m.cols() - rank(m); }

// Basis of {x : M x = 0}, one basis vector per column of the result.
inline F2Matrix nullspace_basis(const F2Matrix& m) {
  F2Matrix work = m;
  const auto pivots = detail::row_reduce(work);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);

  F2Matrix basis(m.cols(), free_cols.size());
  for (std::size_t b = 0; b < free_cols.size(); ++b) {
    const std::size_t f = free_cols[b];
    basis.set(f, b, true);
    for (std::size_t r = 0; r < pivots.size(); ++r)
      if (work.get(r, f)) basis.set(pivots[r], b, true);
  }
  return basis;
}

inline F2Matrix matmul_f2(const F2Matrix& a, const F2Matrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul_f2: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
  F2Matrix out(a.rows(), b.cols());
  const std::size_t wpr = out.words_per_row();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    F2Matrix::Word* dst = out.row_words(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (!a.get(i, k)) continue;
      const F2Matrix::Word* src = b.row_words(k);
      for (std::size_t w = 0; w < wpr; ++w) dst[w] ^= src[w];
    }
  }
  return out;
}

// Matrix times a 0/1 vector.
inline std::vector<int> apply_f2(const F2Matrix& a, const std::vector<int>& x) {
  if (x.size() != a.cols()) throw DimensionError("apply_f2: vector length mismatch");
  std::vector<int> y(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    int acc = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc ^= (a.get(i, j) && x[j]) ? 1 : 0;
    y[i] = acc;
  }
  return y;
}

}  // namespace rfh
