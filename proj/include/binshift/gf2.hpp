#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "binshift/bitstream.hpp"

namespace binshift {

/// Bit vector over GF(2), packed 64 bits per word. Reads past the logical
/// size yield 0, so vectors of different lengths compare and combine with
/// zero-extension semantics.
class GF2Vector {
 public:
  GF2Vector() = default;
  explicit GF2Vector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  static GF2Vector unit(std::size_t size, std::size_t i) {
    GF2Vector v(size);
    v.set(i, true);
    return v;
  }

  std::size_t size() const { return size_; }

  bool get(std::size_t i) const {
    const std::size_t w = i >> 6;
    if (w >= words_.size()) return false;
    return (words_[w] >> (i & 63)) & 1u;
  }

  void set(std::size_t i, bool value) {
    if (i >= size_) resize(i + 1);
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }

  void flip(std::size_t i) { set(i, !get(i)); }

  void resize(std::size_t size) {
    size_ = size;
    words_.resize((size + 63) / 64, 0);
    trim_overhang();
  }

  GF2Vector& operator^=(const GF2Vector& rhs) {
    if (rhs.size_ > size_) resize(rhs.size_);
    for (std::size_t w = 0; w < rhs.words_.size(); ++w) words_[w] ^= rhs.words_[w];
    return *this;
  }

  friend GF2Vector operator^(GF2Vector lhs, const GF2Vector& rhs) {
    lhs ^= rhs;
    return lhs;
  }

  bool is_zero() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  std::size_t popcount() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  /// Index of the highest set bit, or -1 when zero.
  long highest_set() const {
    for (std::size_t w = words_.size(); w-- > 0;)
      if (words_[w]) return static_cast<long>(w * 64 + 63 - std::countl_zero(words_[w]));
    return -1;
  }

  long lowest_set() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w]) return static_cast<long>(w * 64 + std::countr_zero(words_[w]));
    return -1;
  }

  /// Parity of the AND with rhs (inner product over GF(2)).
  bool dot(const GF2Vector& rhs) const {
    const std::size_t n = std::min(words_.size(), rhs.words_.size());
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < n; ++w) acc ^= words_[w] & rhs.words_[w];
    return std::popcount(acc) & 1;
  }

  /// Copy with all indices moved up by k.
  GF2Vector shifted(std::size_t k) const {
    GF2Vector out(size_ + k);
    for_each_set([&](std::size_t i) { out.set(i + k, true); });
    return out;
  }

  // Content equality under zero-extension; logical sizes are not compared.
  friend bool operator==(const GF2Vector& a, const GF2Vector& b) {
    const std::size_t n = std::max(a.words_.size(), b.words_.size());
    for (std::size_t w = 0; w < n; ++w) {
      const std::uint64_t x = w < a.words_.size() ? a.words_[w] : 0;
      const std::uint64_t y = w < b.words_.size() ? b.words_[w] : 0;
      if (x != y) return false;
    }
    return true;
  }
  friend bool operator!=(const GF2Vector& a, const GF2Vector& b) { return !(a == b); }

  template <class F>
  void for_each_set(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        f(w * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

  std::string to_string() const {
    std::string s;
    s.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) s.push_back(get(i) ? '1' : '0');
    return s;
  }

 private:
  void trim_overhang() {
    if (words_.empty()) return;
    const std::size_t used = size_ & 63;
    if (used) words_.back() &= (std::uint64_t{1} << used) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Dense matrix over GF(2), stored as packed rows.
class GF2Matrix {
 public:
  GF2Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows, GF2Vector(cols)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const { return data_[r].get(c); }
  void set(std::size_t r, std::size_t c, bool v) {
    if (r >= rows_ || c >= cols_) throw Error("matrix index out of range");
    data_[r].set(c, v);
  }

  const GF2Vector& row(std::size_t r) const { return data_[r]; }
  GF2Vector& row(std::size_t r) { return data_[r]; }

  GF2Vector mul(const GF2Vector& v) const {
    if (v.highest_set() >= static_cast<long>(cols_))
      throw Error("vector support exceeds the matrix width");
    GF2Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out.set(r, data_[r].dot(v));
    return out;
  }

  bool is_symmetric() const;
  bool zero_diagonal() const;

 private:
  std::size_t rows_, cols_;
  std::vector<GF2Vector> data_;
};

/// Kernel basis in reduced echelon order: unique, deterministic, vectors
/// ordered by ascending free column.
struct KernelBasis {
  std::vector<GF2Vector> vectors;
  std::size_t nullity() const { return vectors.size(); }
};

std::size_t rank(const GF2Matrix& m);
KernelBasis kernel(const GF2Matrix& m);

/// The n x n symmetric Toeplitz matrix with entries a_{|i-j|}.
GF2Matrix toeplitz(const Bitstream& stream, std::size_t n);

/// (nu_1, ..., nu_n_max) where nu_n = dim ker of the n x n Toeplitz matrix.
std::vector<std::size_t> nullity_sequence(const Bitstream& stream, std::size_t n_max);

/// nu_n, with the convention nu_0 = 0.
std::size_t nullity_at(const Bitstream& stream, std::size_t n);

}  // namespace binshift
