#include "binshift/gf2.hpp"

namespace binshift {

bool GF2Matrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r + 1; c < cols_; ++c)
      if (get(r, c) != get(c, r)) return false;
  return true;
}

bool GF2Matrix::zero_diagonal() const {
  const std::size_t n = std::min(rows_, cols_);
  for (std::size_t i = 0; i < n; ++i)
    if (get(i, i)) return false;
  return true;
}

namespace {

struct Rref {
  std::vector<GF2Vector> rows;
  std::vector<std::size_t> pivot_cols;  // pivot_cols[r] is the pivot of row r
};

// Reduced row echelon form; pivots chosen by ascending column, rows swapped
// into place, elimination above and below. Fully deterministic.
Rref reduce(const GF2Matrix& m) {
  Rref out;
  out.rows.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out.rows.push_back(m.row(r));

  std::size_t next_row = 0;
  for (std::size_t col = 0; col < m.cols() && next_row < out.rows.size(); ++col) {
    std::size_t pivot = next_row;
    while (pivot < out.rows.size() && !out.rows[pivot].get(col)) ++pivot;
    if (pivot == out.rows.size()) continue;
    std::swap(out.rows[next_row], out.rows[pivot]);
    for (std::size_t r = 0; r < out.rows.size(); ++r) {
      if (r != next_row && out.rows[r].get(col)) out.rows[r] ^= out.rows[next_row];
    }
    out.pivot_cols.push_back(col);
    ++next_row;
  }
  out.rows.resize(out.pivot_cols.size());
  return out;
}

}  // namespace

std::size_t rank(const GF2Matrix& m) { return reduce(m).pivot_cols.size(); }

KernelBasis kernel(const GF2Matrix& m) {
  const Rref rref = reduce(m);
  KernelBasis basis;

  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : rref.pivot_cols) is_pivot[c] = true;

  // One basis vector per free column f: unit at f, with the pivot coordinates
  // copied from column f of the reduced rows. This is the canonical reduced
  // echelon kernel basis, ordered by ascending free column.
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    GF2Vector v(m.cols());
    v.set(f, true);
    for (std::size_t r = 0; r < rref.pivot_cols.size(); ++r)
      if (rref.rows[r].get(f)) v.set(rref.pivot_cols[r], true);
    basis.vectors.push_back(std::move(v));
  }
  return basis;
}

GF2Matrix toeplitz(const Bitstream& stream, std::size_t n) {
  if (n == 0) throw Error("toeplitz size must be positive");
  std::vector<std::uint8_t> a(n);
  for (std::size_t j = 0; j < n; ++j) a[j] = static_cast<std::uint8_t>(stream.at(j));
  GF2Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a[i > j ? i - j : j - i]) m.set(i, j, true);
  return m;
}

std::vector<std::size_t> nullity_sequence(const Bitstream& stream, std::size_t n_max) {
  std::vector<std::size_t> nu;
  nu.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) nu.push_back(kernel(toeplitz(stream, n)).nullity());
  return nu;
}

std::size_t nullity_at(const Bitstream& stream, std::size_t n) {
  if (n == 0) return 0;  // kernel of the empty matrix
  return kernel(toeplitz(stream, n)).nullity();
}

}  // namespace binshift
