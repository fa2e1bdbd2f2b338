#include "binshift/dense_oracle.hpp"

namespace binshift {

GaussianMatrix GaussianMatrix::operator*(const GaussianMatrix& rhs) const {
  GaussianMatrix out(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t k = 0; k < n_; ++k) {
      const Gaussian x = at(r, k);
      if (x.is_zero()) continue;
      for (std::size_t c = 0; c < n_; ++c) {
        const Gaussian y = rhs.at(k, c);
        if (y.is_zero()) continue;
        out.at(r, c) = out.at(r, c) + x * y;
      }
    }
  }
  return out;
}

GaussianMatrix GaussianMatrix::operator+(const GaussianMatrix& rhs) const {
  GaussianMatrix out(n_);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] + rhs.a_[i];
  return out;
}

GaussianMatrix GaussianMatrix::scaled(Gaussian s) const {
  GaussianMatrix out(n_);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] * s;
  return out;
}

GaussianMatrix GaussianMatrix::conj_transpose() const {
  GaussianMatrix out(n_);
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = 0; c < n_; ++c) out.at(c, r) = at(r, c).conj();
  return out;
}

Gaussian GaussianMatrix::trace() const {
  Gaussian t;
  for (std::size_t i = 0; i < n_; ++i) t = t + at(i, i);
  return t;
}

bool GaussianMatrix::is_zero() const {
  for (const auto& x : a_)
    if (!x.is_zero()) return false;
  return true;
}

bool GaussianMatrix::halve_exact() {
  for (auto& x : a_) {
    if ((x.re & 1) || (x.im & 1)) return false;
    x.re /= 2;
    x.im /= 2;
  }
  return true;
}

DenseRep dense_representation(const Bitstream& stream, std::size_t n) {
  if (n == 0) throw Error("dense representation needs at least one generator");
  if (n > 8) throw SizeTooLarge("dense representation limited to 8 generators");
  const std::size_t dim = std::size_t{1} << n;

  DenseRep rep;
  rep.generators = n;
  rep.dim = dim;
  rep.V.reserve(n);

  // Basis state x holds site s in bit s. V_i flips bit i after picking up a
  // sign from every earlier site j set in x with a_{i-j} = 1. These are
  // signed permutation matrices, so products and traces stay exact.
  for (std::size_t i = 0; i < n; ++i) {
    GaussianMatrix v(dim);
    std::uint64_t sign_mask = 0;
    for (std::size_t j = 0; j < i; ++j)
      if (stream.at(i - j)) sign_mask |= std::uint64_t{1} << j;
    for (std::size_t x = 0; x < dim; ++x) {
      const int sign = (std::popcount(x & sign_mask) & 1) ? -1 : 1;
      v.at(x ^ (std::size_t{1} << i), x) = Gaussian{sign, 0};
    }
    rep.V.push_back(std::move(v));
  }
  return rep;
}

GaussianMatrix word_matrix(const DenseRep& rep, const Word& w) {
  if (w.exps.highest_set() >= static_cast<long>(rep.generators))
    throw SizeTooLarge("word support exceeds the dense representation");
  GaussianMatrix m = GaussianMatrix::identity(rep.dim);
  w.exps.for_each_set([&](std::size_t i) { m = m * rep.V[i]; });
  return m.scaled(Gaussian::i_power(w.phase));
}

Gaussian normalized_trace(const DenseRep& rep, const GaussianMatrix& m) {
  Gaussian t = m.trace();
  const auto dim = static_cast<std::int64_t>(rep.dim);
  if (t.re % dim != 0 || t.im % dim != 0)
    throw InternalInconsistency("trace of a word matrix is not divisible by 2^n");
  return {t.re / dim, t.im / dim};
}

GaussianMatrix conjugate_halved(const GaussianMatrix& u_num, const GaussianMatrix& w) {
  GaussianMatrix out = u_num.conj_transpose() * w * u_num;
  if (!out.halve_exact())
    throw InternalInconsistency("unitary conjugation did not halve exactly");
  return out;
}

}  // namespace binshift
