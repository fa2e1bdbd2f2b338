#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "binshift/bitstream.hpp"
#include "binshift/word.hpp"

namespace binshift {

/// Exact Gaussian integer a + b*i.
struct Gaussian {
  std::int64_t re = 0, im = 0;

  friend Gaussian operator+(Gaussian a, Gaussian b) { return {a.re + b.re, a.im + b.im}; }
  friend Gaussian operator-(Gaussian a, Gaussian b) { return {a.re - b.re, a.im - b.im}; }
  friend Gaussian operator*(Gaussian a, Gaussian b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(Gaussian a, Gaussian b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(Gaussian a, Gaussian b) { return !(a == b); }

  Gaussian conj() const { return {re, -im}; }
  bool is_zero() const { return re == 0 && im == 0; }

  static Gaussian one() { return {1, 0}; }
  static Gaussian i_power(unsigned phase) {
    switch (phase % 4) {
      case 0: return {1, 0};
      case 1: return {0, 1};
      case 2: return {-1, 0};
      default: return {0, -1};
    }
  }
};

/// Dense square matrix over the Gaussian integers. Sized for the spin-chain
/// oracle (dimension <= 256), favoring exactness over speed.
class GaussianMatrix {
 public:
  explicit GaussianMatrix(std::size_t n) : n_(n), a_(n * n) {}

  static GaussianMatrix identity(std::size_t n) {
    GaussianMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Gaussian::one();
    return m;
  }

  std::size_t dim() const { return n_; }
  Gaussian& at(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
  const Gaussian& at(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

  GaussianMatrix operator*(const GaussianMatrix& rhs) const;
  GaussianMatrix operator+(const GaussianMatrix& rhs) const;
  GaussianMatrix scaled(Gaussian s) const;
  GaussianMatrix conj_transpose() const;

  friend bool operator==(const GaussianMatrix& a, const GaussianMatrix& b) {
    return a.n_ == b.n_ && a.a_ == b.a_;
  }
  friend bool operator!=(const GaussianMatrix& a, const GaussianMatrix& b) {
    return !(a == b);
  }

  Gaussian trace() const;
  bool is_zero() const;
  /// Divides every entry by 2; false when any entry is not even.
  bool halve_exact();

 private:
  std::size_t n_;
  std::vector<Gaussian> a_;
};

/// Concrete self-adjoint unitaries V_0..V_{n-1} on 2^n dimensions realizing
/// V_i V_j = (-1)^{a_{|i-j|}} V_j V_i: V_i applies a diagonal sign flip at
/// each earlier site j with a_{i-j} = 1, then a bit flip at site i.
struct DenseRep {
  std::size_t generators = 0;
  std::size_t dim = 0;
  std::vector<GaussianMatrix> V;
};

/// Spin-chain representation for n generators. Throws SizeTooLarge past n = 8.
DenseRep dense_representation(const Bitstream& stream, std::size_t n);

/// i^phase times the ascending product of V_i^{c_i}.
GaussianMatrix word_matrix(const DenseRep& rep, const Word& w);

/// trace(m) / 2^n, exact; throws InternalInconsistency if not divisible.
Gaussian normalized_trace(const DenseRep& rep, const GaussianMatrix& m);

/// u_num^* * w * u_num / 2 for a unitary u = u_num / sqrt(2); the division is
/// checked exact. This is the matrix side of the inner perturbation.
GaussianMatrix conjugate_halved(const GaussianMatrix& u_num, const GaussianMatrix& w);

}  // namespace binshift
