#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cavicool {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

inline constexpr cplx I{0.0, 1.0};

// Single place where the two-level basis is fixed:
//   index 0 = |e>, index 1 = |g>, so sigma_z|e> = +|e> and sigma_+ = |e><g|.
// With H_I = -(Delta/2) sigma_z the ground state |g> has energy +Delta/2.
namespace pauli {

inline constexpr int kExcited = 0;
inline constexpr int kGround = 1;

inline Mat2 identity() { return Mat2::Identity(); }

inline Mat2 raising() {
  Mat2 m = Mat2::Zero();
  m(kExcited, kGround) = 1.0;
  return m;
}

inline Mat2 lowering() { return raising().adjoint(); }

inline Mat2 sigma_x() { return raising() + lowering(); }

inline Mat2 sigma_y() { return -I * raising() + I * lowering(); }

inline Mat2 sigma_z() {
  Mat2 m = Mat2::Zero();
  m(kExcited, kExcited) = 1.0;
  m(kGround, kGround) = -1.0;
  return m;
}

// rho = (1 + s . sigma) / 2
inline Mat2 density_from_bloch(double sx, double sy, double sz) {
  return 0.5 * (identity() + sx * sigma_x() + sy * sigma_y() + sz * sigma_z());
}

}  // namespace pauli

// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
inline Vec4 vec(const Mat2& x) {
  return Eigen::Map<const Vec4>(x.data());
}

inline Mat2 unvec(const Vec4& v) { return Eigen::Map<const Mat2>(v.data()); }

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

// Matrix of X -> A X B.
inline Mat4 sandwich(const Mat2& a, const Mat2& b) {
  return kron(b.transpose(), a);
}

inline Mat4 left_mul(const Mat2& a) { return sandwich(a, Mat2::Identity()); }
inline Mat4 right_mul(const Mat2& b) { return sandwich(Mat2::Identity(), b); }

// Row vector <<1| with <<1|vec(X) = Tr X.
inline Eigen::RowVector4cd trace_row() {
  return vec(Mat2::Identity()).transpose();
}

// A superoperator on 2x2 operators kept as a sum of X -> c L X R terms, so
// that the conjugated map X -> (K(X^dag))^dag stays available in closed form.
class SandwichSum {
 public:
  struct Term {
    cplx coeff;
    Mat2 left;
    Mat2 right;
  };

  void add(cplx coeff, const Mat2& left, const Mat2& right) {
    terms_.push_back({coeff, left, right});
  }

  Mat2 apply(const Mat2& x) const {
    Mat2 out = Mat2::Zero();
    for (const auto& t : terms_) out += t.coeff * t.left * x * t.right;
    return out;
  }

  Mat4 matrix() const {
    Mat4 out = Mat4::Zero();
    for (const auto& t : terms_) out += t.coeff * sandwich(t.left, t.right);
    return out;
  }

  // X -> (K(X^dag))^dag = sum conj(c) R^dag X L^dag
  SandwichSum conjugated() const {
    SandwichSum out;
    for (const auto& t : terms_)
      out.add(std::conj(t.coeff), t.right.adjoint(), t.left.adjoint());
    return out;
  }

  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

}  // namespace cavicool
