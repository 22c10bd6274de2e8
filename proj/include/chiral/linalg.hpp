#pragma once

#include <complex>

#include <Eigen/Dense>

namespace chiral {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat8 = Eigen::Matrix<cplx, 8, 8>;
using Vec8 = Eigen::Matrix<cplx, 8, 1>;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

inline constexpr cplx I{0.0, 1.0};

namespace pauli {

inline Mat2 x() { return (Mat2() << 0, 1, 1, 0).finished(); }
inline Mat2 y() { return (Mat2() << 0, -I, I, 0).finished(); }
inline Mat2 z() { return (Mat2() << 1, 0, 0, -1).finished(); }
/// |0><1|, raises index 1 to index 0.
inline Mat2 raising() { return (Mat2() << 0, 1, 0, 0).finished(); }
inline Mat2 lowering() { return (Mat2() << 0, 0, 1, 0).finished(); }

}  // namespace pauli

template <class M>
auto commutator(const M& a, const M& b) {
    return (a * b - b * a).eval();
}

template <class M>
auto anticommutator(const M& a, const M& b) {
    return (a * b + b * a).eval();
}

/// Max-norm of A - A^dagger.
template <class M>
double hermiticity_defect(const M& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace chiral
