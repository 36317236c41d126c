// Shared matrix/vector aliases and small numeric helpers.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace rsvd {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// diag(1_n, -1_n), the indefinite signature matrix of size 2n.
inline CMat signature_matrix(int two_n) {
    const int n = two_n / 2;
    CMat s = CMat::Identity(two_n, two_n);
    for (int i = n; i < two_n; ++i) s(i, i) = Complex(-1.0, 0.0);
    return s;
}

// m^l by repeated multiplication; exponents stay small here (l <= 5).
inline CMat matrix_power(const CMat& m, int l) {
    CMat out = CMat::Identity(m.rows(), m.cols());
    for (int i = 0; i < l; ++i) out = out * m;
    return out;
}

// Reduce an angle to (-pi, pi].
inline double wrap_angle(double a) {
    const double two_pi = 2.0 * M_PI;
    double r = std::remainder(a, two_pi);
    if (r <= -M_PI) r += two_pi;
    return r;
}

inline bool is_upper_triangular(const CMat& m, double tol) {
    for (int j = 0; j < m.cols(); ++j)
        for (int i = j + 1; i < m.rows(); ++i)
            if (std::abs(m(i, j)) > tol) return false;
    return true;
}

inline double hermiticity_defect(const CMat& m) {
    return (m - m.adjoint()).norm();
}

}  // namespace rsvd
