#include "rsvd/sampling.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsvd/matgroup.hpp"

namespace rsvd {

CMat random_complex_gaussian(int rows, int cols, SplitMix64& rng) {
    CMat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.cnormal();
    return m;
}

CMat random_sl(int m, SplitMix64& rng, double scale) {
    CMat x = scale * random_complex_gaussian(m, m, rng) / std::sqrt(static_cast<double>(m));
    const Complex tr = x.trace();
    x -= (tr / static_cast<double>(m)) * CMat::Identity(m, m);
    return x.exp();
}

CMat random_unitary(int m, SplitMix64& rng) {
    const CMat g = random_complex_gaussian(m, m, rng);
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ();
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase convention so the result is uniquely determined.
    for (int j = 0; j < m; ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

CMat random_special_unitary(int m, SplitMix64& rng) {
    CMat q = random_unitary(m, rng);
    const Complex det = q.determinant();
    const double phase = std::arg(det);
    return q * std::exp(Complex(0.0, -phase / m));
}

CMat random_k_plus(int n, SplitMix64& rng) {
    CMat f = CMat::Zero(2 * n, 2 * n);
    f.block(0, 0, n, n) = random_unitary(n, rng);
    f.block(n, n, n, n) = random_unitary(n, rng);
    const double phase = std::arg(f.block(0, 0, n, n).determinant() *
                                  f.block(n, n, n, n).determinant());
    f.block(n, n, n, n) *= std::exp(Complex(0.0, -phase / n));
    return f;
}

CMat random_triangular_b(int m, SplitMix64& rng, double spread) {
    CMat b = CMat::Zero(m, m);
    double log_det = 0.0;
    for (int i = 0; i < m; ++i) {
        const double d = std::exp(spread * rng.normal());
        b(i, i) = d;
        log_det += std::log(d);
        for (int j = i + 1; j < m; ++j) b(i, j) = spread * rng.cnormal();
    }
    const double fix = std::exp(-log_det / m);
    for (int i = 0; i < m; ++i) b(i, i) *= fix;
    return b;
}

namespace {

// Descending sort, rejection against margins; bounded attempts keep a bad
// parameter set from looping forever.
RVec rejection_sample_descending(int n, double lo, double hi, double gap,
                                 SplitMix64& rng, bool upper_bounded,
                                 double bound) {
    for (int attempt = 0; attempt < 100000; ++attempt) {
        RVec x(n);
        for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo, hi);
        std::sort(x.data(), x.data() + n, std::greater<double>());
        bool ok = true;
        for (int i = 0; i + 1 < n && ok; ++i)
            if (x[i] - x[i + 1] <= gap) ok = false;
        if (ok && upper_bounded && !(x[0] < bound)) ok = false;
        if (ok && !upper_bounded && !(x[n - 1] > bound)) ok = false;
        if (ok) return x;
    }
    throw std::runtime_error("rejection sampling failed to find a domain point");
}

}  // namespace

RVec sample_lambda(const reduction::CouplingParams& p, SplitMix64& rng) {
    const double margin = p.mu / 10.0;
    const double floor_val = std::max(std::abs(p.u), std::abs(p.v)) + margin;
    const double hi = floor_val + p.n * (p.mu + margin) + 2.0;
    return rejection_sample_descending(p.n, floor_val, hi, p.mu + margin, rng,
                                       /*upper_bounded=*/false, floor_val);
}

RVec sample_phat(const reduction::CouplingParams& p, SplitMix64& rng) {
    const double margin = p.mu / 10.0;
    const double ceil_val = std::min(0.0, p.v - p.u) - margin;
    const double lo = ceil_val - p.n * (p.mu + margin) - 2.0;
    return rejection_sample_descending(p.n, lo, ceil_val, p.mu + margin, rng,
                                       /*upper_bounded=*/true, ceil_val);
}

RVec sample_angles(int n, SplitMix64& rng) {
    RVec a(n);
    for (int i = 0; i < n; ++i) a[i] = wrap_angle(rng.uniform(-M_PI, M_PI));
    return a;
}

reduction::ReducedPoint sample_reduced_point(const reduction::CouplingParams& p,
                                             SplitMix64& rng) {
    return {sample_lambda(p, rng), sample_angles(p.n, rng)};
}

}  // namespace rsvd
