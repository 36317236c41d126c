// Seeded samplers: group elements for decomposition sweeps and rejection
// sampling of reduced/dual coordinates inside their domains.

#pragma once

#include "rsvd/reduction.hpp"
#include "rsvd/rng.hpp"
#include "rsvd/types.hpp"

namespace rsvd {

/// Complex Gaussian matrix, entries standard complex normal.
CMat random_complex_gaussian(int rows, int cols, SplitMix64& rng);

/// Element of SL(m,C) from exp of a random traceless direction; `scale`
/// controls how far from the identity the sample sits.
CMat random_sl(int m, SplitMix64& rng, double scale = 0.5);

/// Haar-like unitary via Gram-Schmidt of a Gaussian matrix.
CMat random_unitary(int m, SplitMix64& rng);

/// Unitary with det 1.
CMat random_special_unitary(int m, SplitMix64& rng);

/// Element of S(U(n) x U(n)) as a 2n x 2n block-diagonal matrix.
CMat random_k_plus(int n, SplitMix64& rng);

/// Upper triangular, positive diagonal, det 1.
CMat random_triangular_b(int m, SplitMix64& rng, double spread = 0.3);

/// Rejection sample of lambda in D_+^lambda with margin mu/10 off every facet.
RVec sample_lambda(const reduction::CouplingParams& p, SplitMix64& rng);

/// Rejection sample of phat in D_+^phat with margin mu/10 off every facet.
RVec sample_phat(const reduction::CouplingParams& p, SplitMix64& rng);

/// Angles uniform in (-pi, pi].
RVec sample_angles(int n, SplitMix64& rng);

/// Convenience: sampled reduced point (lambda, theta).
reduction::ReducedPoint sample_reduced_point(const reduction::CouplingParams& p,
                                             SplitMix64& rng);

}  // namespace rsvd
