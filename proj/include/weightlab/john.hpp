#pragma once

#include "weightlab/norm_function.hpp"

namespace weightlab {

struct JohnOptions {
    int max_iters = 10000;
    double logdet_tol = 1e-12;  // relative log-det progress stop
    double residual_tol = 1e-6; // accepted bound on gamma/d - 1 at exit
};

// Maximal-volume inscribed ellipsoid of an absorbing symmetric body given by
// support samples: maximize log det A subject to |A u_j| <= h_K(u_j), run as
// multiplicative ascent on the polar side. The returned A satisfies
// ellipsoid(A) inside K, and K inside sqrt(d (1+residual)) ellipsoid(A).
SpdMatrix john_ellipsoid(const ConvexBody& k, const JohnOptions& opts = {});

// Constant matrix whose unit ball is the John ellipsoid of
// K = { v : <rho_W>_{p,Q}(v) <= 1 }, built from boundary points
// u_j / <rho_W>_{p,Q}(u_j) (inner polytope). p = 2 takes the exact path
// (avg_Q W^2)^{-1/2}; d = 1 collapses to (avg_Q w^p)^{-1/p}.
SpdMatrix reducing_matrix(const MatrixField& w, const Cube& q, double p,
                          const JohnOptions& opts = {});

} // namespace weightlab
