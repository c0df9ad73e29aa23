#pragma once

#include "swe/types.hpp"

namespace swe {

/// Periodic second-order central difference (f[i+1] - f[i-1]) / (2 dx).
///
/// Its matrix is antisymmetric, so the transpose of `central_diff` is its
/// negative. The adjoint solvers rely on this.
template <typename Derived>
FieldT<typename Derived::Scalar> central_diff(const Eigen::ArrayBase<Derived>& f,
                                              typename Derived::Scalar dx) {
  using Scalar = typename Derived::Scalar;
  const Index n = f.size();
  FieldT<Scalar> out(n);
  const Scalar inv = Scalar(1) / (Scalar(2) * dx);
  out(0) = (f(1) - f(n - 1)) * inv;
  for (Index i = 1; i + 1 < n; ++i) out(i) = (f(i + 1) - f(i - 1)) * inv;
  out(n - 1) = (f(0) - f(n - 2)) * inv;
  return out;
}

/// Periodic undivided-then-scaled fourth difference, (1, -4, 6, -4, 1) / dx^4.
/// Symmetric.
template <typename Derived>
FieldT<typename Derived::Scalar> fourth_diff(const Eigen::ArrayBase<Derived>& f,
                                             typename Derived::Scalar dx) {
  using Scalar = typename Derived::Scalar;
  const Index n = f.size();
  FieldT<Scalar> out(n);
  const Scalar inv = Scalar(1) / (dx * dx * dx * dx);
  auto stencil = [&](Index m2, Index m1, Index i, Index p1, Index p2) {
    out(i) = (f(p2) - Scalar(4) * f(p1) + Scalar(6) * f(i) - Scalar(4) * f(m1) + f(m2)) * inv;
  };
  stencil(n - 2, n - 1, 0, 1, 2);
  stencil(n - 1, 0, 1, 2, 3);
  for (Index i = 2; i + 2 < n; ++i) stencil(i - 2, i - 1, i, i + 1, i + 2);
  stencil(n - 4, n - 3, n - 2, n - 1, 0);
  stencil(n - 3, n - 2, n - 1, 0, 1);
  return out;
}

}  // namespace swe
