#pragma once

// Semi-discrete right-hand sides of the shallow water system and of its
// linearised and adjoint forms. All derivatives use the periodic central
// difference, so `adjoint_operator` is exactly the transpose of the state part
// of `tangent_rhs` and `bathymetry_term` is the transpose of its bathymetry
// source.

#include "swe/stencil.hpp"
#include "swe/types.hpp"

namespace swe::dynamics {

/// d/dt (eta, u) = -d/dx((1 + eta - beta) u, u^2/2 + eta) - nu d4/dx4 (eta, u).
template <typename Scalar>
StateT<Scalar> rhs(const StateT<Scalar>& y, const FieldT<Scalar>& beta, Scalar dx, Scalar nu) {
  const auto eta = y.col(0);
  const auto u = y.col(1);
  StateT<Scalar> out(y.rows(), 2);
  const FieldT<Scalar> mass_flux = (Scalar(1) + eta - beta) * u;
  const FieldT<Scalar> momentum_flux = Scalar(0.5) * u * u + eta;
  out.col(0) = -central_diff(mass_flux, dx) - nu * fourth_diff(eta, dx);
  out.col(1) = -central_diff(momentum_flux, dx) - nu * fourth_diff(u, dx);
  return out;
}

/// Linearisation about `y` applied to `dy`, plus the source -d/dx(beta_hat u)
/// when `beta_hat` is non-empty.
template <typename Scalar>
StateT<Scalar> tangent_rhs(const StateT<Scalar>& y, const StateT<Scalar>& dy, const FieldT<Scalar>& beta,
                           const FieldT<Scalar>& beta_hat, Scalar dx, Scalar nu) {
  const auto eta = y.col(0);
  const auto u = y.col(1);
  const auto deta = dy.col(0);
  const auto du = dy.col(1);
  FieldT<Scalar> mass_flux = u * deta + (Scalar(1) + eta - beta) * du;
  if (beta_hat.size() != 0) mass_flux -= beta_hat * u;
  const FieldT<Scalar> momentum_flux = u * du + deta;
  StateT<Scalar> out(y.rows(), 2);
  out.col(0) = -central_diff(mass_flux, dx) - nu * fourth_diff(deta, dx);
  out.col(1) = -central_diff(momentum_flux, dx) - nu * fourth_diff(du, dx);
  return out;
}

/// Adjoint operator at state `y` applied to multipliers `k`:
///   (u dk0/dx + dk1/dx, (1 + eta - beta) dk0/dx + u dk1/dx) - nu d4/dx4 k.
template <typename Scalar>
StateT<Scalar> adjoint_operator(const StateT<Scalar>& y, const StateT<Scalar>& k, const FieldT<Scalar>& beta,
                                Scalar dx, Scalar nu) {
  const auto eta = y.col(0);
  const auto u = y.col(1);
  const FieldT<Scalar> da = central_diff(k.col(0), dx);
  const FieldT<Scalar> db = central_diff(k.col(1), dx);
  StateT<Scalar> out(y.rows(), 2);
  out.col(0) = u * da + db - nu * fourth_diff(k.col(0), dx);
  out.col(1) = (Scalar(1) + eta - beta) * da + u * db - nu * fourth_diff(k.col(1), dx);
  return out;
}

/// Second-order adjoint coupling: derivative of `adjoint_operator` with
/// respect to the state (and bathymetry) in direction (dy, beta_hat), applied
/// to first-order multipliers `k`:
///   (u_hat dk0/dx, eta_hat dk0/dx + u_hat dk1/dx - beta_hat dk0/dx).
template <typename Scalar>
StateT<Scalar> adjoint_coupling(const StateT<Scalar>& dy, const StateT<Scalar>& k, const FieldT<Scalar>& beta_hat,
                                Scalar dx) {
  const FieldT<Scalar> da = central_diff(k.col(0), dx);
  const FieldT<Scalar> db = central_diff(k.col(1), dx);
  StateT<Scalar> out(dy.rows(), 2);
  out.col(0) = dy.col(1) * da;
  out.col(1) = dy.col(0) * da + dy.col(1) * db;
  if (beta_hat.size() != 0) out.col(1) -= beta_hat * da;
  return out;
}

/// u dk0/dx: transpose of the bathymetry source applied to multipliers `k`.
template <typename Scalar>
FieldT<Scalar> bathymetry_term(const StateT<Scalar>& y, const StateT<Scalar>& k, Scalar dx) {
  return y.col(1) * central_diff(k.col(0), dx);
}

}  // namespace swe::dynamics
