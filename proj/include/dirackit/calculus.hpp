#pragma once

#include "dirackit/field.hpp"

namespace dk {

/**
 * Pointwise kernels acting on component jets.  Each kernel needs first
 * derivatives of its inputs and returns jets one order lower than the
 * least-differentiated input.  The field-level operations below are thin
 * wrappers that evaluate inputs and apply these.
 */
namespace jets {

/// alpha(X) as a jet.
Jet pair(const JetList& alpha, const JetList& X);

/// [X,Y]^i = X^j d_j Y^i - Y^j d_j X^i
JetList bracket(const JetList& X, const JetList& Y);

/// (d alpha)_ij = d_i alpha_j - d_j alpha_i, row-major n x n.
JetList exterior_derivative(const JetList& alpha);

/// d(f) for a scalar jet.
JetList differential(const Jet& f);

/// (i_X omega)_j = X^i omega_ij
JetList interior(const JetList& X, const JetList& omega);

/// omega(X, Y)
Jet two_form_apply(const JetList& omega, const JetList& X, const JetList& Y);

/// Cartan formula i_X d alpha + d(alpha(X)).
JetList lie_derivative(const JetList& X, const JetList& alpha);

/// Six-term invariant formula for d omega(X, Y, Z); value only.
double d_two_form(const JetList& omega, const JetList& X, const JetList& Y, const JetList& Z);

}  // namespace jets

VectorField lie_bracket(const VectorField& X, const VectorField& Y);
TwoForm exterior_derivative_one_form(const OneForm& alpha);
OneForm differential(const ScalarField& f);
double d_two_form_contract(const TwoForm& omega, const VectorField& X, const VectorField& Y,
                           const VectorField& Z, const Point& m);
OneForm lie_derivative_one_form(const VectorField& X, const OneForm& alpha);
OneForm interior_product(const VectorField& X, const TwoForm& omega);
ScalarField pairing(const OneForm& alpha, const VectorField& X);

/// Pullback of a 1-form on map.target() to map.source().
OneForm pullback(const PointMap& map, const OneForm& alpha);
/// Pullback of a 2-form on map.target() to map.source().
TwoForm pullback(const PointMap& map, const TwoForm& omega);
/// Composition f o map.
ScalarField pullback(const PointMap& map, const ScalarField& f);

/// Canonical symplectic form sum_i dq^i ^ dp_i on a chart ordered (q, p).
TwoForm canonical_two_form(const ChartPtr& chart);

}  // namespace dk
