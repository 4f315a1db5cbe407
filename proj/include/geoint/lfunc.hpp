#pragma once
// Kronecker symbols, Dirichlet L-values of real characters, the class number
// formula and the Eisenstein period identity for Re(s) > 1.

#include <iosfwd>

#include "geoint/bqf.hpp"
#include "geoint/hyperbolic.hpp"

namespace geoint {

/// Kronecker symbol (a / n).
int kronecker(Int a, Int n);

int moebius(Int n);
/// sigma_k(n) = sum of e^k over divisors e of n.
Real divisor_sigma(Int n, Real k);

/// Hurwitz zeta sum_{k >= 0} (q + k)^-s for s > 1, q > 0, by Euler-Maclaurin.
Real hurwitz_zeta(Real s, Real q);
/// Riemann zeta for real s > 1.
Real riemann_zeta(Real s);

/// L(s, chi_D) for a fundamental discriminant D (D = 1 is the Riemann zeta
/// function). s = 1 uses the finite log-sine formula, s > 1 the Hurwitz
/// decomposition over residues mod D.
Real L_chi(Real s, Int D);

/// The divisor-sum L-series taken literally:
/// L(s, chi_D) * sum_{a | b} mu(a) chi_D(a) a^-s sigma_{1-2s}(b/a).
/// This is the Dirichlet series attached to all forms of discriminant d,
/// imprimitive ones included.
Real L_all(Real s, const Discriminant& d);

/// The L-series of the primitive forms of discriminant d, obtained from
/// L_all by Moebius inversion over the square divisors f^2 of d/D:
/// sum_{f | b} mu(f) f^-s L_all(s, d / f^2). Equals L_chi when b = 1.
Real L_sd(Real s, const Discriminant& d);

struct ClassNumberReport {
  Int d = 0;
  Int h = 0;
  Real log_eps = 0;
  Real lhs = 0;  // h log eps
  Real rhs = 0;  // sqrt(d) L_sd(1, d)
  Real rel_err = 0;
};

ClassNumberReport class_number_formula_check(const Discriminant& d);
void write_json(std::ostream& os, const ClassNumberReport& r);

/// Coprime-sum Eisenstein series E(z, s) = sum over Gamma_inf \ Gamma of
/// Im(gamma z)^s, evaluated by its Fourier expansion. `tail` receives a bound
/// on the truncated part of the expansion.
Real eisenstein(const Point& z, Real s, Real* tail = nullptr);

/// Direct lattice sum over coprime (c, e) with |c z + e|^2 <= cutoff; a slow
/// cross-check for eisenstein().
Real eisenstein_lattice(const Point& z, Real s, Real cutoff);

struct EisensteinReport {
  Int d = 0;
  Real s = 0;
  Real lhs = 0;               // integral of E(., s) along the oriented family
  Real rhs = 0;               // Gamma(s/2)^2 d^(s/2) zeta(s) L_sd(s, d) / (Gamma(s) zeta(2s))
  Real rhs_without_zeta = 0;  // the same without the zeta(s) factor
  Real rel_err = 0;
  Real truncation_bound = 0;
};

EisensteinReport eisenstein_period_check(const Discriminant& d, Real s, std::size_t nodes = 0);
void write_json(std::ostream& os, const EisensteinReport& r);

}  // namespace geoint
