#include "geoint/lfunc.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "geoint/format.hpp"
#include "geoint/geodesics.hpp"

namespace geoint {

int kronecker(Int a, Int n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;
  }
  // factors of two: (a/2) = 0 for even a, +1 for a = +-1 mod 8, -1 for a = +-3 mod 8
  int twos = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++twos;
  }
  if (twos > 0) {
    if ((a & 1) == 0) return 0;
    const Int r = mod_floor(a, 8);
    if ((twos & 1) && (r == 3 || r == 5)) result = -result;
  }
  // Jacobi symbol for odd n > 0
  Int x = mod_floor(a, n);
  Int m = n;
  while (x != 0) {
    while ((x & 1) == 0) {
      x >>= 1;
      const Int r = m & 7;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(x, m);
    if ((x & 3) == 3 && (m & 3) == 3) result = -result;
    x %= m;
  }
  return m == 1 ? result : 0;
}

int moebius(Int n) {
  if (n <= 0) throw std::invalid_argument("moebius: argument must be positive");
  int mu = 1;
  for (Int p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  if (n > 1) mu = -mu;
  return mu;
}

Real divisor_sigma(Int n, Real k) {
  Real total = 0;
  for (Int e = 1; e * e <= n; ++e) {
    if (n % e != 0) continue;
    total += std::pow(static_cast<Real>(e), k);
    if (e * e != n) total += std::pow(static_cast<Real>(n / e), k);
  }
  return total;
}

Real hurwitz_zeta(Real s, Real q) {
  if (!(s > 1)) throw std::domain_error("hurwitz_zeta: requires s > 1");
  if (!(q > 0)) throw std::domain_error("hurwitz_zeta: requires q > 0");
  // B_{2j} / (2j)!
  static constexpr std::array<long double, 10> kBernoulli = {
      1.0L / 6 / 2,
      -1.0L / 30 / 24,
      1.0L / 42 / 720,
      -1.0L / 30 / 40320,
      5.0L / 66 / 3628800,
      -691.0L / 2730 / 479001600,
      7.0L / 6 / 87178291200.0L,
      -3617.0L / 510 / 20922789888000.0L,
      43867.0L / 798 / 6402373705728000.0L,
      -174611.0L / 330 / 2432902008176640000.0L};
  constexpr int N = 24;
  Real sum = 0;
  for (int k = 0; k < N; ++k) sum += std::pow(q + k, -s);
  const Real a = q + N;
  sum += std::pow(a, 1 - s) / (s - 1) + std::pow(a, -s) / 2;
  Real rising = s;  // s (s+1) ... (s + 2j - 2)
  Real power = std::pow(a, -s - 1);
  for (std::size_t j = 0; j < kBernoulli.size(); ++j) {
    sum += kBernoulli[j] * rising * power;
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
    power /= a * a;
  }
  return sum;
}

Real riemann_zeta(Real s) { return hurwitz_zeta(s, 1); }

Real L_chi(Real s, Int D) {
  if (D != 1 && !is_fundamental_discriminant(D))
    throw std::invalid_argument("L_chi: D must be a fundamental discriminant");
  if (s < 1) throw std::domain_error("L_chi: requires s >= 1");
  if (D == 1) {
    if (s == 1) throw std::domain_error("L_chi: pole of the zeta function at s = 1");
    return riemann_zeta(s);
  }
  Real total = 0;
  if (s == 1) {
    for (Int a = 1; a < D; ++a) {
      const int chi = kronecker(D, a);
      if (chi != 0) total += chi * std::log(std::sin(kPi * static_cast<Real>(a) / static_cast<Real>(D)));
    }
    return -total / std::sqrt(static_cast<Real>(D));
  }
  for (Int a = 1; a < D; ++a) {
    const int chi = kronecker(D, a);
    if (chi != 0) total += chi * hurwitz_zeta(s, static_cast<Real>(a) / static_cast<Real>(D));
  }
  return total * std::pow(static_cast<Real>(D), -s);
}

namespace {

Real divisor_factor(Real s, Int D, Int b) {
  Real total = 0;
  for (Int a = 1; a <= b; ++a) {
    if (b % a != 0) continue;
    const int mu = moebius(a);
    if (mu == 0) continue;
    total += mu * kronecker(D, a) * std::pow(static_cast<Real>(a), -s) * divisor_sigma(b / a, 1 - 2 * s);
  }
  return total;
}

}  // namespace

Real L_all(Real s, const Discriminant& d) {
  return L_chi(s, d.fundamental) * divisor_factor(s, d.fundamental, d.conductor);
}

Real L_sd(Real s, const Discriminant& d) {
  const Real base = L_chi(s, d.fundamental);
  Real factor = 0;
  for (Int f = 1; f <= d.conductor; ++f) {
    if (d.conductor % f != 0) continue;
    const int mu = moebius(f);
    if (mu == 0) continue;
    factor += mu * std::pow(static_cast<Real>(f), -s) * divisor_factor(s, d.fundamental, d.conductor / f);
  }
  return base * factor;
}

ClassNumberReport class_number_formula_check(const Discriminant& d) {
  const auto classes = class_representatives(d);
  const auto unit = pell_unit(d);
  ClassNumberReport r;
  r.d = d.d;
  r.h = classes.h();
  r.log_eps = unit.log_eps;
  r.lhs = static_cast<Real>(r.h) * unit.log_eps;
  r.rhs = std::sqrt(static_cast<Real>(d.d)) * L_sd(1, d);
  r.rel_err = std::fabs(r.lhs - r.rhs) / std::fabs(r.rhs);
  return r;
}

void write_json(std::ostream& os, const ClassNumberReport& r) {
  nlohmann::ordered_json j{{"schema_version", kSchemaVersion},
                   {"identity", "class_number_formula"},
                   {"d", r.d},
                   {"h", r.h},
                   {"log_eps", round_sig(r.log_eps)},
                   {"lhs", round_sig(r.lhs)},
                   {"rhs", round_sig(r.rhs)},
                   {"rel_err", round_sig(r.rel_err)}};
  os << j.dump(2) << '\n';
}

Real eisenstein(const Point& z, Real s, Real* tail) {
  if (!(s > 1)) throw std::domain_error("eisenstein: requires s > 1");
  const Point w = reduce_to_fundamental_domain(z).point;
  const Real x = w.x, y = w.y;
  const Real zeta2s = riemann_zeta(2 * s);
  const Real zeta2s1 = riemann_zeta(2 * s - 1);
  const Real gs = std::tgamma(s);
  const Real phi = std::sqrt(kPi) * std::tgamma(s - 0.5L) * zeta2s1 / (gs * zeta2s);
  const Real coef = 2 * std::pow(kPi, s) * std::sqrt(y) / (gs * zeta2s);
  const Real nu = s - 0.5L;
  Real value = std::pow(y, s) + phi * std::pow(y, 1 - s);
  Real series = 0;
  Real bound = 0;
  for (Int n = 1; n <= 200; ++n) {
    const Real rn = static_cast<Real>(n);
    const Real k = std::cyl_bessel_k(nu, 2 * kPi * rn * y);
    series += 2 * std::cos(2 * kPi * rn * x) * std::pow(rn, nu) * divisor_sigma(n, 1 - 2 * s) * k;
    // remaining terms: sigma_{1-2s} <= zeta(2s-1) and K_nu(t) e^t decreasing
    bound = 0;
    for (Int m = 1; m <= 60; ++m)
      bound += 2 * std::pow(rn + m, nu) * zeta2s1 * k * std::exp(-2 * kPi * m * y);
    if (n >= 3 && coef * bound < 1e-17L * value) break;
  }
  if (tail) *tail = coef * bound;
  return value + coef * series;
}

Real eisenstein_lattice(const Point& z, Real s, Real cutoff) {
  Real total = std::pow(z.y, s);  // (c, e) = (0, 1)
  const Int cmax = static_cast<Int>(std::sqrt(cutoff) / z.y);
  for (Int c = 1; c <= cmax; ++c) {
    const Real cy = c * z.y;
    const Real room = cutoff - cy * cy;
    if (room < 0) break;
    const Real span = std::sqrt(room);
    const Int lo = static_cast<Int>(std::ceil(-c * z.x - span));
    const Int hi = static_cast<Int>(std::floor(-c * z.x + span));
    for (Int e = lo; e <= hi; ++e) {
      if (gcd(c, e) != 1) continue;
      const Real re = c * z.x + e;
      total += std::pow(z.y / (re * re + cy * cy), s);
    }
  }
  return total;
}

EisensteinReport eisenstein_period_check(const Discriminant& d, Real s, std::size_t nodes) {
  if (!(s > 1) || s > 4) throw std::domain_error("eisenstein_period_check: s must lie in (1, 4]");
  const auto fam = family(d);
  Real max_tail = 0;
  EisensteinReport r;
  r.d = d.d;
  r.s = s;
  r.lhs = integrate_along(
      [&](const UnitTangent& u) {
        Real tail = 0;
        const Real v = eisenstein({u.x, u.y}, s, &tail);
#pragma omp critical(eisenstein_tail)
        max_tail = std::max(max_tail, tail);
        return v;
      },
      fam, nodes);
  const Real g = std::tgamma(s / 2);
  const Real common = g * g * std::pow(static_cast<Real>(d.d), s / 2) * L_sd(s, d) /
                      (std::tgamma(s) * riemann_zeta(2 * s));
  r.rhs_without_zeta = common;
  r.rhs = common * riemann_zeta(s);
  r.rel_err = std::fabs(r.lhs - r.rhs) / std::fabs(r.rhs);
  r.truncation_bound = max_tail * fam.lengths.oriented;
  return r;
}

void write_json(std::ostream& os, const EisensteinReport& r) {
  nlohmann::ordered_json j{{"schema_version", kSchemaVersion},
                   {"identity", "eisenstein_period"},
                   {"d", r.d},
                   {"s", round_sig(r.s)},
                   {"lhs", round_sig(r.lhs)},
                   {"rhs", round_sig(r.rhs)},
                   {"rhs_without_zeta_s", round_sig(r.rhs_without_zeta)},
                   {"rel_err", round_sig(r.rel_err)},
                   {"truncation_bound", round_sig(r.truncation_bound)}};
  os << j.dump(2) << '\n';
}

}  // namespace geoint
