#include "geoint/bqf.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <mpfr.h>

#include "geoint/format.hpp"

namespace geoint {

Int isqrt(Int n) {
  if (n < 0) throw std::domain_error("isqrt of negative number");
  auto r = static_cast<Int>(std::sqrt(static_cast<long double>(n)));
  while (static_cast<Wide>(r) * r > n) --r;
  while (static_cast<Wide>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_square(Int n) {
  if (n < 0) return false;
  Int r = isqrt(n);
  return static_cast<Wide>(r) * r == n;
}

Int gcd(Int a, Int b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

const char* to_string(DiscriminantFault fault) {
  switch (fault) {
    case DiscriminantFault::NotPositive: return "not positive";
    case DiscriminantFault::BadResidue: return "not congruent to 0 or 1 mod 4";
    case DiscriminantFault::Square: return "perfect square";
  }
  return "unknown";
}

namespace {
std::string fault_message(Int value, DiscriminantFault fault) {
  std::ostringstream os;
  os << "invalid discriminant " << value << ": " << to_string(fault);
  return os.str();
}

bool squarefree(Int n) {
  for (Int p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) return false;
  }
  return true;
}
}  // namespace

DiscriminantError::DiscriminantError(Int value, DiscriminantFault fault)
    : std::invalid_argument(fault_message(value, fault)), value_(value), fault_(fault) {}

bool is_fundamental_discriminant(Int n) {
  if (n == 1) return true;
  if (n <= 0) return false;
  if (mod_floor(n, 4) == 1) return squarefree(n);
  if (n % 4 != 0) return false;
  Int m = n / 4;
  return (m % 4 == 2 || m % 4 == 3) && squarefree(m);
}

Discriminant validate_discriminant(Int n) {
  if (n <= 0) throw DiscriminantError(n, DiscriminantFault::NotPositive);
  if (Int r = mod_floor(n, 4); r != 0 && r != 1)
    throw DiscriminantError(n, DiscriminantFault::BadResidue);
  if (is_square(n)) throw DiscriminantError(n, DiscriminantFault::Square);

  // d = D b^2: strip the largest square b^2 keeping d / b^2 a discriminant.
  Int b = 1;
  Int rest = n;
  for (Int p = 2; p * p <= rest; ++p) {
    while (rest % (p * p) == 0) {
      rest /= p * p;
      b *= p;
    }
  }
  // rest is squarefree; n = rest * b^2.
  Int D = rest;
  if (mod_floor(D, 4) != 1) {
    D *= 4;
    b /= 2;
  }
  return {n, D, b};
}

QuadForm QuadForm::act(const Sl2z& m) const {
  const Wide A = a, B = b, C = c;
  const Wide p = m.p, q = m.q, r = m.r, s = m.s;
  return {narrow(A * p * p + B * p * r + C * r * r),
          narrow(2 * A * p * q + B * (p * s + q * r) + 2 * C * r * s),
          narrow(A * q * q + B * q * s + C * s * s)};
}

std::ostream& operator<<(std::ostream& os, const QuadForm& q) {
  return os << "(" << q.a << "," << q.b << "," << q.c << ")";
}

bool is_reduced(const QuadForm& q, Int d) {
  if (q.b <= 0 || static_cast<Wide>(q.b) * q.b >= d) return false;
  const Wide twice_a = 2 * static_cast<Wide>(q.a < 0 ? -q.a : q.a);
  // sqrt(d) - b < 2|a|
  if ((twice_a + q.b) * (twice_a + q.b) <= d) return false;
  // 2|a| < sqrt(d) + b
  const Wide gap = twice_a - q.b;
  return gap <= 0 || gap * gap < d;
}

ReducedForm rho(const QuadForm& q, Int d) {
  if (q.c == 0) throw std::invalid_argument("rho: form with c = 0 (square discriminant)");
  const Int two_c = checked_mul(2, q.c < 0 ? -q.c : q.c);
  const Int root = isqrt(d);
  Int bn;
  if (static_cast<Wide>(q.c) * q.c > d) {
    // |c| > sqrt(d): -|c| < b' <= |c|
    const Int abs_c = two_c / 2;
    bn = mod_floor(-q.b, two_c);
    if (bn > abs_c) bn -= two_c;
  } else {
    // sqrt(d) - 2|c| < b' < sqrt(d): largest b' <= isqrt(d) with b' = -b mod 2|c|
    bn = root - mod_floor(root + q.b, two_c);
  }
  const Int t = (q.b + bn) / (2 * q.c);
  const Sl2z m{0, -1, 1, t};
  ReducedForm out{q.act(m), m};
  return out;
}

ReducedForm reduce(const QuadForm& q) {
  const Wide dw = q.discriminant();
  if (dw <= 0) throw std::invalid_argument("reduce: form is not indefinite");
  const Int d = narrow(dw);
  if (is_square(d)) throw std::invalid_argument("reduce: square discriminant");
  ReducedForm cur{q, Sl2z::identity()};
  for (int iter = 0; iter < 100000; ++iter) {
    if (is_reduced(cur.form, d)) return cur;
    auto step = rho(cur.form, d);
    cur.form = step.form;
    cur.transform = cur.transform * step.transform;
  }
  throw std::runtime_error("reduce: did not terminate");
}

std::vector<CycleEntry> reduction_cycle_with_transforms(const QuadForm& reduced) {
  const Int d = narrow(reduced.discriminant());
  if (!is_reduced(reduced, d)) throw std::invalid_argument("reduction_cycle: form is not reduced");
  std::vector<CycleEntry> cycle{{reduced, Sl2z::identity()}};
  QuadForm cur = reduced;
  while (true) {
    auto step = rho(cur, d);
    cur = step.form;
    if (cur == reduced) {
      cycle.front().step = step.transform;
      break;
    }
    cycle.push_back({cur, step.transform});
  }
  return cycle;
}

std::vector<QuadForm> reduction_cycle(const QuadForm& reduced) {
  std::vector<QuadForm> out;
  for (const auto& e : reduction_cycle_with_transforms(reduced)) out.push_back(e.form);
  return out;
}

PellUnit pell_unit(const Discriminant& disc) {
  const Int d = disc.d;
  const Int s = d & 1;
  const Int root = isqrt(d);
  Int P = s, Q = 2;
  mpz_class p_prev = 1, p_prev2 = 0, q_prev = 0, q_prev2 = 1;
  for (long iter = 0; iter < 100000000L; ++iter) {
    const Int a = floor_div(P + root, Q);
    mpz_class p = a * p_prev + p_prev2;
    mpz_class q = a * q_prev + q_prev2;
    const Int Pn = a * Q - P;
    const Int Qn = narrow((static_cast<Wide>(d) - static_cast<Wide>(Pn) * Pn) / Q);
    p_prev2 = p_prev;
    p_prev = p;
    q_prev2 = q_prev;
    q_prev = q;
    P = Pn;
    Q = Qn;
    if (Q == 2) {
      mpz_class t = 2 * p - s * q;
      if (t * t - d * q * q == 4) {
        PellUnit unit{t, q, 0};
        mpfr_t x, y;
        mpfr_inits2(256, x, y, static_cast<mpfr_ptr>(nullptr));
        mpfr_set_si(y, static_cast<long>(d), MPFR_RNDN);
        mpfr_sqrt(y, y, MPFR_RNDN);
        mpfr_mul_z(y, y, unit.u.get_mpz_t(), MPFR_RNDN);
        mpfr_add_z(x, y, unit.t.get_mpz_t(), MPFR_RNDN);
        mpfr_div_ui(x, x, 2, MPFR_RNDN);
        mpfr_log(x, x, MPFR_RNDN);
        unit.log_eps = mpfr_get_ld(x, MPFR_RNDN);
        mpfr_clears(x, y, static_cast<mpfr_ptr>(nullptr));
        return unit;
      }
    }
  }
  throw std::runtime_error("pell_unit: period not found");
}

bool Automorph::fixes(const QuadForm& f) const {
  const mpz_class A = static_cast<long>(f.a), B = static_cast<long>(f.b), C = static_cast<long>(f.c);
  mpz_class a2 = A * p * p + B * p * r + C * r * r;
  mpz_class b2 = 2 * A * p * q + B * (p * s + q * r) + 2 * C * r * s;
  mpz_class c2 = A * q * q + B * q * s + C * s * s;
  return a2 == A && b2 == B && c2 == C;
}

std::optional<Sl2z> Automorph::to_sl2z() const {
  for (const auto* v : {&p, &q, &r, &s}) {
    if (!v->fits_slong_p()) return std::nullopt;
  }
  return Sl2z{p.get_si(), q.get_si(), r.get_si(), s.get_si()};
}

Automorph automorph_of(const QuadForm& f, const PellUnit& unit) {
  const mpz_class a = static_cast<long>(f.a), b = static_cast<long>(f.b), c = static_cast<long>(f.c);
  Automorph m;
  m.p = (unit.t - b * unit.u) / 2;
  m.q = -c * unit.u;
  m.r = a * unit.u;
  m.s = (unit.t + b * unit.u) / 2;
  m.pell_t = unit.t;
  m.pell_u = unit.u;
  m.log_eps = unit.log_eps;
  return m;
}

std::vector<QuadForm> enumerate_reduced_forms(const Discriminant& disc) {
  const Int d = disc.d;
  const Int root = isqrt(d);
  // primes up to sqrt(d / 4)
  const Int limit = isqrt(d / 4) + 1;
  std::vector<char> composite(static_cast<std::size_t>(limit + 1), 0);
  std::vector<Int> primes;
  for (Int i = 2; i <= limit; ++i) {
    if (composite[static_cast<std::size_t>(i)]) continue;
    primes.push_back(i);
    for (Int j = i * i; j <= limit; j += i) composite[static_cast<std::size_t>(j)] = 1;
  }

  std::vector<QuadForm> forms;
  std::vector<Int> divisors;
  for (Int b = (d & 1) ? 1 : 2; b <= root; b += 2) {
    const Int n = (d - b * b) / 4;  // = -a c > 0
    // divisors of n
    divisors.assign(1, 1);
    Int m = n;
    for (Int p : primes) {
      if (p * p > m) break;
      if (m % p != 0) continue;
      int e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      const std::size_t base = divisors.size();
      Int pk = 1;
      for (int k = 1; k <= e; ++k) {
        pk *= p;
        for (std::size_t i = 0; i < base; ++i) divisors.push_back(divisors[i] * pk);
      }
    }
    if (m > 1) {
      const std::size_t base = divisors.size();
      for (std::size_t i = 0; i < base; ++i) divisors.push_back(divisors[i] * m);
    }
    for (Int a : divisors) {
      for (Int sign : {1, -1}) {
        QuadForm q{sign * a, b, -sign * (n / a)};
        if (is_reduced(q, d) && q.primitive()) forms.push_back(q);
      }
    }
  }
  std::sort(forms.begin(), forms.end());
  forms.erase(std::unique(forms.begin(), forms.end()), forms.end());
  return forms;
}

std::size_t ClassSet::reduced_form_count() const {
  std::size_t n = 0;
  for (const auto& c : cycles) n += c.size();
  return n;
}

ClassSet class_representatives(const Discriminant& disc) {
  const auto forms = enumerate_reduced_forms(disc);
  std::vector<char> seen(forms.size(), 0);
  ClassSet out{disc, {}, {}};
  auto index_of = [&](const QuadForm& q) {
    auto it = std::lower_bound(forms.begin(), forms.end(), q);
    if (it == forms.end() || *it != q) throw std::logic_error("cycle left the reduced set");
    return static_cast<std::size_t>(it - forms.begin());
  };
  // forms are sorted, so the first unseen form is the least element of its cycle
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (seen[i]) continue;
    auto cycle = reduction_cycle_with_transforms(forms[i]);
    for (const auto& e : cycle) seen[index_of(e.form)] = 1;
    out.reps.push_back(forms[i]);
    out.cycles.push_back(std::move(cycle));
  }
  return out;
}

Automorph fundamental_automorph(const Discriminant& d) {
  auto classes = class_representatives(d);
  // the principal class contains a form with a = 1
  for (const auto& cyc : classes.cycles) {
    for (const auto& e : cyc) {
      if (e.form.a == 1) return automorph_of(e.form, pell_unit(d));
    }
  }
  return automorph_of(classes.reps.front(), pell_unit(d));
}

bool is_ambiguous(const QuadForm& q) {
  const auto r1 = reduce(q).form;
  const auto r2 = reduce(q.negated()).form;
  const auto cycle = reduction_cycle(r1);
  return std::find(cycle.begin(), cycle.end(), r2) != cycle.end();
}

ClassLocator::ClassLocator(const ClassSet& classes) {
  for (std::size_t i = 0; i < classes.cycles.size(); ++i) {
    for (std::size_t j = 0; j < classes.cycles[i].size(); ++j)
      reduced_.emplace(classes.cycles[i][j].form, std::make_pair(i, j));
  }
}

ClassLocator::Location ClassLocator::locate(const QuadForm& q) const {
  const auto red = reduce(q);
  auto it = reduced_.find(red.form);
  if (it == reduced_.end()) throw std::invalid_argument("ClassLocator: form of another discriminant");
  return {it->second.first, it->second.second, red.transform};
}

TotalLengths total_lengths(const ClassSet& classes, const PellUnit& unit) {
  const Real h = static_cast<Real>(classes.h());
  return {2 * h * unit.log_eps, h * unit.log_eps};
}

TotalLengths total_lengths(const Discriminant& d) {
  return total_lengths(class_representatives(d), pell_unit(d));
}

void write_class_csv(std::ostream& os, const ClassSet& classes, const PellUnit& unit, bool header) {
  if (header) os << "schema_version,d,index,a,b,c,ambiguous,t,u,log_eps\n";
  for (std::size_t i = 0; i < classes.reps.size(); ++i) {
    const auto& q = classes.reps[i];
    os << kSchemaVersion << ',' << classes.disc.d << ',' << i << ',' << q.a << ',' << q.b << ','
       << q.c << ',' << (is_ambiguous(q) ? "true" : "false") << ',' << unit.t.get_str() << ','
       << unit.u.get_str() << ',' << fmt_real(unit.log_eps) << '\n';
  }
}

}  // namespace geoint
