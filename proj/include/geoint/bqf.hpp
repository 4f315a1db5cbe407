#pragma once
// Indefinite binary quadratic forms: discriminants, Gauss reduction,
// reduction cycles, class representatives and Pell units.

#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "geoint/types.hpp"

namespace geoint {

enum class DiscriminantFault { NotPositive, BadResidue, Square };

class DiscriminantError : public std::invalid_argument {
 public:
  DiscriminantError(Int value, DiscriminantFault fault);
  Int value() const noexcept { return value_; }
  DiscriminantFault fault() const noexcept { return fault_; }

 private:
  Int value_;
  DiscriminantFault fault_;
};

const char* to_string(DiscriminantFault fault);

/// A positive non-square discriminant d = D * b^2 with D fundamental.
struct Discriminant {
  Int d = 0;
  Int fundamental = 0;
  Int conductor = 0;

  friend bool operator==(const Discriminant&, const Discriminant&) = default;
};

Discriminant validate_discriminant(Int n);
bool is_fundamental_discriminant(Int n);

/// a x^2 + b x y + c y^2.
struct QuadForm {
  Int a = 0, b = 0, c = 0;

  Wide discriminant() const {
    return static_cast<Wide>(b) * b - static_cast<Wide>(4) * a * c;
  }
  QuadForm negated() const { return {-a, -b, -c}; }
  bool primitive() const { return gcd(gcd(a, b), c) == 1; }
  /// The form (x, y) -> q(p x + q y, r x + s y).
  QuadForm act(const Sl2z& m) const;

  friend auto operator<=>(const QuadForm&, const QuadForm&) = default;
  friend std::ostream& operator<<(std::ostream& os, const QuadForm& q);
};

/// |sqrt(d) - 2|a|| < b < sqrt(d).
bool is_reduced(const QuadForm& q, Int d);

/// Result of a reduction: `source.act(transform) == form`.
struct ReducedForm {
  QuadForm form;
  Sl2z transform;
};

/// One reduction step (the normalized right neighbour) with its matrix.
ReducedForm rho(const QuadForm& q, Int d);

ReducedForm reduce(const QuadForm& q);

struct CycleEntry {
  QuadForm form;
  Sl2z step;  // previous.act(step) == form, cyclically (entry 0 follows the last)
};

std::vector<QuadForm> reduction_cycle(const QuadForm& reduced);
std::vector<CycleEntry> reduction_cycle_with_transforms(const QuadForm& reduced);

/// Least t, u > 0 with t^2 - d u^2 = 4, found from the continued fraction of
/// (s + sqrt(d)) / 2 where s = d mod 2.
struct PellUnit {
  mpz_class t;
  mpz_class u;
  Real log_eps = 0;  // log((t + u sqrt d) / 2)
};

PellUnit pell_unit(const Discriminant& d);

/// Generator of the stabiliser of a form: ((t - b u)/2, -c u; a u, (t + b u)/2).
struct Automorph {
  mpz_class p, q, r, s;
  mpz_class pell_t, pell_u;
  Real log_eps = 0;

  /// Exact substitution check q(p x + q y, r x + s y) == q(x, y).
  bool fixes(const QuadForm& f) const;
  mpz_class det() const { return p * s - q * r; }
  /// Only valid when the entries fit in 64 bits.
  std::optional<Sl2z> to_sl2z() const;
};

Automorph automorph_of(const QuadForm& q, const PellUnit& unit);
/// Automorph of the principal reduced form of discriminant d.
Automorph fundamental_automorph(const Discriminant& d);

/// One representative per SL2(Z) class of primitive forms of discriminant d.
struct ClassSet {
  Discriminant disc;
  std::vector<QuadForm> reps;                  // lexicographically least form of each cycle
  std::vector<std::vector<CycleEntry>> cycles;  // cycles[i] starts at reps[i]

  Int h() const { return static_cast<Int>(reps.size()); }
  std::size_t reduced_form_count() const;
};

/// All reduced primitive forms of discriminant d, sorted.
std::vector<QuadForm> enumerate_reduced_forms(const Discriminant& d);
ClassSet class_representatives(const Discriminant& d);

/// True iff q is SL2(Z)-equivalent to -q.
bool is_ambiguous(const QuadForm& q);

/// Locates the class of an arbitrary primitive form of the discriminant.
class ClassLocator {
 public:
  explicit ClassLocator(const ClassSet& classes);

  struct Location {
    std::size_t class_index;
    std::size_t position;  // index into cycles[class_index]
    Sl2z to_reduced;       // located.act(to_reduced) == cycles[class_index][position].form
  };
  Location locate(const QuadForm& q) const;

 private:
  std::map<QuadForm, std::pair<std::size_t, std::size_t>> reduced_;  // reduced form -> (class, position)
};

struct TotalLengths {
  Real oriented = 0;    // 2 h log eps, the length of the unit tangent lift
  Real unoriented = 0;  // h log eps
};

TotalLengths total_lengths(const Discriminant& d);
TotalLengths total_lengths(const ClassSet& classes, const PellUnit& unit);

/// CSV with columns d,index,a,b,c,ambiguous,t,u,log_eps.
void write_class_csv(std::ostream& os, const ClassSet& classes, const PellUnit& unit,
                     bool header = true);

}  // namespace geoint
