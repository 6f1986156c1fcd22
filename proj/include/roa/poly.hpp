#pragma once

// Sparse multivariate polynomials over double coefficients, plus polynomial
// vector fields.  Terms are kept in graded-lexicographic order (degree first,
// then lexicographic with x1 dominant) so that iteration, printing and
// serialization are deterministic.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace roa {

// Exponent vector of a single monomial.  Immutable after construction.
class Monomial {
 public:
  explicit Monomial(int nvars) : exps_(nvars, 0) {}
  explicit Monomial(std::vector<int> exps) : exps_(std::move(exps)) {
    for (int e : exps_)
      if (e < 0) throw std::invalid_argument("negative exponent");
  }

  int nvars() const { return static_cast<int>(exps_.size()); }
  int exponent(int var) const { return exps_.at(var); }
  const std::vector<int>& exponents() const { return exps_; }
  int degree() const {
    int d = 0;
    for (int e : exps_) d += e;
    return d;
  }

  Monomial operator*(const Monomial& other) const;
  bool operator==(const Monomial& other) const { return exps_ == other.exps_; }

  double evaluate(const std::vector<double>& x) const;

 private:
  std::vector<int> exps_;
};

// Ascending graded-lex order: lower degree first; ties broken so that the
// monomial with the larger leading exponent vector compares greater.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.exponents() < b.exponents();
  }
};

// Coefficients below this magnitude are dropped after every arithmetic
// operation; they are numerical noise at the scale this library works at.
inline constexpr double kCoefficientPruneTol = 1e-14;

class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GrlexLess>;

  explicit Polynomial(int nvars) : nvars_(nvars) {
    if (nvars < 1) throw std::invalid_argument("nvars must be >= 1");
  }

  static Polynomial zero(int nvars) { return Polynomial(nvars); }
  static Polynomial constant(int nvars, double c);
  // 0-based variable index: variable(2, 0) is x1.
  static Polynomial variable(int nvars, int var);
  static Polynomial from_string(int nvars, const std::string& text);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;  // zero polynomial has degree 0
  // Smallest total degree among terms; 0 for the zero polynomial.
  int min_degree() const;
  const TermMap& terms() const { return terms_; }
  double coefficient(const Monomial& m) const;

  // Accumulates c onto the coefficient of m, pruning if the result is tiny.
  void add_term(const Monomial& m, double c);

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double scale) const;
  Polynomial operator-() const { return *this * -1.0; }
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);

  double evaluate(const std::vector<double>& x) const;
  Polynomial derivative(int var) const;
  std::vector<Polynomial> gradient() const;

  // Canonical text form, leading (highest grlex) term first, e.g.
  // "3*x1^2*x2 - 0.5*x2".  Coefficients are printed with enough digits to
  // round-trip exactly through from_string.
  std::string to_string() const;

  bool operator==(const Polynomial& other) const {
    return nvars_ == other.nvars_ && terms_ == other.terms_;
  }

 private:
  int nvars_;
  TermMap terms_;
};

inline Polynomial operator*(double scale, const Polynomial& p) { return p * scale; }

// Shortest decimal form that parses back to the same double; used everywhere
// numbers are serialized so that output is reproducible byte for byte.
std::string format_double(double v);

// Polynomial vector field xdot = f(x) with an equilibrium at the origin.
struct DynamicalSystem {
  std::string name;
  int nvars = 0;
  std::vector<Polynomial> f;

  // Throws if dimensions are inconsistent or f(0) != 0.
  void validate() const;
};

// Directional derivative of v along f: sum_k dv/dx_k * f_k.
Polynomial lie_derivative(const Polynomial& v, const DynamicalSystem& sys);

}  // namespace roa
