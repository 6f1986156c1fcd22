#include "roa/poly.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace roa {

Monomial Monomial::operator*(const Monomial& other) const {
  if (nvars() != other.nvars()) throw std::invalid_argument("nvars mismatch");
  std::vector<int> e(exps_);
  for (int i = 0; i < nvars(); ++i) e[i] += other.exps_[i];
  return Monomial(std::move(e));
}

double Monomial::evaluate(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != nvars()) throw std::invalid_argument("point dimension mismatch");
  double v = 1.0;
  for (int i = 0; i < nvars(); ++i) {
    double p = 1.0;
    for (int k = 0; k < exps_[i]; ++k) p *= x[i];
    v *= p;
  }
  return v;
}

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Monomial(nvars), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int var) {
  if (var < 0 || var >= nvars) throw std::invalid_argument("variable index out of range");
  std::vector<int> e(nvars, 0);
  e[var] = 1;
  Polynomial p(nvars);
  p.add_term(Monomial(std::move(e)), 1.0);
  return p;
}

int Polynomial::degree() const {
  if (terms_.empty()) return 0;
  return terms_.rbegin()->first.degree();
}

int Polynomial::min_degree() const {
  if (terms_.empty()) return 0;
  return terms_.begin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (m.nvars() != nvars_) throw std::invalid_argument("monomial nvars mismatch");
  auto [it, inserted] = terms_.try_emplace(m, 0.0);
  it->second += c;
  if (std::abs(it->second) < kCoefficientPruneTol) terms_.erase(it);
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial r(*this);
  r += other;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (nvars_ != other.nvars_) throw std::invalid_argument("nvars mismatch");
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  Polynomial r(*this);
  r -= other;
  return r;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (nvars_ != other.nvars_) throw std::invalid_argument("nvars mismatch");
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (nvars_ != other.nvars_) throw std::invalid_argument("nvars mismatch");
  Polynomial r(nvars_);
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : other.terms_) r.add_term(ma * mb, ca * cb);
  return r;
}

Polynomial Polynomial::operator*(double scale) const {
  Polynomial r(nvars_);
  for (const auto& [m, c] : terms_) r.add_term(m, c * scale);
  return r;
}

double Polynomial::evaluate(const std::vector<double>& x) const {
  double v = 0.0;
  for (const auto& [m, c] : terms_) v += c * m.evaluate(x);
  return v;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw std::invalid_argument("variable index out of range");
  Polynomial r(nvars_);
  for (const auto& [m, c] : terms_) {
    int e = m.exponent(var);
    if (e == 0) continue;
    std::vector<int> exps = m.exponents();
    exps[var] = e - 1;
    r.add_term(Monomial(std::move(exps)), c * e);
  }
  return r;
}

std::vector<Polynomial> Polynomial::gradient() const {
  std::vector<Polynomial> g;
  g.reserve(nvars_);
  for (int i = 0; i < nvars_; ++i) g.push_back(derivative(i));
  return g;
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double v) {
  char buf[48];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

std::string format_monomial(const Monomial& m) {
  std::string s;
  for (int i = 0; i < m.nvars(); ++i) {
    int e = m.exponent(i);
    if (e == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s;
}

}  // namespace

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    double c = it->second;
    bool first = out.empty();
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    double mag = std::abs(c);
    std::string mono = format_monomial(it->first);
    if (mono.empty()) {
      out += format_double(mag);
    } else if (mag == 1.0) {
      out += mono;
    } else {
      out += format_double(mag) + "*" + mono;
    }
  }
  return out;
}

namespace {

struct Parser {
  const std::string& text;
  int nvars;
  size_t pos = 0;

  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool at_end() {
    skip_space();
    return pos >= text.size();
  }

  char peek() {
    skip_space();
    return pos < text.size() ? text[pos] : '\0';
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("polynomial parse error at position " + std::to_string(pos) +
                                ": " + what + " in \"" + text + "\"");
  }

  double parse_number() {
    skip_space();
    const char* start = text.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(start, &end);
    if (end == start) fail("expected number");
    pos += end - start;
    return v;
  }

  int parse_int() {
    skip_space();
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) fail("expected integer");
    int v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      v = v * 10 + (text[pos] - '0');
      ++pos;
    }
    return v;
  }

  // factor := number | x<k>['^' <e>]; accumulates into (coef, exps).
  void parse_factor(double& coef, std::vector<int>& exps) {
    skip_space();
    if (peek() == 'x') {
      ++pos;
      int var = parse_int();
      if (var < 1 || var > nvars) fail("variable index out of range");
      int e = 1;
      if (peek() == '^') {
        ++pos;
        e = parse_int();
      }
      exps[var - 1] += e;
    } else {
      coef *= parse_number();
    }
  }

  Polynomial parse() {
    Polynomial p(nvars);
    bool expect_term = true;
    double sign = 1.0;
    while (!at_end()) {
      char c = peek();
      if (c == '+' || c == '-') {
        if (expect_term && c == '+') fail("unexpected '+'");
        sign *= (c == '-') ? -1.0 : 1.0;
        ++pos;
        expect_term = true;
        continue;
      }
      double coef = sign;
      std::vector<int> exps(nvars, 0);
      parse_factor(coef, exps);
      while (peek() == '*') {
        ++pos;
        parse_factor(coef, exps);
      }
      p.add_term(Monomial(std::move(exps)), coef);
      sign = 1.0;
      expect_term = false;
      if (!at_end() && peek() != '+' && peek() != '-') fail("expected '+' or '-'");
    }
    if (expect_term) fail("dangling sign");
    return p;
  }
};

}  // namespace

Polynomial Polynomial::from_string(int nvars, const std::string& text) {
  Parser parser{text, nvars};
  if (parser.at_end()) throw std::invalid_argument("empty polynomial text");
  return parser.parse();
}

void DynamicalSystem::validate() const {
  if (nvars < 1) throw std::invalid_argument("system nvars must be >= 1");
  if (static_cast<int>(f.size()) != nvars)
    throw std::invalid_argument("system must have one component per variable");
  for (const Polynomial& fi : f) {
    if (fi.nvars() != nvars) throw std::invalid_argument("component nvars mismatch");
    if (fi.coefficient(Monomial(nvars)) != 0.0)
      throw std::invalid_argument("vector field must vanish at the origin");
  }
}

Polynomial lie_derivative(const Polynomial& v, const DynamicalSystem& sys) {
  if (v.nvars() != sys.nvars) throw std::invalid_argument("nvars mismatch");
  Polynomial r(v.nvars());
  for (int k = 0; k < sys.nvars; ++k) r += v.derivative(k) * sys.f[k];
  return r;
}

}  // namespace roa
