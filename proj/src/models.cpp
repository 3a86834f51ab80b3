#include "dimlab/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace dimlab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kLog2 = 0.6931471805599453094172321214581766;

const cplx kI{0.0, 1.0};

bool nearly_zero(cplx v) { return std::abs(v) < 1e-300; }

}  // namespace

// ---------------------------------------------------------------------------
// complex literals

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw ParseError("empty complex literal");

  // split into one or two signed pieces
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      parts.push_back(s.substr(start, i - start));
      start = i;
    }
  }
  parts.push_back(s.substr(start));
  if (parts.size() > 2) throw ParseError("bad complex literal: " + text);

  double re = 0.0, im = 0.0;
  for (const auto& p : parts) {
    if (p.empty()) throw ParseError("bad complex literal: " + text);
    if (p.back() == 'i' || p.back() == 'I') {
      std::string num = p.substr(0, p.size() - 1);
      if (num.empty() || num == "+" || num == "-") num += "1";
      im += std::stod(num);
    } else {
      re += std::stod(p);
    }
  }
  return {re, im};
}

std::string format_complex(cplx v) {
  char buf[80];
  if (v.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.17g", v.real());
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
  return buf;
}

// ---------------------------------------------------------------------------
// Bivariate

cplx Bivariate::eval(cplx w, cplx z) const {
  cplx acc = 0.0;
  for (const auto& t : terms) {
    cplx v = t.coeff;
    for (int i = 0; i < t.wpow; ++i) v *= w;
    for (int i = 0; i < t.zpow; ++i) v *= z;
    acc += v;
  }
  return acc;
}

Bivariate Bivariate::dw() const {
  Bivariate out;
  for (const auto& t : terms)
    if (t.wpow > 0) out.terms.push_back({t.coeff * static_cast<double>(t.wpow), t.wpow - 1, t.zpow});
  return out;
}

Bivariate Bivariate::dz() const {
  Bivariate out;
  for (const auto& t : terms)
    if (t.zpow > 0) out.terms.push_back({t.coeff * static_cast<double>(t.zpow), t.wpow, t.zpow - 1});
  return out;
}

int Bivariate::w_degree() const {
  int d = 0;
  for (const auto& t : terms)
    if (!nearly_zero(t.coeff)) d = std::max(d, t.wpow);
  return d;
}

cplx Bivariate::w_coeff(int k, cplx z) const {
  cplx acc = 0.0;
  for (const auto& t : terms) {
    if (t.wpow != k) continue;
    cplx v = t.coeff;
    for (int i = 0; i < t.zpow; ++i) v *= z;
    acc += v;
  }
  return acc;
}

Bivariate Bivariate::parse(const std::string& text) {
  Bivariate out;
  std::size_t i = 0;
  const auto n = text.size();
  auto skip_ws = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  while (i < n) {
    double sign = 1.0;
    while (i < n && (text[i] == '+' || text[i] == '-')) {
      if (text[i] == '-') sign = -sign;
      ++i;
      skip_ws();
    }
    if (i >= n) throw ParseError("trailing sign in polynomial: " + text);
    Bivariate::Term term{cplx(sign, 0.0), 0, 0};
    bool saw_factor = false;
    while (i < n) {
      skip_ws();
      if (i < n && text[i] == '*') {
        ++i;
        skip_ws();
      }
      if (i >= n || text[i] == '+' || text[i] == '-') break;
      if (text[i] == 'w' || text[i] == 'z') {
        const char var = text[i++];
        int p = 1;
        if (i < n && text[i] == '^') {
          ++i;
          std::size_t used = 0;
          p = std::stoi(text.substr(i), &used);
          i += used;
        }
        (var == 'w' ? term.wpow : term.zpow) += p;
        saw_factor = true;
      } else if (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.') {
        std::size_t used = 0;
        const double v = std::stod(text.substr(i), &used);
        i += used;
        term.coeff *= v;
        saw_factor = true;
      } else {
        throw ParseError(std::string("unexpected character '") + text[i] + "' in polynomial");
      }
    }
    if (!saw_factor) throw ParseError("empty term in polynomial: " + text);
    out.terms.push_back(term);
    skip_ws();
  }
  if (out.terms.empty()) throw ParseError("empty polynomial");
  return out;
}

std::string Bivariate::to_string() const {
  std::string s;
  for (const auto& t : terms) {
    if (!s.empty()) s += "+";
    s += format_complex(t.coeff);
    if (t.wpow) s += "*w^" + std::to_string(t.wpow);
    if (t.zpow) s += "*z^" + std::to_string(t.zpow);
  }
  return s;
}

// ---------------------------------------------------------------------------
// polynomial roots (Durand-Kerner)

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs_in) {
  std::vector<cplx> c = coeffs_in;
  while (c.size() > 1 && nearly_zero(c.back())) c.pop_back();
  const int d = static_cast<int>(c.size()) - 1;
  std::vector<cplx> roots;
  if (d <= 0) return roots;

  // roots at the origin
  int nz = 0;
  while (nz < d && nearly_zero(c[nz])) ++nz;
  for (int i = 0; i < nz; ++i) roots.push_back(0.0);
  if (nz > 0) c.erase(c.begin(), c.begin() + nz);
  const int m = static_cast<int>(c.size()) - 1;
  if (m == 0) return roots;

  double radius = 0.0;
  for (int k = 0; k < m; ++k) radius = std::max(radius, std::abs(c[k] / c[m]));
  radius = 1.0 + radius;

  std::vector<cplx> p(m);
  for (int i = 0; i < m; ++i)
    p[i] = 0.7 * radius * std::exp(kI * (2.0 * kPi * i / m + 0.35));

  auto eval_poly = [&](cplx z) {
    cplx acc = 0.0;
    for (int k = m; k >= 0; --k) acc = acc * z + c[k];
    return acc;
  };

  for (int iter = 0; iter < 800; ++iter) {
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      cplx denom = c[m];
      for (int j = 0; j < m; ++j)
        if (j != i) denom *= (p[i] - p[j]);
      if (nearly_zero(denom)) {
        p[i] += 1e-8 * radius * std::exp(kI * (1.0 + i));
        worst = 1.0;
        continue;
      }
      const cplx delta = eval_poly(p[i]) / denom;
      p[i] -= delta;
      worst = std::max(worst, std::abs(delta));
    }
    if (worst < 1e-14 * radius) break;
  }

  // Newton polish
  auto eval_dpoly = [&](cplx z) {
    cplx acc = 0.0;
    for (int k = m; k >= 1; --k) acc = acc * z + c[k] * static_cast<double>(k);
    return acc;
  };
  for (auto& r : p) {
    for (int it = 0; it < 4; ++it) {
      const cplx dp = eval_dpoly(r);
      if (nearly_zero(dp)) break;
      r -= eval_poly(r) / dp;
    }
    roots.push_back(r);
  }
  return roots;
}

// ---------------------------------------------------------------------------
// factories

FunctionModel FunctionModel::scaled_exp(cplx lambda) {
  if (nearly_zero(lambda)) throw ParseError("exp model requires lambda != 0");
  FunctionModel f;
  f.kind_ = ModelKind::ScaledExp;
  f.lambda_ = lambda;
  return f;
}

FunctionModel FunctionModel::sine(cplx alpha, cplx beta) {
  if (nearly_zero(alpha)) throw ParseError("sine model requires alpha != 0");
  FunctionModel f;
  f.kind_ = ModelKind::Sine;
  f.alpha_ = alpha;
  f.beta_ = beta;
  return f;
}

FunctionModel FunctionModel::fatou() {
  FunctionModel f;
  f.kind_ = ModelKind::Fatou;
  return f;
}

FunctionModel FunctionModel::polynomial(std::vector<cplx> coeffs) {
  while (coeffs.size() > 1 && nearly_zero(coeffs.back())) coeffs.pop_back();
  if (coeffs.empty() || (coeffs.size() == 1 && nearly_zero(coeffs[0])))
    throw ParseError("polynomial model must not be identically zero");
  FunctionModel f;
  f.kind_ = ModelKind::Polynomial;
  f.coeffs_ = std::move(coeffs);
  return f;
}

FunctionModel FunctionModel::poincare(cplx s, Bivariate P, cplx seed_deriv, int terms) {
  if (std::abs(s) <= 1.0) throw ParseError("poincare model requires |s| > 1");
  if (P.w_degree() < 2) throw ParseError("poincare model requires deg_w P >= 2");
  FunctionModel f;
  f.kind_ = ModelKind::Poincare;
  f.s_ = s;
  f.P_ = std::move(P);
  f.seed_deriv_ = seed_deriv;
  f.terms_ = std::max(terms, 16);
  f.build_poincare_series();
  return f;
}

// ---------------------------------------------------------------------------
// mini-language

namespace {

std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& body) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto comma = body.find(',', pos);
    const std::string item = body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value in model spec: " + item);
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

FunctionModel FunctionModel::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (head == "exp") {
    cplx lambda = 1.0;
    for (auto& [k, v] : parse_kv(body))
      if (k == "lambda") lambda = parse_complex(v);
      else throw ParseError("unknown exp parameter: " + k);
    return scaled_exp(lambda);
  }
  if (head == "sin") {
    cplx alpha = 1.0, beta = 0.0;
    for (auto& [k, v] : parse_kv(body)) {
      if (k == "alpha") alpha = parse_complex(v);
      else if (k == "beta") beta = parse_complex(v);
      else throw ParseError("unknown sin parameter: " + k);
    }
    return sine(alpha, beta);
  }
  if (head == "fatou") {
    if (!body.empty()) throw ParseError("fatou model takes no parameters");
    return fatou();
  }
  if (head == "poly") {
    std::vector<cplx> coeffs;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      const auto comma = body.find(',', pos);
      coeffs.push_back(parse_complex(
          body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return polynomial(std::move(coeffs));
  }
  if (head == "poincare") {
    cplx s = 0.0, seed = 1.0;
    std::string ptext;
    int terms = 48;
    for (auto& [k, v] : parse_kv(body)) {
      if (k == "s") s = parse_complex(v);
      else if (k == "P") ptext = v;
      else if (k == "seed") seed = parse_complex(v);
      else if (k == "terms") terms = std::stoi(v);
      else throw ParseError("unknown poincare parameter: " + k);
    }
    if (ptext.empty()) throw ParseError("poincare model requires P=");
    return poincare(s, Bivariate::parse(ptext), seed, terms);
  }
  throw ParseError("unknown model kind: " + head);
}

std::string FunctionModel::spec_string() const {
  switch (kind_) {
    case ModelKind::ScaledExp:
      return "exp:lambda=" + format_complex(lambda_);
    case ModelKind::Sine:
      return "sin:alpha=" + format_complex(alpha_) + ",beta=" + format_complex(beta_);
    case ModelKind::Fatou:
      return "fatou";
    case ModelKind::Polynomial: {
      std::string s = "poly:";
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (i) s += ",";
        s += format_complex(coeffs_[i]);
      }
      return s;
    }
    case ModelKind::Poincare:
      return "poincare:s=" + format_complex(s_) + ",P=" + P_.to_string() +
             ",seed=" + format_complex(seed_deriv_) + ",terms=" + std::to_string(terms_);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Poincare series bootstrap

namespace {

using Series = std::vector<cplx>;  // c[0] + c[1] z + ...

Series series_mul(const Series& a, const Series& b, std::size_t len) {
  Series out(len, 0.0);
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    if (nearly_zero(a[i])) continue;
    const std::size_t jmax = std::min(b.size(), len - i);
    for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// P(f(z), z) truncated to len coefficients
Series series_compose(const Bivariate& P, const Series& f, std::size_t len) {
  const int d = P.w_degree();
  // coefficient series in z of each w power
  int max_zpow = 0;
  for (const auto& t : P.terms) max_zpow = std::max(max_zpow, t.zpow);
  std::vector<Series> zc(static_cast<std::size_t>(d) + 1,
                         Series(static_cast<std::size_t>(max_zpow) + 1, 0.0));
  for (const auto& t : P.terms)
    if (t.wpow <= d) zc[static_cast<std::size_t>(t.wpow)][static_cast<std::size_t>(t.zpow)] += t.coeff;

  Series acc(1, 0.0);  // Horner in w
  for (int k = d; k >= 0; --k) {
    acc = series_mul(acc, f, len);
    const Series& add = zc[static_cast<std::size_t>(k)];
    if (acc.size() < len) acc.resize(len, 0.0);
    for (std::size_t i = 0; i < add.size() && i < len; ++i) acc[i] += add[i];
  }
  acc.resize(len, 0.0);
  return acc;
}

}  // namespace

void FunctionModel::build_poincare_series() {
  const int d = P_.w_degree();

  // fixed point: roots of P(w, 0) - w, pick the one whose multiplier matches s
  std::vector<cplx> pw(static_cast<std::size_t>(d) + 1, 0.0);
  for (int k = 0; k <= d; ++k) pw[static_cast<std::size_t>(k)] = P_.w_coeff(k, 0.0);
  pw[1] -= 1.0;
  const auto fps = polynomial_roots(pw);
  if (fps.empty()) throw ParseError("poincare equation has no finite fixed point");
  const Bivariate Pw = P_.dw();
  double best = std::numeric_limits<double>::infinity();
  cplx c0 = fps[0];
  for (const auto& w0 : fps) {
    const double mis = std::abs(Pw.eval(w0, 0.0) - s_);
    if (mis < best) {
      best = mis;
      c0 = w0;
    }
  }
  fixed_point_ = c0;
  const cplx p1 = Pw.eval(c0, 0.0);

  const std::size_t len = static_cast<std::size_t>(terms_) + 1;
  taylor_.assign(len, 0.0);
  taylor_[0] = c0;
  taylor_[1] = seed_deriv_;
  cplx spow = s_;  // s^n at iteration n
  for (std::size_t n = 2; n < len; ++n) {
    spow *= s_;
    const cplx denom = spow - p1;
    if (std::abs(denom) < 1e-9 * std::abs(spow))
      throw ParseError("poincare series resonance: s^n == P_w at fixed point");
    Series trunc(taylor_.begin(), taylor_.begin() + static_cast<std::ptrdiff_t>(n));
    const Series comp = series_compose(P_, trunc, n + 1);
    taylor_[n] = comp[n] / denom;
  }

  // seed radius from coefficient decay, certified radius from error
  // amplification (one application of P roughly multiplies the relative
  // error by the w-degree)
  double rs = std::numeric_limits<double>::infinity();
  const double target = 1e-15 * std::max(1.0, std::abs(c0));
  for (std::size_t n = len - 8; n < len; ++n) {
    const double cn = std::abs(taylor_[n]);
    if (cn > 1e-300)
      rs = std::min(rs, std::pow(target / cn, 1.0 / static_cast<double>(n)));
  }
  if (!std::isfinite(rs)) rs = 1e6;
  seed_radius_ = 0.75 * std::min(rs, 1e8);
  const int kmax = static_cast<int>(std::floor(16.1 / std::log(std::max(2.0, double(d)))));
  certified_radius_ = seed_radius_ * std::pow(std::abs(s_), kmax);
}

cplx FunctionModel::poincare_taylor(cplx z) const {
  cplx acc = 0.0;
  for (auto it = taylor_.rbegin(); it != taylor_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

cplx FunctionModel::poincare_taylor_deriv(cplx z) const {
  cplx acc = 0.0;
  for (std::size_t k = taylor_.size() - 1; k >= 1; --k)
    acc = acc * z + taylor_[k] * static_cast<double>(k);
  return acc;
}

void FunctionModel::poincare_pair(cplx z, cplx& f, cplx& fp) const {
  if (std::abs(z) > certified_radius_ * (1 + 1e-12))
    throw DomainExceeded("poincare evaluation outside certified radius");
  int k = 0;
  cplx zz = z;
  while (std::abs(zz) > seed_radius_) {
    zz /= s_;
    ++k;
  }
  cplx w = poincare_taylor(zz);
  cplx g = poincare_taylor_deriv(zz);
  const Bivariate Pw = P_.dw();
  const Bivariate Pz = P_.dz();
  cplx zeta = zz;
  for (int j = 0; j < k; ++j) {
    const cplx nw = P_.eval(w, zeta);
    const cplx ng = (Pw.eval(w, zeta) * g + Pz.eval(w, zeta)) / s_;
    w = nw;
    g = ng;
    zeta *= s_;
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw DomainExceeded("poincare evaluation overflow");
  }
  f = w;
  fp = g;
}

// ---------------------------------------------------------------------------
// evaluation

cplx FunctionModel::eval(cplx z) const {
  switch (kind_) {
    case ModelKind::ScaledExp:
      return lambda_ * std::exp(z);
    case ModelKind::Sine:
      return std::sin(alpha_ * z + beta_);
    case ModelKind::Fatou:
      return z + 1.0 + std::exp(-z);
    case ModelKind::Polynomial: {
      cplx acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
      return acc;
    }
    case ModelKind::Poincare: {
      cplx f, fp;
      poincare_pair(z, f, fp);
      return f;
    }
  }
  return 0.0;
}

cplx FunctionModel::deriv(cplx z) const {
  switch (kind_) {
    case ModelKind::ScaledExp:
      return lambda_ * std::exp(z);
    case ModelKind::Sine:
      return alpha_ * std::cos(alpha_ * z + beta_);
    case ModelKind::Fatou:
      return 1.0 - std::exp(-z);
    case ModelKind::Polynomial: {
      cplx acc = 0.0;
      for (std::size_t k = coeffs_.size() - 1; k >= 1; --k)
        acc = acc * z + coeffs_[k] * static_cast<double>(k);
      return acc;
    }
    case ModelKind::Poincare: {
      cplx f, fp;
      poincare_pair(z, f, fp);
      return fp;
    }
  }
  return 0.0;
}

namespace {

// cot(w) without overflow; |t| <= 1 on both branches
cplx stable_cot(cplx w) {
  if (w.imag() >= 0.0) {
    const cplx t = std::exp(2.0 * kI * w);
    if (std::abs(t - 1.0) < 1e-300) throw AtZero("cot at a pole");
    return kI * (t + 1.0) / (t - 1.0);
  }
  const cplx t = std::exp(-2.0 * kI * w);
  if (std::abs(1.0 - t) < 1e-300) throw AtZero("cot at a pole");
  return kI * (1.0 + t) / (1.0 - t);
}

}  // namespace

cplx FunctionModel::log_derivative(cplx z) const {
  switch (kind_) {
    case ModelKind::ScaledExp:
      return 1.0;
    case ModelKind::Sine:
      return alpha_ * stable_cot(alpha_ * z + beta_);
    case ModelKind::Fatou: {
      if (z.real() >= -40.0) {
        const cplx e = std::exp(-z);
        const cplx f = z + 1.0 + e;
        if (std::abs(f) < 1e-300) throw AtZero("fatou model zero");
        return (1.0 - e) / f;
      }
      const cplx e = std::exp(z);  // tiny
      const cplx denom = (z + 1.0) * e + 1.0;
      if (std::abs(denom) < 1e-300) throw AtZero("fatou model zero");
      return (e - 1.0) / denom;
    }
    case ModelKind::Polynomial: {
      const int d = static_cast<int>(coeffs_.size()) - 1;
      if (d == 0) return 0.0;
      if (d * std::log(std::max(1.0, std::abs(z))) < 600.0) {
        const cplx p = eval(z);
        if (std::abs(p) < 1e-300) throw AtZero("polynomial zero");
        return deriv(z) / p;
      }
      // scaled form in u = 1/z
      const cplx u = 1.0 / z;
      cplx num = 0.0, den = 0.0;
      for (int k = 0; k <= d; ++k) {
        cplx up = 1.0;
        for (int i = 0; i < d - k; ++i) up *= u;
        den += coeffs_[static_cast<std::size_t>(k)] * up;
        num += coeffs_[static_cast<std::size_t>(k)] * static_cast<double>(k) * up;
      }
      if (std::abs(den) < 1e-300) throw AtZero("polynomial zero");
      return num / (z * den);
    }
    case ModelKind::Poincare: {
      cplx f, fp;
      poincare_pair(z, f, fp);
      if (std::abs(f) < 1e-300) throw AtZero("poincare zero");
      return fp / f;
    }
  }
  return 0.0;
}

double FunctionModel::log_abs(cplx z) const {
  switch (kind_) {
    case ModelKind::ScaledExp:
      return std::log(std::abs(lambda_)) + z.real();
    case ModelKind::Sine: {
      const cplx w = alpha_ * z + beta_;
      const double v = w.imag();
      if (std::abs(v) <= 40.0) {
        const double a = std::abs(std::sin(w));
        if (a == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(a);
      }
      // |sin w| = e^{|v|}/2 * |1 - e^{2iw sign}|
      const cplx t = (v > 0) ? std::exp(2.0 * kI * w) : std::exp(-2.0 * kI * w);
      return std::abs(v) - kLog2 + std::log(std::abs(1.0 - t));
    }
    case ModelKind::Fatou: {
      if (z.real() >= -40.0) {
        const cplx f = z + 1.0 + std::exp(-z);
        const double a = std::abs(f);
        if (a == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(a);
      }
      return -z.real() + std::log(std::abs(1.0 + (z + 1.0) * std::exp(z)));
    }
    case ModelKind::Polynomial: {
      const int d = static_cast<int>(coeffs_.size()) - 1;
      if (std::abs(z) <= 1.0 || d == 0) {
        const double a = std::abs(eval(z));
        if (a == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(a);
      }
      const cplx u = 1.0 / z;
      cplx corr = 0.0;
      for (int k = 0; k < d; ++k) {
        cplx up = 1.0;
        for (int i = 0; i < d - k; ++i) up *= u;
        corr += coeffs_[static_cast<std::size_t>(k)] / coeffs_.back() * up;
      }
      return d * std::log(std::abs(z)) + std::log(std::abs(coeffs_.back())) +
             std::log(std::abs(1.0 + corr));
    }
    case ModelKind::Poincare: {
      // iterate in the log plane once values leave the representable range
      if (std::abs(z) > seed_radius_ * std::pow(std::abs(s_), 60))
        throw DomainExceeded("poincare log_abs outside supported range");
      int k = 0;
      cplx zz = z;
      while (std::abs(zz) > seed_radius_) {
        zz /= s_;
        ++k;
      }
      cplx w = poincare_taylor(zz);
      bool logmode = false;
      cplx lw = 0.0;
      const int d = P_.w_degree();
      cplx zeta = zz;
      for (int j = 0; j < k; ++j) {
        if (!logmode && std::abs(w) > 1e100) {
          lw = std::log(w);
          logmode = true;
        }
        if (!logmode) {
          w = P_.eval(w, zeta);
        } else {
          const cplx ad = P_.w_coeff(d, zeta);
          cplx corr = 0.0;
          for (int p = 0; p < d; ++p) {
            const cplx ap = P_.w_coeff(p, zeta);
            if (nearly_zero(ap)) continue;
            const cplx ex = static_cast<double>(p - d) * lw;
            if (ex.real() > -700.0) corr += ap / ad * std::exp(ex);
          }
          lw = static_cast<double>(d) * lw + std::log(ad) + std::log(1.0 + corr);
        }
        zeta *= s_;
      }
      if (!logmode) {
        const double a = std::abs(w);
        if (a == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(a);
      }
      return lw.real();
    }
  }
  return 0.0;
}

cplx FunctionModel::value_ratio(cplx z2, cplx z1) const {
  switch (kind_) {
    case ModelKind::ScaledExp:
      return std::exp(z2 - z1);
    case ModelKind::Sine: {
      const cplx w1 = alpha_ * z1 + beta_, w2 = alpha_ * z2 + beta_;
      if (std::abs(w1.imag()) <= 20.0 && std::abs(w2.imag()) <= 20.0) {
        const cplx s1 = std::sin(w1);
        if (std::abs(s1) < 1e-300) throw AtZero("sine zero");
        return std::sin(w2) / s1;
      }
      // sin w = sgn * D(w) * (1 - e^{+-2iw}) / (2i) with D the growing exponential
      auto split = [](cplx w, cplx& expo, cplx& rest, double& sgn) {
        if (w.imag() >= 0.0) {
          expo = -kI * w;  // e^{-iw} dominates
          rest = 1.0 - std::exp(2.0 * kI * w);
          sgn = -1.0;
        } else {
          expo = kI * w;
          rest = 1.0 - std::exp(-2.0 * kI * w);
          sgn = 1.0;
        }
      };
      cplx e1, r1, e2, r2;
      double g1, g2;
      split(w1, e1, r1, g1);
      split(w2, e2, r2, g2);
      if (std::abs(r1) < 1e-300) throw AtZero("sine zero");
      return (g2 / g1) * std::exp(e2 - e1) * (r2 / r1);
    }
    case ModelKind::Fatou: {
      auto split = [](cplx z, cplx& expo, cplx& rest) {
        if (z.real() >= -40.0) {
          expo = 0.0;
          rest = z + 1.0 + std::exp(-z);
        } else {
          expo = -z;
          rest = 1.0 + (z + 1.0) * std::exp(z);
        }
      };
      cplx e1, r1, e2, r2;
      split(z1, e1, r1);
      split(z2, e2, r2);
      if (std::abs(r1) < 1e-300) throw AtZero("fatou zero");
      return std::exp(e2 - e1) * (r2 / r1);
    }
    case ModelKind::Polynomial: {
      const int d = static_cast<int>(coeffs_.size()) - 1;
      if (d == 0) return 1.0;
      if (std::abs(z1) > 2.0 && std::abs(z2) > 2.0 &&
          d * std::log(std::max(std::abs(z1), std::abs(z2))) > 600.0) {
        auto tailsum = [&](cplx z) {
          const cplx u = 1.0 / z;
          cplx acc = 0.0;
          for (int k = 0; k <= d; ++k) {
            cplx up = 1.0;
            for (int i = 0; i < d - k; ++i) up *= u;
            acc += coeffs_[static_cast<std::size_t>(k)] * up;
          }
          return acc;
        };
        const cplx t1 = tailsum(z1);
        if (std::abs(t1) < 1e-300) throw AtZero("polynomial zero");
        return std::pow(z2 / z1, static_cast<double>(d)) * tailsum(z2) / t1;
      }
      const cplx p1 = eval(z1);
      if (std::abs(p1) < 1e-300) throw AtZero("polynomial zero");
      return eval(z2) / p1;
    }
    case ModelKind::Poincare: {
      const cplx p1 = eval(z1);
      if (std::abs(p1) < 1e-300) throw AtZero("poincare zero");
      return eval(z2) / p1;
    }
  }
  return 1.0;
}

cplx FunctionModel::log_ratio(cplx a, cplx delta) const {
  if (kind_ == ModelKind::ScaledExp) return delta;
  int steps = 8;
  for (;;) {
    cplx acc = 0.0;
    bool ok = true;
    cplx prev = a;
    for (int k = 1; k <= steps; ++k) {
      const cplx cur = a + delta * (static_cast<double>(k) / steps);
      const cplx ratio = value_ratio(cur, prev);
      const cplx step = std::log(ratio);
      if (std::abs(step.imag()) > 1.2) {
        ok = false;
        break;
      }
      acc += step;
      prev = cur;
    }
    if (ok) return acc;
    steps *= 2;
    if (steps > (1 << 20)) throw ContinuationLost("log_ratio continuation failed");
  }
}

// ---------------------------------------------------------------------------
// growth oracle

bool FunctionModel::has_logM_oracle() const {
  switch (kind_) {
    case ModelKind::ScaledExp:
      return true;
    case ModelKind::Sine:
      return nearly_zero(beta_);
    case ModelKind::Polynomial:
      for (const auto& c : coeffs_)
        if (c.imag() != 0.0 || c.real() < 0.0) return false;
      return true;
    default:
      return false;
  }
}

double FunctionModel::logM_oracle(double r) const {
  switch (kind_) {
    case ModelKind::ScaledExp:
      return std::log(std::abs(lambda_)) + r;
    case ModelKind::Sine: {
      const double x = std::abs(alpha_) * r;
      if (x < 1.0) return std::log(std::sinh(x));
      return x - kLog2 + std::log1p(-std::exp(-2.0 * x));
    }
    case ModelKind::Polynomial: {
      // nonnegative real coefficients: maximum on the positive real axis
      const int d = static_cast<int>(coeffs_.size()) - 1;
      if (r <= 1.0 || d == 0) return std::log(std::abs(eval(cplx(r, 0.0))));
      double corr = 0.0;
      for (int k = 0; k < d; ++k)
        corr += coeffs_[static_cast<std::size_t>(k)].real() / coeffs_.back().real() *
                std::pow(r, static_cast<double>(k - d));
      return d * std::log(r) + std::log(coeffs_.back().real()) + std::log1p(corr);
    }
    default:
      throw OracleUnavailable("no closed-form log M for this model");
  }
}

// ---------------------------------------------------------------------------
// a-point oracles

bool FunctionModel::has_zero_oracle(cplx a) const {
  switch (kind_) {
    case ModelKind::ScaledExp:
    case ModelKind::Sine:
    case ModelKind::Polynomial:
      return true;
    default:
      (void)a;
      return false;
  }
}

namespace {

void sort_points(std::vector<cplx>& pts, double r) {
  std::sort(pts.begin(), pts.end(), [r](cplx u, cplx v) {
    const double au = std::abs(u), av = std::abs(v);
    if (std::abs(au - av) > 1e-12 * std::max(1.0, r)) return au < av;
    return std::arg(u) < std::arg(v);
  });
}

void boundary_check(const std::vector<cplx>& pts, double r) {
  for (const auto& p : pts)
    if (std::abs(std::abs(p) - r) < 1e-9 * r)
      throw BoundaryZero("a-point within 1e-9*r of the circle |z| = r");
}

}  // namespace

// forward declaration of the numeric search (below)
static std::vector<cplx> numeric_apoints(const FunctionModel& f, cplx a, double r);

std::vector<cplx> FunctionModel::zeros_in_disk(cplx a, double r) const {
  if (r <= 0.0) throw Error("zeros_in_disk requires r > 0");
  std::vector<cplx> pts;
  const double rband = r * (1.0 + 1e-8);
  switch (kind_) {
    case ModelKind::ScaledExp: {
      if (nearly_zero(a)) break;  // lambda e^z omits 0
      const cplx base = std::log(a / lambda_);
      const long kmax = static_cast<long>((rband + std::abs(base)) / (2.0 * kPi)) + 2;
      for (long k = -kmax; k <= kmax; ++k) {
        const cplx z = base + cplx(0.0, 2.0 * kPi * static_cast<double>(k));
        if (std::abs(z) <= rband) pts.push_back(z);
      }
      break;
    }
    case ModelKind::Sine: {
      const cplx w0 = std::asin(a);
      const double wmax = std::abs(alpha_) * rband + std::abs(beta_) + 8.0;
      const long kmax = static_cast<long>(wmax / kPi) + 2;
      for (long k = -kmax; k <= kmax; ++k) {
        for (int branch = 0; branch < 2; ++branch) {
          const cplx w = branch == 0 ? w0 + 2.0 * kPi * static_cast<double>(k)
                                     : kPi - w0 + 2.0 * kPi * static_cast<double>(k);
          const cplx z = (w - beta_) / alpha_;
          if (std::abs(z) <= rband) pts.push_back(z);
        }
      }
      // the two asin branches coincide at a = +-1; sorted neighbour dedupe
      sort_points(pts, r);
      std::vector<cplx> uniq;
      uniq.reserve(pts.size());
      for (const auto& p : pts)
        if (uniq.empty() || std::abs(p - uniq.back()) > 1e-9 * std::max(1.0, r))
          uniq.push_back(p);
      pts = std::move(uniq);
      break;
    }
    case ModelKind::Polynomial: {
      if (coeffs_.size() == 1) {
        if (std::abs(coeffs_[0] - a) < 1e-300)
          throw OracleUnavailable("constant model equals the target everywhere");
        break;
      }
      auto shifted = coeffs_;
      shifted[0] -= a;
      for (const auto& root : polynomial_roots(shifted))
        if (std::abs(root) <= rband) pts.push_back(root);
      break;
    }
    case ModelKind::Fatou:
    case ModelKind::Poincare:
      pts = numeric_apoints(*this, a, r);
      break;
  }
  boundary_check(pts, r);
  std::vector<cplx> inside;
  for (const auto& p : pts)
    if (std::abs(p) <= r) inside.push_back(p);
  // verify
  for (const auto& p : inside) {
    const cplx v = (kind_ == ModelKind::Poincare && std::abs(p) > certified_radius_)
                       ? a  // cannot verify outside certified domain
                       : eval(p);
    if (std::abs(v - a) > 1e-10 * (1.0 + std::abs(a)))
      throw ValidationFailed("a-point residual too large");
  }
  sort_points(inside, r);
  return inside;
}

// ---------------------------------------------------------------------------
// numeric a-point search: winding numbers on subdivided cells + Newton polish

namespace {

struct Rect {
  double x0, y0, x1, y1;
  double size() const { return std::max(x1 - x0, y1 - y0); }
  cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
};

// winding of f - a along the rectangle boundary; -1 when a value passes too
// close to zero for a reliable argument count
int rect_winding(const FunctionModel& f, cplx a, const Rect& rc) {
  for (int per_side = 24; per_side <= 3072; per_side *= 2) {
    std::vector<cplx> pts;
    pts.reserve(static_cast<std::size_t>(4 * per_side));
    for (int i = 0; i < per_side; ++i)
      pts.emplace_back(rc.x0 + (rc.x1 - rc.x0) * i / per_side, rc.y0);
    for (int i = 0; i < per_side; ++i)
      pts.emplace_back(rc.x1, rc.y0 + (rc.y1 - rc.y0) * i / per_side);
    for (int i = 0; i < per_side; ++i)
      pts.emplace_back(rc.x1 - (rc.x1 - rc.x0) * i / per_side, rc.y1);
    for (int i = 0; i < per_side; ++i)
      pts.emplace_back(rc.x0, rc.y1 - (rc.y1 - rc.y0) * i / per_side);

    double total = 0.0;
    bool ok = true;
    cplx prev = f.eval(pts[0]) - a;
    if (std::abs(prev) < 1e-280) return -1;
    for (std::size_t i = 1; i <= pts.size(); ++i) {
      const cplx cur = f.eval(pts[i % pts.size()]) - a;
      if (std::abs(cur) < 1e-280) return -1;
      const double dphi = std::arg(cur / prev);
      if (std::abs(dphi) > 1.5) {
        ok = false;
        break;
      }
      total += dphi;
      prev = cur;
    }
    if (ok) return static_cast<int>(std::lround(total / (2.0 * kPi)));
  }
  return -1;
}

bool newton_apoint(const FunctionModel& f, cplx a, cplx start, double scale, cplx& out) {
  cplx z = start;
  for (int it = 0; it < 80; ++it) {
    const cplx v = f.eval(z) - a;
    if (std::abs(v) < 1e-13 * (1.0 + std::abs(a))) {
      out = z;
      return true;
    }
    const cplx d = f.deriv(z);
    if (std::abs(d) < 1e-300) return false;
    cplx step = v / d;
    if (std::abs(step) > 0.5 * scale) step *= 0.5 * scale / std::abs(step);
    z -= step;
  }
  return false;
}

// multiplicity-aware polish: z -> z - m (f-a)/f'
cplx newton_polish(const FunctionModel& f, cplx a, cplx z, int mult) {
  for (int it = 0; it < 30; ++it) {
    const cplx v = f.eval(z) - a;
    const cplx d = f.deriv(z);
    if (std::abs(d) < 1e-300 || std::abs(v) == 0.0) break;
    const cplx step = static_cast<double>(mult) * v / d;
    z -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

}  // namespace

static std::vector<cplx> numeric_apoints(const FunctionModel& f, cplx a, double r) {
  std::vector<cplx> candidates;
  // slightly irrational origin jitter so roots do not sit on cell edges
  const double j = 1.2345678901e-4 * r;
  std::vector<Rect> stack{{-r - j, -r - 2 * j, r + 2 * j, r + j}};
  int processed = 0;
  auto record = [&](cplx root) {
    for (const auto& q : candidates)
      if (std::abs(root - q) < 1e-5 * r) return;
    candidates.push_back(root);
  };
  while (!stack.empty()) {
    if (++processed > 200000)
      throw Error("numeric a-point search exceeded its cell budget");
    Rect rc = stack.back();
    stack.pop_back();
    int w = rect_winding(f, a, rc);
    if (w < 0) {
      // zero near the boundary: nudge the rectangle
      const double eps = 3.7e-3 * rc.size();
      rc = {rc.x0 - eps, rc.y0 - 1.3 * eps, rc.x1 + 0.7 * eps, rc.y1 + eps};
      w = rect_winding(f, a, rc);
      if (w < 0) throw Error("numeric a-point search could not stabilize a cell boundary");
    }
    if (w == 0) continue;
    if (rc.size() < 1e-4 * r || w == 1) {
      cplx root;
      if (newton_apoint(f, a, rc.center(), rc.size(), root)) {
        const bool inside = root.real() >= rc.x0 - 0.3 * rc.size() &&
                            root.real() <= rc.x1 + 0.3 * rc.size() &&
                            root.imag() >= rc.y0 - 0.3 * rc.size() &&
                            root.imag() <= rc.y1 + 0.3 * rc.size();
        if (inside) {
          record(root);
          continue;
        }
      }
      if (rc.size() < 1e-7 * r)
        throw Error("numeric a-point search failed to isolate a root");
    }
    const double mx = 0.5 * (rc.x0 + rc.x1), my = 0.5 * (rc.y0 + rc.y1);
    stack.push_back({rc.x0, rc.y0, mx, my});
    stack.push_back({mx, rc.y0, rc.x1, my});
    stack.push_back({rc.x0, my, mx, rc.y1});
    stack.push_back({mx, my, rc.x1, rc.y1});
  }

  // resolve multiplicities by a small winding box around each candidate,
  // then sharpen positions with multiplicity-aware Newton
  std::vector<cplx> found;
  for (const auto& c : candidates) {
    double half = 1e-4 * r;
    for (const auto& q : candidates)
      if (std::abs(q - c) > 1e-300) half = std::min(half, 0.4 * std::abs(q - c));
    Rect rc{c.real() - half, c.imag() - half * 1.1, c.real() + half * 1.05, c.imag() + half};
    int m = rect_winding(f, a, rc);
    if (m < 0) {
      rc = {rc.x0 - 0.3 * half, rc.y0 - 0.17 * half, rc.x1 + 0.23 * half, rc.y1 + 0.41 * half};
      m = rect_winding(f, a, rc);
    }
    if (m <= 0) m = 1;
    const cplx sharp = newton_polish(f, a, c, m);
    for (int copy = 0; copy < m; ++copy) found.push_back(sharp);
  }
  return found;
}

// ---------------------------------------------------------------------------
// domains

double FunctionModel::certified_radius() const {
  if (kind_ == ModelKind::Poincare) return certified_radius_;
  return std::numeric_limits<double>::infinity();
}

bool FunctionModel::in_domain(cplx z) const {
  switch (kind_) {
    case ModelKind::ScaledExp:
      return std::abs(z.real() + std::log(std::abs(lambda_))) <= 700.0;
    case ModelKind::Sine: {
      const cplx w = alpha_ * z + beta_;
      return std::abs(w.imag()) <= 700.0 && std::abs(w) <= 1e15;
    }
    case ModelKind::Fatou:
      return z.real() >= -700.0 && std::abs(z) <= 1e15;
    case ModelKind::Polynomial: {
      const int d = static_cast<int>(coeffs_.size()) - 1;
      if (d == 0) return true;
      return d * std::log(std::max(1.0, std::abs(z))) <= 700.0;
    }
    case ModelKind::Poincare:
      return std::abs(z) <= certified_radius_;
  }
  return true;
}

bool FunctionModel::supports_log_frame() const { return kind_ == ModelKind::ScaledExp; }

cplx FunctionModel::log_frame_shift(cplx a, cplx delta) const {
  if (kind_ != ModelKind::ScaledExp)
    throw OracleUnavailable("log frame available for the exp kind only");
  (void)a;
  return delta;
}

cplx FunctionModel::log_anchor(cplx a) const {
  if (kind_ != ModelKind::ScaledExp)
    throw OracleUnavailable("log frame available for the exp kind only");
  return std::log(lambda_) + a;
}

}  // namespace dimlab
