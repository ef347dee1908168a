#include "endwalk/series.hpp"

namespace endwalk {

TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  int deg = a.degree();
  TruncatedSeries out = TruncatedSeries::zero(deg);
  for (int i = 0; i <= deg; ++i) {
    if (a.coef[i] == 0) continue;
    for (int j = 0; i + j <= deg; ++j) {
      if (b.coef[j] == 0) continue;
      out.coef[i + j] += a.coef[i] * b.coef[j];
    }
  }
  return out;
}

void add_in_place(TruncatedSeries& a, const TruncatedSeries& b) {
  for (int i = 0; i <= a.degree(); ++i) a.coef[i] += b.coef[i];
}

void add_scaled_shifted(TruncatedSeries& a, const TruncatedSeries& b,
                        const BigInt& c, int shift) {
  for (int i = 0; i + shift <= a.degree() && i <= b.degree(); ++i)
    if (b.coef[i] != 0) a.coef[i + shift] += c * b.coef[i];
}

double eval_double(const TruncatedSeries& s, double z) {
  double acc = 0;
  for (int i = s.degree(); i >= 0; --i)
    acc = acc * z + s.coef[i].convert_to<double>();
  return acc;
}

TruncatedSeries eval_polynomial(const Polynomial& p,
                                const std::vector<TruncatedSeries>& values,
                                int degree) {
  TruncatedSeries out = TruncatedSeries::zero(degree);
  for (const Monomial& m : p.monomials) {
    if (m.zdeg > degree) continue;
    TruncatedSeries term = TruncatedSeries::zero(degree);
    term.coef[0] = 1;
    bool dead = false;
    for (auto [var, pow] : m.yfactors)
      for (int rep = 0; rep < pow && !dead; ++rep) {
        term = mul(term, values[var]);
        dead = true;
        for (const BigInt& c : term.coef)
          if (c != 0) dead = false;
      }
    if (dead) continue;
    add_scaled_shifted(out, term, m.coeff, m.zdeg);
  }
  return out;
}

std::vector<TruncatedSeries> series_fixed_point(const PolynomialSystem& sys,
                                                int degree) {
  size_t n = sys.classes.size();
  std::vector<TruncatedSeries> cur(n, TruncatedSeries::zero(degree));
  long long cap =
      static_cast<long long>(degree) * (static_cast<long long>(n) + 1) + 2;
  for (long long it = 0; it < cap; ++it) {
    std::vector<TruncatedSeries> next(n);
    for (size_t c = 0; c < n; ++c)
      next[c] = eval_polynomial(sys.rows[c], cur, degree);
    if (next == cur) return cur;
    cur = std::move(next);
  }
  throw InvariantViolation(
      "series iteration failed to stabilize; Jacobian at 0 not nilpotent?");
}

}  // namespace endwalk
