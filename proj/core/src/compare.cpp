// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "encsim/compare.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "encsim/errors.hpp"

namespace encsim {

int degreeForDepth(int kappa) {
  switch (kappa) {
    case 7: return 5;
    case 8: return 13;
    case 9: return 27;
    case 10: return 59;
    default:
      throw Error(Errc::UnsupportedDepth,
                  "no comparator degree for depth " + std::to_string(kappa) + " (supported: 7-10)");
  }
}

std::pair<int, int> psSplit(int n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "degree must be at least 1");
  std::pair<int, int> best{n, 1};
  for (int d2 = 1; (1LL << (d2 - 1)) <= 2LL * n; ++d2) {
    const long long span = 1LL << (d2 - 1);
    const int d1 = static_cast<int>((n + span - 1) / span);
    if (d1 + d2 < best.first + best.second) best = {d1, d2};
  }
  return best;
}

std::vector<double> fitSignCoefficients(double delta, int n, OutputRange range) {
  if (!(std::abs(delta) < 1.0)) throw Error(Errc::Domain, "threshold must lie in (-1, 1)");
  if (n < 1) throw Error(Errc::InvalidArgument, "degree must be at least 1");
  const int nodes = n + 1;
  std::vector<double> theta(nodes);
  std::vector<double> f(nodes);
  for (int k = 0; k < nodes; ++k) {
    theta[k] = std::numbers::pi * (k + 0.5) / nodes;
    const double x = std::cos(theta[k]);
    f[k] = x > delta ? 1.0 : (x < delta ? 0.0 : 0.5);
  }
  const double scale = range == OutputRange::Unit ? 1.0 : 2.0;
  std::vector<double> c(nodes);
  for (int i = 0; i < nodes; ++i) {
    double s = 0.0;
    for (int k = 0; k < nodes; ++k) {
      if (f[k] != 0.0) s += f[k] * (i == 0 ? 1.0 : std::cos(i * theta[k]));
    }
    c[i] = scale * (i == 0 ? s / nodes : 2.0 * s / nodes);
  }
  return c;
}

double clenshawOracle(double x, std::span<const double> c) {
  if (c.empty()) return 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = c.size() - 1; k >= 1; --k) {
    const double b0 = c[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + x * b1 - b2;
}

namespace {

template <class Ops>
class PsEvaluator {
 public:
  using V = typename Ops::Value;

  PsEvaluator(Ops& ops, const V& x, int d1, int d2) : ops_(ops), d1_(d1), d2_(d2) {
    babies_.push_back(x);  // T_1
    for (int i = 2; i <= d1_; ++i) {
      const int a = i / 2;
      const int b = i - a;
      V prod = ops_.scalarMul(ops_.mul(T(a), T(b)), 2.0);
      babies_.push_back(a == b ? ops_.addScalar(prod, -1.0) : ops_.sub(prod, T(b - a)));
    }
  }

  V run(std::vector<double> c) {
    Term t = eval(std::move(c));
    if (t.ct) return *t.ct;
    return ops_.addScalar(ops_.scalarMul(T(1), 0.0), t.constant);
  }

 private:
  struct Term {
    std::optional<V> ct;
    double constant = 0.0;
  };

  const V& T(int i) const { return babies_[static_cast<std::size_t>(i - 1)]; }

  const V& giant(int j) {
    if (j >= d2_) throw Error(Errc::InvalidArgument, "PS giant index beyond the split");
    while (static_cast<int>(giants_.size()) <= j) {
      if (giants_.empty()) {
        giants_.push_back(T(d1_));
      } else {
        const V& g = giants_.back();
        giants_.push_back(ops_.addScalar(ops_.scalarMul(ops_.mul(g, g), 2.0), -1.0));
      }
    }
    return giants_[static_cast<std::size_t>(j)];
  }

  Term base(const std::vector<double>& c) {
    std::optional<V> acc;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c[i] == 0.0) continue;
      V term = ops_.scalarMul(T(static_cast<int>(i)), c[i]);
      acc = acc ? ops_.add(*acc, term) : term;
    }
    if (!acc) return {std::nullopt, c.empty() ? 0.0 : c[0]};
    if (c[0] != 0.0) acc = ops_.addScalar(*acc, c[0]);
    return {acc, 0.0};
  }

  Term eval(std::vector<double> c) {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg <= d1_) return base(c);
    int j = 0;
    while ((static_cast<long long>(d1_) << (j + 1)) <= deg) ++j;
    const int k = d1_ << j;
    // p = q * T_k + r using T_{k+m} = 2 T_m T_k - T_{k-m}.
    std::vector<double> q(static_cast<std::size_t>(deg - k + 1), 0.0);
    std::vector<double> r(c.begin(), c.begin() + k);
    for (int i = deg; i >= k; --i) {
      const int m = i - k;
      if (m == 0) {
        q[0] += c[static_cast<std::size_t>(i)];
      } else {
        q[static_cast<std::size_t>(m)] += 2.0 * c[static_cast<std::size_t>(i)];
        r[static_cast<std::size_t>(k - m)] -= c[static_cast<std::size_t>(i)];
      }
    }
    Term qt = eval(std::move(q));
    Term rt = eval(std::move(r));
    Term p;
    if (qt.ct) {
      p.ct = ops_.mul(*qt.ct, giant(j));
    } else if (qt.constant != 0.0) {
      p.ct = ops_.scalarMul(giant(j), qt.constant);
    }
    if (p.ct && rt.ct) return {ops_.add(*p.ct, *rt.ct), 0.0};
    if (p.ct) {
      if (rt.constant != 0.0) p.ct = ops_.addScalar(*p.ct, rt.constant);
      return p;
    }
    return rt;
  }

  Ops& ops_;
  int d1_;
  int d2_;
  std::vector<V> babies_;
  std::vector<V> giants_;
};

struct CipherOps {
  using Value = CipherVector;
  HeContext& ctx;

  Value mul(const Value& a, const Value& b) {
    auto [x, y] = ctx.matchLevel(a, b);
    return ctx.rescale(ctx.relinearize(ctx.multNoRelin(x, y)));
  }
  Value add(const Value& a, const Value& b) {
    auto [x, y] = ctx.matchLevel(a, b);
    return ctx.add(x, y);
  }
  Value sub(const Value& a, const Value& b) {
    auto [x, y] = ctx.matchLevel(a, b);
    return ctx.sub(x, y);
  }
  Value scalarMul(const Value& a, double s) { return ctx.multScalar(a, s); }
  Value addScalar(const Value& a, double s) { return ctx.addScalar(a, s); }
};

struct DepthOps {
  using Value = int;
  Value mul(Value a, Value b) { return std::max(a, b) + 1; }
  Value add(Value a, Value b) { return std::max(a, b); }
  Value sub(Value a, Value b) { return std::max(a, b); }
  Value scalarMul(Value a, double) { return a; }
  Value addScalar(Value a, double) { return a; }
};

struct PlainOps {
  using Value = double;
  Value mul(Value a, Value b) { return a * b; }
  Value add(Value a, Value b) { return a + b; }
  Value sub(Value a, Value b) { return a - b; }
  Value scalarMul(Value a, double s) { return a * s; }
  Value addScalar(Value a, double s) { return a + s; }
};

void checkSplit(std::span<const double> c, int d1, int d2) {
  if (c.empty()) throw Error(Errc::InvalidArgument, "empty coefficient sequence");
  const long long degree = static_cast<long long>(c.size()) - 1;
  if (d1 < 1 || d2 < 1 || (static_cast<long long>(d1) << (d2 - 1)) < degree) {
    throw Error(Errc::InvalidArgument, "PS split does not cover the degree");
  }
}

}  // namespace

int psDepth(std::span<const double> coefficients, int d1, int d2) {
  checkSplit(coefficients, d1, d2);
  DepthOps ops;
  PsEvaluator<DepthOps> ps(ops, 0, d1, d2);
  return ps.run(std::vector<double>(coefficients.begin(), coefficients.end()));
}

double evalChebPSPlain(double x, std::span<const double> coefficients, int d1, int d2) {
  checkSplit(coefficients, d1, d2);
  PlainOps ops;
  PsEvaluator<PlainOps> ps(ops, x, d1, d2);
  return ps.run(std::vector<double>(coefficients.begin(), coefficients.end()));
}

CipherVector evalChebPS(HeContext& ctx, const CipherVector& ct,
                        std::span<const double> coefficients, int d1, int d2) {
  checkSplit(coefficients, d1, d2);
  if (ct.degree() != 1) throw Error(Errc::MustRelinearize, "comparator input has degree 2");
  if (ct.rescalePending()) throw Error(Errc::PendingRescale, "comparator input awaits rescale");
  const int need = psDepth(coefficients, d1, d2);
  if (ct.level() < need) {
    throw Error(Errc::DepthExhausted, "comparator needs " + std::to_string(need) +
                                          " levels, input has " + std::to_string(ct.level()));
  }
  CipherOps ops{ctx};
  PsEvaluator<CipherOps> ps(ops, ct, d1, d2);
  return ps.run(std::vector<double>(coefficients.begin(), coefficients.end()));
}

CipherVector evalChebPS(HeContext& ctx, const CipherVector& ct, const ChebyshevComparator& cmp) {
  return evalChebPS(ctx, ct, cmp.coefficients, cmp.psBaby, cmp.psGiant);
}

ChebyshevComparator ChebyshevComparator::make(int kappa, double delta, OutputRange range) {
  ChebyshevComparator c;
  c.depthBudget = kappa;
  c.degree = degreeForDepth(kappa);
  c.threshold = delta;
  c.range = range;
  std::tie(c.psBaby, c.psGiant) = psSplit(c.degree);
  c.coefficients = fitSignCoefficients(delta, c.degree, range);
  return c;
}

ChebyshevComparator ChebyshevComparator::withThreshold(double delta) const {
  ChebyshevComparator c = *this;
  c.threshold = delta;
  c.coefficients = fitSignCoefficients(delta, degree, range);
  return c;
}

int ChebyshevComparator::levelsRequired() const {
  return psDepth(coefficients, psBaby, psGiant);
}

}  // namespace encsim
