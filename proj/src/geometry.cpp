#include "pctlwb/geometry.hpp"

#include <sstream>

namespace pctlwb {

std::string to_string(const Vec2& v) { return "(" + to_string(v.v1) + ", " + to_string(v.v2) + ")"; }

std::pair<Rational, Rational> interval_endpoints(const Rational& lambda) {
  if (lambda <= 0 || lambda >= Rational(1, 4)) throw GeometryError("lambda outside (0,1/4)");
  auto root = rational_sqrt(Rational(1) - 4 * lambda);
  if (!root) throw GeometryError("irrational endpoints: 1-4*lambda = " + to_string(Rational(1 - 4 * lambda)));
  Rational lo = (1 - *root) / 2, hi = (1 + *root) / 2;
  return {lo, hi};
}

GadgetConstants GadgetConstants::standard() {
  return make(Rational(14, 225), Vec2{Rational(1, 12), Rational(1, 15)}, Rational(1, 11), Rational(1, 13));
}

GadgetConstants GadgetConstants::make(const Rational& lambda, Vec2 z, const Rational& delta, const Rational& rho) {
  GadgetConstants c;
  c.lambda = lambda;
  c.z = std::move(z);
  c.delta = delta;
  c.rho = rho;
  std::tie(c.i_lo, c.i_hi) = interval_endpoints(lambda);
  c.check();
  return c;
}

void GadgetConstants::check() const {
  auto fail = [](const std::string& what) { throw GeometryError("constants violate " + what); };
  if (lambda <= 0 || lambda >= Rational(1, 4)) fail("0 < lambda < 1/4");
  auto [lo, hi] = interval_endpoints(lambda);
  if (lo != i_lo || hi != i_hi) fail("endpoint derivation");
  if (!(i_lo < z.v1 && z.v1 < i_hi)) fail("z1 in I_lambda");
  if (!(0 < z.v2 && z.v2 < 1)) fail("0 < z2 < 1");
  if (!(z.v2 < rho && rho < z.v1 && z.v1 < delta)) fail("z2 < rho < z1 < delta");
  if (!(2 * lambda + 2 * delta + 2 * z.v1 + 2 * z.v2 < 1)) fail("2lambda + 2delta + 2z1 + 2z2 < 1");
}

Vec2 inc(const Rational& lambda, const Vec2& v) {
  if (v.v1 == 1) throw GeometryError("inc: division by zero at v1 = 1");
  Rational x = lambda / (1 - v.v1);
  return Vec2{x, v.v2 * x};
}

Vec2 dec(const Rational& lambda, const Vec2& v) {
  if (v.v1 == 0) throw GeometryError("dec: division by zero at v1 = 0");
  return Vec2{(v.v1 - lambda) / v.v1, v.v2 / v.v1};
}

Rational slope(const Vec2& u, const Vec2& v) {
  if (u.v1 == v.v1) throw GeometryError("slope: vertical line");
  return (v.v2 - u.v2) / (v.v1 - u.v1);
}

Vec2 Geometry::inc_iter(std::size_t n) const {
  std::lock_guard<std::mutex> lock(mu_);
  while (memo_.size() <= n) memo_.push_back(inc(memo_.back()));
  return memo_[n];
}

std::size_t Geometry::depth_for(const Vec2& v, std::size_t cap) const {
  if (v.v1 <= c_.i_lo) return 0;
  for (std::size_t n = 0; n < cap; ++n)
    if (inc_iter(n + 1).v1 < v.v1) return n;
  throw GeometryError("inconclusive: v1 too close to the lower endpoint");
}

bool Geometry::in_region(const Vec2& v, std::size_t n_max) const {
  if (v.v1 < c_.i_lo || v.v1 > c_.z.v1 || v.v2 < 0 || v.v2 > 1) return false;
  if (v.v1 == c_.i_lo) return true;
  if (!(inc_iter(n_max + 1).v1 < v.v1)) throw GeometryError("inconclusive: n_max too small");
  for (std::size_t n = 0; n <= n_max; ++n) {
    Vec2 a = inc_iter(n), b = inc_iter(n + 1);
    // on or above the line through a and b (a1 > b1)
    if (v.v2 - a.v2 < slope(a, b) * (v.v1 - a.v1)) return false;
  }
  return true;
}

bool Geometry::vertex_carrier_check(const std::vector<Vec2>& points, const std::vector<Rational>& weights,
                                    std::size_t n) const {
  if (points.size() != weights.size() || points.empty()) throw GeometryError("points/weights size mismatch");
  Rational total = 0;
  Vec2 mix{0, 0};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (weights[i] <= 0) throw GeometryError("nonpositive weight");
    if (!in_region(points[i], depth_for(points[i]))) throw GeometryError("point outside A(z): " + to_string(points[i]));
    total += weights[i];
    mix.v1 += weights[i] * points[i].v1;
    mix.v2 += weights[i] * points[i].v2;
  }
  if (total != 1) throw GeometryError("weights sum to " + to_string(total));
  Vec2 vertex = inc_iter(n);
  if (!(mix == vertex)) return true;
  for (const Vec2& p : points)
    if (!(p == vertex)) return false;
  return true;
}

Vec2 Geometry::outlineseg_witness(const Vec2& v, std::size_t n) const {
  Rational u1 = inc_iter(n + 1).v1;
  Rational num = u1 * (1 - u1) - c_.lambda;
  Rational den = v.v1 * (1 - u1) - c_.lambda;
  if (den == 0) throw GeometryError("outlineseg: zero denominator");
  return Vec2{u1, v.v2 * num / den};
}

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  Rational cross = (b.v1 - a.v1) * (p.v2 - a.v2) - (b.v2 - a.v2) * (p.v1 - a.v1);
  if (cross != 0) return false;
  Rational dot = (p.v1 - a.v1) * (b.v1 - a.v1) + (p.v2 - a.v2) * (b.v2 - a.v2);
  Rational len = (b.v1 - a.v1) * (b.v1 - a.v1) + (b.v2 - a.v2) * (b.v2 - a.v2);
  return dot >= 0 && dot <= len;
}

namespace {

constexpr long kMaxDen = 10000;

long uniform(std::mt19937_64& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

Rational unit_open(std::mt19937_64& rng) {
  long q = uniform(rng, 2, kMaxDen);
  return make_rational(uniform(rng, 1, q - 1), q);
}

Rational unit_closed_open(std::mt19937_64& rng) {
  long q = uniform(rng, 1, kMaxDen);
  return make_rational(uniform(rng, 0, q - 1), q);
}

}  // namespace

Vec2 sample_point(const GadgetConstants& c, std::mt19937_64& rng) {
  Rational v1;
  if (uniform(rng, 0, 1) == 0) {
    do {
      long q = uniform(rng, 2, kMaxDen);
      v1 = make_rational(uniform(rng, 1, q - 1), q);
    } while (!(c.i_lo < v1 && v1 < c.i_hi));
  } else {
    // Hug an endpoint: mutated maps break first near the boundary.
    const bool top = uniform(rng, 0, 1) == 0;
    const Rational& end = top ? c.i_hi : c.i_lo;
    long base = std::max(end.get_den().get_si(), 1L);
    long t = uniform(rng, 1, std::max(1L, kMaxDen / base));
    Rational step(1, base * t);
    long j = uniform(rng, 1, 3);
    v1 = top ? Rational(end - j * step) : Rational(end + j * step);
    if (!(c.i_lo < v1 && v1 < c.i_hi)) v1 = (c.i_lo + c.i_hi) / 2;
  }
  return Vec2{v1, unit_open(rng)};
}

std::vector<PropertyReport> check_properties(const Geometry& g, const PropertyOptions& opt) {
  const GadgetConstants& c = g.constants();
  const Rational inc_lambda = opt.inc_lambda.value_or(c.lambda);
  auto I = [&](const Vec2& v) { return pctlwb::inc(inc_lambda, v); };
  auto D = [&](const Vec2& v) { return g.dec(v); };
  std::mt19937_64 rng(opt.seed);

  std::vector<PropertyReport> out;
  auto add = [&](const std::string& name) -> PropertyReport& {
    for (auto& r : out)
      if (r.name == name) return r;
    out.push_back(PropertyReport{name, 0, std::nullopt});
    return out.back();
  };
  auto record = [&](const std::string& name, bool ok, const std::string& detail) {
    PropertyReport& r = add(name);
    ++r.checked;
    if (!ok && !r.counterexample) r.counterexample = detail;
  };
  for (const char* n : {"inc-stays-in-strip", "dec-inverts-inc", "inc-moves-left", "slope-equality", "slope-strict",
                        "segment-mapping", "outline-segment", "vertex"})
    add(n);

  for (std::size_t s = 0; s < opt.samples; ++s) {
    Vec2 v = sample_point(c, rng);
    std::string at = "v = " + to_string(v);
    Vec2 iv = I(v);
    record("inc-stays-in-strip", c.i_lo < iv.v1 && iv.v1 < c.i_hi && iv.v2 >= 0 && iv.v2 <= 1, at + ", inc(v) = " + to_string(iv));
    record("dec-inverts-inc", D(iv) == v, at + ", dec(inc(v)) = " + to_string(D(iv)));
    record("inc-moves-left", iv.v1 < v.v1 && (v.v2 <= 0 || iv.v2 < v.v2), at + ", inc(v) = " + to_string(iv));
    Vec2 iiv = I(iv);
    record("slope-equality", slope(Vec2{iiv.v1, 0}, iv) == slope(iv, v), at);
    {
      Rational y = iv.v2 * unit_closed_open(rng);
      Vec2 u{iv.v1, y};
      record("slope-strict", slope(u, D(u)) < slope(iv, v), at + ", y = " + to_string(y));
    }
    {
      Rational k = unit_closed_open(rng);
      Vec2 u{k * iiv.v1 + (1 - k) * iv.v1, k * iiv.v2 + (1 - k) * iv.v2};
      record("segment-mapping", on_segment(D(u), iv, v), at + ", kappa = " + to_string(k));
    }
    {
      // A point strictly below edge n is recovered on [u, dec(u)].
      std::size_t n = static_cast<std::size_t>(uniform(rng, 0, 5));
      Vec2 a = g.inc_iter(n), b = g.inc_iter(n + 1);
      Rational x = b.v1 + (a.v1 - b.v1) * unit_closed_open(rng);
      Rational line = a.v2 + slope(a, b) * (x - a.v1);
      Vec2 w{x, line * unit_closed_open(rng)};
      std::string wat = "n = " + std::to_string(n) + ", v = " + to_string(w);
      try {
        Vec2 u = g.outlineseg_witness(w, n);
        bool ok = on_segment(w, u, g.dec(u)) && u.v2 >= 0 && u.v2 < b.v2;
        record("outline-segment", ok, wat + ", u = " + to_string(u));
      } catch (const GeometryError& e) {
        record("outline-segment", false, wat + ": " + e.what());
      }
    }
    {
      // Vertex extremality: constant carriers, plus two-sided mixtures that must miss the vertex.
      std::size_t n = static_cast<std::size_t>(uniform(rng, 1, 6));
      Vec2 vert = g.inc_iter(n), prev = g.inc_iter(n - 1), next = g.inc_iter(n + 1);
      Rational e = unit_open(rng);
      Vec2 pa{vert.v1 + e * (prev.v1 - vert.v1), vert.v2 + e * (prev.v2 - vert.v2)};
      Vec2 pb{vert.v1 + e * (next.v1 - vert.v1), vert.v2 + e * (next.v2 - vert.v2)};
      Rational w = unit_open(rng);
      bool ok = g.vertex_carrier_check({vert}, {Rational(1)}, n) &&
                g.vertex_carrier_check({pa, pb, vert}, {w / 2, w / 2, 1 - w}, n);
      record("vertex", ok, "n = " + std::to_string(n) + ", eps = " + to_string(e));
    }
  }
  return out;
}

PropertyReport check_limit_proxy(const Geometry& g, std::size_t depth) {
  PropertyReport r{"limit-proxy", 0, std::nullopt};
  const Rational& lo = g.constants().i_lo;
  Rational prev = g.inc_iter(0).v1 - lo;
  for (std::size_t n = 1; n <= depth; ++n) {
    Rational gap = g.inc_iter(n).v1 - lo;
    ++r.checked;
    if (!(gap < prev) && !r.counterexample) r.counterexample = "gap not decreasing at n = " + std::to_string(n);
    prev = gap;
  }
  if (!(prev < Rational(1, 1000000)) && !r.counterexample)
    r.counterexample = "gap at n = " + std::to_string(depth) + " is " + to_string(prev);
  return r;
}

}  // namespace pctlwb
