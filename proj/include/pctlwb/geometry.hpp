#pragma once

#include "pctlwb/rational.hpp"

#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pctlwb {

struct Vec2 {
  Rational v1;
  Rational v2;
  bool operator==(const Vec2& o) const { return v1 == o.v1 && v2 == o.v2; }
};

std::string to_string(const Vec2& v);

struct GeometryError : std::domain_error {
  using std::domain_error::domain_error;
};

// Throws GeometryError("irrational endpoints") when 1-4*lambda is not a rational square.
std::pair<Rational, Rational> interval_endpoints(const Rational& lambda);

struct GadgetConstants {
  Rational lambda;
  Vec2 z;
  Rational delta;
  Rational rho;
  Rational i_lo;
  Rational i_hi;

  const Rational& beta_low() const { return i_lo; }

  // lambda = 14/225, z = (1/12, 1/15), delta = 1/11, rho = 1/13.
  static GadgetConstants standard();
  // Derives the endpoints from lambda and checks every invariant; throws GeometryError.
  static GadgetConstants make(const Rational& lambda, Vec2 z, const Rational& delta, const Rational& rho);
  void check() const;
};

Vec2 inc(const Rational& lambda, const Vec2& v);  // throws at v1 = 1
Vec2 dec(const Rational& lambda, const Vec2& v);  // throws at v1 = 0
Rational slope(const Vec2& u, const Vec2& v);     // throws on a vertical line

class Geometry {
 public:
  explicit Geometry(GadgetConstants c) : c_(std::move(c)), memo_{c_.z} {}

  const GadgetConstants& constants() const { return c_; }
  Vec2 inc(const Vec2& v) const { return pctlwb::inc(c_.lambda, v); }
  Vec2 dec(const Vec2& v) const { return pctlwb::dec(c_.lambda, v); }
  Vec2 inc_iter(std::size_t n) const;

  // Throws GeometryError("inconclusive") if n_max edges cannot decide membership.
  bool in_region(const Vec2& v, std::size_t n_max) const;
  // Smallest edge depth that makes in_region conclusive for v (capped).
  std::size_t depth_for(const Vec2& v, std::size_t cap = 4096) const;
  bool vertex_carrier_check(const std::vector<Vec2>& points, const std::vector<Rational>& weights,
                            std::size_t n) const;
  Vec2 outlineseg_witness(const Vec2& v, std::size_t n) const;

 private:
  GadgetConstants c_;
  mutable std::mutex mu_;
  mutable std::vector<Vec2> memo_;
};

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b);

struct PropertyReport {
  std::string name;
  std::size_t checked = 0;
  std::optional<std::string> counterexample;
  bool ok() const { return !counterexample; }
};

// Exact property suites for the Inc/Dec calculus, outline segments and vertex extremality on seeded samples.
struct PropertyOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::optional<Rational> inc_lambda;  // overrides lambda inside inc only
};
std::vector<PropertyReport> check_properties(const Geometry& g, const PropertyOptions& opt);
// inc_iter(n)_1 - i_lo strictly decreasing for n <= depth and below 1/10^6 at depth.
PropertyReport check_limit_proxy(const Geometry& g, std::size_t depth);

// Rational v with v1 in I_lambda and v2 in (0,1), denominators <= 10^4.
Vec2 sample_point(const GadgetConstants& c, std::mt19937_64& rng);

}  // namespace pctlwb
