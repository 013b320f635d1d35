// Approximate radii, type signatures, and the constants chain.
//
// The worked numbers below were derived by hand before the implementation:
// the two-variable demo system f1 = 2 z1, f2 = 2 z2^2 - z1 has an explicit
// closed-form chain (B = {2,4}, C = {1,1}, M = {1, sqrt(8)} at mu = 8,
// delta' = 2^-14, delta~ = 2^-58), and its radii at mu = 8 reduce to
// tau_1 = sqrt(delta)/2 and tau_2 = sqrt(4 tau_1).

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <set>

#include "rcd/envelopes.hpp"
#include "rcd/ledger.hpp"
#include "rcd/parse.hpp"
#include "support/generators.hpp"

namespace rcdtest {

using namespace rcd;

namespace {

TriangularSystem demo_m12() {
  return parse_system("2*z1\n2*z2^2 - z1");
}

TriangularSystem chain_m23() {
  // normalized form of z1^2 / z2^3 - z1
  return parse_system("2*z1^2\n2*z2^3 - 2*z1");
}

}  // namespace

TEST_CASE("coefficient bounds: worked examples") {
  {
    TriangularSystem sys = parse_system("2*z1^2");
    CoefficientBounds cb = coefficient_bounds(sys);
    // shift of 2u^2: |4 p| at exponent 1 dominates on the unit polydisc
    CHECK(cb.B[0] == Catch::Approx(4.0));
    CHECK(cb.C[0] == Catch::Approx(1.0));  // clamp, no mixed indices
  }
  {
    CoefficientBounds cb = coefficient_bounds(demo_m12());
    CHECK(cb.B[0] == Catch::Approx(2.0));
    CHECK(cb.B[1] == Catch::Approx(4.0));
    CHECK(cb.C[0] == Catch::Approx(1.0));
    CHECK(cb.C[1] == Catch::Approx(1.0));  // the z1 term shifts rigidly
  }
}

TEST_CASE("mixed gap exponent: worked values and closed form") {
  CHECK_FALSE(mixed_gap_exponent({1, 2}, 1).has_value());
  CHECK(*mixed_gap_exponent({1, 2}, 2) == BigRational(3, 2));
  CHECK(*mixed_gap_exponent({2, 3}, 2) == BigRational(7, 6));
  CHECK(*mixed_gap_exponent({3, 3, 3}, 3) == BigRational(28, 27));

  // The minimum is always (P_s + 1)/P_s: alpha_1 = 1 plus a suitable own
  // exponent realizes it, and nothing in (1, that] exists on a grid with
  // denominator P_s. The enumeration must agree with the closed form.
  std::mt19937_64 rng(901);
  for (int t = 0; t < 30; ++t) {
    std::vector<unsigned> m = random_multiplicities(rng, 4, 4);
    if (m.size() < 2) continue;
    for (unsigned s = 2; s <= m.size(); ++s) {
      BigInt Ps = 1;
      for (unsigned i = 0; i < s; ++i) Ps *= m[i];
      CHECK(*mixed_gap_exponent(m, s) == BigRational(Ps + 1, Ps));
    }
  }
}

TEST_CASE("constants chain: demo system at mu = 8") {
  ConstantsLedger L = ledger(demo_m12(), LogReal::from_value(8.0));
  REQUIRE(L.n == 2);
  CHECK(L.N == 2);
  CHECK(L.P[0] == 1.0);
  CHECK(L.P[1] == 2.0);

  CHECK(L.M_mu[0].log() == Catch::Approx(0.0).margin(1e-15));
  CHECK(L.M_mu[1].log() == Catch::Approx(0.5 * std::log(8.0)).epsilon(1e-12));

  CHECK(L.Delta[0].log() == Catch::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(L.Delta[1].log() == Catch::Approx(-std::log(128.0)).epsilon(1e-12));
  CHECK(L.delta_mu.log() == Catch::Approx(-std::log(128.0)).epsilon(1e-12));

  // delta' = min(1/128, 1/4, (4 sqrt 8)^-4) = 2^-14
  CHECK(L.delta_prime.log() ==
        Catch::Approx(-14.0 * std::log(2.0)).epsilon(1e-12));

  REQUIRE_FALSE(L.A[0].has_value());
  REQUIRE(L.A[1].has_value());
  CHECK(*L.A[1] == BigRational(3, 2));

  // Delta'_2 = (2^-14 / (2*8*1)^2)^2 * 2^-14 = 2^-58
  CHECK(L.Delta_prime[0].log() ==
        Catch::Approx(-14.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(L.Delta_prime[1].log() ==
        Catch::Approx(-58.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(L.delta_tilde.log() ==
        Catch::Approx(-58.0 * std::log(2.0)).epsilon(1e-12));

  CHECK(L.d_box.log() == Catch::Approx(-std::log(384.0)).epsilon(1e-12));
  CHECK(L.Q[0].log() == Catch::Approx(std::log(5.0 / 3.0)).epsilon(1e-12));
  CHECK(L.Q[1].log() ==
        Catch::Approx(3.0 * std::log(5.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("constants chain: ordering and monotonicity in mu") {
  std::mt19937_64 rng(902);
  for (int t = 0; t < 20; ++t) {
    TriangularSystem sys =
        normalize(random_system(rng, random_multiplicities(rng)));
    ConstantsLedger L4 = ledger(sys, LogReal::from_value(4.0));
    ConstantsLedger L8 = ledger(sys, LogReal::from_value(8.0));
    ConstantsLedger L64 = ledger(sys, LogReal::from_value(64.0));
    CHECK(L8.delta_tilde <= L8.delta_prime);
    CHECK(L8.delta_prime <= L8.delta_mu);
    CHECK(L8.delta_mu.log() <= std::log(0.5) + 1e-12);
    CHECK(L64.delta_tilde <= L8.delta_tilde);
    CHECK(L8.delta_tilde <= L4.delta_tilde);
    for (unsigned s = 0; s < sys.n; ++s) {
      CHECK(L8.M_mu[s] >= LogReal::one());
      CHECK(L4.M_mu[s] <= L8.M_mu[s]);
    }
  }
  CHECK_THROWS_AS(ledger(demo_m12(), LogReal::from_value(1.0)),
                  InvalidParameterError);
}

TEST_CASE("signature enumeration bound: worked counts") {
  CHECK(admissible_mixed_count({1, 2}, 2) == 1);
  CHECK(admissible_mixed_count({2, 3}, 2) == 4);
  CHECK(admissible_mixed_count({2, 3}, 1) == 0);
  CHECK(signature_count_bound({1, 2}) == BigInt(4));
  CHECK(signature_count_bound({2, 3}) == BigInt(30));
}

TEST_CASE("radii: demo system worked values") {
  TriangularSystem sys = demo_m12();
  ConstantsLedger L = ledger(sys, LogReal::from_value(8.0));
  std::vector<Complex> origin(2, 0.0);

  {
    ApproxSystem as = approximate(sys, L, origin, LogReal::from_value(1e-6),
                                  ScaleMode::Relaxed);
    CHECK(as.log_tau[0] == Catch::Approx(std::log(5e-4)).epsilon(1e-12));
    CHECK(as.log_sigma[0] == Catch::Approx(std::log(1e-3)).epsilon(1e-12));
    // control envelope is the constant mu |c| tau_1 = 4e-3 > sqrt(delta)
    CHECK(as.log_tau[1] ==
          Catch::Approx(0.5 * std::log(2e-3)).epsilon(1e-12));
    CHECK(as.log_sigma[1] == Catch::Approx(std::log(4e-3)).epsilon(1e-12));
    CHECK(as.sig.J == std::vector<unsigned>{1, 2});
    CHECK(as.sig.K[0] == ComplexPoly::Exponents{0, 0});
    CHECK(as.sig.K[1] == ComplexPoly::Exponents{1, 0});
    CHECK(to_string(as.sig) == "J1=1,K1=- J2=2,K2=(1,0)");
  }
  {
    ApproxSystem as = approximate(sys, L, origin, LogReal::from_value(1e-8),
                                  ScaleMode::Relaxed);
    CHECK(as.log_tau[0] == Catch::Approx(std::log(5e-5)).epsilon(1e-12));
    CHECK(as.log_tau[1] ==
          Catch::Approx(0.5 * std::log(2e-4)).epsilon(1e-12));
    CHECK(as.log_sigma[1] == Catch::Approx(std::log(4e-4)).epsilon(1e-12));
  }
  {
    // strict mode below delta~ = 2^-58 ~ 3.47e-18
    ApproxSystem as = approximate(sys, L, origin, LogReal::from_value(1e-20),
                                  ScaleMode::Strict);
    CHECK(as.log_tau[0] == Catch::Approx(std::log(5e-11)).epsilon(1e-12));
    CHECK(as.log_tau[1] ==
          Catch::Approx(0.5 * std::log(2e-10)).epsilon(1e-12));
    CHECK(as.sig.J == std::vector<unsigned>{1, 2});
  }
}

TEST_CASE("radii: single level worked value") {
  TriangularSystem sys = parse_system("2*z1^2");
  ConstantsLedger L = ledger(sys, LogReal::from_value(2.0));
  ApproxSystem as = approximate(sys, L, {Complex(0.0)},
                                LogReal::from_value(1e-4), ScaleMode::Relaxed);
  // tau = (sqrt(delta)/2)^(1/2) = 7.0711e-2
  CHECK(as.log_tau[0] == Catch::Approx(0.5 * std::log(5e-3)).epsilon(1e-12));
  CHECK(std::exp(as.log_tau[0]) == Catch::Approx(7.0710678e-2).epsilon(1e-6));
  CHECK(as.sig.J[0] == 2);
}

TEST_CASE("scale gates") {
  TriangularSystem sys = demo_m12();
  ConstantsLedger L = ledger(sys, LogReal::from_value(8.0));
  std::vector<Complex> origin(2, 0.0);
  CHECK_THROWS_AS(
      approximate(sys, L, origin, LogReal::from_value(1e-6), ScaleMode::Strict),
      InvalidParameterError);
  CHECK_THROWS_AS(approximate(sys, L, origin, LogReal::from_value(0.6),
                              ScaleMode::Relaxed),
                  InvalidParameterError);
  // the gate is inclusive
  CHECK_NOTHROW(approximate(sys, L, origin, L.delta_tilde, ScaleMode::Strict));
}

TEST_CASE("no crossing inside the unit interval is an infeasible scale") {
  TriangularSystem sys = parse_system("z1\nz2 + z1");
  ConstantsLedger L = ledger(sys, LogReal::from_value(1e6));
  // tau_1 = sqrt(delta) = 1e-2, so the control envelope sits at
  // mu tau_1 = 1e4 while the pure envelope tops out below 1 at w = 1.
  CHECK_THROWS_AS(approximate(sys, L, std::vector<Complex>(2, 0.0),
                              LogReal::from_value(1e-4), ScaleMode::Relaxed),
                  InfeasibleScaleError);
}

TEST_CASE("vanishing pure part is a degenerate recentering") {
  TriangularSystem sys = parse_system("z1\nz2^2 + z1*z2^2");
  ConstantsLedger L = ledger(sys, LogReal::from_value(4.0));
  std::vector<Complex> p{Complex(-1.0, 0.0), Complex(0.0, 0.0)};
  CHECK_THROWS_AS(
      approximate(sys, L, p, LogReal::from_value(1e-4), ScaleMode::Relaxed),
      DegenerateInputError);
}

TEST_CASE("radius bound chain on a random corpus") {
  std::mt19937_64 rng(903);
  int built = 0;
  while (built < 40) {
    TriangularSystem sys =
        normalize(random_system(rng, random_multiplicities(rng)));
    std::vector<unsigned> m = multiplicities(sys);
    double mu = (built % 2) ? 8.0 : 4.0;
    ConstantsLedger L = ledger(sys, LogReal::from_value(mu));

    std::uniform_real_distribution<double> shrink(std::log(0.1), 0.0);
    LogReal delta = LogReal::from_log(L.delta_tilde.log() + shrink(rng));
    std::vector<Complex> p = sample_admissible_point(rng, sys, m, 0.35);

    ApproxSystem as = approximate(sys, L, p, delta, ScaleMode::Strict);
    LocalExpansion le = local_expansion(sys, p);
    for (unsigned s = 1; s <= sys.n; ++s) {
      double lt = as.log_tau[s - 1];
      INFO("level " << s << " of " << print_system(sys));
      CHECK(lt >= delta.log() / 2.0 - std::log(L.B[s - 1]) - 1e-9);
      CHECK(lt <= L.M_mu[s - 1].log() + delta.log() / (2.0 * L.P[s - 1]) +
                      1e-9);
      CHECK(lt < 0.0);
      CHECK(as.log_sigma[s - 1] >= delta.log() / 2.0 - 1e-9);

      // envelope bookkeeping: every line sits at or below the height
      for (const auto& [j, b] : le.at(s).pure)
        if (std::abs(b) > 0.0)
          CHECK(std::log(std::abs(b)) + j * lt <= as.log_sigma[s - 1] + 1e-9);
      for (const auto& [alpha, c] : le.at(s).mixed) {
        if (std::abs(c) == 0.0) continue;
        double v = std::log(mu) + std::log(std::abs(c));
        for (unsigned i = 0; i < s; ++i) v += alpha[i] * as.log_tau[i];
        CHECK(v <= as.log_sigma[s - 1] + 1e-9);
      }
    }
    ++built;
  }
}

TEST_CASE("radii are monotone in the scale") {
  std::mt19937_64 rng(904);
  for (int t = 0; t < 25; ++t) {
    TriangularSystem sys =
        normalize(random_system(rng, random_multiplicities(rng)));
    ConstantsLedger L = ledger(sys, LogReal::from_value(6.0));
    std::vector<Complex> p =
        sample_admissible_point(rng, sys, multiplicities(sys), 0.35);
    ApproxSystem coarse =
        approximate(sys, L, p, L.delta_tilde, ScaleMode::Strict);
    ApproxSystem fine = approximate(
        sys, L, p, L.delta_tilde * LogReal::from_value(0.5), ScaleMode::Strict);
    for (unsigned s = 0; s < sys.n; ++s)
      CHECK(fine.log_tau[s] <= coarse.log_tau[s] + 1e-12);
  }
}

TEST_CASE("scaling law at admissible scales") {
  std::mt19937_64 rng(905);
  for (int t = 0; t < 25; ++t) {
    TriangularSystem sys =
        normalize(random_system(rng, random_multiplicities(rng)));
    ConstantsLedger L = ledger(sys, LogReal::from_value(8.0));
    std::vector<Complex> p =
        sample_admissible_point(rng, sys, multiplicities(sys), 0.35);
    LocalExpansion le = local_expansion(sys, p);
    for (double factor : {0.5, 0.1}) {
      ScalingReport rep =
          scaling_check(sys, L, le, L.delta_tilde, factor, ScaleMode::Strict);
      INFO("factor " << factor << " on " << print_system(sys));
      for (double mg : rep.margin) CHECK(mg >= -1e-9);
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("crossing sweep agrees with the bisection oracle") {
  std::mt19937_64 rng(906);
  int built = 0;
  while (built < 50) {
    TriangularSystem sys =
        normalize(random_system(rng, random_multiplicities(rng, 2, 3)));
    ConstantsLedger L = ledger(sys, LogReal::from_value(8.0));
    std::vector<Complex> p =
        sample_admissible_point(rng, sys, multiplicities(sys), 0.35);
    LocalExpansion le = local_expansion(sys, p);
    ApproxSystem as =
        approximate(sys, L, p, L.delta_tilde, ScaleMode::Strict);
    for (unsigned s = 1; s <= sys.n; ++s) {
      PureEnvelope F = envelope_F(le.at(s));
      std::vector<double> prefix(as.log_tau.begin(),
                                 as.log_tau.begin() + (s - 1));
      MixedEnvelope C = envelope_C(le.at(s), s, std::log(8.0),
                                   L.delta_tilde.log(), prefix);
      auto exact = first_crossing(F, C);
      auto probe = first_crossing_bisect(F, C);
      REQUIRE(exact.has_value());
      REQUIRE(probe.has_value());
      CHECK(std::abs(exact->log_tau - probe->log_tau) <= 1e-9);
    }
    ++built;
  }
}

TEST_CASE("the crossing is minimal: the pure envelope stays below before it") {
  TriangularSystem sys = demo_m12();
  ConstantsLedger L = ledger(sys, LogReal::from_value(8.0));
  std::vector<Complex> origin(2, 0.0);
  ApproxSystem as = approximate(sys, L, origin, LogReal::from_value(1e-6),
                                ScaleMode::Relaxed);
  LocalExpansion le = local_expansion(sys, origin);
  for (unsigned s = 1; s <= 2; ++s) {
    PureEnvelope F = envelope_F(le.at(s));
    std::vector<double> prefix(as.log_tau.begin(),
                               as.log_tau.begin() + (s - 1));
    MixedEnvelope C =
        envelope_C(le.at(s), s, std::log(8.0), std::log(1e-6), prefix);
    for (double back : {1e-2, 1e-1, 1.0})
      CHECK(F.value(as.log_tau[s - 1] - back) <
            C.value(as.log_tau[s - 1] - back));
  }
}

TEST_CASE("type signatures on a grid stay within the enumeration bound") {
  TriangularSystem sys = chain_m23();
  ConstantsLedger L = ledger(sys, LogReal::from_value(8.0));
  std::vector<unsigned> m = multiplicities(sys);
  std::set<TypeSignature> seen;
  // 11 x 11 grid through the coordinate axes, where the strata change
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      std::vector<Complex> p{Complex(-0.4 + 0.08 * i, 0.0),
                             Complex(-0.4 + 0.08 * j, 0.0)};
      seen.insert(type_signature(sys, L, p, L.delta_tilde, ScaleMode::Strict));
    }
  }
  CHECK(seen.size() >= 2);  // the sweep crosses strata
  CHECK(BigInt(seen.size()) <= signature_count_bound(m));
}

TEST_CASE("stability under moving the base point: demo system") {
  TriangularSystem sys = demo_m12();
  ConstantsLedger L = ledger(sys, LogReal::from_value(8.0));
  LogReal delta = LogReal::from_value(1e-20);  // strict range

  std::vector<Complex> p{Complex(0.3, -0.1), Complex(-0.2, 0.25)};
  ApproxSystem base = approximate(sys, L, p, delta, ScaleMode::Strict);
  double d = L.d_box.value();
  std::vector<Complex> q{
      p[0] + 0.5 * d * std::exp(base.log_tau[0]),
      p[1] + Complex(0.0, -0.5) * d * std::exp(base.log_tau[1])};

  StabilityReport rep = stability_check(sys, L, p, q, delta);
  CHECK(rep.in_box);
  CHECK(rep.comparable);
  CHECK(rep.ratios_pass);
  CHECK(rep.coeffs_pass);
}

TEST_CASE("stability under moving the base point: random corpus") {
  std::mt19937_64 rng(907);
  std::uniform_real_distribution<double> unit(-0.7, 0.7);
  for (int t = 0; t < 25; ++t) {
    TriangularSystem sys =
        normalize(random_system(rng, random_multiplicities(rng)));
    ConstantsLedger L = ledger(sys, LogReal::from_value(8.0));
    std::vector<Complex> p(sys.n, 0.0);  // normalization anchors the origin
    ApproxSystem base =
        approximate(sys, L, p, L.delta_tilde, ScaleMode::Strict);
    double d = L.d_box.value();
    std::vector<Complex> q(sys.n);
    bool representable = true;
    for (unsigned s = 0; s < sys.n; ++s) {
      double r = d * std::exp(base.log_tau[s]);
      if (r < 1e-290) representable = false;  // box collapses below doubles
      q[s] = Complex(unit(rng) * r, unit(rng) * r);
    }
    if (!representable) continue;
    StabilityReport rep = stability_check(sys, L, p, q, L.delta_tilde);
    INFO(print_system(sys));
    CHECK(rep.in_box);
    CHECK(rep.ratios_pass);
    CHECK(rep.coeffs_pass);
  }
}

}  // namespace rcdtest
