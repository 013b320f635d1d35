// Coverings, the packing bound, assembled weights, and gain certificates.
//
// Worked oracles, derived before the implementation:
//  - overlap bound for the demo system: e = 3, k = 13, so
//    M_T = ceil(24^4 (5/3)^24 2^416) = 1.1849e136, 137 digits;
//  - a pure system with m = (1,1) at delta = 1e-8 has constant radii
//    A = 5e-5 / 2048 at every micro-grid point, so a 50 x 50 sweep spaced
//    3A/49 selects centers every 9 steps: 36 boxes, max overlap 3 x 3;
//  - the assembled weight at a corner center is 1/27 + 2 P(chi9) +
//    P(2 chi9 - 1/2) with chi9 = 1/2 + (27/49)^2 / 4 = 0.35491681...;
//  - the demo system's level-2 window drops exactly one stage when the
//    base point leaves the z2 axis, shrinking the box edge by 16^5;
//  - ladder slopes: tau_2 = sqrt(2) delta^(1/4) for the demo system and
//    tau_2 = c delta^(1/12) for the m = (2,3) chain, both exactly affine
//    in log delta, so the fitted slopes equal 1/4 and 1/12 to roundoff.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "rcd/cover.hpp"
#include "rcd/cutoff.hpp"
#include "rcd/global_constants.hpp"
#include "rcd/parse.hpp"

namespace rcdtest {

using namespace rcd;

namespace {

TriangularSystem demo_m12() { return parse_system("2*z1\n2*z2^2 - z1"); }

TriangularSystem pure_m11() { return parse_system("2*z1\n2*z2"); }

TriangularSystem chain_m23() { return parse_system("2*z1^2\n2*z2^3 - 2*z1"); }

}  // namespace

TEST_CASE("overlap bound: exact integer against its log form") {
  LogReal mu = LogReal::from_value(8.0);

  OverlapBound demo = overlap_bound(ledger(demo_m12(), mu));
  std::string s = to_string(demo.value);
  CHECK(s.size() == 137);
  CHECK(s.substr(0, 10) == "1184931251");
  CHECK(demo.log_value.log() == Catch::Approx(313.3212574047128).margin(1e-9));
  CHECK(demo.value.convert_to<double>() ==
        Catch::Approx(std::exp(demo.log_value.log())).epsilon(1e-12));

  OverlapBound pure = overlap_bound(ledger(pure_m11(), mu));
  s = to_string(pure.value);
  CHECK(s.size() == 60);
  CHECK(s.substr(0, 10) == "1023326601");
  CHECK(pure.log_value.log() == Catch::Approx(135.87557918136682).margin(1e-9));

  // three levels: e climbs to 28 through the weighted recurrence, and the
  // value leaves double range, so the cross-check moves to the bit length
  OverlapBound wide =
      overlap_bound(ledger(parse_system("z1^2\nz2^3 - z1\nz3^2 - z2"), mu));
  CHECK(to_string(wide.value).size() == 445);
  CHECK(boost::multiprecision::msb(wide.value) == 1475);
  CHECK(wide.log_value.log() == Catch::Approx(1022.482349239395).margin(1e-8));
}

TEST_CASE("overlap bound refuses absurd exponents") {
  // the weighted recurrence makes e super-exponential in the depth, so a
  // tall tower of high multiplicities overflows any sane power budget; the
  // guard fires on the shape alone, before any big powers are formed
  ConstantsLedger L;
  L.n = 16;
  L.N = 9;
  L.m.assign(16, 9);
  CHECK_THROWS_AS(overlap_bound(L), InvalidParameterError);
}

TEST_CASE("lexicographic real grids") {
  std::vector<Complex> c{Complex(0.1, 0.2), Complex(-0.3, 0.0)};
  auto g = real_grid(c, {0.5, 0.25}, 3);
  REQUIRE(g.size() == 9);
  // axis 1 slowest, both imaginary parts pinned; ends carry the roundoff
  // of center + offset, the middle column is the center exactly
  CHECK(g[0][0].real() == Catch::Approx(-0.4).margin(1e-15));
  CHECK(g[0][0].imag() == 0.2);
  CHECK(g[0][1].real() == Catch::Approx(-0.55).margin(1e-15));
  CHECK(g[1][1] == Complex(-0.3, 0.0));
  CHECK(g[4][0] == Complex(0.1, 0.2));
  CHECK(g[4][1] == Complex(-0.3, 0.0));
  CHECK(g[8][0].real() == Catch::Approx(0.6).margin(1e-15));
  CHECK(g[8][1].real() == Catch::Approx(-0.05).margin(1e-15));
  CHECK(g[8][1].imag() == 0.0);

  auto single = real_grid(c, {0.5, 0.25}, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0][0] == c[0]);

  CHECK_THROWS_AS(real_grid(c, {0.5}, 3), InvalidParameterError);
  CHECK_THROWS_AS(real_grid(c, {0.5, 0.25}, 0), InvalidParameterError);
}

TEST_CASE("micro covering of a pure system: exact greedy geometry") {
  TriangularSystem sys = pure_m11();
  ConstantsLedger L = ledger(sys, LogReal::from_value(8.0));
  LogReal delta = LogReal::from_value(1e-8);

  // both radii are A = tau * d * a = (1e-4/2) / (128 * 16) at every point
  double A = 5e-5 / 2048.0;
  auto grid = real_grid({Complex(0.0), Complex(0.0)}, {1.5 * A, 1.5 * A}, 50);
  CoveringReport cov = build_covering(sys, L, grid, delta);

  CHECK(cov.points == 2500);
  CHECK(cov.boxes.size() == 36);
  CHECK(cov.strata.size() == 1);
  CHECK(cov.strata[0].points == 2500);
  CHECK(cov.covered);
  CHECK(cov.separated);
  // full boxes span 16.33 grid steps, so points between centers (step 13
  // mod 18, say) sit inside four boxes per axis
  CHECK(cov.max_overlap == 16);
  CHECK(cov.overlap_ok());
  CHECK(cov.pass());

  // greedy starts at the lexicographic corner
  CHECK(cov.boxes[0].p[0] == grid[0][0]);
  CHECK(cov.boxes[0].p[1] == grid[0][1]);
  for (const CoverBox& b : cov.boxes) {
    CHECK(b.radii[0] == Catch::Approx(A).epsilon(1e-12));
    CHECK(b.radii[1] == Catch::Approx(A).epsilon(1e-12));
  }

  // byte-identical rerun
  CoveringReport again = build_covering(sys, L, grid, delta);
  REQUIRE(again.boxes.size() == cov.boxes.size());
  for (std::size_t i = 0; i < cov.boxes.size(); ++i) {
    CHECK(again.boxes[i].p[0] == cov.boxes[i].p[0]);
    CHECK(again.boxes[i].p[1] == cov.boxes[i].p[1]);
  }

  // assembled weight: centers split by how many boxes reach them. Corner
  // centers see 2 x 2 boxes, edges 2 x 3, interior ones 3 x 3, and the
  // summed bumps are exact hinge values of the chi ramp at (27/49)^2.
  CutoffSpec chi = make_cutoff(2);
  GlobalConstants gc = fix_global_constants(L, chi);
  AssembledWeight lam(sys, cov, chi, gc.eta, delta);
  CHECK(lam.boxes() == 36);

  std::size_t corners = 0, edges = 0, interior = 0;
  for (const CoverBox& b : cov.boxes) {
    BoundaryPoint pt{b.p, 0.0};
    double v = lam.value(pt);
    CHECK(v >= 1.0 / 27.0 - 1e-12);  // own bump plus nonnegative neighbors
    switch (lam.active(pt)) {
      case 4:
        ++corners;
        CHECK(v == Catch::Approx(0.3549168139838828).epsilon(1e-9));
        break;
      case 6:
        ++edges;
        CHECK(v == Catch::Approx(0.590743911348901).epsilon(1e-9));
        break;
      case 9:
        ++interior;
        CHECK(v == Catch::Approx(0.9803454264971099).epsilon(1e-9));
        break;
      default:
        FAIL("unexpected box count at a center");
    }
  }
  CHECK(corners == 4);
  CHECK(edges == 16);
  CHECK(interior == 16);

  // dead outside the union of boxes, and dead deep below the boundary
  CHECK(lam.value({{Complex(0.3), Complex(0.3)}, 0.0}) == 0.0);
  CHECK(lam.active({{Complex(0.3), Complex(0.3)}, 0.0}) == 0);
  CHECK(lam.value({cov.boxes[0].p, -1.0}) == 0.0);
}

TEST_CASE("micro covering with stage-split radii") {
  TriangularSystem sys = demo_m12();
  ConstantsLedger L = ledger(sys, LogReal::from_value(8.0));
  LogReal delta = LogReal::from_value(1e-8);

  // off the z2 axis the level-2 envelope picks up a linear term 4 p2 z2
  // whose switch radius 2|p2| lands inside the first probe interval, so
  // the window descends exactly one stage: the box edge shrinks by a^5
  double A1 = 5e-5 / 98304.0;
  double A2 = std::sqrt(2e-4) / 98304.0;
  auto grid =
      real_grid({Complex(0.0), Complex(0.0)}, {1.5 * A1, 1.5 * A2}, 9);
  CoveringReport cov = build_covering(sys, L, grid, delta);

  CHECK(cov.points == 81);
  CHECK(cov.boxes.size() == 40);
  CHECK(cov.strata.size() == 1);  // same signature on and off the axis
  CHECK(cov.covered);
  CHECK(cov.separated);
  // an off-axis point sees up to three same-row boxes plus the three
  // axis-row boxes whose wide stage-0 edge reaches two rows out
  CHECK(cov.max_overlap == 6);
  CHECK(cov.pass());

  std::size_t settled = 0;
  double lo = A2, hi = 0.0;
  for (const CoverBox& b : cov.boxes) {
    CHECK(b.radii[0] == Catch::Approx(A1).epsilon(1e-12));
    lo = std::min(lo, b.radii[1]);
    hi = std::max(hi, b.radii[1]);
    if (b.radii[1] > 1e-10) {
      ++settled;
      CHECK(b.radii[1] == Catch::Approx(A2).epsilon(1e-12));
      CHECK(b.p[1] == Complex(0.0));
    }
  }
  CHECK(settled == 5);  // one stage-0 box per z1 center, all on the axis
  CHECK(hi / lo == Catch::Approx(1048576.0).epsilon(1e-9));
}

TEST_CASE("macro covering splits the axis stratum") {
  TriangularSystem sys = demo_m12();
  ConstantsLedger L = ledger(sys, LogReal::from_value(8.0));
  // spacing 0.04 dwarfs every window, so each point is its own box and
  // the report reduces to a stratification of the grid by signature
  auto grid = real_grid({Complex(0.0), Complex(0.0)}, {0.4, 0.4}, 21);
  CoveringReport cov = build_covering(sys, L, grid, LogReal::from_value(1e-8));

  CHECK(cov.points == 441);
  CHECK(cov.boxes.size() == 441);
  CHECK(cov.max_overlap == 1);
  CHECK(cov.covered);
  CHECK(cov.separated);
  CHECK(cov.pass());

  REQUIRE(cov.strata.size() == 2);
  for (const Stratum& st : cov.strata) {
    REQUIRE(st.sig.J.size() == 2);
    CHECK(st.sig.J[0] == 1);
    if (st.sig.J[1] == 2) {
      CHECK(st.points == 21);  // the z2 axis, one point per z1 column
      CHECK(st.boxes.size() == 21);
    } else {
      CHECK(st.sig.J[1] == 1);
      CHECK(st.points == 420);
    }
  }
}

TEST_CASE("gain certificates: exact slopes on power corpora") {
  LogReal mu = LogReal::from_value(8.0);
  LogReal start = LogReal::from_value(1e-4);
  std::vector<Complex> origin1{Complex(0.0)};
  std::vector<Complex> origin2{Complex(0.0), Complex(0.0)};

  // single pure power: tau = delta^(1/4) on the nose
  {
    TriangularSystem sys = parse_system("z1^2");
    GainCertificate cert =
        gain_certificate(sys, ledger(sys, mu), origin1, start, 6);
    CHECK(cert.epsilon == BigRational(1, 4));
    REQUIRE(cert.rungs.size() == 6);
    CHECK(cert.rungs[1].log_delta - cert.rungs[0].log_delta ==
          Catch::Approx(-std::log(10.0)));
    CHECK(cert.top_slope == Catch::Approx(0.25).margin(1e-9));
    CHECK(cert.pass());
  }
  {
    TriangularSystem sys = parse_system("z1^3");
    GainCertificate cert =
        gain_certificate(sys, ledger(sys, mu), origin1, start, 6);
    CHECK(cert.epsilon == BigRational(1, 6));
    CHECK(cert.top_slope == Catch::Approx(1.0 / 6.0).margin(1e-9));
    CHECK(cert.pass());
  }

  // demo system: tau_1 = sqrt(delta)/2, tau_2 = sqrt(2) delta^(1/4)
  {
    TriangularSystem sys = demo_m12();
    GainCertificate cert =
        gain_certificate(sys, ledger(sys, mu), origin2, start, 6);
    CHECK(cert.epsilon == BigRational(1, 4));
    REQUIRE(cert.slope.size() == 2);
    CHECK(cert.slope[0] == Catch::Approx(0.5).margin(1e-9));
    CHECK(cert.top_slope == Catch::Approx(0.25).margin(1e-9));
    CHECK(cert.pass());
  }

  // the m = (2,3) chain realizes the smallest gain 1/12
  {
    TriangularSystem sys = chain_m23();
    GainCertificate cert =
        gain_certificate(sys, ledger(sys, mu), origin2, start, 6);
    CHECK(cert.epsilon == BigRational(1, 12));
    CHECK(cert.slope[0] == Catch::Approx(0.25).margin(1e-9));
    CHECK(cert.top_slope == Catch::Approx(1.0 / 12.0).margin(1e-9));
    CHECK(cert.pass());
  }

  CHECK_THROWS_AS(gain_certificate(demo_m12(), ledger(demo_m12(), mu),
                                   origin2, start, 2),
                  InsufficientDataError);
}

}  // namespace rcdtest
