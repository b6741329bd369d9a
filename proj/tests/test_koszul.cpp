#include "doctest.h"
#include "hbss/errors.hpp"
#include "hbss/koszul.hpp"

using namespace hbss;

namespace {

GradedRing bp(long p, int n) {
  std::vector<RingGenerator> gens;
  long pk = p;
  for (int i = 1; i <= n; ++i) {
    pk *= p;
    gens.push_back({"v" + std::to_string(i), static_cast<int>(2 * (pk / p - 1)), false});
  }
  return GradedRing(Coefficients::p_local(p), gens);
}

int total_rank(const BigradedModule& m, int k) {
  int n = 0;
  for (const auto& [key, cell] : m.cells)
    if (key.first == k) n += cell.shape.free_rank;
  return n;
}

}  // namespace

TEST_CASE("koszul_complex examples") {
  GradedRing zp(Coefficients::p_local(3), {});
  auto s = RegularSequence::parse(zp, {"p"});
  auto k = koszul_complex(s, GradedModule::cyclic(zp, {}), Window{0, 0, 1, 1});
  CHECK(k.differential(1, 0) == ExactMatrix::from_dense(zp.ground(), {{Scalar(3)}}));

  auto ring = bp(3, 1);
  auto s2 = RegularSequence::parse(ring, {"p", "v1"});
  auto k2 = koszul_complex(s2, GradedModule::cyclic(ring, {}), Window{0, 12, 1, 1});
  CHECK(k2.ambient_dim(1, 4) == 2);
  CHECK(k2.ambient_dim(2, 4) == 1);
  CHECK(k2.ambient_dim(0, 4) == 1);
  // d(e0e1) = v1 e1... with signs: d(e0 e1) = x0 e1 - x1 e0 = p e1 - v1 e0.
  Vector top{Scalar(1)};
  Vector image = k2.differential(2, 4).apply(top);
  CHECK(k2.describe(1, 4, image) == "-v1*e0 + 3*e1");
}

TEST_CASE("d^2 = 0 for (p, v1, v2) at p = 2") {
  auto ring = bp(2, 2);
  auto s = RegularSequence::parse(ring, {"p", "v1", "v2"});
  auto k = koszul_complex(s, GradedModule::cyclic(ring, {}), Window{0, 20, 1, 1});
  CHECK_FALSE(k.square_zero_failure(0, 20));
  for (int t = 0; t <= 20; ++t)
    for (int j = 2; j <= 3; ++j) CHECK((k.differential(j - 1, t) * k.differential(j, t)).is_zero());
}

TEST_CASE("Tor of L over Z_(3)[v1] is exterior") {
  auto ring = bp(3, 1);
  auto s = RegularSequence::parse(ring, {"p", "v1"});
  auto l = quotient_module(GradedModule::cyclic(ring, {}), s, 1);
  auto tor = koszul_homology(s, l, Window{-4, 16, 1, 1}).tor;
  CHECK(tor.ground == Coefficients::prime_field(3));
  CHECK(total_rank(tor, 0) == 1);
  CHECK(total_rank(tor, 1) == 2);
  CHECK(total_rank(tor, 2) == 1);
  CHECK(tor.cells.at({1, 0}).labels == std::vector<std::string>{"e0"});
  CHECK(tor.cells.at({1, 4}).labels == std::vector<std::string>{"e1"});
  CHECK(tor.cells.at({2, 4}).labels == std::vector<std::string>{"e0e1"});
}

TEST_CASE("Koszul homology of the ring itself is L in degree 0") {
  auto ring = bp(3, 2);
  auto s = RegularSequence::parse(ring, {"p", "v1", "v2"});
  auto tor = koszul_homology(s, GradedModule::cyclic(ring, {}), Window{0, 40, 1, 1}).tor;
  REQUIRE(tor.cells.size() == 1);
  CHECK(tor.shape(0, 0) == ModuleShape{1, {}});
}

TEST_CASE("Koszul homology detects (p, p)") {
  GradedRing z(Coefficients::p_local(5), {});
  auto s = RegularSequence::parse(z, {"p", "p"});
  auto tor = koszul_homology(s, GradedModule::cyclic(z, {}), Window{0, 0, 1, 1}).tor;
  CHECK_FALSE(tor.shape(1, 0).is_zero());
  CHECK(tor.shape(1, 0) == ModuleShape{1, {}});
  CHECK(tor.shape(2, 0).is_zero());
}

TEST_CASE("Ext duals and the F^1 certificate") {
  GradedRing z(Coefficients::p_local(3), {});
  auto s1 = RegularSequence::parse(z, {"p"});
  auto l1 = quotient_module(GradedModule::cyclic(z, {}), s1, 1);
  auto r1 = ext_groups(s1, l1, Window{-4, 4, 1, 1});
  CHECK(r1.ext.shape(1, 0) == ModuleShape{1, {}});
  CHECK(r1.ext.cells.at({1, 0}).labels == std::vector<std::string>{"f0"});
  REQUIRE(r1.extension);
  CHECK(r1.extension->certified);

  auto ring = bp(3, 1);
  auto s2 = RegularSequence::parse(ring, {"p", "v1"});
  auto l2 = quotient_module(GradedModule::cyclic(ring, {}), s2, 1);
  auto r2 = ext_groups(s2, l2, Window{-12, 12, 1, 1});
  CHECK(r2.ext.cells.at({1, 0}).labels == std::vector<std::string>{"f0"});
  CHECK(r2.ext.cells.at({1, -4}).labels == std::vector<std::string>{"f1"});
  CHECK(r2.ext.cells.at({2, -4}).labels == std::vector<std::string>{"f0f1"});
  CHECK(total_rank(r2.ext, 2) == 1);
  for (const auto& [key, cell] : r2.ext.cells) CHECK(cell.shape == r2.tor.shape(key.first, -key.second));
  REQUIRE(r2.extension);
  CHECK(r2.extension->certified);
  CHECK(r2.extension->units == std::vector<Scalar>{Scalar(1), Scalar(1)});
}

TEST_CASE("Ext refuses non-free Tor") {
  auto ring = bp(3, 1);
  auto s = RegularSequence::parse(ring, {"v1"});
  auto m = GradedModule::cyclic(ring, {ring.parse("9")});
  CHECK_THROWS_AS(ext_groups(s, m, Window{-8, 8, 1, 1}), NotFreeError);
}

TEST_CASE("delta on basis elements in both conventions") {
  auto ring = bp(3, 1);
  auto s = RegularSequence::parse(ring, {"p", "v1"});
  ResolutionComplex c(s, 3);
  ResolutionBasis e0{{0}, {0, 0}, {}};
  ResolutionBasis e01{{0, 1}, {0, 0}, {}};
  CHECK(c.to_string(c.delta_of(e0)) == "{p}");
  CHECK(c.to_string(c.delta_of(e0, DeltaConvention::kNegated)) == "-{p}");
  CHECK(c.to_string(c.delta_of(e01)) == "e1*{p} - e0*{v1}");
  CHECK(c.to_string(c.delta_of(ResolutionBasis{{}, {0, 0}, {}})) == "0");
  CHECK_FALSE(ResolutionComplex::convention_note().empty());
}

TEST_CASE("delta squares to zero by symbolic expansion, n = 3, filtration <= 4") {
  auto ring = bp(2, 2);
  auto s = RegularSequence::parse(ring, {"p", "v1", "v2"});
  ResolutionComplex c(s, 5);
  for (const auto& e : all_index_subsets(3))
    for (int st = 0; st <= 4; ++st)
      for (const auto& f : symmetric_monomials(3, st)) {
        std::map<ResolutionBasis, Scalar> acc;
        for (const auto& a : c.delta_of(ResolutionBasis{e, f, {}}))
          for (const auto& b : c.delta_of(a.basis)) acc[b.basis] += a.coefficient * b.coefficient;
        for (const auto& [key, value] : acc) CHECK(value == 0);
      }
}

TEST_CASE("resolution exactness for n = 3 at p = 2") {
  auto ring = bp(2, 2);
  auto s = RegularSequence::parse(ring, {"p", "v1", "v2"});
  auto c = relative_injective_resolution(ring, s, 5, Window{0, 40, 4, 2});
  const auto& cert = c.certificate();
  CHECK(cert.exact);
  CHECK(cert.square_zero);
  CHECK_FALSE(cert.failure);
  bool saw_stage_four = false;
  for (const auto& r : cert.records)
    if (r.stage == 4 && r.image_rank > 0) saw_stage_four = true;
  CHECK(saw_stage_four);
  CHECK(c.delta(0, 0).rows() > 0);

  GradedRing z(Coefficients::p_local(3), {});
  CHECK_THROWS_AS(relative_injective_resolution(z, RegularSequence::parse(z, {"p", "p"}), 2, Window{0, 0, 1, 1}),
                  NonRegular);
}

TEST_CASE("resolution over a Z_(p) residue ring uses exact span equality") {
  auto ring = bp(3, 2);
  auto s = RegularSequence::parse(ring, {"v1", "v2"});
  auto c = relative_injective_resolution(ring, s, 3, Window{0, 40, 2, 2});
  CHECK(c.ground() == Coefficients::p_local(3));
  CHECK(c.certificate().exact);
}
