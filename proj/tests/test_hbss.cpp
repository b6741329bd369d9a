#include <random>

#include "doctest.h"
#include "hbss/errors.hpp"
#include "hbss/hbss.hpp"
#include "oracles.hpp"

using namespace hbss;

namespace {

GradedRing bp1(long p) { return GradedRing(Coefficients::p_local(p), {{"v1", static_cast<int>(2 * (p - 1)), false}}); }

int rank_of(const BigradedModule& m, int s, int t) { return m.shape(s, t).free_rank; }

// gr_I(T)/(x_J) from gr_I(T) alone, using that the x̄_j act regularly on gr.
int quotient_rank(const BigradedModule& gr, const RegularSequence& seq, const IndexSet& killed, int s, int t) {
  int total = 0;
  for (const auto& sub : all_index_subsets(killed)) {
    int shift = 0;
    for (int j : sub) shift += seq.degree(j);
    const int sign = sub.size() % 2 == 0 ? 1 : -1;
    total += sign * rank_of(gr, s - static_cast<int>(sub.size()), t - shift);
  }
  return total;
}

ModuleShape fp(int n) { return ModuleShape{n, {}}; }

// E_1 page over F_p on s in [0, 3], t in [-3, 3] with free cells of the given
// dimensions and standard-basis representatives.
Page blank_page(const Coefficients& f, const std::map<Bidegree, int>& dims) {
  Page page(1, f, f);
  page.s_min = 0;
  page.s_max = 3;
  page.t_min = -3;
  page.t_max = 3;
  for (const auto& [key, n] : dims) {
    Cell c;
    c.s = key.first;
    c.t = key.second;
    c.shape = fp(n);
    for (int i = 0; i < n; ++i) {
      Vector e(static_cast<std::size_t>(n), Scalar(0));
      e[static_cast<std::size_t>(i)] = 1;
      c.orders.push_back(-1);
      c.representatives.push_back(e);
      c.labels.push_back("g" + std::to_string(i));
    }
    page.cells.emplace(key, std::move(c));
  }
  return page;
}

using Dense = std::vector<std::vector<long>>;

// Random d_1 with d_1 d_1 = 0: a standard split complex along each diagonal
// s + t = c, scrambled by elementary basis changes in every cell. Returns the
// homology dimensions built in.
std::map<Bidegree, int> random_complex(std::mt19937& rng, long p, std::map<Bidegree, int>& dims,
                                       std::map<Bidegree, Dense>& d) {
  std::uniform_int_distribution<int> dim(0, 3);
  for (int s = 0; s <= 3; ++s)
    for (int t = -3; t <= 3; ++t) dims[{s, t}] = dim(rng);
  std::map<Bidegree, int> homology;
  for (int c = -3; c <= 6; ++c) {
    int incoming = 0;
    for (int s = std::max(0, c - 3); s <= std::min(3, c + 3); ++s) {
      const Bidegree here{s, c - s};
      const Bidegree next{s + 1, c - s - 1};
      const int n = dims[here];
      const bool has_next = s + 1 <= 3 && c - s - 1 >= -3;
      const int room = std::min(n - incoming, has_next ? dims[next] : 0);
      const int outgoing = std::uniform_int_distribution<int>(0, room)(rng);
      homology[here] = n - incoming - outgoing;
      if (has_next) {
        Dense m(static_cast<std::size_t>(dims[next]), std::vector<long>(static_cast<std::size_t>(n), 0));
        // Basis order in a cell: image of the incoming map, then the outgoing block, then homology.
        for (int i = 0; i < outgoing; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(incoming + i)] = 1;
        d[here] = m;
      }
      incoming = outgoing;
    }
  }
  // Basis change e_j += λ e_i in a cell: row_j += λ row_i on the incoming map and
  // col_i -= λ col_j on the outgoing map.
  std::uniform_int_distribution<long> scalar(1, p - 1);
  for (const auto& [key, n] : dims) {
    if (n < 2) continue;
    const Bidegree prev{key.first - 1, key.second + 1};
    for (int step = 0; step < 8; ++step) {
      const int i = std::uniform_int_distribution<int>(0, n - 1)(rng);
      int j = std::uniform_int_distribution<int>(0, n - 2)(rng);
      if (j >= i) ++j;
      const long lambda = scalar(rng);
      if (auto in = d.find(prev); in != d.end())
        for (std::size_t c = 0; c < in->second[0].size(); ++c)
          in->second[static_cast<std::size_t>(j)][c] =
              (in->second[static_cast<std::size_t>(j)][c] + lambda * in->second[static_cast<std::size_t>(i)][c]) % p;
      if (auto out = d.find(key); out != d.end())
        for (auto& row : out->second)
          row[static_cast<std::size_t>(i)] =
              ((row[static_cast<std::size_t>(i)] - lambda * row[static_cast<std::size_t>(j)]) % p + p) % p;
    }
  }
  return homology;
}

ExactMatrix to_exact(const Coefficients& f, const Dense& m, int cols) {
  DenseMatrix dense;
  for (const auto& row : m) {
    Vector v;
    for (long x : row) v.push_back(Scalar(x));
    dense.push_back(v);
  }
  return ExactMatrix::from_dense(f, dense, cols);
}

}  // namespace

TEST_CASE("mod-p Moore input in comodule mode") {
  auto ring = bp1(3);
  auto seq = RegularSequence::parse(ring, {"p", "v1"});
  auto l = residue_ring(seq);
  Window w{-2, 24, 5, 2};
  auto m = BocksteinComodule::exterior(l.ring, {0, 4}, {0});
  Page e1 = e1_from_comodule(seq, m, w);
  CHECK(e1.r == 1);
  CHECK(e1.masked_count() == 0);
  CHECK(e1.s_max == 6);
  CHECK(e1.t_min == -3);
  CHECK(e1.t_max == 25);
  // E_1^{s,t} = gr^s ⊗ Λ(a0): one class x^μ and one class x^μ a0 per monomial.
  auto gr = associated_graded(seq, Window{-4, 26, 7, 1});
  for (const auto& [key, cell] : e1.cells)
    CHECK(cell.shape == fp(rank_of(gr, key.first, key.second) + rank_of(gr, key.first, key.second - 1)));
  // d_1(v̄ ⊗ a0) = p̄v̄ ⊗ 1.
  const Cell* a = e1.cell(1, 5);
  REQUIRE(a);
  REQUIRE(a->labels == std::vector<std::string>{"v1*a0"});
  const Differential* d = e1.differential({1, 5});
  REQUIRE(d);
  CHECK(e1.cell(2, 4)->labels == std::vector<std::string>{"p*v1"});
  CHECK(d->matrix.at(0, 0) == 1);

  Page e2 = turn_page(e1);
  CHECK(e2.r == 2);
  int unmasked = 0;
  for (const auto& [key, cell] : e2.cells) {
    if (cell.masked) continue;
    ++unmasked;
    CHECK(cell.shape == fp(quotient_rank(gr, seq, {0}, key.first, key.second)));
  }
  // s = 0 has no incoming differential, so (0, 25) is known as well.
  CHECK(unmasked == 6 * 27 + 1);
  auto parity = parity_collapse_check(e2);
  CHECK(parity.collapsed);
  CHECK_FALSE(parity.odd_cell);
  CHECK(parity.checked == 6);

  // E_2 agrees with coext of the comodule.
  auto co = coext(m, w);
  for (const auto& [key, cell] : e2.cells)
    if (!cell.masked) CHECK(cell.shape == co.shape(key.first, key.second));
}

TEST_CASE("zero operators give d_1 = 0") {
  auto ring = bp1(3);
  auto seq = RegularSequence::parse(ring, {"p", "v1"});
  auto l = residue_ring(seq);
  Window w{0, 16, 3, 2};
  Page e1 = e1_from_comodule(seq, BocksteinComodule::trivial(l.ring, {0, 4}), w);
  for (const auto& d : e1.differentials) CHECK(d.matrix.is_zero());
  Page e2 = turn_page(e1);
  for (const auto& [key, cell] : e2.cells)
    if (!cell.masked) CHECK(cell.shape == e1.cells.at(key).shape);
  Page same = turn_page(e1, {});
  for (const auto& [key, cell] : same.cells)
    if (!cell.masked) CHECK(cell.shape == e1.cells.at(key).shape);
}

TEST_CASE("Smith-Toda input gives the Koszul complex") {
  GradedRing e2ring(Coefficients::p_local(5), {{"v1", 8, false}, {"v2", 48, true}});
  auto seq = RegularSequence::parse(e2ring, {"p", "v1"});
  auto l = residue_ring(seq);
  Window w{-50, 100, 3, 2};
  auto m = BocksteinComodule::exterior(l.ring, {0, 8}, {0, 1});
  Page e1 = e1_from_comodule(seq, m, w);
  // E_1^{s,t}: monomials x^μ (|μ| = s) times a_J times v2^k.
  for (const auto& [key, cell] : e1.cells) {
    int expected = 0;
    for (const auto& mu : symmetric_monomials(2, key.first))
      for (const auto& set : all_index_subsets(2)) {
        int deg = seq.monomial_degree(mu);
        for (int j : set) deg += seq.degree(j) + 1;
        if ((key.second - deg) % 48 == 0) ++expected;
      }
    CHECK(cell.shape == fp(expected));
  }
  Page e2 = turn_page(e1);
  for (const auto& [key, cell] : e2.cells) {
    if (cell.masked) continue;
    const bool l_class = key.first == 0 && key.second % 48 == 0;
    CHECK(cell.shape == fp(l_class ? 1 : 0));
  }
  CHECK(parity_collapse_check(e2).collapsed);
}

TEST_CASE("comodule input is checked") {
  auto ring = bp1(3);
  auto seq = RegularSequence::parse(ring, {"p", "v1"});
  auto l = residue_ring(seq);
  Window w{0, 8, 2, 2};
  CHECK_THROWS_AS(e1_from_comodule(seq, BocksteinComodule::trivial(ring, {0, 4}), w), ValidationError);
  CHECK_THROWS_AS(e1_from_comodule(seq, BocksteinComodule::trivial(l.ring, {0}), w), ValidationError);
  CHECK_THROWS_AS(e1_from_comodule(seq, BocksteinComodule::trivial(l.ring, {0, 8}), w), ValidationError);
}

TEST_CASE("filtered mode on T itself") {
  auto ring = bp1(3);
  auto seq = RegularSequence::parse(ring, {"p", "v1"});
  Window w{0, 20, 4, 3};
  auto res = filtered_ss(GradedModule::cyclic(ring, {}), seq, w);
  REQUIRE(res.pages.size() == 3);
  CHECK(res.regularity.regular);
  auto gr = associated_graded(seq, w);
  for (const auto& page : res.pages) {
    for (const auto& d : page.differentials) CHECK(d.matrix.is_zero());
    for (const auto& [key, cell] : page.cells)
      if (!cell.masked) CHECK(cell.shape == fp(rank_of(gr, key.first, key.second)));
  }
  CHECK(res.abutment.label == "gr of truncated completion");
  CHECK(res.abutment.consistent);
  for (const auto& [key, shape] : res.abutment.graded) CHECK(shape == fp(rank_of(gr, key.first, key.second)));
  auto cmp = abutment_compare(res.pages, res.abutment);
  CHECK(cmp.matches);
  CHECK(cmp.last_page_stable);
  CHECK(cmp.compared > 0);
  CHECK(cmp.masked_excluded > 0);
}

TEST_CASE("filtered mode agrees with comodule mode for T/p") {
  auto ring = bp1(3);
  auto seq = RegularSequence::parse(ring, {"p", "v1"});
  auto l = residue_ring(seq);
  Window w{-2, 24, 5, 2};
  auto res = filtered_ss(GradedModule::cyclic(ring, {ring.parse("3")}), seq, w);
  Page c1 = e1_from_comodule(seq, BocksteinComodule::exterior(l.ring, {0, 4}, {0}), w);
  Page c2 = turn_page(c1);
  int compared = 0;
  for (int r = 0; r < 2; ++r) {
    const Page& cm = r == 0 ? c1 : c2;
    for (const auto& [key, cell] : res.pages[static_cast<std::size_t>(r)].cells) {
      const Cell* other = cm.cell(key.first, key.second);
      if (cell.masked || other == nullptr || other->masked) continue;
      ++compared;
      CHECK(cell.shape == other->shape);
    }
  }
  CHECK(compared > 100);
  for (const auto& tc : res.turn_checks) CHECK(tc.mismatches.empty());
  CHECK(parity_collapse_check(res.pages[1]).collapsed);
  CHECK(abutment_compare(res.pages, res.abutment).matches);
}

TEST_CASE("mod-p^2 Moore input in filtered mode") {
  auto ring = bp1(3);
  auto seq = RegularSequence::parse(ring, {"p", "v1"});
  Window w{-2, 24, 5, 3};
  auto res = filtered_ss(GradedModule::cyclic(ring, {ring.parse("9")}), seq, w);
  REQUIRE(res.pages.size() == 3);
  const Page& p1 = res.pages[0];
  const Page& p2 = res.pages[1];
  const Page& p3 = res.pages[2];
  for (const auto& d : p1.differentials) CHECK(d.matrix.is_zero());

  // d_2(v̄ u0) = p^2 v̄ for every monomial v in p, v1 with both ends unmasked.
  int checked = 0;
  for (int s = 0; s <= 5; ++s)
    for (const auto& mu : symmetric_monomials(2, s)) {
      const int t = 4 * mu[1] + 1;
      const Cell* src = p2.cell(s, t);
      const Cell* tgt = p2.cell(s + 2, t - 1);
      if (src == nullptr || tgt == nullptr || src->masked || tgt->masked) continue;
      Polynomial v = seq.monomial_value(mu);
      auto a = src->coordinates(res.vector_of(v, {0}, t));
      auto b = tgt->coordinates(res.vector_of(ring.parse("9") * v, {}, t - 1));
      REQUIRE(a);
      REQUIRE(b);
      const Differential* d = p2.differential({s, t});
      REQUIRE(d);
      CHECK(d->matrix.apply(*a) == *b);
      CHECK_FALSE(is_zero_vector(*b));
      ++checked;
    }
  CHECK(checked == 6);

  auto gr = associated_graded(seq, Window{-4, 26, 7, 1});
  int unmasked = 0;
  for (const auto& [key, cell] : p3.cells) {
    if (cell.masked) continue;
    ++unmasked;
    // gr/p^2: p^2 has filtration 2 in gr, so the quotient kills x̄_0^2.
    int expected = rank_of(gr, key.first, key.second) - rank_of(gr, key.first - 2, key.second);
    CHECK(cell.shape == fp(key.second % 2 == 0 ? expected : 0));
  }
  CHECK(unmasked > 0);
  for (const auto& tc : res.turn_checks) CHECK(tc.mismatches.empty());
  CHECK(parity_collapse_check(p3).collapsed);
  auto cmp = abutment_compare(res.pages, res.abutment);
  CHECK(cmp.matches);
  CHECK(cmp.last_page_stable);
  CHECK(res.abutment.consistent);
  for (const auto& lin : res.linearity) CHECK(lin.linear);
}

TEST_CASE("filtered mode rejects non-regular input") {
  GradedRing z(Coefficients::p_local(3), {});
  Window w{0, 0, 2, 2};
  CHECK_THROWS_AS(filtered_ss(GradedModule::cyclic(z, {}), RegularSequence::parse(z, {"p", "p"}), w), NonRegular);
  auto ring = bp1(3);
  auto seq = RegularSequence::parse(ring, {"p", "v1"});
  CHECK_THROWS_AS(filtered_ss(GradedModule::cyclic(ring, {ring.parse("3"), ring.parse("9")}), seq, Window{0, 8, 2, 2}),
                  NonRegular);
  GradedModule two(ring, {{"g0", 0}, {"g1", 0}});
  CHECK_THROWS_AS(filtered_ss(two, seq, Window{0, 8, 2, 2}), ValidationError);
}

TEST_CASE("turn_page detects d_r d_r != 0 and masks at the border") {
  const Coefficients f3 = Coefficients::prime_field(3);
  Page page(1, f3, f3);
  page.s_min = 0;
  page.s_max = 2;
  page.t_min = -1;
  page.t_max = 1;
  for (int s = 0; s <= 2; ++s)
    for (int t = -1; t <= 1; ++t) {
      Cell c;
      c.s = s;
      c.t = t;
      if (s + t == 1) {
        c.shape = ModuleShape{1, {}};
        c.orders = {-1};
        c.representatives = {Vector{Scalar(1)}};
        c.labels = {"g" + std::to_string(s)};
      }
      page.cells.emplace(Bidegree{s, t}, std::move(c));
    }
  auto one = ExactMatrix::identity(f3, 1);
  page.differentials = {Differential{1, {0, 1}, {1, 0}, one}, Differential{1, {1, 0}, {2, -1}, one}};
  CHECK_THROWS_AS(turn_page(page), NonSquareZero);

  page.differentials.pop_back();
  Page next = turn_page(page);
  CHECK(next.r == 2);
  CHECK(next.cell(0, 1)->shape.is_zero());
  CHECK(next.cell(1, 0)->shape.is_zero());
  CHECK_FALSE(next.cell(1, 0)->masked);
  // (2, -1) sends d_1 to (3, -2), which is outside the page.
  CHECK(next.cell(2, -1)->masked);
  CHECK(next.cell(0, -1)->masked);

  Page odd = page;
  auto cert = parity_collapse_check(odd);
  CHECK_FALSE(cert.collapsed);
  REQUIRE(cert.odd_cell);
  CHECK(*cert.odd_cell == Bidegree{0, 1});
}

TEST_CASE("turn_page with zero differentials keeps the page") {
  const Coefficients f5 = Coefficients::prime_field(5);
  std::map<Bidegree, int> dims;
  for (int s = 0; s <= 3; ++s)
    for (int t = -3; t <= 3; ++t) dims[{s, t}] = (s + 2 * t + 9) % 3;
  const Page page = blank_page(f5, dims);
  const Page next = turn_page(page, {});
  CHECK(next.r == 2);
  for (const auto& [key, cell] : page.cells) CHECK(next.cell(key.first, key.second)->shape == cell.shape);
}

TEST_CASE("turn_page on random pages against dense homology") {
  std::mt19937 rng(4242);
  int compared = 0;
  for (long p : {2L, 3L, 5L, 7L})
    for (int trial = 0; trial < 25; ++trial) {
      const Coefficients f = Coefficients::prime_field(p);
      std::map<Bidegree, int> dims;
      std::map<Bidegree, Dense> d;
      const auto built = random_complex(rng, p, dims, d);
      Page page = blank_page(f, dims);
      for (const auto& [key, m] : d)
        page.differentials.push_back(
            Differential{1, key, {key.first + 1, key.second - 1}, to_exact(f, m, dims[key])});
      const Page next = turn_page(page);
      auto rank = [&](const Bidegree& key) {
        auto it = d.find(key);
        return it == d.end() || it->second.empty() || it->second[0].empty() ? 0 : oracle::rank_mod_p(it->second, p);
      };
      for (const auto& [key, n] : dims) {
        const Cell* cell = next.cell(key.first, key.second);
        REQUIRE(cell != nullptr);
        if (cell->masked) continue;
        const int brute = n - rank(key) - rank({key.first - 1, key.second + 1});
        CHECK(brute == built.at(key));
        CHECK(cell->shape == fp(brute));
        CHECK(cell->size() == brute);
        ++compared;
      }
    }
  CHECK(compared > 500);
}

TEST_CASE("even pages admit no differentials") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const Coefficients f3 = Coefficients::prime_field(3);
    std::map<Bidegree, int> dims;
    for (int s = 0; s <= 3; ++s)
      for (int t = -3; t <= 3; ++t) dims[{s, t}] = t % 2 == 0 ? std::uniform_int_distribution<int>(0, 3)(rng) : 0;
    const Page page = blank_page(f3, dims);
    const auto cert = parity_collapse_check(page);
    CHECK(cert.collapsed);
    CHECK_FALSE(cert.odd_cell);
    // d_r: (s, t) -> (s + r, t - 1) joins an even and an odd cell, so every
    // admissible matrix is empty.
    for (int r = 1; r <= 3; ++r)
      for (const auto& [key, n] : dims) {
        auto target = dims.find({key.first + r, key.second - 1});
        if (target != dims.end()) CHECK(n * target->second == 0);
      }
  }
}
