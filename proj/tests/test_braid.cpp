#include <doctest.h>

#include <algorithm>
#include <random>

#include "khora/braid.hpp"
#include "khora/diagram.hpp"
#include "khora/util.hpp"

using namespace khora;

namespace {

int crossing_sign(const AnnularDiagram& d, const Crossing& c) {
  Seg o = d.segment(c.over), u = d.segment(c.under);
  return sgn(cross(o.b - o.a, u.b - u.a));
}

int cycle_count(const std::vector<int>& p) {
  std::vector<char> seen(p.size(), 0);
  int c = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    ++c;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(p[j]))
      seen[j] = 1;
  }
  return c;
}

// every sigma letter crosses once; every positive rho kinks once; spokes of
// each rho letter pass over the wraps of every earlier one twice
std::size_t expected_crossings(const AnnularBraidWord& w) {
  std::size_t sigmas = 0, kinks = 0, rhos = 0;
  for (const auto& l : w.letters) {
    if (l.rho) {
      ++rhos;
      if (l.sign > 0) ++kinks;
    } else {
      ++sigmas;
    }
  }
  return sigmas + kinks + rhos * (rhos - 1);
}

std::vector<Pt> box(const Rat& cx, const Rat& cy, const Rat& r) {
  return {{cx + r, cy - r}, {cx + r, cy + r}, {cx - r, cy + r}, {cx - r, cy - r}};
}

}  // namespace

TEST_CASE("braid words parse, print and permute") {
  auto w = AnnularBraidWord::parse("s1 s2^-1 r r^-1", 3);
  REQUIRE(w.letters.size() == 4);
  CHECK(w.letters[0] == BraidLetter{false, 1, +1});
  CHECK(w.letters[1] == BraidLetter{false, 2, -1});
  CHECK(w.letters[2] == BraidLetter{true, 0, +1});
  CHECK(w.letters[3] == BraidLetter{true, 0, -1});
  CHECK(w.str() == "s1 s2^-1 r r^-1");
  CHECK(AnnularBraidWord::parse(w.str(), 3).letters == w.letters);

  CHECK(AnnularBraidWord::parse("s2").strands == 3);
  CHECK(AnnularBraidWord::parse("r").strands == 1);
  CHECK(AnnularBraidWord::parse("").strands == 1);
  CHECK(AnnularBraidWord::parse("", 5).strands == 5);

  CHECK_THROWS_AS(AnnularBraidWord::parse("s0"), ValidationError);
  CHECK_THROWS_AS(AnnularBraidWord::parse("q1"), ValidationError);
  CHECK_THROWS_AS(AnnularBraidWord::parse("s1^2"), ValidationError);
  CHECK_THROWS_AS(AnnularBraidWord::parse("s"), ValidationError);
  CHECK_THROWS_AS(AnnularBraidWord::parse("s1x"), ValidationError);
  CHECK_THROWS_AS(AnnularBraidWord::parse("s3", 3), ValidationError);

  // start level -> end level, zero based
  CHECK(AnnularBraidWord::parse("s1 s2", 3).permutation() ==
        std::vector<int>{2, 0, 1});
  CHECK(AnnularBraidWord::parse("r s1", 2).permutation() ==
        std::vector<int>{1, 0});
}

TEST_CASE("free reduction cancels adjacent inverse pairs") {
  CHECK(free_reduce(AnnularBraidWord::parse("s1 s1^-1", 2)).letters.empty());
  CHECK(free_reduce(AnnularBraidWord::parse("s1 s2 s2^-1 s1^-1", 3))
            .letters.empty());
  CHECK(free_reduce(AnnularBraidWord::parse("r r^-1 r")).str() == "r");
  CHECK(free_reduce(AnnularBraidWord::parse("s1 s1", 2)).str() == "s1 s1");
}

TEST_CASE("markov moves") {
  auto w = AnnularBraidWord::parse("s1", 2);
  auto conj = apply_markov(w, {MarkovKind::conjugate, 1, 0});
  CHECK(conj.str() == "s1");  // s1 s1 s1^-1 reduces back

  auto hopf = AnnularBraidWord::parse("s1 s1", 2);
  auto stab = apply_markov(hopf, {MarkovKind::stabilize, 0, +1});
  CHECK(stab.strands == 3);
  CHECK(stab.str() == "s1 s1 s2");
  auto back = apply_markov(stab, {MarkovKind::destabilize, 0, 0});
  CHECK(back.strands == 2);
  CHECK(back.str() == "s1 s1");

  CHECK_THROWS_AS(apply_markov(w, {MarkovKind::conjugate, 2, 0}),
                  ValidationError);
  CHECK_THROWS_AS(
      apply_markov(AnnularBraidWord::parse("s2 s1 s2", 3),
                   {MarkovKind::destabilize, 0, 0}),
      ValidationError);
  CHECK_THROWS_AS(
      apply_markov(AnnularBraidWord::parse("s1", 3),
                   {MarkovKind::destabilize, 0, 0}),
      ValidationError);
  CHECK_THROWS_AS(
      apply_markov(AnnularBraidWord::parse("r"), {MarkovKind::destabilize, 0, 0}),
      ValidationError);
}

TEST_CASE("closure of trivial words gives concentric essential circles") {
  auto d1 = braid_closure(AnnularBraidWord::parse("", 1));
  require_valid(d1);
  REQUIRE(d1.strands.size() == 1);
  CHECK(d1.crossings.empty());
  auto sc = smooth(d1, {});
  REQUIRE(sc.circles.size() == 1);
  CHECK(sc.winding[0] == 1);
  CHECK(bool(sc.essential[0]));

  auto d3 = braid_closure(AnnularBraidWord::parse("", 3));
  require_valid(d3);
  REQUIRE(d3.strands.size() == 3);
  auto sc3 = smooth(d3, {});
  REQUIRE(sc3.circles.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(sc3.winding[i] == 1);
}

TEST_CASE("closure of sigma words") {
  auto d = braid_closure(AnnularBraidWord::parse("s1", 2));
  require_valid(d);
  CHECK(d.strands.size() == 1);
  REQUIRE(d.crossings.size() == 1);
  CHECK(crossing_sign(d, d.crossings[0]) == +1);

  auto dm = braid_closure(AnnularBraidWord::parse("s1^-1", 2));
  require_valid(dm);
  REQUIRE(dm.crossings.size() == 1);
  CHECK(crossing_sign(dm, dm.crossings[0]) == -1);

  auto hopf = braid_closure(AnnularBraidWord::parse("s1 s1", 2));
  require_valid(hopf);
  CHECK(hopf.strands.size() == 2);
  REQUIRE(hopf.crossings.size() == 2);
  for (const auto& c : hopf.crossings) CHECK(crossing_sign(hopf, c) == +1);

  // oriented resolution of the closure keeps both circles around the axis
  auto all0 = smooth(hopf, {0, 0});
  REQUIRE(all0.circles.size() == 2);
  CHECK(bool(all0.essential[0]));
  CHECK(bool(all0.essential[1]));
  CHECK(smooth(hopf, {1, 0}).circles.size() == 1);
  CHECK(smooth(hopf, {0, 1}).circles.size() == 1);
  CHECK(smooth(hopf, {1, 1}).circles.size() == 2);

  auto tref = braid_closure(AnnularBraidWord::parse("s1 s1 s1", 2));
  require_valid(tref);
  CHECK(tref.strands.size() == 1);
  REQUIRE(tref.crossings.size() == 3);
  for (const auto& c : tref.crossings) CHECK(crossing_sign(tref, c) == +1);
}

TEST_CASE("closure of rho words wraps the axis") {
  auto d = braid_closure(AnnularBraidWord::parse("r"));
  require_valid(d);
  REQUIRE(d.strands.size() == 1);
  CHECK(d.crossings.size() == 1);
  CHECK(winding(d.strands[0]) == 2);
  std::vector<std::size_t> counts{smooth(d, {0}).circles.size(),
                                  smooth(d, {1}).circles.size()};
  std::sort(counts.begin(), counts.end());
  CHECK(counts == std::vector<std::size_t>{1, 2});

  auto dm = braid_closure(AnnularBraidWord::parse("r^-1"));
  require_valid(dm);
  CHECK(dm.crossings.empty());
  CHECK(winding(dm.strands[0]) == 0);

  auto dd = braid_closure(AnnularBraidWord::parse("r r^-1"));
  require_valid(dd);
  CHECK(dd.crossings.size() == 3);
  CHECK(winding(dd.strands[0]) == 1);

  auto d2 = braid_closure(AnnularBraidWord::parse("r", 2));
  require_valid(d2);
  CHECK(d2.strands.size() == 2);
  CHECK(d2.crossings.size() == 1);

  auto rr = braid_closure(AnnularBraidWord::parse("r r"));
  require_valid(rr);
  CHECK(rr.crossings.size() == 4);
  CHECK(winding(rr.strands[0]) == 3);
}

TEST_CASE("closure validity and crossing census fuzz") {
  std::mt19937 rng(20240817u);
  auto rand_word = [&](int n, int len, bool sigma_only) {
    AnnularBraidWord w;
    w.strands = n;
    for (int i = 0; i < len; ++i) {
      BraidLetter l;
      bool rho = !sigma_only &&
                 (n < 2 || std::uniform_int_distribution<int>(0, 4)(rng) == 0);
      if (rho)
        l.rho = true;
      else
        l.index = std::uniform_int_distribution<int>(1, n - 1)(rng);
      l.sign = std::uniform_int_distribution<int>(0, 1)(rng) ? +1 : -1;
      w.letters.push_back(l);
    }
    return w;
  };

  auto probe = [&](const AnnularBraidWord& w) {
    std::string text = w.str();
    CAPTURE(text);
    CAPTURE(w.strands);
    auto d = braid_closure(w);
    require_valid(d);
    CHECK(d.crossings.size() == expected_crossings(w));
    CHECK(d.strands.size() ==
          static_cast<std::size_t>(cycle_count(w.permutation())));
    CHECK(AnnularBraidWord::parse(w.str(), w.strands).letters == w.letters);
  };

  for (int trial = 0; trial < 16; ++trial) {
    int n = std::uniform_int_distribution<int>(1, 8)(rng);
    int len = std::uniform_int_distribution<int>(0, 10)(rng);
    probe(rand_word(n, len, false));
  }
  probe(rand_word(8, 32, false));
  probe(rand_word(2, 32, false));
  probe(rand_word(1, 16, false));  // sixteen nested wraps
}

TEST_CASE("half-turn symmetry of repeated sigma words") {
  auto hopf = braid_closure(AnnularBraidWord::parse("s1 s1", 2));
  auto cert = check_periodic(hopf);
  REQUIRE(cert.symmetric);
  CHECK(cert.strands[0].to == 1);
  CHECK(cert.strands[1].to == 0);
  CHECK(cert.crossing_pair == std::vector<std::uint32_t>{1, 0});

  auto q = quotient_periodic(hopf, cert);
  require_valid(q);
  REQUIRE(q.strands.size() == 1);
  REQUIRE(q.crossings.size() == 1);
  CHECK(winding(q.strands[0]) == 2);
  CHECK(crossing_sign(q, q.crossings[0]) == +1);

  auto neg = braid_closure(AnnularBraidWord::parse("s1^-1 s1^-1", 2));
  auto qneg = quotient_periodic(neg);
  require_valid(qneg);
  REQUIRE(qneg.crossings.size() == 1);
  CHECK(crossing_sign(qneg, qneg.crossings[0]) == -1);

  // a single strand carried to itself by the half turn
  auto tor = braid_closure(AnnularBraidWord::parse("s1 s2 s1 s2", 3));
  auto tcert = check_periodic(tor);
  REQUIRE(tcert.symmetric);
  REQUIRE(tor.strands.size() == 1);
  CHECK(tcert.strands[0].to == 0);
  CHECK(!tcert.strands[0].rev);
  auto tq = quotient_periodic(tor, tcert);
  require_valid(tq);
  CHECK(tq.crossings.size() == 2);
}

TEST_CASE("half-turn symmetry of plain loops") {
  AnnularDiagram ring;
  ring.strands.push_back(box(0, 0, 2));
  require_valid(ring);
  auto cert = check_periodic(ring);
  REQUIRE(cert.symmetric);
  CHECK(cert.strands[0].to == 0);
  CHECK(cert.strands[0].rot == 2);
  auto q = quotient_periodic(ring, cert);
  require_valid(q);
  REQUIRE(q.strands.size() == 1);
  CHECK(q.crossings.empty());
  CHECK(winding(q.strands[0]) == 1);

  AnnularDiagram pair;
  pair.strands.push_back(box(3, 0, 1));
  pair.strands.push_back(box(-3, 0, 1));
  require_valid(pair);
  auto pcert = check_periodic(pair);
  REQUIRE(pcert.symmetric);
  CHECK(pcert.strands[0].to == 1);
  auto pq = quotient_periodic(pair, pcert);
  require_valid(pq);
  REQUIRE(pq.strands.size() == 1);
  CHECK(winding(pq.strands[0]) == 0);

  // reversed partner still matches, traversal direction flipped
  AnnularDiagram rev;
  rev.strands.push_back(box(3, 0, 1));
  auto flipped = box(-3, 0, 1);
  std::reverse(flipped.begin(), flipped.end());
  rev.strands.push_back(flipped);
  auto rcert = check_periodic(rev);
  REQUIRE(rcert.symmetric);
  CHECK(rcert.strands[0].rev);
  auto rq = quotient_periodic(rev, rcert);
  require_valid(rq);
  CHECK(rq.strands.size() == 1);
}

TEST_CASE("half-turn symmetry failures carry a witness") {
  AnnularDiagram off;
  off.strands.push_back(box(1, 0, Rat(1, 2)));
  require_valid(off);
  auto cert = check_periodic(off);
  CHECK(!cert.symmetric);
  REQUIRE(cert.witness.has_value());
  CHECK(*cert.witness == Pt{Rat(-3, 2), Rat(1, 2)});
  CHECK_THROWS_AS(quotient_periodic(off), ValidationError);

  // strand sets symmetric but one crossing flipped breaks the pairing
  auto hopf = braid_closure(AnnularBraidWord::parse("s1 s1", 2));
  std::swap(hopf.crossings[0].over, hopf.crossings[0].under);
  require_valid(hopf);
  auto hcert = check_periodic(hopf);
  CHECK(!hcert.symmetric);
  CHECK(hcert.witness.has_value());

  CHECK(!check_periodic(braid_closure(AnnularBraidWord::parse("s1 s1 s1", 2)))
             .symmetric);
}

TEST_CASE("symmetric word quotient fuzz") {
  std::mt19937 rng(77u);
  for (int trial = 0; trial < 6; ++trial) {
    int n = std::uniform_int_distribution<int>(2, 3)(rng);
    int len = std::uniform_int_distribution<int>(0, 4)(rng);
    AnnularBraidWord u;
    u.strands = n;
    for (int i = 0; i < len; ++i)
      u.letters.push_back(
          {false, std::uniform_int_distribution<int>(1, n - 1)(rng),
           std::uniform_int_distribution<int>(0, 1)(rng) ? +1 : -1});
    AnnularBraidWord w = u;
    w.letters.insert(w.letters.end(), u.letters.begin(), u.letters.end());
    std::string text = w.str();
    CAPTURE(text);
    auto d = braid_closure(w);
    auto cert = check_periodic(d);
    REQUIRE(cert.symmetric);
    auto q = quotient_periodic(d, cert);
    require_valid(q);
    CHECK(2 * q.crossings.size() == d.crossings.size());
  }
}
