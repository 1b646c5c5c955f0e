#include "doctest.h"

#include <set>

#include "aa/errors.hpp"
#include "aa/oracle.hpp"
#include "aa/petri.hpp"
#include "support.hpp"

using namespace aa;
using support::net_choice;
using support::net_loop;
using support::net_seq;

namespace {

std::vector<std::vector<TransitionId>> firings_of(const std::vector<Run>& runs) {
  std::vector<std::vector<TransitionId>> out;
  for (const auto& r : runs) out.push_back(r.firings);
  return out;
}

// Tree net replay: the marked tree place after feeding `w` from the root.
PlaceId tree_replay(const LogTreeNet& tree, const support::Word& w) {
  Marking m = tree.net.initial();
  for (ActivityId a : w) {
    bool moved = false;
    for (TransitionId t : enabled(tree.net, m))
      if (tree.net.label(t) == a) {
        m = fire(tree.net, m, t);
        moved = true;
        break;
      }
    REQUIRE(moved);
  }
  const auto places = m.places();
  REQUIRE(places.size() == 1);
  return places[0];
}

}  // namespace

TEST_CASE("enabled transitions") {
  const auto seq = net_seq();
  CHECK(enabled(seq, Marking(3, {0})) == std::vector<TransitionId>{0});
  CHECK(enabled(seq, Marking(3, {2})).empty());
  const auto choice = net_choice();
  CHECK(enabled(choice, Marking(2, {0})) == std::vector<TransitionId>{0, 1});
}

TEST_CASE("firing") {
  const auto seq = net_seq();
  CHECK(fire(seq, Marking(3, {0}), 0) == Marking(3, {1}));
  CHECK_THROWS_AS(fire(seq, Marking(3, {1}), 0), NotEnabled);
  const auto loop = net_loop();
  CHECK(fire(loop, Marking(3, {1}), 1) == Marking(3, {0}));

  PetriNet twice;
  const auto p0 = twice.add_place("p0"), p1 = twice.add_place("p1");
  const auto t = twice.add_transition("t", "t");
  twice.add_input(t, p0);
  twice.add_output(t, p1);
  CHECK_THROWS_AS(fire(twice, Marking(2, {0, 1}), t), SafetyViolation);
}

TEST_CASE("full runs") {
  CHECK(is_full_run(net_seq(), std::vector<TransitionId>{0, 1}));
  CHECK_FALSE(is_full_run(net_seq(), std::vector<TransitionId>{0}));
  CHECK_FALSE(is_full_run(net_seq(), std::vector<TransitionId>{1, 0}));
  CHECK(is_full_run(net_loop(), std::vector<TransitionId>{0, 1, 0, 2}));

  const auto r = make_run(net_seq(), {0, 1});
  CHECK(r.full);
  CHECK(r.labels == r.visible);
}

TEST_CASE("run enumeration order and content") {
  CHECK(firings_of(full_runs(net_seq(), 3)) == std::vector<std::vector<TransitionId>>{{0, 1}});
  CHECK(firings_of(full_runs(net_loop(), 4)) == std::vector<std::vector<TransitionId>>{{0, 2}, {0, 1, 0, 2}});

  auto unreachable = net_seq();
  unreachable.set_final({0, 2});
  CHECK(full_runs(unreachable, 5).empty());

  for (const auto& r : full_runs(net_loop(), 9)) CHECK(is_full_run(net_loop(), r.firings));
}

TEST_CASE("run enumeration respects the node cap") {
  PetriNet flower;
  const auto p = flower.add_place("p");
  for (const char* name : {"a", "b", "c"}) {
    const auto t = flower.add_transition(name, name);
    flower.add_input(t, p);
    flower.add_output(t, p);
  }
  flower.set_initial({p});
  flower.set_final({p});
  CHECK_THROWS_AS(full_runs(flower, 20, ExplorationLimits{1000}), ExplosionGuard);
}

TEST_CASE("executable loops") {
  CHECK(has_executable_loop(net_loop()));
  CHECK_FALSE(has_executable_loop(net_seq()));
  CHECK_FALSE(has_executable_loop(net_loop(false)));
}

TEST_CASE("safety check") {
  CHECK(check_safe(net_seq()));

  PetriNet unsafe;
  const auto p0 = unsafe.add_place("p0"), p1 = unsafe.add_place("p1"), p2 = unsafe.add_place("p2");
  const auto a = unsafe.add_transition("a", "a"), b = unsafe.add_transition("b", "b");
  unsafe.add_input(a, p0);
  unsafe.add_output(a, p1);
  unsafe.add_output(a, p2);
  unsafe.add_input(b, p1);
  unsafe.add_output(b, p0);
  unsafe.set_initial({p0});
  unsafe.set_final({p2});
  CHECK_FALSE(check_safe(unsafe));

  PetriNet empty;
  empty.set_initial({});
  empty.set_final({});
  CHECK(check_safe(empty));
}

TEST_CASE("log tree net of the four-trace log") {
  PetriNet base;
  base.alphabet().intern("a");
  base.alphabet().intern("b");
  const auto log = support::log_of(base, {{"a"}, {"a", "b"}, {"a", "a"}, {"b"}});
  const auto tree = log_tree_net(log, base.alphabet());
  // root, a, b, aa, ab plus the escape place
  CHECK(tree.net.place_count() == 6);
  CHECK(tree.accepting.size() == 4);
  for (TransitionId t = 0; t < tree.net.transition_count(); ++t) {
    const auto pre = tree.net.pre(t);
    REQUIRE(pre.size() == 1);
    if (pre[0] == tree.escape) CHECK(tree.net.post(t)[0] == tree.escape);
  }
  // deterministic: at most one transition per (place, label)
  std::set<std::pair<PlaceId, ActivityId>> seen;
  for (TransitionId t = 0; t < tree.net.transition_count(); ++t)
    CHECK(seen.emplace(tree.net.pre(t)[0], tree.net.label(t)).second);
  CHECK(seen.size() == 6 * 2);
}

TEST_CASE("log tree net corner cases") {
  PetriNet base;
  base.alphabet().intern("a");
  const auto single = log_tree_net(support::log_of(base, {{"a"}}), base.alphabet());
  CHECK(single.net.place_count() == 3);
  CHECK(single.net.transition_count() == 3);

  const auto none = log_tree_net(EventLog(base.alphabet()), base.alphabet());
  CHECK(none.net.place_count() == 2);
  CHECK(none.net.transition_count() == 2);
  CHECK(none.accepting.empty());

  CHECK_THROWS_AS(log_tree_net(EventLog{}, Alphabet{}), EmptyAlphabet);
}

TEST_CASE("tree net accepts exactly the log over short words") {
  for (std::size_t letters = 1; letters <= 3; ++letters) {
    PetriNet base;
    for (const char* n : {"a", "b", "c"})
      if (base.alphabet().size() < letters) base.alphabet().intern(n);
    std::mt19937_64 rng(letters);
    EventLog log(base.alphabet());
    for (int k = 0; k < 4; ++k) log.add(support::random_word(rng, 3, letters));
    const auto tree = log_tree_net(log, base.alphabet());
    const std::set<PlaceId> accepting(tree.accepting.begin(), tree.accepting.end());

    std::vector<support::Word> words{{}};
    for (std::size_t len = 1; len <= 4; ++len)
      for (std::size_t k = 0, count = words.size(); k < count; ++k)
        if (words[k].size() == len - 1)
          for (ActivityId a = 0; a < letters; ++a) {
            auto w = words[k];
            w.push_back(a);
            words.push_back(w);
          }
    for (const auto& w : words) {
      const PlaceId end = tree_replay(tree, w);
      CHECK(contains(log, w) == (accepting.count(end) > 0));
      CHECK((end == tree.escape) == !std::any_of(log.entries().begin(), log.entries().end(), [&](const auto& e) {
              return e.first.size() >= w.size() && std::equal(w.begin(), w.end(), e.first.begin());
            }));
    }
  }
}

TEST_CASE("synchronous product decides inclusion") {
  {
    const auto net = net_seq();
    const auto log = support::log_of(net, {{"a", "b"}});
    const auto product = synchronous_product(net, log_tree_net(log, net.alphabet()));
    const auto graph = ReachabilityGraph::build(product.net);
    CHECK(graph.size() <= 12);
    CHECK(graph.find(product.target) == ReachabilityGraph::npos);
    CHECK_FALSE(find_run_outside_log(net, log).has_value());
  }
  {
    const auto net = net_choice();
    const auto log = support::log_of(net, {{"a"}});
    const auto product = synchronous_product(net, log_tree_net(log, net.alphabet()));
    CHECK(ReachabilityGraph::build(product.net).find(product.target) != ReachabilityGraph::npos);
    const auto run = find_run_outside_log(net, log);
    REQUIRE(run.has_value());
    CHECK(run->firings == std::vector<TransitionId>{1});
  }
  {
    const auto net = net_loop();
    const EventLog empty(net.alphabet());
    CHECK(find_run_outside_log(net, empty).has_value());
    auto dead = net_loop(false);
    CHECK_FALSE(find_run_outside_log(dead, EventLog(dead.alphabet())).has_value());
  }
}

TEST_CASE("product reachability matches enumeration on random nets") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    aa::RandomModelSpec spec;
    spec.seed = seed;
    spec.free_form = seed % 2 == 1;
    const auto inst = aa::generate_instance(spec);
    const auto graph = ReachabilityGraph::build(inst.net);
    if (graph.size() > 10) continue;
    ++checked;
    const auto product = find_run_outside_log(inst.net, inst.log);
    std::optional<Run> enumerated;
    try {
      enumerated = brute_force_deviating_run(inst.net, inst.log, ExplorationLimits{2'000'000});
    } catch (const ExplosionGuard&) {
      --checked;
      continue;
    }
    const bool deviating = enumerated.has_value();
    if (product && enumerated) CHECK(product->firings.size() == enumerated->firings.size());
    CHECK(product.has_value() == deviating);
    if (product) CHECK_FALSE(contains(inst.log, product->visible));
  }
  CHECK(checked >= 50);
}

TEST_CASE("tnet parsing") {
  const std::string text =
      "# sequence\nplace p0\nplace p1\nplace p2\ntrans a label a\ntrans b label b\n"
      "arc p0 a\narc a p1\narc p1 b\narc b p2\nm0 p0\nmf p2\n";
  const auto net = parse_net(text, NetFormat::Tnet);
  CHECK(net.place_count() == 3);
  CHECK(net.transition_count() == 2);
  CHECK(firings_of(full_runs(net, 3)) == firings_of(full_runs(net_seq(), 3)));
  CHECK(parse_net(serialize_tnet(net), NetFormat::Tnet).transition_count() == 2);

  const auto silent = parse_net("place p\nplace q\ntrans t label tau\narc p t\narc t q\nm0 p\nmf q\n", NetFormat::Tnet);
  CHECK(silent.is_silent(0));

  CHECK_THROWS_AS(parse_net("place p0\ntrans a label a\narc p9 a\nm0 p0\nmf p0\n", NetFormat::Tnet), ParseError);
  CHECK_THROWS_AS(parse_net("place p0\nmf p0\n", NetFormat::Tnet), MissingMarking);
  try {
    parse_net("place p0\nbogus\n", NetFormat::Tnet);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("pnml parsing") {
  const auto net = parse_net(support::slurp(support::fixture_path("netchoice.pnml")), NetFormat::Pnml);
  CHECK(net.place_count() == 2);
  REQUIRE(net.transition_count() == 2);
  CHECK(net.alphabet().name(net.label(1)) == "b");
  CHECK(full_runs(net, 2).size() == 2);
  CHECK_THROWS_AS(parse_net("<pnml><net id='n'><page id='p'><place id='x'/></page></net></pnml>", NetFormat::Pnml),
                  MissingMarking);
  CHECK_THROWS_AS(parse_net("<pnml><net", NetFormat::Pnml), ParseError);
}
