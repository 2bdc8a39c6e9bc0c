#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "ibench/poker/session.hpp"
#include "ibench/poker/table.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace ibench;
using namespace ibench::poker;
using ibench::testing::script_spec;
using ibench::testing::scripted_spec;
using ibench::testing::settle_oracle;

namespace {

std::string act(const std::string& action, long long amount = 0) {
  return nlohmann::ordered_json{{"action", action}, {"amount", amount}}.dump();
}

HandEngine make_engine(std::vector<long long> stacks, int button, std::uint64_t seed,
                       TableRules rules = {}) {
  static std::mt19937_64 rng;  // reseeded below per call
  rng.seed(seed);
  std::vector<bool> dealt(stacks.size());
  for (std::size_t i = 0; i < stacks.size(); ++i) dealt[i] = stacks[i] > 0;
  return HandEngine(rules, std::move(stacks), dealt, button, rng);
}

long long chips_in_play(const HandEngine& e) {
  long long sum = 0;
  for (int s = 0; s < e.num_seats(); ++s) {
    sum += e.stack(s) + e.total_contribution(s);
  }
  return sum;
}

}  // namespace

TEST_CASE("pot odds") {
  CHECK(pot_odds(0, 900) == doctest::Approx(0.0));
  CHECK(pot_odds(100, 300) == doctest::Approx(0.25));
  CHECK(pot_odds(50, 50) == doctest::Approx(0.5));
  CHECK_THROWS_AS(pot_odds(0, 0), MetricError);
}

TEST_CASE("action parsing from agent replies") {
  auto parsed = parse_poker_reply(R"({"action":"RAISE","amount":450,"reasoning":"x"})");
  REQUIRE(parsed.has_value());
  CHECK(parsed->action.type == ActionType::Raise);
  CHECK(parsed->action.amount == 450);
  CHECK(parsed->reasoning == "x");

  parsed = parse_poker_reply("Sure!\n```json\n{\"action\": \"call\", \"amount\": 300}\n```");
  REQUIRE(parsed.has_value());
  CHECK(parsed->action.type == ActionType::Call);

  parsed = parse_poker_reply(R"(I fold. {"action":"ALL_IN"})");
  REQUIRE(parsed.has_value());
  CHECK(parsed->action.type == ActionType::AllIn);

  CHECK_FALSE(parse_poker_reply("no json here").has_value());
  CHECK_FALSE(parse_poker_reply(R"({"amount":10})").has_value());
  CHECK_FALSE(parse_poker_reply(R"({"action":"LIMP"})").has_value());
}

TEST_CASE("validate_action normalizations and violations") {
  // 3 seats, blinds 50/100, button 0 -> sb 1, bb 2, first to act 0
  auto eng = make_engine({10000, 10000, 10000}, 0, 1);
  REQUIRE(eng.to_act() == 0);

  SUBCASE("CHECK facing a bet is a violation") {
    const auto v = eng.validate_action(0, {ActionType::Check, 0});
    REQUIRE(std::holds_alternative<Violation>(v));
  }
  SUBCASE("CALL amount is coerced to the current bet") {
    const auto v = eng.validate_action(0, {ActionType::Call, 0});
    REQUIRE(std::holds_alternative<PokerAction>(v));
    CHECK(std::get<PokerAction>(v).amount == 100);
  }
  SUBCASE("RAISE below the minimum is a violation") {
    const auto v = eng.validate_action(0, {ActionType::Raise, 150});
    REQUIRE(std::holds_alternative<Violation>(v));
  }
  SUBCASE("RAISE at or above the minimum is legal") {
    const auto v = eng.validate_action(0, {ActionType::Raise, 200});
    REQUIRE(std::holds_alternative<PokerAction>(v));
  }
  SUBCASE("RAISE not exceeding the bet is a violation") {
    const auto v = eng.validate_action(0, {ActionType::Raise, 100});
    REQUIRE(std::holds_alternative<Violation>(v));
  }
  SUBCASE("a raise the stack cannot cover becomes ALL_IN") {
    const auto v = eng.validate_action(0, {ActionType::Raise, 50000});
    REQUIRE(std::holds_alternative<PokerAction>(v));
    CHECK(std::get<PokerAction>(v).type == ActionType::AllIn);
    CHECK(std::get<PokerAction>(v).amount == 10000);
  }
  SUBCASE("acting out of turn is a violation") {
    const auto v = eng.validate_action(1, {ActionType::Fold, 0});
    REQUIRE(std::holds_alternative<Violation>(v));
  }
}

TEST_CASE("a call bigger than the stack becomes an all-in for less") {
  auto eng = make_engine({10000, 10000, 60}, 1, 3);  // button 1, sb 2, bb 0
  // seat 2 posted sb 50 and has 10 behind; raise to it
  REQUIRE(eng.to_act() == 1);
  eng.apply_action(1, std::get<PokerAction>(eng.validate_action(1, {ActionType::Raise, 400})));
  REQUIRE(eng.to_act() == 2);
  const auto v = eng.validate_action(2, {ActionType::Call, 0});
  REQUIRE(std::holds_alternative<PokerAction>(v));
  CHECK(std::get<PokerAction>(v).type == ActionType::AllIn);
  CHECK(std::get<PokerAction>(v).amount == 60);
}

TEST_CASE("check option for the big blind after limps") {
  auto eng = make_engine({1000, 1000, 1000}, 0, 5);
  eng.apply_action(0, std::get<PokerAction>(eng.validate_action(0, {ActionType::Call, 0})));
  eng.apply_action(1, std::get<PokerAction>(eng.validate_action(1, {ActionType::Call, 0})));
  REQUIRE(eng.to_act() == 2);  // big blind holds the option
  const auto v = eng.validate_action(2, {ActionType::Check, 0});
  REQUIRE(std::holds_alternative<PokerAction>(v));
  eng.apply_action(2, std::get<PokerAction>(v));
  CHECK(eng.stage() == Stage::Flop);
}

TEST_CASE("everyone folds to the big blind") {
  auto eng = make_engine({1000, 1000, 1000, 1000}, 0, 7);  // sb 1, bb 2, utg 3
  eng.apply_action(3, {ActionType::Fold, 0});
  eng.apply_action(0, {ActionType::Fold, 0});
  eng.apply_action(1, {ActionType::Fold, 0});
  REQUIRE(eng.hand_over());
  const auto& res = eng.result();
  CHECK(res.payouts[2] == 50);
  CHECK(res.payouts[1] == -50);
  CHECK(res.payouts[0] == 0);
  CHECK(res.payouts[3] == 0);
  CHECK(std::accumulate(res.payouts.begin(), res.payouts.end(), 0LL) == 0);
  CHECK(res.note == "Everyone folded. Player 3 wins.");
}

TEST_CASE("heads-up: button posts the small blind and acts first preflop") {
  auto eng = make_engine({1000, 1000}, 0, 9);
  CHECK(eng.small_blind_seat() == 0);
  CHECK(eng.big_blind_seat() == 1);
  CHECK(eng.to_act() == 0);
  eng.apply_action(0, std::get<PokerAction>(eng.validate_action(0, {ActionType::Call, 0})));
  eng.apply_action(1, std::get<PokerAction>(eng.validate_action(1, {ActionType::Check, 0})));
  CHECK(eng.stage() == Stage::Flop);
  CHECK(eng.to_act() == 1);  // non-button first postflop
}

TEST_CASE("hand 59 line: raise, two callers, turn bet takes it down") {
  // seats P1..P6 = 0..5, button P1, blinds 50/100 -> preflop order starts P4
  auto eng = make_engine({10000, 10000, 10000, 10000, 10000, 10000}, 0, 59);
  CHECK(eng.pot_total() == 150);  // pot starts at the blinds

  long long before = chips_in_play(eng);
  auto step = [&](int seat, PokerAction proposed) {
    const auto v = eng.validate_action(seat, proposed);
    REQUIRE(std::holds_alternative<PokerAction>(v));
    eng.apply_action(seat, std::get<PokerAction>(v));
    CHECK(chips_in_play(eng) == before);
  };

  REQUIRE(eng.to_act() == 3);
  step(3, {ActionType::Fold, 0});            // P4
  step(4, {ActionType::Raise, 300});         // P5
  step(5, {ActionType::Fold, 0});            // P6
  step(0, {ActionType::Fold, 0});            // P1
  step(1, {ActionType::Call, 300});          // P2 (sb)
  step(2, {ActionType::Call, 0});            // P3 (bb), amount coerced to 300

  REQUIRE(eng.stage() == Stage::Flop);
  CHECK(eng.pot_total() == 900);
  REQUIRE(eng.to_act() == 1);
  step(1, {ActionType::Check, 0});
  step(2, {ActionType::Check, 0});
  step(4, {ActionType::Check, 0});

  REQUIRE(eng.stage() == Stage::Turn);
  CHECK(eng.pot_total() == 900);
  step(1, {ActionType::Raise, 450});
  step(2, {ActionType::Fold, 0});
  step(4, {ActionType::Fold, 0});

  REQUIRE(eng.hand_over());
  const auto& res = eng.result();
  CHECK(res.note == "Everyone folded. Player 2 wins.");
  REQUIRE(res.awards.size() == 1);
  CHECK(res.awards[0].amount == 900);  // uncalled 450 returned before the award
  CHECK(res.payouts[1] == 600);
  CHECK(res.payouts[2] == -300);
  CHECK(res.payouts[4] == -300);
  CHECK(std::accumulate(res.payouts.begin(), res.payouts.end(), 0LL) == 0);
}

TEST_CASE("observation carries the agent-facing contract fields") {
  auto eng = make_engine({10000, 10000, 10000}, 0, 11);
  const auto obs = eng.observation(0);
  CHECK(obs.at("stage") == "preflop");
  CHECK(obs.at("hole_cards").size() == 2);
  CHECK(obs.at("community").size() == 0);
  CHECK(obs.at("pot") == 150);
  CHECK(obs.at("current_bet") == 100);
  CHECK(obs.at("to_call") == 100);
  CHECK(obs.at("stacks").size() == 3);
  CHECK(obs.at("pot_odds").get<double>() == doctest::Approx(100.0 / 250.0));
  CHECK(obs.contains("recent_actions"));
}

TEST_CASE("act_with_retry: second chance, then automatic fold") {
  auto eng = make_engine({1000, 1000, 1000}, 0, 13);

  SUBCASE("garbage then a valid action") {
    auto agent = make_agent(script_spec("a", {"mumble", act("CALL")}));
    const auto d = act_with_retry(*agent, eng, 0);
    CHECK_FALSE(d.auto_fold);
    CHECK(d.action.type == ActionType::Call);
    CHECK(d.action.amount == 100);
  }
  SUBCASE("garbage twice folds automatically") {
    auto agent = make_agent(script_spec("a", {"mumble", "grumble"}));
    const auto d = act_with_retry(*agent, eng, 0);
    CHECK(d.auto_fold);
    CHECK(d.action.type == ActionType::Fold);
  }
  SUBCASE("an illegal action twice folds automatically") {
    auto agent = make_agent(script_spec("a", {act("CHECK"), act("CHECK")}));
    const auto d = act_with_retry(*agent, eng, 0);
    CHECK(d.auto_fold);
  }
  SUBCASE("an unreachable remote agent folds") {
    AgentSpec dead;
    dead.id = "dead";
    dead.kind = AgentKind::Remote;
    dead.timeout_ms = 100;
    dead.max_retries = 0;
    dead.endpoint = EndpointSpec{"http://127.0.0.1:1/v1/chat/completions", "m", "", {}};
    auto agent = make_agent(dead);
    const auto d = act_with_retry(*agent, eng, 0);
    CHECK(d.auto_fold);
  }
}

TEST_CASE("two all-in preflop run the board out with no further action") {
  auto eng = make_engine({500, 500}, 0, 21);
  eng.apply_action(0, std::get<PokerAction>(eng.validate_action(0, {ActionType::AllIn, 0})));
  eng.apply_action(1, std::get<PokerAction>(eng.validate_action(1, {ActionType::Call, 0})));
  REQUIRE(eng.hand_over());
  CHECK(eng.community().size() == 5);
  const auto& res = eng.result();
  CHECK(std::accumulate(res.payouts.begin(), res.payouts.end(), 0LL) == 0);
  CHECK(res.reached_showdown);
}

TEST_CASE("short all-in does not reopen betting for a player who already acted") {
  // seat1 bets 400; seat2 calls; seat0 shoves 450 total (increment 50 < min 400)
  auto eng = make_engine({450, 5000, 5000}, 0, 23);
  eng.apply_action(0, std::get<PokerAction>(eng.validate_action(0, {ActionType::Call, 0})));
  eng.apply_action(1, std::get<PokerAction>(eng.validate_action(1, {ActionType::Raise, 400})));
  eng.apply_action(2, std::get<PokerAction>(eng.validate_action(2, {ActionType::Call, 0})));
  REQUIRE(eng.to_act() == 0);
  eng.apply_action(0, std::get<PokerAction>(eng.validate_action(0, {ActionType::AllIn, 0})));
  // seat1 faces the extra 50 but may not re-raise
  REQUIRE(eng.to_act() == 1);
  CHECK(std::holds_alternative<Violation>(eng.validate_action(1, {ActionType::Raise, 900})));
  const auto call = eng.validate_action(1, {ActionType::Call, 0});
  REQUIRE(std::holds_alternative<PokerAction>(call));
  eng.apply_action(1, std::get<PokerAction>(call));
  REQUIRE(eng.to_act() == 2);
  CHECK(std::holds_alternative<Violation>(eng.validate_action(2, {ActionType::Raise, 900})));
  eng.apply_action(2, std::get<PokerAction>(eng.validate_action(2, {ActionType::Call, 0})));
  CHECK(eng.stage() == Stage::Flop);
}

TEST_CASE("full raise reopens betting") {
  auto eng = make_engine({5000, 5000, 5000}, 0, 25);
  eng.apply_action(0, std::get<PokerAction>(eng.validate_action(0, {ActionType::Call, 0})));
  eng.apply_action(1, std::get<PokerAction>(eng.validate_action(1, {ActionType::Call, 0})));
  eng.apply_action(2, std::get<PokerAction>(eng.validate_action(2, {ActionType::Raise, 500})));
  // the limpers act again with full rights
  REQUIRE(eng.to_act() == 0);
  const auto v = eng.validate_action(0, {ActionType::Raise, 900});
  REQUIRE(std::holds_alternative<PokerAction>(v));
}

TEST_CASE("three-way all-in settlement matches the per-chip oracle") {
  int short_stack_best_seen = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto eng = make_engine({100, 200, 300}, 2, seed);
    // 3-handed: button 2 acts first preflop (sb 0, bb 1)
    eng.apply_action(2, std::get<PokerAction>(eng.validate_action(2, {ActionType::AllIn, 0})));
    eng.apply_action(0, std::get<PokerAction>(eng.validate_action(0, {ActionType::AllIn, 0})));
    eng.apply_action(1, std::get<PokerAction>(eng.validate_action(1, {ActionType::AllIn, 0})));
    REQUIRE(eng.hand_over());
    const auto& res = eng.result();
    CHECK(std::accumulate(res.payouts.begin(), res.payouts.end(), 0LL) == 0);

    std::vector<HandRank> ranks(3);
    std::array<Card, 7> seven;
    for (int s = 0; s < 3; ++s) {
      seven[0] = eng.hole(s)[0];
      seven[1] = eng.hole(s)[1];
      std::copy(eng.community().begin(), eng.community().end(), seven.begin() + 2);
      ranks[s] = evaluate_hand(seven);
    }
    const auto oracle =
        settle_oracle({100, 200, 300}, {false, false, false}, ranks, 2);
    CHECK(res.payouts == oracle);

    // the reference example line: when the short stack holds the strictly
    // best hand it wins exactly the 300-chip main pot
    if (ranks[0] > ranks[1] && ranks[0] > ranks[2]) {
      ++short_stack_best_seen;
      CHECK(res.payouts[0] == 200);  // main pot 300 minus its own 100
    }
    // an all-in seat never wins more per opponent than its own contribution
    CHECK(res.payouts[0] <= 200);
  }
  CHECK(short_stack_best_seen > 0);
}

TEST_CASE("folded seats never receive chips") {
  std::mt19937_64 seeds(4242);
  auto fold_check = [](long long payout, bool folded, long long contrib) {
    if (folded) CHECK(payout == -contrib);
  };
  for (int trial = 0; trial < 60; ++trial) {
    auto eng = make_engine({2000, 2000, 2000, 2000}, trial % 4, seeds());
    // seat (trial%4 + 3) folds immediately; others go all-in
    while (!eng.hand_over()) {
      const int seat = eng.to_act();
      const PokerAction proposed = (seat == (trial % 4 + 3) % 4)
                                       ? PokerAction{ActionType::Fold, 0}
                                       : PokerAction{ActionType::AllIn, 0};
      auto v = eng.validate_action(seat, proposed);
      if (std::holds_alternative<Violation>(v)) {
        v = eng.validate_action(seat, {ActionType::Call, 0});  // always legal
      }
      eng.apply_action(seat, std::get<PokerAction>(v));
    }
    const auto& res = eng.result();
    for (int s = 0; s < 4; ++s) {
      fold_check(res.payouts[s], eng.folded(s), res.contributions[s]);
    }
  }
}

TEST_CASE("chip conservation fuzz with seeded random agents") {
  std::vector<AgentSpec> specs;
  for (int i = 0; i < 4; ++i) {
    specs.push_back(scripted_spec("rnd" + std::to_string(i), Strategy::PokerRandom,
                                  1000 + static_cast<std::uint64_t>(i)));
  }
  std::vector<std::unique_ptr<Agent>> agents;
  std::vector<Agent*> seat_agents;
  for (const auto& s : specs) {
    agents.push_back(make_agent(s));
    seat_agents.push_back(agents.back().get());
  }

  std::mt19937_64 rng(555);
  std::vector<long long> stacks(4, 2000);
  int button = 0;
  for (int hand = 0; hand < 300; ++hand) {
    int funded = 0;
    for (const long long s : stacks) funded += s > 0 ? 1 : 0;
    if (funded < 2) stacks.assign(4, 2000);
    std::vector<bool> dealt(4);
    for (int s = 0; s < 4; ++s) dealt[s] = stacks[s] > 0;
    while (!dealt[button]) button = (button + 1) % 4;

    HandEngine eng({50, 100, {}}, stacks, dealt, button, rng);
    const long long total = chips_in_play(eng);
    run_hand(eng, std::span<Agent* const>(seat_agents), [&](const HandEngine& e) {
      REQUIRE(chips_in_play(e) == total);
    });
    const auto& res = eng.result();
    REQUIRE(std::accumulate(res.payouts.begin(), res.payouts.end(), 0LL) == 0);
    stacks = res.stacks_after;
    button = (button + 1) % 4;
  }
}

TEST_CASE("session: deterministic, zero-sum, and definitional rates") {
  SUBCASE("one hand, everyone folds to the big blind") {
    std::vector<AgentSpec> specs;
    for (int i = 0; i < 3; ++i) {
      specs.push_back(script_spec("fold" + std::to_string(i), {act("FOLD")}));
    }
    SessionConfig cfg;
    cfg.tables = 1;
    cfg.hands_per_table = 1;
    cfg.table_seeds = {1};
    const auto stats = run_session(cfg, specs);
    long long net = 0;
    for (int s = 0; s < 3; ++s) net += stats.per_table[0][s].net_chips;
    CHECK(net == 0);
  }

  SUBCASE("identical seeds give identical stats; different seeds differ somewhere") {
    std::vector<AgentSpec> specs;
    for (int i = 0; i < 4; ++i) {
      specs.push_back(scripted_spec("rnd" + std::to_string(i), Strategy::PokerRandom,
                                    77 + static_cast<std::uint64_t>(i)));
    }
    SessionConfig cfg;
    cfg.tables = 2;
    cfg.hands_per_table = 12;
    cfg.table_seeds = {11, 22};
    const auto a = run_session(cfg, specs);
    const auto b = run_session(cfg, specs);
    CHECK(a.to_json().dump() == b.to_json().dump());
  }

  SUBCASE("an always-folding agent has vpip 0 and fold rate 1") {
    std::vector<AgentSpec> specs;
    specs.push_back(script_spec("mouse", {act("FOLD")}));
    specs.push_back(script_spec("shover", {act("ALL_IN")}));
    specs.push_back(script_spec("caller", {act("CALL")}));
    SessionConfig cfg;
    cfg.tables = 1;
    cfg.hands_per_table = 9;
    cfg.table_seeds = {31};
    const auto stats = run_session(cfg, specs);
    const auto& mouse = stats.per_table[0][0];
    CHECK(mouse.hands == 9);
    CHECK(mouse.vpip_hands == 0);
    CHECK(mouse.folds == mouse.hands);
    CHECK(stats.vpip[0].mean == doctest::Approx(0.0));
    CHECK(stats.fold_rate[0].mean == doctest::Approx(1.0));
  }

  SUBCASE("tables with fewer than two funded stacks reset and log it") {
    std::vector<AgentSpec> specs;
    specs.push_back(script_spec("shove_a", {act("ALL_IN")}));
    specs.push_back(script_spec("shove_b", {act("ALL_IN")}));
    SessionConfig cfg;
    cfg.tables = 1;
    cfg.hands_per_table = 30;
    cfg.start_stack = 400;
    cfg.table_seeds = {41};
    const auto stats = run_session(cfg, specs);
    CHECK_FALSE(stats.events.empty());
    CHECK(stats.per_table[0][0].hands + stats.per_table[0][1].hands == 60);
  }
}

TEST_CASE("mean/stddev summaries") {
  const auto three = summarize({1, 1, 1});
  CHECK(three.mean == doctest::Approx(1.0));
  CHECK(three.stddev == doctest::Approx(0.0));
  const auto two = summarize({0, 2});
  CHECK(two.mean == doctest::Approx(1.0));
  CHECK(*two.stddev == doctest::Approx(std::sqrt(2.0)));
  const auto one = summarize({5});
  CHECK(one.mean == doctest::Approx(5.0));
  CHECK_FALSE(one.stddev.has_value());  // n < 2
}
