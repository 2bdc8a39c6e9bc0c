#include "ibench/poker/session.hpp"

#include <cmath>
#include <mutex>

namespace ibench::poker {

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (const double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

namespace {

nlohmann::ordered_json summary_json(const MetricSummary& s) {
  nlohmann::ordered_json j{{"mean", s.mean}};
  if (s.stddev) j["stddev"] = *s.stddev;
  j["n"] = s.n;
  return j;
}

nlohmann::ordered_json hand_record(int table, int hand, const HandEngine& eng,
                                   const HandStats& stats,
                                   const std::vector<std::string>& ids) {
  const auto& res = eng.result();
  nlohmann::ordered_json j;
  j["schema_version"] = std::string(kSchemaVersion);
  j["table"] = table;
  j["hand"] = hand;
  j["button"] = eng.button();
  j["sb_seat"] = eng.small_blind_seat();
  j["bb_seat"] = eng.big_blind_seat();
  j["blinds"] = {eng.rules().small_blind, eng.rules().big_blind};
  auto hole = nlohmann::ordered_json::array();
  for (int s = 0; s < eng.num_seats(); ++s) {
    if (eng.dealt_in(s)) {
      hole.push_back({to_string(eng.hole(s)[0]), to_string(eng.hole(s)[1])});
    } else {
      hole.push_back(nullptr);
    }
  }
  j["hole"] = std::move(hole);
  auto board = nlohmann::ordered_json::array();
  for (const Card c : eng.community()) board.push_back(to_string(c));
  j["community"] = std::move(board);
  auto actions = nlohmann::ordered_json::array();
  for (const auto& h : eng.history()) {
    nlohmann::ordered_json a{{"stage", to_string(h.stage)},
                             {"seat", h.seat},
                             {"action", to_string(h.action)},
                             {"amount", h.amount}};
    if (h.auto_action) a["auto"] = true;
    if (!h.reasoning.empty()) a["reasoning"] = h.reasoning;
    actions.push_back(std::move(a));
  }
  j["actions"] = std::move(actions);
  j["payouts"] = res.payouts;
  j["stacks_after"] = res.stacks_after;
  j["showdown"] = res.reached_showdown;
  j["note"] = res.note;
  j["seats"] = ids;
  (void)stats;
  return j;
}

}  // namespace

nlohmann::ordered_json SessionStats::to_json() const {
  nlohmann::ordered_json agents = nlohmann::ordered_json::object();
  for (std::size_t s = 0; s < agent_ids.size(); ++s) {
    agents[agent_ids[s]] = {
        {"avg_winnings_per_hand", summary_json(avg_winnings_per_hand[s])},
        {"vpip", summary_json(vpip[s])},
        {"fold_rate", summary_json(fold_rate[s])},
        {"mean_latency_ms", summary_json(mean_latency_ms[s])},
    };
  }
  nlohmann::ordered_json j;
  j["schema_version"] = std::string(kSchemaVersion);
  j["per_agent"] = std::move(agents);
  j["tables"] = static_cast<int>(per_table.size());
  j["events"] = events;
  return j;
}

SessionStats run_session(const SessionConfig& config,
                         const std::vector<AgentSpec>& seat_specs,
                         const HandSink& sink, const StepObserver& observer) {
  const int n_seats = static_cast<int>(seat_specs.size());
  if (n_seats < 2) throw ConfigError("run_session: need at least two seats");
  if (config.tables < 1 || config.hands_per_table < 1) {
    throw ConfigError("run_session: tables and hands_per_table must be positive");
  }
  if (static_cast<int>(config.table_seeds.size()) != config.tables) {
    throw ConfigError("run_session: one seed per table required");
  }

  SessionStats stats;
  for (const auto& spec : seat_specs) stats.agent_ids.push_back(spec.id);
  stats.per_table.assign(static_cast<std::size_t>(config.tables),
                         std::vector<AgentTableStats>(n_seats));
  std::vector<std::vector<std::string>> table_events(config.tables);
  std::mutex sink_mutex;

  parallel_for(static_cast<std::size_t>(config.tables), config.parallelism,
               [&](std::size_t t) {
    // fresh agents per table so remote connections don't serialize tables
    std::vector<std::unique_ptr<Agent>> agents;
    std::vector<Agent*> seat_agents;
    for (const auto& spec : seat_specs) {
      agents.push_back(make_agent(spec));
      seat_agents.push_back(agents.back().get());
    }
    std::mt19937_64 rng(config.table_seeds[t]);
    std::vector<long long> stacks(n_seats, config.start_stack);
    int button = 0;

    for (int hand = 0; hand < config.hands_per_table; ++hand) {
      int with_chips = 0;
      for (const long long s : stacks) with_chips += s > 0 ? 1 : 0;
      if (with_chips < 2) {
        table_events[t].push_back("table " + std::to_string(t) + " hand " +
                                  std::to_string(hand) +
                                  ": fewer than two stacks left, stacks reset");
        stacks.assign(n_seats, config.start_stack);
      }
      std::vector<bool> dealt_in(n_seats);
      for (int s = 0; s < n_seats; ++s) dealt_in[s] = stacks[s] > 0;
      if (!dealt_in[button]) button = [&] {
        for (int i = 1; i <= n_seats; ++i) {
          const int s = (button + i) % n_seats;
          if (dealt_in[s]) return s;
        }
        return button;
      }();

      HandEngine engine(config.rules, stacks, dealt_in, button, rng);
      const HandStats hand_stats =
          run_hand(engine, std::span<Agent* const>(seat_agents), observer);
      const auto& res = engine.result();

      auto& per_seat = stats.per_table[t];
      for (int s = 0; s < n_seats; ++s) {
        if (!dealt_in[s]) continue;
        auto& a = per_seat[s];
        ++a.hands;
        a.net_chips += res.payouts[s];
        if (engine.folded(s)) ++a.folds;
        if (engine.vpip(s)) ++a.vpip_hands;
        a.decisions += hand_stats.decisions[s];
        a.latency_ms += hand_stats.latency_ms[s];
        a.auto_folds += hand_stats.auto_folds[s];
      }
      if (sink) {
        const auto record = hand_record(static_cast<int>(t), hand, engine,
                                        hand_stats, stats.agent_ids);
        std::lock_guard<std::mutex> lock(sink_mutex);
        sink(static_cast<int>(t), hand, record);
      }

      stacks = res.stacks_after;
      // button moves to the next seat that will be dealt in next hand
      for (int i = 1; i <= n_seats; ++i) {
        const int s = (button + i) % n_seats;
        if (stacks[s] > 0) {
          button = s;
          break;
        }
      }
    }
  });

  for (const auto& ev : table_events) {
    stats.events.insert(stats.events.end(), ev.begin(), ev.end());
  }

  stats.avg_winnings_per_hand.resize(n_seats);
  stats.vpip.resize(n_seats);
  stats.fold_rate.resize(n_seats);
  stats.mean_latency_ms.resize(n_seats);
  for (int s = 0; s < n_seats; ++s) {
    std::vector<double> winnings, vpip, fold_rate, latency;
    for (const auto& table : stats.per_table) {
      const auto& a = table[s];
      if (a.hands == 0) continue;
      winnings.push_back(static_cast<double>(a.net_chips) / a.hands);
      vpip.push_back(static_cast<double>(a.vpip_hands) / a.hands);
      fold_rate.push_back(static_cast<double>(a.folds) / a.hands);
      latency.push_back(a.decisions == 0
                            ? 0.0
                            : static_cast<double>(a.latency_ms) /
                                  static_cast<double>(a.decisions));
    }
    stats.avg_winnings_per_hand[s] = summarize(winnings);
    stats.vpip[s] = summarize(vpip);
    stats.fold_rate[s] = summarize(fold_rate);
    stats.mean_latency_ms[s] = summarize(latency);
  }
  return stats;
}

}  // namespace ibench::poker
