#include "ibench/config.hpp"

#include <algorithm>
#include <set>

namespace ibench {

namespace {

const char* kTaskNames[] = {"proofs_logic", "proofs_math", "pass_at_k",
                            "no_interaction", "poker", "trust"};

// Tracks which keys were consumed so leftovers can be reported as typos.
class Section {
 public:
  Section(const nlohmann::ordered_json& j, std::string path, std::vector<std::string>& out)
      : j_(j), path_(std::move(path)), out_(out) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_[key].is_null();
  }

  template <typename T>
  std::optional<T> get(const std::string& key, const char* type_name) {
    if (!has(key)) return std::nullopt;
    try {
      return j_[key].get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(key + " must be " + type_name);
      return std::nullopt;
    }
  }

  const nlohmann::ordered_json* raw(const std::string& key) {
    if (!has(key)) return nullptr;
    return &j_[key];
  }

  void fail(const std::string& message) { out_.push_back(path_ + ": " + message); }

  void finish() {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) out_.push_back(path_ + ": unknown field '" + key + "'");
    }
  }

 private:
  const nlohmann::ordered_json& j_;
  std::string path_;
  std::vector<std::string>& out_;
  std::set<std::string> seen_;
};

AgentSpec parse_agent(const nlohmann::ordered_json& j, const std::string& path,
                      std::vector<std::string>& out, std::string& role) {
  Section s(j, path, out);
  AgentSpec spec;
  if (auto v = s.get<std::string>("id", "a string")) spec.id = *v;
  if (auto v = s.get<std::string>("role", "a string")) {
    role = *v;
    static const std::set<std::string> kRoles{"player", "judge", "seat", "participant"};
    if (!kRoles.count(role)) s.fail("unknown role '" + role + "'");
  } else {
    s.fail("missing role");
  }
  if (auto v = s.get<std::string>("kind", "a string")) {
    if (auto kind = agent_kind_from_string(*v)) {
      spec.kind = *kind;
    } else {
      s.fail("kind must be 'remote' or 'scripted'");
    }
  } else {
    s.fail("missing kind");
  }
  if (auto v = s.get<std::string>("strategy", "a string")) {
    if (auto strat = strategy_from_string(*v)) {
      spec.strategy = *strat;
    } else {
      s.fail("unknown strategy '" + *v + "'");
    }
  }
  if (auto v = s.get<double>("temperature", "a number")) spec.temperature = *v;
  if (auto v = s.get<int>("timeout_ms", "an integer")) spec.timeout_ms = *v;
  if (auto v = s.get<int>("max_retries", "an integer")) spec.max_retries = *v;
  if (auto v = s.get<std::uint64_t>("seed", "an unsigned integer")) spec.seed = *v;
  if (auto v = s.get<double>("p", "a number")) spec.p = *v;
  if (auto v = s.get<std::vector<std::string>>("script", "an array of strings")) {
    spec.script = *v;
  }
  if (auto v = s.get<int>("key_length", "an integer")) spec.key_length = *v;
  if (auto v = s.get<std::string>("correct_reply", "a string")) spec.correct_reply = *v;
  if (auto v = s.get<std::string>("wrong_reply", "a string")) spec.wrong_reply = *v;
  if (const auto* ep = s.raw("endpoint")) {
    Section e(*ep, path + ".endpoint", out);
    EndpointSpec endpoint;
    if (auto v = e.get<std::string>("url", "a string")) endpoint.url = *v;
    if (auto v = e.get<std::string>("model", "a string")) endpoint.model = *v;
    if (auto v = e.get<std::string>("api_key_env", "a string")) endpoint.api_key_env = *v;
    if (auto v = e.get<int>("requests_per_minute", "an integer")) {
      endpoint.requests_per_minute = *v;
    }
    e.finish();
    spec.endpoint = endpoint;
  }
  s.finish();
  for (const auto& problem : validate(spec)) out.push_back(path + ": " + problem);
  return spec;
}

void parse_payoffs(const nlohmann::ordered_json& j, const std::string& path,
                   std::vector<std::string>& out, PayoffMatrix& m) {
  Section s(j, path, out);
  auto cell = [&](const char* key, TrustAction mine, TrustAction theirs) {
    if (auto v = s.get<std::vector<double>>(key, "a [mine, theirs] number pair")) {
      if (v->size() != 2) {
        s.fail(std::string(key) + " must have exactly two entries");
        return;
      }
      m.u[static_cast<int>(mine)][static_cast<int>(theirs)] = (*v)[0];
      m.u[static_cast<int>(theirs)][static_cast<int>(mine)] = (*v)[1];
    }
  };
  cell("cc", TrustAction::C, TrustAction::C);
  cell("cd", TrustAction::C, TrustAction::D);
  cell("dc", TrustAction::D, TrustAction::C);
  cell("dd", TrustAction::D, TrustAction::D);
  s.finish();
}

}  // namespace

std::string_view to_string(Task t) { return kTaskNames[static_cast<int>(t)]; }

std::optional<Task> task_from_string(std::string_view s) {
  for (int i = 0; i < 6; ++i) {
    if (s == kTaskNames[i]) return static_cast<Task>(i);
  }
  return std::nullopt;
}

std::vector<const BoundAgent*> RunConfig::with_role(std::string_view role) const {
  std::vector<const BoundAgent*> out;
  for (const auto& a : agents) {
    if (a.role == role) out.push_back(&a);
  }
  return out;
}

ConfigResult parse_config(const nlohmann::ordered_json& j, const std::string& source) {
  ConfigResult result;
  auto& out = result.violations;
  if (!j.is_object()) {
    out.push_back(source + ": config must be a JSON object");
    return result;
  }

  RunConfig cfg;
  cfg.raw = j;
  Section s(j, source, out);

  if (auto v = s.get<std::string>("task", "a string")) {
    if (auto task = task_from_string(*v)) {
      cfg.task = *task;
    } else {
      s.fail("unknown task '" + *v + "'");
    }
  } else {
    s.fail("missing task");
  }
  if (auto v = s.get<std::uint64_t>("seed", "an unsigned integer")) {
    cfg.seed = *v;
  } else {
    s.fail("missing seed (seeds are explicit, never implicit)");
  }
  if (auto v = s.get<std::string>("output_dir", "a string")) cfg.output_dir = *v;
  if (auto v = s.get<unsigned>("parallelism", "a positive integer")) {
    cfg.parallelism = *v;
    if (*v < 1) s.fail("parallelism must be >= 1");
  }

  if (const auto* agents = s.raw("agents")) {
    if (!agents->is_array()) {
      s.fail("agents must be an array");
    } else {
      int i = 0;
      for (const auto& a : *agents) {
        BoundAgent bound;
        bound.spec = parse_agent(a, source + ".agents[" + std::to_string(i) + "]", out,
                                 bound.role);
        cfg.agents.push_back(std::move(bound));
        ++i;
      }
    }
  } else {
    s.fail("missing agents");
  }

  if (const auto* ep = s.raw("episode")) {
    Section e(*ep, source + ".episode", out);
    if (auto v = e.get<std::int64_t>("budget_B", "an integer")) cfg.episode.budget_b = *v;
    if (auto v = e.get<std::int64_t>("cost_per_action", "an integer")) {
      cfg.episode.cost_per_action = *v;
    }
    if (auto v = e.get<double>("discount_gamma", "a number")) {
      cfg.episode.discount_gamma = *v;
    }
    e.finish();
    try {
      validate(cfg.episode);
    } catch (const ConfigError& err) {
      out.push_back(source + ".episode: " + err.what());
    }
  }

  if (auto v = s.get<std::string>("instances", "a string")) cfg.instances_path = *v;
  if (auto v = s.get<int>("k", "a positive integer")) {
    cfg.k = *v;
    if (*v < 1) s.fail("k must be >= 1");
  }

  if (const auto* tr = s.raw("trust")) {
    Section e(*tr, source + ".trust", out);
    if (auto v = e.get<double>("delta", "a number")) cfg.trust.delta = *v;
    if (auto v = e.get<int>("max_rounds", "an integer")) cfg.trust.max_rounds = *v;
    if (auto v = e.get<int>("repeats", "an integer")) cfg.trust.repeats = *v;
    if (auto v = e.get<bool>("swap_seats", "a boolean")) cfg.trust.swap_seats = *v;
    if (const auto* payoffs = e.raw("payoffs")) {
      parse_payoffs(*payoffs, source + ".trust.payoffs", out, cfg.trust.payoffs);
    }
    e.finish();
    for (const auto& problem : validate(cfg.trust)) {
      out.push_back(source + ".trust: " + problem);
    }
  }

  if (const auto* pk = s.raw("poker")) {
    Section e(*pk, source + ".poker", out);
    if (auto v = e.get<int>("tables", "an integer")) cfg.poker.tables = *v;
    if (auto v = e.get<int>("hands_per_table", "an integer")) {
      cfg.poker.hands_per_table = *v;
    }
    if (auto v = e.get<long long>("small_blind", "an integer")) {
      cfg.poker.rules.small_blind = *v;
    }
    if (auto v = e.get<long long>("big_blind", "an integer")) {
      cfg.poker.rules.big_blind = *v;
    }
    if (auto v = e.get<long long>("start_stack", "an integer")) cfg.poker.start_stack = *v;
    if (auto v = e.get<std::vector<std::uint64_t>>("table_seeds",
                                                   "an array of unsigned integers")) {
      cfg.poker.table_seeds = *v;
    }
    e.finish();
    if (cfg.poker.tables < 1) out.push_back(source + ".poker: tables must be >= 1");
    if (cfg.poker.hands_per_table < 1) {
      out.push_back(source + ".poker: hands_per_table must be >= 1");
    }
    if (cfg.poker.rules.small_blind < 1 ||
        cfg.poker.rules.big_blind < cfg.poker.rules.small_blind) {
      out.push_back(source + ".poker: blinds must satisfy 1 <= small <= big");
    }
    if (cfg.poker.start_stack <= cfg.poker.rules.big_blind) {
      out.push_back(source + ".poker: start_stack must exceed the big blind");
    }
    if (!cfg.poker.table_seeds.empty() &&
        static_cast<int>(cfg.poker.table_seeds.size()) != cfg.poker.tables) {
      out.push_back(source + ".poker: table_seeds must have one entry per table");
    }
  }
  s.finish();

  // duplicate ids
  std::set<std::string> ids;
  for (const auto& a : cfg.agents) {
    if (!a.spec.id.empty() && !ids.insert(a.spec.id).second) {
      out.push_back(source + ": duplicate agent id '" + a.spec.id + "'");
    }
  }

  // role coverage per task
  const auto players = cfg.with_role("player").size();
  const auto judges = cfg.with_role("judge").size();
  const auto seats = cfg.with_role("seat").size();
  const auto participants = cfg.with_role("participant").size();
  switch (cfg.task) {
    case Task::ProofsLogic:
    case Task::ProofsMath:
      if (players != 1) out.push_back(source + ": task needs exactly one 'player' agent");
      if (judges != 1) out.push_back(source + ": task needs exactly one 'judge' agent");
      if (cfg.instances_path.empty()) out.push_back(source + ": missing instances");
      break;
    case Task::PassAtK:
    case Task::NoInteraction:
      if (players != 1) out.push_back(source + ": task needs exactly one 'player' agent");
      if (cfg.instances_path.empty()) out.push_back(source + ": missing instances");
      break;
    case Task::Poker:
      if (seats < 2) out.push_back(source + ": poker needs at least two 'seat' agents");
      break;
    case Task::Trust:
      if (participants < 2) {
        out.push_back(source + ": trust needs at least two 'participant' agents");
      }
      break;
  }

  if (out.empty()) result.config = std::move(cfg);
  return result;
}

ConfigResult load_config(const std::filesystem::path& path) {
  ConfigResult result;
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const ConfigError& e) {
    result.violations.push_back(e.what());
    return result;
  }
  const auto j = nlohmann::ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    result.violations.push_back(path.string() + ": invalid JSON");
    return result;
  }
  return parse_config(j, path.filename().string());
}

std::string config_hash_hex(const nlohmann::ordered_json& raw) {
  const std::uint64_t h = fnv1a64(raw.dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ibench
