#include "ibench/proofs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <json.hpp>

namespace ibench {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string player_system_prompt(const ProofInstance& inst, const EpisodeConfig& cfg) {
  std::string p;
  p += "You are the player in a budgeted deduction game.\n\n";
  p += "PROBLEM:\n" + inst.problem + "\n\n";
  p += "Rules:\n";
  p += "- You have a budget of " + std::to_string(cfg.budget_b) +
       " turns. Asking a question and submitting a final answer each consume one turn.\n";
  p += "- Ask one yes/no-style question per turn. The judge answers with exactly one of: "
       "YES, NO, BOTH, IRRELEVANT.\n";
  p += "- To submit a final answer, start your reply with the line \"FINAL:\" followed by "
       "the answer. Final answers are graded CORRECT or INCORRECT.\n";
  p += "- A correct final answer ends the game immediately.\n";
  return p;
}

std::string judge_system_prompt(const ProofInstance& inst) {
  std::string p;
  p += "You are the judge in a budgeted deduction game. You hold the hidden ground truth "
       "and must answer only from it.\n\n";
  p += "PROBLEM:\n" + inst.problem + "\n\n";
  p += "HIDDEN SOLUTION:\n" + inst.hidden_solution + "\n\n";
  p += "Rules:\n";
  p += "- For a message starting with \"QUERY:\", reply with exactly one word: YES, NO, "
       "BOTH, or IRRELEVANT. Use BOTH for compound queries mixing true and false parts; "
       "use IRRELEVANT for queries orthogonal to the solution.\n";
  p += "- For a message starting with \"FINAL GUESS:\", reply with exactly one word: "
       "CORRECT or INCORRECT.\n";
  return p;
}

// Last line tagged "QQQQ:" isolates the actual question inside a reasoning
// reply; otherwise the whole reply is the query.
std::string query_payload(std::string_view player_reply) {
  std::string_view found;
  for (const auto line : split_lines(player_reply)) {
    const std::string_view t = trim(line);
    if (t.substr(0, 5) == "QQQQ:") found = trim(t.substr(5));
  }
  return found.empty() ? std::string(trim(player_reply)) : std::string(found);
}

// Asks the judge for a verdict, re-prompting once on a parse failure or a
// verdict outside the sub-vocabulary for this turn kind. nullopt = give up.
std::optional<Verdict> ask_judge(Agent& judge, std::vector<ChatMessage>& jmsgs,
                                 bool final_guess, const std::string& payload) {
  jmsgs.push_back({ChatRole::User,
                   (final_guess ? "FINAL GUESS: " : "QUERY: ") + payload});
  for (int attempt = 0; attempt < 2; ++attempt) {
    const AgentReply jr = judge.reply(jmsgs);
    jmsgs.push_back({ChatRole::Assistant, jr.content});
    const auto v = parse_verdict(jr.content);
    if (v && (final_guess ? is_final_verdict(*v) : is_query_verdict(*v))) return v;
    if (attempt == 0) {
      jmsgs.push_back({ChatRole::User,
                       final_guess
                           ? "Reply with exactly one word: CORRECT or INCORRECT."
                           : "Reply with exactly one word: YES, NO, BOTH, or IRRELEVANT."});
    }
  }
  return std::nullopt;
}

std::optional<Verdict> grade_final(Agent* judge, std::vector<ChatMessage>* jmsgs,
                                   const ProofInstance& inst, const std::string& payload) {
  if (inst.final_answer_key) {
    return grade_exact(payload, *inst.final_answer_key) ? Verdict::Correct
                                                        : Verdict::Incorrect;
  }
  if (!judge || !jmsgs) return std::nullopt;
  return ask_judge(*judge, *jmsgs, /*final_guess=*/true, payload);
}

}  // namespace

std::string_view to_string(ProofInstance::Domain d) {
  return d == ProofInstance::Domain::Logic ? "logic" : "math";
}

std::optional<ProofInstance::Domain> domain_from_string(std::string_view s) {
  if (s == "logic") return ProofInstance::Domain::Logic;
  if (s == "math") return ProofInstance::Domain::Math;
  return std::nullopt;
}

std::vector<std::string> validate(const ProofInstance& inst) {
  std::vector<std::string> problems;
  if (inst.id.empty()) problems.push_back("instance id must not be empty");
  if (inst.problem.empty()) problems.push_back("instance problem must not be empty");
  if (inst.hidden_solution.empty()) {
    problems.push_back("instance hidden_solution must not be empty");
  }
  return problems;
}

std::vector<ProofInstance> load_instances(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<ProofInstance> out;
  int line_no = 0;
  for (const auto line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": invalid JSON");
    }
    ProofInstance inst;
    try {
      inst.id = j.at("id").get<std::string>();
      const auto d = domain_from_string(j.at("domain").get<std::string>());
      if (!d) throw ConfigError("domain must be 'logic' or 'math'");
      inst.domain = *d;
      inst.problem = j.at("problem").get<std::string>();
      inst.hidden_solution = j.at("hidden_solution").get<std::string>();
      if (j.contains("final_answer_key") && !j["final_answer_key"].is_null()) {
        inst.final_answer_key = j["final_answer_key"].get<std::string>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const auto problems = validate(inst);
    if (!problems.empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " +
                        problems.front());
    }
    out.push_back(std::move(inst));
  }
  return out;
}

bool PassKResult::any_correct() const {
  return std::any_of(attempts.begin(), attempts.end(),
                     [](const PassAttempt& a) { return a.correct; });
}

std::pair<bool, std::string> classify_final_guess(std::string_view reply) {
  for (const auto line : split_lines(reply)) {
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t.size() >= kFinalTag.size() &&
        to_lower(t.substr(0, kFinalTag.size())) == to_lower(kFinalTag)) {
      // answer = remainder of the tag line plus any following lines
      std::string answer(trim(t.substr(kFinalTag.size())));
      const std::size_t line_end = reply.find(line) + line.size();
      const std::string_view rest = trim(reply.substr(line_end));
      if (!rest.empty()) {
        if (!answer.empty()) answer += "\n";
        answer += std::string(rest);
      }
      return {true, answer};
    }
    return {false, std::string(trim(reply))};
  }
  return {false, std::string(trim(reply))};
}

std::optional<Verdict> parse_verdict(std::string_view raw_judge_text) {
  static const std::pair<std::string_view, Verdict> kVocabulary[] = {
      {"yes", Verdict::Yes},           {"no", Verdict::No},
      {"both", Verdict::Both},         {"irrelevant", Verdict::Irrelevant},
      {"correct", Verdict::Correct},   {"incorrect", Verdict::Incorrect},
  };
  std::optional<Verdict> last;
  std::set<Verdict> distinct;
  for (const auto& token : word_tokens(raw_judge_text)) {
    for (const auto& [word, verdict] : kVocabulary) {
      if (token == word) {
        last = verdict;
        distinct.insert(verdict);
      }
    }
  }
  if (distinct.size() != 1) return std::nullopt;
  return last;
}

ProofRunResult run_proof_episode(Agent& player, Agent& judge,
                                 const ProofInstance& instance,
                                 const EpisodeConfig& config) {
  validate(config);
  EpisodeState ep(config);
  std::vector<ChatMessage> pmsgs{{ChatRole::System, player_system_prompt(instance, config)}};
  std::vector<ChatMessage> jmsgs{{ChatRole::System, judge_system_prompt(instance)}};
  std::string pending = "Turn 1 of " + std::to_string(config.budget_b) +
                        ". Ask a question or submit a final answer.";

  while (!ep.terminal()) {
    pmsgs.push_back({ChatRole::User, pending});
    const AgentReply pr = player.reply(pmsgs);
    pmsgs.push_back({ChatRole::Assistant, pr.content});

    const auto [is_final, payload] = classify_final_guess(pr.content);
    std::optional<Verdict> verdict;
    if (is_final) {
      verdict = grade_final(&judge, &jmsgs, instance, payload);
    } else {
      verdict = ask_judge(judge, jmsgs, /*final_guess=*/false, query_payload(pr.content));
    }
    if (!verdict) {
      ep.abort("judge verdict unparseable after one re-prompt");
      break;
    }

    TurnRecord rec;
    rec.index_t = ep.next_index();
    rec.actor = Actor::Player;
    rec.action_kind = is_final ? TurnKind::FinalGuess : TurnKind::Query;
    rec.content = pr.content;
    rec.verdict = verdict;
    rec.cost = config.cost_per_action;
    rec.latency_ms = pr.latency_ms;
    rec.token_usage = pr.token_usage;
    ep.apply_turn(std::move(rec));
    if (is_final) ep.set_final_answer(payload);

    pending = "Judge: " + upper(to_string(*verdict)) + "\nTurn " +
              std::to_string(ep.next_index()) + " of " + std::to_string(config.budget_b) +
              ". Ask a question or submit a final answer.";
  }

  // The engine grants one zero-cost answer when the budget ran out without a
  // correct guess; the player must submit something.
  if (ep.terminal() && ep.outcome() == Outcome::Exhausted) {
    pmsgs.push_back({ChatRole::User,
                     "Your budget is exhausted. You must submit your final answer now. "
                     "Start your reply with \"FINAL:\"."});
    const AgentReply pr = player.reply(pmsgs);
    pmsgs.push_back({ChatRole::Assistant, pr.content});
    auto [tagged, payload] = classify_final_guess(pr.content);
    if (!tagged) payload = std::string(trim(pr.content));  // no other legal move here
    if (const auto verdict = grade_final(&judge, &jmsgs, instance, payload)) {
      TurnRecord rec;
      rec.index_t = ep.next_index();
      rec.actor = Actor::Player;
      rec.action_kind = TurnKind::FinalGuess;
      rec.content = pr.content;
      rec.verdict = verdict;
      rec.cost = 0;
      rec.latency_ms = pr.latency_ms;
      rec.token_usage = pr.token_usage;
      ep.grant_forced_final(std::move(rec));
      ep.set_final_answer(payload);
    }
  }

  ProofRunResult result;
  result.transcript = ep.finalize(instance.id);
  result.solved = result.transcript.solved();
  result.usage_complete = true;
  for (const auto& t : result.transcript.turns) {
    if (t.actor != Actor::Player) continue;
    if (t.cost > 0) ++result.turns_used;
    if (t.token_usage) {
      result.interactive_tokens += t.token_usage->total();
    } else {
      result.usage_complete = false;
    }
  }
  return result;
}

double accuracy(std::span<const ProofRunResult> results) {
  if (results.empty()) throw MetricError("accuracy over an empty result set");
  std::size_t solved = 0;
  for (const auto& r : results) solved += r.solved ? 1 : 0;
  return static_cast<double>(solved) / static_cast<double>(results.size());
}

double avg_turns(std::span<const ProofRunResult> results) {
  std::int64_t total = 0;
  std::size_t solved = 0;
  for (const auto& r : results) {
    if (r.solved) {
      total += r.turns_used;
      ++solved;
    }
  }
  if (solved == 0) throw MetricError("avg_turns undefined: no solved episodes");
  return static_cast<double>(total) / static_cast<double>(solved);
}

int budget_matched_k(double mean_pass1_tokens, double mean_interactive_tokens) {
  if (!(mean_pass1_tokens > 0.0) || !(mean_interactive_tokens > 0.0)) {
    throw ConfigError("budget_matched_k: token means must be positive");
  }
  const double ratio = mean_interactive_tokens / mean_pass1_tokens;
  long long lo = static_cast<long long>(std::floor(ratio));
  if (lo < 1) lo = 1;
  // the gap is convex in k, so the floor/ceil of the ratio bracket the optimum
  long long best = lo;
  double best_gap = std::abs(static_cast<double>(lo) * mean_pass1_tokens -
                             mean_interactive_tokens);
  const double hi_gap = std::abs(static_cast<double>(lo + 1) * mean_pass1_tokens -
                                 mean_interactive_tokens);
  if (hi_gap < best_gap) best = lo + 1;
  return static_cast<int>(best);
}

namespace {

std::vector<ChatMessage> single_shot_prompt(const ProofInstance& inst) {
  std::string sys;
  sys += "You are solving a problem in one shot. No questions are allowed.\n\n";
  sys += "PROBLEM:\n" + inst.problem + "\n\n";
  sys += "Reply with your final answer only, starting with the line \"FINAL:\".\n";
  return {{ChatRole::System, sys},
          {ChatRole::User, "Provide your final answer now."}};
}

PassAttempt run_single_attempt(Agent& agent, const ProofInstance& inst,
                               Agent* grading_judge) {
  const auto msgs = single_shot_prompt(inst);
  const AgentReply reply = agent.reply(msgs);
  auto [tagged, payload] = classify_final_guess(reply.content);
  if (!tagged) payload = std::string(trim(reply.content));
  PassAttempt attempt;
  attempt.answer = payload;
  attempt.tokens = reply.token_usage ? reply.token_usage->total() : 0;
  if (inst.final_answer_key) {
    attempt.correct = grade_exact(payload, *inst.final_answer_key);
  } else {
    std::vector<ChatMessage> jmsgs{{ChatRole::System, judge_system_prompt(inst)}};
    const auto verdict = ask_judge(*grading_judge, jmsgs, /*final_guess=*/true, payload);
    attempt.correct = verdict == Verdict::Correct;
  }
  return attempt;
}

}  // namespace

PassKResult run_pass_at_k(const AgentSpec& player, const ProofInstance& instance,
                          int k, Agent* grading_judge) {
  if (k < 1) throw ConfigError("run_pass_at_k: k must be positive");
  if (!instance.final_answer_key && grading_judge == nullptr) {
    throw ConfigError("run_pass_at_k: instance '" + instance.id +
                      "' has no final_answer_key and no grading judge was supplied");
  }
  PassKResult result;
  result.instance_id = instance.id;
  result.k = k;
  std::unique_ptr<Agent> remote;
  if (player.kind == AgentKind::Remote) remote = make_agent(player);
  for (int i = 0; i < k; ++i) {
    std::unique_ptr<Agent> scripted;
    Agent* agent = remote.get();
    if (!agent) {
      AgentSpec derived = player;
      derived.seed = seed_combine({player.seed, static_cast<std::uint64_t>(i)});
      scripted = make_agent(derived);
      agent = scripted.get();
    }
    result.attempts.push_back(run_single_attempt(*agent, instance, grading_judge));
  }
  return result;
}

bool run_no_interaction_baseline(Agent& player, const ProofInstance& instance,
                                 Agent* grading_judge) {
  if (!instance.final_answer_key && grading_judge == nullptr) {
    throw ConfigError("run_no_interaction_baseline: no key and no grading judge");
  }
  return run_single_attempt(player, instance, grading_judge).correct;
}

namespace {

struct Rational {
  long long num = 0;
  long long den = 1;
};

// "28", "-3", "28.5", "3/4"; digits are capped so cross-multiplication
// cannot overflow.
std::optional<Rational> parse_rational(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;
  long long num = 0;
  long long den = 1;
  int digits = 0;
  std::size_t i = 0;
  auto eat_digits = [&](long long& value) {
    bool any = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      value = value * 10 + (s[i] - '0');
      ++i;
      ++digits;
      any = true;
    }
    return any;
  };
  if (!eat_digits(num)) return std::nullopt;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      num = num * 10 + (s[i] - '0');
      den *= 10;
      ++i;
      ++digits;
    }
  } else if (i < s.size() && s[i] == '/') {
    ++i;
    long long d = 0;
    if (!eat_digits(d) || d == 0) return std::nullopt;
    den = d;
  }
  if (i != s.size() || digits > 15) return std::nullopt;
  if (negative) num = -num;
  return Rational{num, den};
}

}  // namespace

std::string canonical_answer(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (const char raw : std::string(trim(s))) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

bool grade_exact(std::string_view answer, std::string_view key) {
  const auto ra = parse_rational(answer);
  const auto rk = parse_rational(key);
  if (ra && rk) {
    return static_cast<__int128>(ra->num) * rk->den ==
           static_cast<__int128>(rk->num) * ra->den;
  }
  return canonical_answer(answer) == canonical_answer(key);
}

}  // namespace ibench
