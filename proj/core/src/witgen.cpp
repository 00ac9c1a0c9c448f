#include "witloc/witgen.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace witloc {

const char* mode_name(SearchMode mode) {
  switch (mode) {
    case SearchMode::Full: return "full";
    case SearchMode::Rand: return "rand";
    case SearchMode::NoCov: return "no-cov";
    case SearchMode::NoState: return "no-state";
    case SearchMode::NoDiv: return "no-div";
  }
  return "full";
}

std::optional<SearchMode> mode_from_name(const std::string& name) {
  if (name == "full") return SearchMode::Full;
  if (name == "rand") return SearchMode::Rand;
  if (name == "no-cov") return SearchMode::NoCov;
  if (name == "no-state") return SearchMode::NoState;
  if (name == "no-div") return SearchMode::NoDiv;
  return std::nullopt;
}

DistanceWeights resolve_weights(const Design& design, SearchMode mode,
                                std::optional<double> alpha, std::optional<double> beta) {
  DistanceWeights w;
  int z = design.statement_count();
  int k = design.register_count();
  w.alpha = alpha.value_or(z > 0 ? 1.0 / z : 0.0);
  w.beta = beta.value_or(k > 0 ? 1.0 / k : 0.0);
  if (k == 0) w.beta = 0.0;
  if (mode == SearchMode::NoCov) w.alpha = 0.0;
  if (mode == SearchMode::NoState) w.beta = 0.0;
  return w;
}

InputConstraints constraints_from_json(const std::string& json_text) {
  InputConstraints c;
  nlohmann::json doc = nlohmann::json::parse(json_text);
  if (!doc.is_object()) throw std::runtime_error("constraints file must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& entry = it.value();
    if (!entry.is_object() || !entry.contains("values") || !entry["values"].is_array())
      throw std::runtime_error("constraint for '" + it.key() + "' must be {\"values\": [...]}");
    std::vector<uint64_t> values = entry["values"].get<std::vector<uint64_t>>();
    if (values.empty())
      throw std::runtime_error("constraint for '" + it.key() + "' has an empty value list");
    c.allowed[it.key()] = std::move(values);
  }
  return c;
}

InputConstraints load_constraints(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open constraints file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return constraints_from_json(buf.str());
}

double DistanceCache::get(size_t id_a, const ExecutionTrace& a, size_t id_b,
                          const ExecutionTrace& b, DistanceWeights w) {
  auto key = std::minmax(id_a, id_b);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  double d = distance(a, b, w);
  memo_.emplace(key, d);
  return d;
}

double fitness(const ExecutionTrace& trace, const ExecutionTrace& bug_trace, DistanceWeights w) {
  return 1.0 / (1.0 + distance(trace, bug_trace, w));
}

size_t select_seed(SearchState& state) {
  if (state.seeds.empty()) throw std::runtime_error("select_seed on an empty seed pool");
  if (state.cfg.mode == SearchMode::Rand)
    return static_cast<size_t>(state.rng.below(state.seeds.size()));
  std::vector<double> weights;
  weights.reserve(state.seeds.size());
  for (const SeedEntry& s : state.seeds) weights.push_back(s.fitness);
  return state.rng.weighted_index(weights);
}

std::vector<uint32_t> select_positions(SearchState& state, uint32_t count) {
  const size_t t = state.priorities.size();
  if (count > t) throw std::runtime_error("cannot select more positions than cycles");
  bool uniform = state.cfg.mode == SearchMode::Rand || state.cfg.mode == SearchMode::NoDiv;
  std::vector<double> weights(t);
  for (size_t i = 0; i < t; ++i) weights[i] = uniform ? 1.0 : state.priorities[i];
  std::vector<uint32_t> chosen;
  chosen.reserve(count);
  for (uint32_t k = 0; k < count; ++k) {
    size_t idx = state.rng.weighted_index(weights);
    chosen.push_back(static_cast<uint32_t>(idx));
    weights[idx] = 0.0;  // without replacement
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

TestCase mutate(const TestCase& test, const std::vector<uint32_t>& positions, double p,
                const Design& design, Rng& rng, const InputConstraints* constraints) {
  TestCase out = test;
  for (uint32_t cycle : positions) {
    if (cycle >= out.cycles.size()) throw std::runtime_error("mutation position out of range");
    for (size_t i = 0; i < out.signals.size(); ++i) {
      if (rng.next_double() >= p) continue;
      const std::vector<uint64_t>* pool = nullptr;
      if (constraints) {
        auto it = constraints->allowed.find(out.signals[i]);
        if (it != constraints->allowed.end()) pool = &it->second;
      }
      if (pool) {
        out.cycles[cycle][i] = (*pool)[rng.below(pool->size())];
      } else {
        int sig = design.signal_index(out.signals[i]);
        int width = sig >= 0 ? design.signals[sig].width : 64;
        out.cycles[cycle][i] = width >= 64 ? rng.next_u64() : rng.below(uint64_t{1} << width);
      }
    }
  }
  return out;
}

double score(SearchState& state, size_t cand_trace_id, const ExecutionTrace& cand) {
  if (state.seeds.empty()) throw std::runtime_error("score on an empty seed pool");
  double sum = 0.0;
  for (const SeedEntry& s : state.seeds)
    sum += state.cache.get(cand_trace_id, cand, s.trace_id, s.trace, state.cfg.weights);
  return sum / static_cast<double>(state.seeds.size());
}

void update_priority(SearchState& state, const std::vector<uint32_t>& positions, double s) {
  for (uint32_t i : positions)
    state.priorities[i] = (1.0 - state.cfg.gamma) * state.priorities[i] + state.cfg.gamma * s;
}

namespace {

std::vector<Witness> top_witnesses(const SearchState& state, uint32_t n) {
  // stable sort keeps insertion order among equal fitness values
  std::vector<const SeedEntry*> pool;
  for (const SeedEntry& s : state.seeds)
    if (!s.anchor) pool.push_back(&s);
  std::stable_sort(pool.begin(), pool.end(),
                   [](const SeedEntry* a, const SeedEntry* b) { return a->fitness > b->fitness; });
  if (pool.size() > n) pool.resize(n);
  std::vector<Witness> out;
  out.reserve(pool.size());
  for (const SeedEntry* s : pool) out.push_back(Witness{s->test, s->trace, s->fitness});
  return out;
}

}  // namespace

WitnessSet generate_witnesses(const Design& golden, const Design& buggy, const TestCase& c_b,
                              const SearchConfig& cfg, const InputConstraints* constraints,
                              const IterationHook& hook) {
  check_same_interface(golden, buggy);

  SearchState state;
  state.cfg = cfg;
  state.rng = Rng(cfg.rng_seed);
  state.buggy = &buggy;
  state.constraints = constraints;
  state.bug_trace = simulate(buggy, c_b);

  Verdict v0 = classify_against(golden, c_b, state.bug_trace);
  if (v0.status == VerdictStatus::Pass)
    throw std::runtime_error("test case does not trigger the bug");

  const uint32_t t = static_cast<uint32_t>(c_b.cycle_count());
  state.priorities.assign(t, cfg.delta);

  SeedEntry first;
  first.test = c_b;
  first.trace = state.bug_trace;
  first.fitness = 1.0;  // distance to itself is 0
  first.anchor = true;
  first.trace_id = 0;
  state.seeds.push_back(std::move(first));

  WitnessSet result;
  uint32_t candidate_counter = 0;
  const uint32_t positions_per_mutation = std::min<uint32_t>(cfg.positions_per_mutation, t);

  for (uint32_t round = 0;; ++round) {
    for (state.iter = 0; state.iter < cfg.max_iterations; ++state.iter) {
      IterationRecord rec;
      rec.round = round;
      rec.iter = state.iter;
      for (const SeedEntry& s : state.seeds) rec.seed_fitness.push_back(s.fitness);
      rec.priorities = state.priorities;

      size_t seed_idx = select_seed(state);
      rec.seed_index = seed_idx;
      std::vector<uint32_t> positions = select_positions(state, positions_per_mutation);
      rec.positions = positions;

      TestCase candidate = mutate(state.seeds[seed_idx].test, positions, cfg.mutation_prob,
                                  buggy, state.rng, constraints);
      candidate.id = "w" + std::to_string(candidate_counter++);
      ++result.candidates_generated;

      ExecutionTrace trace = simulate(buggy, candidate);
      size_t trace_id = state.next_trace_id++;
      Verdict verdict = classify_against(golden, candidate, trace);
      rec.passed = verdict.status == VerdictStatus::Pass;

      const ExecutionTrace* cand_trace = &trace;
      if (verdict.status == VerdictStatus::Pass) {
        bool distinct = true;
        for (const SeedEntry& s : state.seeds) {
          if (state.cache.get(trace_id, trace, s.trace_id, s.trace, cfg.weights) == 0.0) {
            distinct = false;
            break;
          }
        }
        if (distinct) {
          SeedEntry e;
          e.test = std::move(candidate);
          e.fitness = fitness(trace, state.bug_trace, cfg.weights);
          e.trace = std::move(trace);
          e.anchor = false;
          e.trace_id = trace_id;
          state.seeds.push_back(std::move(e));
          cand_trace = &state.seeds.back().trace;
          ++result.passing;
          rec.accepted = true;
        } else {
          ++result.duplicates;
          rec.duplicate = true;
        }
      } else {
        SeedEntry e;
        e.test = std::move(candidate);
        e.trace = std::move(trace);
        e.anchor = false;
        e.trace_id = trace_id;
        state.failing.push_back(std::move(e));
        cand_trace = &state.failing.back().trace;
        ++result.failing;
      }

      // the score sees the pool as updated above, including the candidate
      // itself when it was just accepted
      double s = score(state, trace_id, *cand_trace);
      rec.score = s;
      update_priority(state, positions, s);
      rec.min_priority_after = *std::min_element(state.priorities.begin(), state.priorities.end());
      if (hook) hook(rec);
    }

    // round-end audit over the final pool; all pairs are already cached by
    // the insertion guard, so this is lookups only
    for (size_t i = 0; i < state.seeds.size() && result.seed_pool_distinct; ++i) {
      for (size_t j = i + 1; j < state.seeds.size(); ++j) {
        if (state.cache.get(state.seeds[i].trace_id, state.seeds[i].trace,
                            state.seeds[j].trace_id, state.seeds[j].trace, cfg.weights) == 0.0) {
          result.seed_pool_distinct = false;
          break;
        }
      }
    }

    std::vector<Witness> found = top_witnesses(state, cfg.top_n);
    if (!found.empty()) {
      result.witnesses = std::move(found);
      result.restarts_used = round;
      result.final_priorities = state.priorities;
      return result;
    }
    if (round >= cfg.max_restarts || state.failing.empty()) {
      result.degraded = true;
      result.restarts_used = round;
      result.final_priorities = state.priorities;
      return result;
    }

    // reseed from the failing pool; the distinct-trace guard still applies
    std::vector<SeedEntry> reseeded;
    for (SeedEntry& f : state.failing) {
      bool distinct = true;
      for (const SeedEntry& s : reseeded) {
        if (state.cache.get(f.trace_id, f.trace, s.trace_id, s.trace, cfg.weights) == 0.0) {
          distinct = false;
          break;
        }
      }
      if (!distinct) continue;
      f.anchor = true;
      f.fitness = fitness(f.trace, state.bug_trace, cfg.weights);
      reseeded.push_back(std::move(f));
    }
    state.seeds = std::move(reseeded);
    state.failing.clear();
    // priorities carry over between rounds
  }
}

std::string witnesses_to_json(const WitnessSet& set) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Witness& w : set.witnesses) {
    nlohmann::ordered_json e;
    e["case_id"] = w.test.id;
    e["fitness"] = w.fitness;
    e["csv_payload"] = testcase_to_csv(w.test);
    arr.push_back(std::move(e));
  }
  return arr.dump(2) + "\n";
}

std::vector<std::pair<TestCase, double>> witnesses_from_json(const std::string& json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text);
  const nlohmann::json* arr = &doc;
  if (doc.is_object() && doc.contains("witnesses")) arr = &doc["witnesses"];
  if (!arr->is_array()) throw std::runtime_error("witness set must be a JSON array");
  std::vector<std::pair<TestCase, double>> out;
  for (const auto& e : *arr) {
    TestCase t = testcase_from_csv(e.at("csv_payload").get<std::string>(),
                                   e.at("case_id").get<std::string>());
    out.emplace_back(std::move(t), e.at("fitness").get<double>());
  }
  return out;
}

}  // namespace witloc
