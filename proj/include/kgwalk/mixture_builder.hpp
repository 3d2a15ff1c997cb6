// Copyright 2026 The kgwalk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Task records for the knowledge-integration, walk, QA, parse and mixed
// tasks, and deterministic proportional mixtures of them.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgwalk/detail/hash.hpp"
#include "kgwalk/detail/rng.hpp"
#include "kgwalk/error.hpp"
#include "kgwalk/io.hpp"
#include "kgwalk/kg_store.hpp"
#include "kgwalk/path_grammar.hpp"
#include "kgwalk/qa_types.hpp"
#include "kgwalk/walk_sampler.hpp"

namespace kgwalk {

enum class TaskKind { kKi, kWalk, kQa, kParse, kMixhopQa };

inline std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::kKi: return "ki";
    case TaskKind::kWalk: return "walk";
    case TaskKind::kQa: return "qa";
    case TaskKind::kParse: return "parse";
    case TaskKind::kMixhopQa: return "mixhop-qa";
  }
  return "qa";
}

inline TaskKind parse_task_kind(std::string_view s) {
  for (auto k : {TaskKind::kKi, TaskKind::kWalk, TaskKind::kQa, TaskKind::kParse,
                 TaskKind::kMixhopQa})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown task kind '" + std::string(s) + "'");
}

struct TaskInstance {
  std::string id;
  TaskKind task = TaskKind::kQa;
  std::string input;
  std::string target;
  nlohmann::json meta;  // null when absent

  friend bool operator==(const TaskInstance&, const TaskInstance&) = default;
};

// ki: "e1 ; r1" -> "e2", one record per triple.
inline std::vector<TaskInstance> make_ki_instances(const std::vector<SurfaceTriple>& triples) {
  std::vector<TaskInstance> out;
  out.reserve(triples.size());
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& t = triples[i];
    out.push_back({"ki-" + std::to_string(i), TaskKind::kKi,
                   serialize(WalkQuery{t.subject, {t.relation}}), t.object, nullptr});
  }
  return out;
}

inline std::vector<TaskInstance> make_ki_instances(const KnowledgeGraph& kg) {
  std::vector<SurfaceTriple> triples;
  triples.reserve(kg.triples().size());
  for (const auto& t : kg.triples()) triples.push_back(kg.spell(t));
  return make_ki_instances(triples);
}

// walk: incomplete query -> full path.
inline std::vector<TaskInstance> make_walk_instances(const std::vector<WalkRecord>& walks) {
  std::vector<TaskInstance> out;
  out.reserve(walks.size());
  for (const auto& w : walks) {
    out.push_back({w.id, TaskKind::kWalk, serialize(query_of(w.path)), serialize(w.path),
                   {{"seed_entity", w.seed_entity}, {"round", w.round}}});
  }
  return out;
}

// qa: question -> answer; parse: question -> query of the evidence chain;
// mixhop-qa: question -> the full evidence chain. parse and mixhop-qa throw
// ValidationError on evidence that does not chain.
inline std::vector<TaskInstance> make_qa_instances(const std::vector<QAInstance>& qas,
                                                   TaskKind kind) {
  if (kind == TaskKind::kKi || kind == TaskKind::kWalk)
    throw ValidationError("make_qa_instances: task must be qa, parse or mixhop-qa");
  std::vector<TaskInstance> out;
  out.reserve(qas.size());
  for (const auto& qa : qas) {
    TaskInstance t{qa.id, kind, qa.question, {}, nullptr};
    switch (kind) {
      case TaskKind::kQa: t.target = qa.answer; break;
      case TaskKind::kParse: t.target = serialize(evidence_query(qa)); break;
      default: t.target = serialize(evidence_path(qa)); break;
    }
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& e : qa.evidence) evidence.push_back({e.subject, e.relation, e.object});
    t.meta = {{"evidence", std::move(evidence)}};
    out.push_back(std::move(t));
  }
  return out;
}

inline nlohmann::json to_json(const TaskInstance& t) {
  nlohmann::json j = {{"id", t.id}, {"task", to_string(t.task)}, {"input", t.input},
                      {"target", t.target}};
  if (!t.meta.is_null()) j["meta"] = t.meta;
  return j;
}

inline std::vector<TaskInstance> read_tasks(std::istream& in) {
  std::vector<TaskInstance> out;
  io::for_each_json_line(in, [&](const nlohmann::json& j, std::size_t line) {
    TaskInstance t;
    t.id = io::require_string(j, "id", line);
    try {
      t.task = parse_task_kind(io::require_string(j, "task", line));
    } catch (const ValidationError& e) {
      throw ParseError(line, e.what());
    }
    t.input = io::require_string(j, "input", line);
    t.target = io::require_string(j, "target", line);
    if (j.contains("meta")) t.meta = j["meta"];
    out.push_back(std::move(t));
  });
  return out;
}

inline void write_tasks(std::ostream& out, const std::vector<TaskInstance>& tasks) {
  for (const auto& t : tasks) io::write_json_line(out, to_json(t));
}

struct MixtureComponent {
  std::string name;
  double proportion = 0.0;
};

struct MixtureSpec {
  std::vector<MixtureComponent> components;
  std::uint64_t seed = 0;
  std::size_t epoch_size = 0;

  void validate() const {
    if (components.empty()) throw ConfigError("mixture needs at least one component");
    double total = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
      const auto& c = components[i];
      if (!(c.proportion >= 0.0 && c.proportion <= 1.0))
        throw ConfigError("proportion of '" + c.name + "' must lie in [0, 1]");
      for (std::size_t k = 0; k < i; ++k)
        if (components[k].name == c.name)
          throw ConfigError("component '" + c.name + "' listed twice");
      total += c.proportion;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("proportions must sum to 1");
  }
};

struct Mixture {
  std::vector<TaskInstance> items;
  std::map<std::string, std::size_t> counts;
};

// Integer quotas by largest remainder; ties go to the component whose name
// sorts first. Each quota is floor or ceil of proportion * epoch_size.
inline std::map<std::string, std::size_t> mixture_quotas(const MixtureSpec& spec) {
  std::vector<MixtureComponent> comps = spec.components;
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  std::map<std::string, std::size_t> quota;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const double exact = comps[i].proportion * static_cast<double>(spec.epoch_size);
    const auto whole = static_cast<std::size_t>(std::floor(exact));
    quota[comps[i].name] = whole;
    assigned += whole;
    remainders.emplace_back(exact - static_cast<double>(whole), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < spec.epoch_size && k < remainders.size(); ++k, ++assigned)
    ++quota[comps[remainders[k].second].name];
  return quota;
}

namespace detail {

template <typename T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  RandomStream rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace detail

// Materializes one epoch: every component contributes its quota, drawn
// from a seeded permutation of its stream and cycling when the stream is
// shorter than the quota; the concatenation is then shuffled. Output
// depends only on stream contents, names and the spec.
inline Mixture build_mixture(const std::map<std::string, std::vector<TaskInstance>>& streams,
                             const MixtureSpec& spec) {
  spec.validate();
  for (const auto& c : spec.components) {
    auto it = streams.find(c.name);
    if (it == streams.end()) throw ValidationError("no stream named '" + c.name + "'");
    if (it->second.empty()) throw ValidationError("stream '" + c.name + "' is empty");
  }
  Mixture out;
  out.counts = mixture_quotas(spec);
  for (const auto& [name, quota] : out.counts) {
    const auto& stream = streams.at(name);
    std::vector<std::size_t> order(stream.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    detail::seeded_shuffle(order, detail::mix_seed(spec.seed, 1, detail::key_of(name)));
    for (std::size_t i = 0; i < quota; ++i) out.items.push_back(stream[order[i % order.size()]]);
  }
  detail::seeded_shuffle(out.items, detail::mix_seed(spec.seed, 2));
  return out;
}

}  // namespace kgwalk
