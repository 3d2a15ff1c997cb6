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

// The model boundary. Every model (symbolic oracle, noise simulator, gold
// replayer, external process) serves ordered batches of task-tagged
// requests through the same interface, so evaluation never depends on
// which one produced a response.

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgwalk/detail/hash.hpp"
#include "kgwalk/detail/rng.hpp"
#include "kgwalk/detail/text.hpp"
#include "kgwalk/error.hpp"
#include "kgwalk/hopper_oracle.hpp"
#include "kgwalk/io.hpp"
#include "kgwalk/kg_store.hpp"
#include "kgwalk/path_grammar.hpp"

namespace kgwalk {

struct AdapterRequest {
  std::string id;
  std::string task;
  std::string input;
  friend bool operator==(const AdapterRequest&, const AdapterRequest&) = default;
};

struct AdapterResponse {
  std::string id;
  std::string output;
  std::map<std::string, std::string> diagnostics;
  friend bool operator==(const AdapterResponse&, const AdapterResponse&) = default;
};

class Adapter {
 public:
  virtual ~Adapter() = default;
  virtual std::string name() const = 0;
  // Serves one batch. Implementations may return fewer responses than
  // requests; run_batch turns that into an AdapterError.
  virtual std::vector<AdapterResponse> serve(std::span<const AdapterRequest> batch) = 0;
};

// Runs one batch and checks the response stream: one response per request,
// same ids, same order. Duplicate request ids are a ValidationError.
inline std::vector<AdapterResponse> run_batch(Adapter& adapter,
                                              std::span<const AdapterRequest> batch) {
  std::unordered_set<std::string> ids;
  for (const auto& r : batch)
    if (!ids.insert(r.id).second)
      throw ValidationError("duplicate request id '" + r.id + "' in batch");
  if (batch.empty()) return {};
  std::vector<AdapterResponse> responses = adapter.serve(batch);

  bool aligned = responses.size() == batch.size();
  for (std::size_t i = 0; aligned && i < batch.size(); ++i)
    aligned = responses[i].id == batch[i].id;
  if (aligned) return responses;

  std::unordered_set<std::string> answered;
  for (const auto& r : responses) answered.insert(r.id);
  std::vector<std::string> missing;
  for (const auto& r : batch)
    if (!answered.count(r.id)) missing.push_back(r.id);
  std::string what = "adapter '" + adapter.name() + "' ";
  if (missing.empty()) {
    what += "returned responses out of order or with unknown ids";
  } else {
    what += "returned no response for ids:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) what += " " + missing[i];
    if (missing.size() > 20) what += " ...";
  }
  throw AdapterError(what, !responses.empty(), std::move(missing));
}

inline std::vector<AdapterResponse> run_batch(Adapter& adapter,
                                              const std::vector<AdapterRequest>& batch) {
  return run_batch(adapter, std::span<const AdapterRequest>(batch));
}

// ---------------------------------------------------------------------------
// Wire records

inline nlohmann::json to_json(const AdapterRequest& r) {
  return {{"id", r.id}, {"task", r.task}, {"input", r.input}};
}

inline nlohmann::json to_json(const AdapterResponse& r) {
  nlohmann::json j = {{"id", r.id}, {"output", r.output}};
  if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
  return j;
}

inline AdapterRequest request_from_json(const nlohmann::json& j, std::size_t line) {
  return {io::require_string(j, "id", line), io::require_string(j, "task", line),
          io::require_string(j, "input", line)};
}

inline AdapterResponse response_from_json(const nlohmann::json& j, std::size_t line) {
  AdapterResponse r{io::require_string(j, "id", line), io::require_string(j, "output", line), {}};
  if (j.contains("diagnostics") && j["diagnostics"].is_object()) {
    for (const auto& [k, v] : j["diagnostics"].items())
      r.diagnostics[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  return r;
}

inline std::vector<AdapterRequest> read_requests(std::istream& in) {
  std::vector<AdapterRequest> out;
  io::for_each_json_line(in, [&](const nlohmann::json& j, std::size_t line) {
    out.push_back(request_from_json(j, line));
  });
  return out;
}

inline std::vector<AdapterResponse> read_responses(std::istream& in) {
  std::vector<AdapterResponse> out;
  io::for_each_json_line(in, [&](const nlohmann::json& j, std::size_t line) {
    out.push_back(response_from_json(j, line));
  });
  return out;
}

inline void write_requests(std::ostream& out, std::span<const AdapterRequest> reqs) {
  for (const auto& r : reqs) io::write_json_line(out, to_json(r));
}

inline void write_responses(std::ostream& out, std::span<const AdapterResponse> resps) {
  for (const auto& r : resps) io::write_json_line(out, to_json(r));
}

// ---------------------------------------------------------------------------
// Built-in adapters

// Adapters that answer each request on its own.
class PerRequestAdapter : public Adapter {
 public:
  std::vector<AdapterResponse> serve(std::span<const AdapterRequest> batch) override {
    std::vector<AdapterResponse> out;
    out.reserve(batch.size());
    for (const auto& r : batch) out.push_back(respond(r));
    return out;
  }
  virtual AdapterResponse respond(const AdapterRequest& request) = 0;
};

inline bool is_hop_task(std::string_view task) {
  return task == "hop" || task == "walk" || task == "mixhop" || task == "ki";
}

namespace detail {

inline AdapterResponse echo(const AdapterRequest& r, std::string error) {
  AdapterResponse out{r.id, r.input, {{"error", std::move(error)}}};
  return out;
}

}  // namespace detail

// Completes hop/walk/mixhop inputs read as walk queries with the
// lexicographic oracle; "ki" returns only the final entity. Failures echo
// the input with an "error" diagnostic, since a model always emits
// something and the harness scores it as wrong.
class OracleAdapter : public PerRequestAdapter {
 public:
  explicit OracleAdapter(const KnowledgeGraph& kg) : kg_(&kg) {}

  std::string name() const override { return "oracle"; }

  AdapterResponse respond(const AdapterRequest& r) override {
    if (!is_hop_task(r.task)) return detail::echo(r, "unsupported-task");
    const QueryFields fields = extract_query_fields(r.input);
    if (fields.malformed) return detail::echo(r, "malformed-query");
    const WalkQuery q{fields.entity, fields.relations};
    if (!kg_->find_entity(q.seed)) return detail::echo(r, "unknown-entity");
    WalkPath path;
    try {
      path = complete_walk(*kg_, q);
    } catch (const NoPathError& e) {
      auto out = detail::echo(r, "no-path");
      out.diagnostics["hop"] = std::to_string(e.hop());
      return out;
    }
    AdapterResponse out{r.id, r.task == "ki" ? path.answer() : serialize(path), {}};
    if (count_completions(*kg_, q, 2) > 1) out.diagnostics["ambiguous"] = "true";
    return out;
  }

 private:
  const KnowledgeGraph* kg_;
};

// Replays a fixed answer key. Unknown ids get an empty output and a
// "missing-key" diagnostic.
class GoldAdapter : public PerRequestAdapter {
 public:
  explicit GoldAdapter(std::unordered_map<std::string, std::string> answer_key)
      : key_(std::move(answer_key)) {}

  std::string name() const override { return "gold"; }

  AdapterResponse respond(const AdapterRequest& r) override {
    auto it = key_.find(r.id);
    if (it == key_.end()) return {r.id, "", {{"error", "missing-key"}}};
    return {r.id, it->second, {}};
  }

 private:
  std::unordered_map<std::string, std::string> key_;
};

// File mode: serves previously recorded responses by id. Requests with no
// recorded response are left unanswered, which run_batch reports.
class ReplayAdapter : public Adapter {
 public:
  explicit ReplayAdapter(const std::vector<AdapterResponse>& recorded) {
    for (const auto& r : recorded) by_id_.emplace(r.id, r);
  }

  std::string name() const override { return "replay"; }

  std::vector<AdapterResponse> serve(std::span<const AdapterRequest> batch) override {
    std::vector<AdapterResponse> out;
    for (const auto& r : batch) {
      auto it = by_id_.find(r.id);
      if (it != by_id_.end()) out.push_back(it->second);
    }
    return out;
  }

 private:
  std::unordered_map<std::string, AdapterResponse> by_id_;
};

struct NoiseSpec {
  double p_entity = 0.0;
  double p_parse = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(p_entity >= 0.0 && p_entity <= 1.0)) throw ConfigError("p_entity must lie in [0, 1]");
    if (!(p_parse >= 0.0 && p_parse <= 1.0)) throw ConfigError("p_parse must lie in [0, 1]");
  }
};

// Simulated imperfect model.
//
// Hop tasks: the oracle is followed hop by hop; after each hop the
// resolved entity is, with probability p_entity, replaced by a uniformly
// drawn entity that differs from both the resolved entity and the oracle's
// entity at that position. Traversal continues from the replacement; once
// no completion exists from the current node the remaining relations are
// echoed without entities.
//
// Parse tasks: the parse produced by `parse_source` has one
// whitespace-delimited token of its entity segment deleted with
// probability p_parse.
//
// Each request draws from a stream keyed by (seed, request id), so output
// does not depend on batching. With no corruption event the oracle's
// response is returned unchanged.
class NoisyAdapter : public Adapter {
 public:
  NoisyAdapter(const KnowledgeGraph& kg, NoiseSpec spec,
               std::shared_ptr<Adapter> parse_source = nullptr)
      : kg_(&kg), spec_(spec), oracle_(kg), parse_source_(std::move(parse_source)) {
    spec_.validate();
  }

  std::string name() const override { return "noisy"; }

  std::vector<AdapterResponse> serve(std::span<const AdapterRequest> batch) override {
    std::vector<AdapterResponse> out(batch.size());
    std::vector<AdapterRequest> parse_requests;
    std::vector<std::size_t> parse_slots;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch[i].task == "parse") {
        parse_requests.push_back(batch[i]);
        parse_slots.push_back(i);
      } else {
        out[i] = respond_hop(batch[i]);
      }
    }
    if (!parse_requests.empty()) {
      if (!parse_source_) {
        for (auto slot : parse_slots) out[slot] = detail::echo(batch[slot], "no-parse-source");
      } else {
        auto parsed = run_batch(*parse_source_, parse_requests);
        for (std::size_t k = 0; k < parsed.size(); ++k)
          out[parse_slots[k]] = corrupt_parse(std::move(parsed[k]));
      }
    }
    return out;
  }

 private:
  detail::RandomStream stream_for(const std::string& id) const {
    return detail::RandomStream(detail::mix_seed(spec_.seed, detail::key_of(id)));
  }

  // Uniform over entities (in surface order) excluding up to two ids.
  std::optional<EntityId> draw_other(detail::RandomStream& rng, EntityId a, EntityId b) const {
    const auto& all = kg_->entities_by_surface();
    const std::size_t excluded = a == b ? 1 : 2;
    if (all.size() <= excluded) return std::nullopt;
    std::uint64_t k = rng.below(all.size() - excluded);
    for (EntityId e : all) {
      if (e == a || e == b) continue;
      if (k-- == 0) return e;
    }
    return std::nullopt;
  }

  AdapterResponse respond_hop(const AdapterRequest& r) {
    AdapterResponse base = oracle_.respond(r);
    if (base.diagnostics.count("error")) return base;
    const QueryFields fields = extract_query_fields(r.input);
    const WalkPath oracle_path = complete_walk(*kg_, WalkQuery{fields.entity, fields.relations});

    auto rng = stream_for(r.id);
    std::vector<std::string> segments{oracle_path.entities.front()};
    EntityId current = kg_->entity(oracle_path.entities.front());
    bool broken = false;
    bool corrupted = false;
    const std::size_t hops = oracle_path.relations.size();
    for (std::size_t i = 0; i < hops; ++i) {
      segments.push_back(oracle_path.relations[i]);
      if (broken) continue;
      WalkQuery rest{kg_->surface(current),
                     {oracle_path.relations.begin() + static_cast<std::ptrdiff_t>(i),
                      oracle_path.relations.end()}};
      std::optional<EntityId> resolved;
      try {
        resolved = kg_->entity(complete_walk(*kg_, rest).entities[1]);
      } catch (const NoPathError&) {
        broken = true;
        continue;
      }
      if (rng.unit() < spec_.p_entity) {
        if (auto other = draw_other(rng, *resolved, kg_->entity(oracle_path.entities[i + 1]))) {
          resolved = other;
          corrupted = true;
        }
      }
      segments.push_back(kg_->surface(*resolved));
      current = *resolved;
    }
    if (!corrupted) return base;
    AdapterResponse out{r.id, {}, {{"noise", broken ? "entity-corrupted,path-broken"
                                                    : "entity-corrupted"}}};
    out.output = r.task == "ki" ? segments.back() : join_segments(segments);
    return out;
  }

  AdapterResponse corrupt_parse(AdapterResponse parsed) {
    auto rng = stream_for(parsed.id);
    if (!(rng.unit() < spec_.p_parse)) return parsed;
    ParsedSegments segs = parse_segments(parsed.output);
    std::vector<std::string> tokens;
    std::string_view entity = segs.segments.front();
    while (!entity.empty()) {
      const auto start = entity.find_first_not_of(" \t\n\r\f\v");
      if (start == std::string_view::npos) break;
      entity.remove_prefix(start);
      const auto end = entity.find_first_of(" \t\n\r\f\v");
      tokens.emplace_back(entity.substr(0, end));
      entity.remove_prefix(end == std::string_view::npos ? entity.size() : end);
    }
    if (tokens.empty()) return parsed;
    tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(rng.below(tokens.size())));
    std::string rebuilt;
    for (std::size_t i = 0; i < tokens.size(); ++i) rebuilt += (i ? " " : "") + tokens[i];
    segs.segments.front() = std::move(rebuilt);
    parsed.output = join_segments(segs.segments);
    parsed.diagnostics["noise"] = "parse-token-dropped";
    return parsed;
  }

  const KnowledgeGraph* kg_;
  NoiseSpec spec_;
  OracleAdapter oracle_;
  std::shared_ptr<Adapter> parse_source_;
};

// Question-to-path model built from two stages: each request is parsed by
// `parse`, and the parse is completed by `hop`.
class ComposedAdapter : public Adapter {
 public:
  ComposedAdapter(std::shared_ptr<Adapter> parse, std::shared_ptr<Adapter> hop)
      : parse_(std::move(parse)), hop_(std::move(hop)) {}

  std::string name() const override { return "composed(" + parse_->name() + "," + hop_->name() + ")"; }

  std::vector<AdapterResponse> serve(std::span<const AdapterRequest> batch) override {
    std::vector<AdapterRequest> stage1;
    stage1.reserve(batch.size());
    for (const auto& r : batch) stage1.push_back({r.id, "parse", r.input});
    const auto parsed = run_batch(*parse_, stage1);
    std::vector<AdapterRequest> stage2;
    stage2.reserve(batch.size());
    for (const auto& p : parsed) stage2.push_back({p.id, "hop", p.output});
    return run_batch(*hop_, stage2);
  }

 private:
  std::shared_ptr<Adapter> parse_;
  std::shared_ptr<Adapter> hop_;
};

}  // namespace kgwalk
