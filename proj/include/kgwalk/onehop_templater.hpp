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

// Single-hop question synthesis from relation templates. A template holds
// exactly one standalone "X", which is replaced by the subject surface.

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgwalk/detail/hash.hpp"
#include "kgwalk/detail/rng.hpp"
#include "kgwalk/error.hpp"
#include "kgwalk/io.hpp"
#include "kgwalk/kg_store.hpp"
#include "kgwalk/qa_types.hpp"

namespace kgwalk {

namespace detail {

inline bool word_byte(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'A' && u <= 'Z') || (u >= 'a' && u <= 'z') ||
         u == '_' || u >= 0x80;
}

// Offsets of every "X" not glued to another word character.
inline std::vector<std::size_t> placeholder_offsets(std::string_view tmpl) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != 'X') continue;
    const bool left = i == 0 || !word_byte(tmpl[i - 1]);
    const bool right = i + 1 == tmpl.size() || !word_byte(tmpl[i + 1]);
    if (left && right) out.push_back(i);
  }
  return out;
}

}  // namespace detail

inline std::string render_template(std::string_view tmpl, std::string_view subject) {
  const auto at = detail::placeholder_offsets(tmpl);
  if (at.size() != 1)
    throw ValidationError("template '" + std::string(tmpl) + "' has " +
                          std::to_string(at.size()) + " placeholders, expected exactly one X");
  std::string out(tmpl.substr(0, at[0]));
  out.append(subject).append(tmpl.substr(at[0] + 1));
  return out;
}

class TemplateTable {
 public:
  void add(std::string relation, std::vector<std::string> templates) {
    if (templates.empty())
      throw ValidationError("relation '" + relation + "' has no templates");
    for (const auto& t : templates) {
      if (detail::placeholder_offsets(t).size() != 1)
        throw ValidationError("template '" + t + "' for relation '" + relation +
                              "' must contain exactly one X");
    }
    if (!table_.emplace(std::move(relation), std::move(templates)).second)
      throw ValidationError("relation listed twice in template table");
  }

  const std::vector<std::string>* find(const std::string& relation) const {
    auto it = table_.find(relation);
    return it == table_.end() ? nullptr : &it->second;
  }

  std::size_t size() const noexcept { return table_.size(); }
  const std::map<std::string, std::vector<std::string>>& entries() const noexcept {
    return table_;
  }

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

// {"relation": string, "templates": [string, ...]} per line.
inline TemplateTable read_template_table(std::istream& in) {
  TemplateTable table;
  io::for_each_json_line(in, [&](const nlohmann::json& j, std::size_t line) {
    std::string relation = io::require_string(j, "relation", line);
    if (!j.contains("templates") || !j["templates"].is_array())
      throw ParseError(line, "missing array field \"templates\"");
    std::vector<std::string> templates;
    for (const auto& t : j["templates"]) {
      if (!t.is_string()) throw ParseError(line, "templates must be strings");
      templates.push_back(t.get<std::string>());
    }
    try {
      table.add(std::move(relation), std::move(templates));
    } catch (const ValidationError& e) {
      throw ParseError(line, e.what());
    }
  });
  return table;
}

// One question per distinct triple. The template for the triple at
// (deduplicated) index i is drawn uniformly with a stream keyed by
// (seed, i).
inline std::vector<QAInstance> generate_onehop(const std::vector<SurfaceTriple>& triples,
                                               const TemplateTable& table, std::uint64_t seed,
                                               std::string_view id_prefix = "1hop-") {
  std::vector<const SurfaceTriple*> unique;
  SurfaceTripleSet seen;
  for (const auto& t : triples)
    if (seen.insert(t).second) unique.push_back(&t);
  for (const auto* t : unique)
    if (!table.find(t->relation))
      throw ValidationError("no templates for relation '" + t->relation + "'");

  std::vector<QAInstance> out;
  out.reserve(unique.size());
  for (std::size_t i = 0; i < unique.size(); ++i) {
    const SurfaceTriple& t = *unique[i];
    const auto& choices = *table.find(t.relation);
    detail::RandomStream rng(detail::mix_seed(seed, i));
    const auto& tmpl = choices[rng.below(choices.size())];
    QAInstance qa;
    qa.id = std::string(id_prefix) + std::to_string(i);
    qa.question = render_template(tmpl, t.subject);
    qa.answer = t.object;
    qa.evidence = {t};
    qa.hop_count = 1;
    out.push_back(std::move(qa));
  }
  return out;
}

struct OneHopSplits {
  std::vector<QAInstance> train;
  std::vector<QAInstance> validation;
  std::vector<QAInstance> test;
};

// Each evidence triple of the multi-hop splits becomes one single-hop
// question, placed in the split it came from. A triple used by several
// splits goes to test, then validation, then train.
inline OneHopSplits generate_onehop_splits(const std::vector<QAInstance>& qa_train,
                                           const std::vector<QAInstance>& qa_val,
                                           const std::vector<QAInstance>& qa_test,
                                           const TemplateTable& table, std::uint64_t seed) {
  enum Split : int { kTrain = 0, kVal = 1, kTest = 2 };
  std::vector<SurfaceTriple> order;
  std::unordered_map<SurfaceTriple, int, SurfaceTripleHash> assigned;
  auto visit = [&](const std::vector<QAInstance>& qas, int split) {
    for (const auto& qa : qas) {
      for (const auto& t : qa.evidence) {
        auto [it, inserted] = assigned.emplace(t, split);
        if (inserted)
          order.push_back(t);
        else if (split > it->second)
          it->second = split;
      }
    }
  };
  visit(qa_train, kTrain);
  visit(qa_val, kVal);
  visit(qa_test, kTest);

  OneHopSplits out;
  auto all = generate_onehop(order, table, seed);
  for (std::size_t i = 0; i < all.size(); ++i) {
    switch (assigned.at(order[i])) {
      case kTrain: out.train.push_back(std::move(all[i])); break;
      case kVal: out.validation.push_back(std::move(all[i])); break;
      default: out.test.push_back(std::move(all[i])); break;
    }
  }
  return out;
}

}  // namespace kgwalk
