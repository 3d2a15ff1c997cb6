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

#pragma once

#include "kgwalk/adapter_protocol.hpp"
#include "kgwalk/error.hpp"
#include "kgwalk/eval_harness.hpp"
#include "kgwalk/hopper_oracle.hpp"
#include "kgwalk/io.hpp"
#include "kgwalk/kg_store.hpp"
#include "kgwalk/metrics.hpp"
#include "kgwalk/mixture_builder.hpp"
#include "kgwalk/onehop_templater.hpp"
#include "kgwalk/path_grammar.hpp"
#include "kgwalk/process_adapter.hpp"
#include "kgwalk/qa_types.hpp"
#include "kgwalk/walk_sampler.hpp"

#define KGWALK_VERSION "0.1.0"
