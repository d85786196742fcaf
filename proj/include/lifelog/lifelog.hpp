/* Copyright (c) 2026 The Lifelog Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include "lifelog/commands.hpp"
#include "lifelog/core_types.hpp"
#include "lifelog/crf.hpp"
#include "lifelog/error.hpp"
#include "lifelog/eval_metrics.hpp"
#include "lifelog/fluents.hpp"
#include "lifelog/grad_check.hpp"
#include "lifelog/io.hpp"
#include "lifelog/model.hpp"
#include "lifelog/neural_head.hpp"
#include "lifelog/random.hpp"
#include "lifelog/simulator.hpp"
#include "lifelog/timeline.hpp"
#include "lifelog/training.hpp"
