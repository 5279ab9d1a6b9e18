// Copyright 2026 The optimeta-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "optimeta/api.hpp"
#include "optimeta/article.hpp"
#include "optimeta/batch.hpp"
#include "optimeta/citation.hpp"
#include "optimeta/deposit.hpp"
#include "optimeta/digest.hpp"
#include "optimeta/doi.hpp"
#include "optimeta/enrich.hpp"
#include "optimeta/error.hpp"
#include "optimeta/gazetteer.hpp"
#include "optimeta/geo.hpp"
#include "optimeta/http.hpp"
#include "optimeta/jsonutil.hpp"
#include "optimeta/meta_emit.hpp"
#include "optimeta/store.hpp"
#include "optimeta/text.hpp"
#include "optimeta/time_period.hpp"
#include "optimeta/workflow.hpp"
