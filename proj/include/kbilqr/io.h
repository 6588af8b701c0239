// Copyright 2026 The kbilqr Authors
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

#ifndef KBILQR_IO_H_
#define KBILQR_IO_H_

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kbilqr/bilqr.h"
#include "kbilqr/common.h"
#include "kbilqr/edmdc.h"
#include "kbilqr/lifting.h"
#include "kbilqr/optctrl.h"
#include "kbilqr/trajectory.h"

namespace kbilqr {

using Json = nlohmann::json;

// matrices are stored as arrays of rows
Json MatrixToJson(const MatrixXd& mat);
MatrixXd MatrixFromJson(const Json& json);

// term descriptors {"kind": ..., "coordinate"|"exponents"|"center"|"width"}
// with kinds state, monomial, polynomial, sin, cos, rbf, constant; a
// dictionary is {"state_dim": n, "terms": [...]} or {"named": system}
Json DictionaryToJson(const Dictionary& dict);
Dictionary DictionaryFromJson(const Json& json);

// write to a temporary sibling, then rename over the target
void AtomicWrite(const std::string& path, const std::string& content);
std::string ReadFile(const std::string& path);
Json ReadJson(const std::string& path);
void WriteJson(const std::string& path, const Json& json);

struct ModelFile {
  bool linear = false;
  BilinearModel bilinear;
  LinearModel linear_model;

  const Dictionary& dict() const {
    return linear ? linear_model.dict : bilinear.dict;
  }
};

Json ModelToJson(const BilinearModel& model);
Json ModelToJson(const LinearModel& model);
ModelFile ModelFromJson(const Json& json);

Json CostToJson(const CostEstimate& cost);
CostEstimate CostFromJson(const Json& json);

// header k,x_1..x_n,u_1..u_m; T+1 rows, control cells empty on the last
std::string TrajectoryToCsv(const Trajectory& traj);
Trajectory TrajectoryFromCsv(const std::string& text);

// DIR/meta.json and DIR/traj_%04d.csv
void WriteBatch(const std::string& dir, const TrajectoryBatch& batch,
                const Json& extra = Json::object());
TrajectoryBatch ReadBatch(const std::string& dir,
                          bool truncate_to_shortest = false);
std::string TrajectoryFileName(int index);

// minimal SVG line plot of every state coordinate against the step index
std::string StatePlotSvg(const std::vector<Trajectory>& solid,
                         const std::vector<Trajectory>& dashed,
                         const std::string& title);

}  // namespace kbilqr

#endif  // KBILQR_IO_H_
