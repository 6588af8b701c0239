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

#include "kbilqr/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>
#include <type_traits>
#include <variant>

#include "kbilqr/systems.h"

namespace kbilqr {
namespace fs = std::filesystem;

namespace {

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') first++;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) last--;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    Fail(ErrorKind::kInvalidInput,
         where + ": cannot parse number '" + text + "'");
  }
  return v;
}

std::vector<std::string> SplitComma(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

Json TermToJson(const Term& term) {
  return std::visit(
      [](const auto& t) -> Json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, StateTerm>) {
          return {{"kind", "state"}, {"coordinate", t.coordinate}};
        } else if constexpr (std::is_same_v<T, MonomialTerm>) {
          return {{"kind", "monomial"}, {"exponents", t.exponents}};
        } else if constexpr (std::is_same_v<T, PolynomialTerm>) {
          return {{"kind", "polynomial"},
                  {"exponents", t.exponents},
                  {"coefficients", t.coefficients}};
        } else if constexpr (std::is_same_v<T, TrigTerm>) {
          return {{"kind", t.function == TrigFunction::kSin ? "sin" : "cos"},
                  {"coordinate", t.coordinate}};
        } else if constexpr (std::is_same_v<T, RbfTerm>) {
          return {{"kind", "rbf"},
                  {"center", std::vector<double>(t.center.data(),
                                                 t.center.data() +
                                                     t.center.size())},
                  {"width", t.width}};
        } else {
          return {{"kind", "constant"}};
        }
      },
      term);
}

template <typename T>
T Field(const Json& json, const char* key, const std::string& where) {
  if (!json.contains(key)) {
    Fail(ErrorKind::kInvalidInput, where + ": missing field '" + key + "'");
  }
  try {
    return json.at(key).get<T>();
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kInvalidInput,
         where + ": bad field '" + key + "': " + e.what());
  }
}

Term TermFromJson(const Json& json) {
  const std::string kind = Field<std::string>(json, "kind", "term");
  if (kind == "state") return StateTerm{Field<int>(json, "coordinate", kind)};
  if (kind == "monomial") {
    return MonomialTerm{Field<std::vector<int>>(json, "exponents", kind)};
  }
  if (kind == "polynomial") {
    return PolynomialTerm{
        Field<std::vector<std::vector<int>>>(json, "exponents", kind),
        Field<std::vector<double>>(json, "coefficients", kind)};
  }
  if (kind == "sin" || kind == "cos") {
    return TrigTerm{kind == "sin" ? TrigFunction::kSin : TrigFunction::kCos,
                    Field<int>(json, "coordinate", kind)};
  }
  if (kind == "rbf") {
    const auto center = Field<std::vector<double>>(json, "center", kind);
    return RbfTerm{Eigen::Map<const VectorXd>(center.data(),
                                              static_cast<int>(center.size())),
                   Field<double>(json, "width", kind)};
  }
  if (kind == "constant") return ConstantTerm{};
  Fail(ErrorKind::kInvalidInput, "unknown term kind '" + kind + "'");
}

Json Finite(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double FiniteOr(const Json& v, double fallback) {
  return v.is_null() ? fallback : v.get<double>();
}

}  // namespace

Json MatrixToJson(const MatrixXd& mat) {
  Json rows = Json::array();
  for (int i = 0; i < mat.rows(); i++) {
    Json row = Json::array();
    for (int j = 0; j < mat.cols(); j++) row.push_back(mat(i, j));
    rows.push_back(row);
  }
  return rows;
}

MatrixXd MatrixFromJson(const Json& json) {
  if (!json.is_array()) Fail(ErrorKind::kInvalidInput, "matrix must be an array");
  const int rows = static_cast<int>(json.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(json[0].size());
  MatrixXd mat(rows, cols);
  for (int i = 0; i < rows; i++) {
    if (!json[i].is_array() || static_cast<int>(json[i].size()) != cols) {
      Fail(ErrorKind::kInvalidInput, "matrix rows have different lengths");
    }
    for (int j = 0; j < cols; j++) mat(i, j) = json[i][j].get<double>();
  }
  return mat;
}

Json DictionaryToJson(const Dictionary& dict) {
  Json terms = Json::array();
  for (const Term& t : dict.terms()) terms.push_back(TermToJson(t));
  return {{"state_dim", dict.StateDim()}, {"terms", terms}};
}

Dictionary DictionaryFromJson(const Json& json) {
  if (json.contains("named")) {
    return NamedDictionary(Field<std::string>(json, "named", "dictionary"));
  }
  const int state_dim = Field<int>(json, "state_dim", "dictionary");
  if (!json.contains("terms") || !json["terms"].is_array()) {
    Fail(ErrorKind::kInvalidInput, "dictionary: missing term list");
  }
  std::vector<Term> terms;
  for (const Json& t : json["terms"]) terms.push_back(TermFromJson(t));
  return Dictionary(state_dim, std::move(terms));
}

void AtomicWrite(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorKind::kIo, "cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) Fail(ErrorKind::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    Fail(ErrorKind::kIo, "cannot rename into " + path);
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json ReadJson(const std::string& path) {
  try {
    return Json::parse(ReadFile(path));
  } catch (const Json::parse_error& e) {
    Fail(ErrorKind::kInvalidInput, path + ": " + e.what());
  }
}

void WriteJson(const std::string& path, const Json& json) {
  AtomicWrite(path, json.dump(2) + "\n");
}

Json ModelToJson(const BilinearModel& model) {
  Json b = Json::array();
  for (const MatrixXd& bi : model.b) b.push_back(MatrixToJson(bi));
  return {{"kind", "bilinear"},
          {"N", model.LiftedDim()},
          {"m", model.ControlDim()},
          {"n", model.StateDim()},
          {"dt", model.dt},
          {"dictionary", DictionaryToJson(model.dict)},
          {"A", MatrixToJson(model.a)},
          {"B", b},
          {"C", MatrixToJson(model.c)},
          {"residual", model.residual},
          {"warnings", model.warnings}};
}

Json ModelToJson(const LinearModel& model) {
  return {{"kind", "linear"},
          {"N", model.LiftedDim()},
          {"m", model.ControlDim()},
          {"n", model.StateDim()},
          {"dt", model.dt},
          {"dictionary", DictionaryToJson(model.dict)},
          {"A", MatrixToJson(model.a)},
          {"B", MatrixToJson(model.b)},
          {"C", MatrixToJson(model.c)},
          {"residual", model.residual},
          {"warnings", model.warnings}};
}

ModelFile ModelFromJson(const Json& json) {
  ModelFile file;
  const std::string kind = Field<std::string>(json, "kind", "model");
  const Dictionary dict =
      DictionaryFromJson(Field<Json>(json, "dictionary", "model"));
  const MatrixXd a = MatrixFromJson(Field<Json>(json, "A", "model"));
  const MatrixXd c = MatrixFromJson(Field<Json>(json, "C", "model"));
  const double dt = Field<double>(json, "dt", "model");
  const double residual = json.value("residual", 0.0);
  const auto warnings =
      json.value("warnings", std::vector<std::string>{});
  CheckDims(a.rows() == dict.LiftedDim() && a.cols() == dict.LiftedDim(),
            "model: A does not match the dictionary size");
  CheckDims(c.cols() == dict.LiftedDim() && c.rows() == dict.StateDim(),
            "model: C must be n x N");
  if (kind == "bilinear") {
    BilinearModel& m = file.bilinear;
    m.dict = dict;
    m.a = a;
    m.c = c;
    m.dt = dt;
    m.residual = residual;
    m.warnings = warnings;
    for (const Json& b : Field<Json>(json, "B", "model")) {
      m.b.push_back(MatrixFromJson(b));
      CheckDims(m.b.back().rows() == a.rows() && m.b.back().cols() == a.cols(),
                "model: every B_i must be N x N");
    }
  } else if (kind == "linear") {
    file.linear = true;
    LinearModel& m = file.linear_model;
    m.dict = dict;
    m.a = a;
    m.b = MatrixFromJson(Field<Json>(json, "B", "model"));
    m.c = c;
    m.dt = dt;
    m.residual = residual;
    m.warnings = warnings;
    CheckDims(m.b.rows() == a.rows(), "model: B must have N rows");
  } else {
    Fail(ErrorKind::kInvalidInput, "model: unknown kind '" + kind + "'");
  }
  return file;
}

Json CostToJson(const CostEstimate& cost) {
  const IocDiagnostics& d = cost.diagnostics;
  return {{"N", cost.q.rows()},
          {"m", cost.r.rows()},
          {"Q", MatrixToJson(cost.q)},
          {"R", MatrixToJson(cost.r)},
          {"ls_residual", cost.ls_residual},
          {"diagnostics",
           {{"rows", d.rows},
            {"equations", d.equations},
            {"cols", d.cols},
            {"numerical_rank", d.numerical_rank},
            {"condition_number", Finite(d.condition_number)},
            {"lemma5", d.lemma5_satisfied},
            {"lemma6", d.lemma6_satisfied},
            {"unactuated_modes", d.unactuated_modes},
            {"nullspace_dim", d.NullspaceDim()},
            {"data_null_dim", d.data_null_dim},
            {"nullspace_basis", MatrixToJson(d.nullspace_basis)}}},
          {"warnings", cost.warnings}};
}

CostEstimate CostFromJson(const Json& json) {
  CostEstimate cost;
  cost.q = MatrixFromJson(Field<Json>(json, "Q", "cost"));
  cost.r = MatrixFromJson(Field<Json>(json, "R", "cost"));
  CheckDims(cost.q.rows() == cost.q.cols(), "cost: Q must be square");
  CheckDims(cost.r.rows() == cost.r.cols(), "cost: R must be square");
  cost.ls_residual = json.value("ls_residual", 0.0);
  cost.warnings = json.value("warnings", std::vector<std::string>{});
  if (json.contains("diagnostics")) {
    const Json& d = json["diagnostics"];
    IocDiagnostics& out = cost.diagnostics;
    out.rows = d.value("rows", 0);
    out.equations = d.value("equations", 0);
    out.cols = d.value("cols", 0);
    out.numerical_rank = d.value("numerical_rank", 0);
    out.condition_number = FiniteOr(
        d.value("condition_number", Json(nullptr)),
        std::numeric_limits<double>::infinity());
    out.lemma5_satisfied = d.value("lemma5", false);
    out.lemma6_satisfied = d.value("lemma6", false);
    out.unactuated_modes = d.value("unactuated_modes", std::vector<int>{});
    out.data_null_dim = d.value("data_null_dim", 0);
    if (d.contains("nullspace_basis")) {
      out.nullspace_basis = MatrixFromJson(d["nullspace_basis"]);
    }
  }
  return cost;
}

std::string TrajectoryToCsv(const Trajectory& traj) {
  const int n = traj.StateDim();
  const int m = traj.ControlDim();
  const int horizon = traj.Horizon();
  CheckDims(traj.states.cols() == horizon + 1,
            "trajectory must have T+1 states for T controls");
  std::string out = "k";
  for (int i = 1; i <= n; i++) out += ",x_" + std::to_string(i);
  for (int i = 1; i <= m; i++) out += ",u_" + std::to_string(i);
  out += "\n";
  for (int k = 0; k <= horizon; k++) {
    out += std::to_string(k);
    for (int i = 0; i < n; i++) out += "," + FormatDouble(traj.states(i, k));
    for (int i = 0; i < m; i++) {
      out += ",";
      if (k < horizon) out += FormatDouble(traj.controls(i, k));
    }
    out += "\n";
  }
  return out;
}

Trajectory TrajectoryFromCsv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) Fail(ErrorKind::kInvalidInput, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = SplitComma(line);
  if (header.empty() || header[0] != "k") {
    Fail(ErrorKind::kInvalidInput, "CSV header must start with k");
  }
  int n = 0, m = 0;
  for (size_t c = 1; c < header.size(); c++) {
    if (header[c].rfind("x_", 0) == 0) {
      if (m > 0) Fail(ErrorKind::kInvalidInput, "state columns after controls");
      n++;
    } else if (header[c].rfind("u_", 0) == 0) {
      m++;
    } else {
      Fail(ErrorKind::kInvalidInput, "unknown CSV column '" + header[c] + "'");
    }
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(SplitComma(line));
    if (static_cast<int>(rows.back().size()) != 1 + n + m) {
      Fail(ErrorKind::kInvalidInput,
           "CSV row " + std::to_string(rows.size()) + " has wrong width");
    }
  }
  if (rows.size() < 2) Fail(ErrorKind::kInvalidInput, "CSV needs >= 2 rows");
  const int horizon = static_cast<int>(rows.size()) - 1;
  Trajectory traj;
  traj.states.resize(n, horizon + 1);
  traj.controls.resize(m, horizon);
  for (int k = 0; k <= horizon; k++) {
    const std::string where = "CSV row " + std::to_string(k + 1);
    for (int i = 0; i < n; i++) {
      traj.states(i, k) = ParseDouble(rows[k][1 + i], where);
    }
    for (int i = 0; i < m; i++) {
      const std::string& cell = rows[k][1 + n + i];
      if (k < horizon) {
        traj.controls(i, k) = ParseDouble(cell, where);
      } else if (!cell.empty()) {
        Fail(ErrorKind::kInvalidInput, "final CSV row must not hold controls");
      }
    }
  }
  return traj;
}

std::string TrajectoryFileName(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "traj_%04d.csv", index);
  return buf;
}

void WriteBatch(const std::string& dir, const TrajectoryBatch& batch,
                const Json& extra) {
  fs::create_directories(dir);
  for (int i = 0; i < batch.Size(); i++) {
    AtomicWrite((fs::path(dir) / TrajectoryFileName(i)).string(),
                TrajectoryToCsv(batch.trajectories[i]));
  }
  Json meta = extra;
  meta["n"] = batch.StateDim();
  meta["m"] = batch.ControlDim();
  meta["dt"] = batch.dt;
  meta["n_traj"] = batch.Size();
  meta["horizon"] = batch.Horizon();
  WriteJson((fs::path(dir) / "meta.json").string(), meta);
}

TrajectoryBatch ReadBatch(const std::string& dir, bool truncate_to_shortest) {
  if (!fs::is_directory(dir)) Fail(ErrorKind::kIo, "no such directory " + dir);
  const fs::path meta_path = fs::path(dir) / "meta.json";
  if (!fs::exists(meta_path)) Fail(ErrorKind::kIo, "missing " + meta_path.string());
  const Json meta = ReadJson(meta_path.string());
  const int count = meta.value("n_traj", 0);
  if (count <= 0) Fail(ErrorKind::kUsage, dir + " holds no trajectories");
  TrajectoryBatch batch;
  batch.dt = Field<double>(meta, "dt", "meta.json");
  for (int i = 0; i < count; i++) {
    const fs::path p = fs::path(dir) / TrajectoryFileName(i);
    try {
      batch.trajectories.push_back(TrajectoryFromCsv(ReadFile(p.string())));
    } catch (const Error& e) {
      throw Error(e.kind(), p.string() + ": " + e.what());
    }
  }
  const int n = meta.value("n", batch.trajectories[0].StateDim());
  const int m = meta.value("m", batch.trajectories[0].ControlDim());
  for (const Trajectory& t : batch.trajectories) {
    CheckDims(t.StateDim() == n && t.ControlDim() == m,
              "trajectory dimensions disagree with meta.json");
  }
  if (truncate_to_shortest) return batch.TruncatedToShortest();
  batch.Horizon();
  return batch;
}

std::string StatePlotSvg(const std::vector<Trajectory>& solid,
                         const std::vector<Trajectory>& dashed,
                         const std::string& title) {
  constexpr double kWidth = 640.0, kHeight = 360.0, kPad = 40.0;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  int steps = 1;
  for (const auto* group : {&solid, &dashed}) {
    for (const Trajectory& t : *group) {
      lo = std::min(lo, t.states.minCoeff());
      hi = std::max(hi, t.states.maxCoeff());
      steps = std::max(steps, static_cast<int>(t.states.cols()) - 1);
    }
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  auto px = [&](int k) { return kPad + (kWidth - 2 * kPad) * k / steps; };
  auto py = [&](double v) {
    return kHeight - kPad - (kHeight - 2 * kPad) * (v - lo) / (hi - lo);
  };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kPad << "\" y=\"20\" font-size=\"14\">" << title
      << "</text>\n";
  out << "<text x=\"4\" y=\"" << py(hi) + 4 << "\" font-size=\"10\">"
      << FormatDouble(hi) << "</text>\n";
  out << "<text x=\"4\" y=\"" << py(lo) + 4 << "\" font-size=\"10\">"
      << FormatDouble(lo) << "</text>\n";
  for (const auto* group : {&solid, &dashed}) {
    const bool is_dashed = group == &dashed;
    for (const Trajectory& t : *group) {
      for (int i = 0; i < t.states.rows(); i++) {
        out << "<polyline fill=\"none\" stroke=\"" << kColors[i % 6]
            << "\" stroke-width=\"1.2\""
            << (is_dashed ? " stroke-dasharray=\"4 3\"" : "") << " points=\"";
        for (int k = 0; k < t.states.cols(); k++) {
          out << px(k) << "," << py(t.states(i, k)) << " ";
        }
        out << "\"/>\n";
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace kbilqr
