#include "stpls/model_io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "stpls/error.hpp"

namespace stpls {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::corrupt_archive, what); }

json matrix_to_json(const MatrixXd& m) {
  json data = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

MatrixXd matrix_from_json(const json& j, const char* name) {
  if (!j.is_object()) corrupt(std::string(name) + " is not a matrix object");
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() ||
      static_cast<Index>(data.size()) != rows * cols) {
    corrupt(std::string(name) + ": data length does not match rows*cols");
  }
  MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const auto& v = data[static_cast<std::size_t>(r * cols + c)];
      if (!v.is_number()) corrupt(std::string(name) + " has a non-numeric entry");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

json vector_to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
}

json centering_to_json(const CenteringInfo& info) {
  json j{{"means", vector_to_json(info.means)}};
  j["scales"] = info.scales ? vector_to_json(*info.scales) : json(nullptr);
  return j;
}

CenteringInfo centering_from_json(const json& j) {
  CenteringInfo info;
  info.means = vector_from_json(j.at("means"));
  const auto& scales = j.at("scales");
  if (!scales.is_null()) {
    info.scales = vector_from_json(scales);
    if (info.scales->size() != info.means.size()) corrupt("scales/means length mismatch");
    if (!(info.scales->array() > 0.0).all()) corrupt("non-positive scale");
  }
  return info;
}

json pls_to_json(const PlsModel& m) {
  return {{"x_names", m.x_names},
          {"y_names", m.y_names},
          {"scaling", std::string(to_string(m.scaling))},
          {"x_center", centering_to_json(m.x_center)},
          {"y_center", centering_to_json(m.y_center)},
          {"requested_components", m.requested_components},
          {"weights", matrix_to_json(m.weights)},
          {"x_loadings", matrix_to_json(m.x_loadings)},
          {"y_loadings", matrix_to_json(m.y_loadings)},
          {"scores", matrix_to_json(m.scores)},
          {"coefficients", matrix_to_json(m.coefficients)}};
}

void expect_shape(const MatrixXd& m, Index rows, Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    corrupt(std::string(name) + " has shape " + std::to_string(m.rows()) + "x" +
            std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
            std::to_string(cols));
  }
}

PlsModel pls_from_json(const json& j) {
  PlsModel m;
  m.x_names = j.at("x_names").get<std::vector<std::string>>();
  m.y_names = j.at("y_names").get<std::vector<std::string>>();
  m.scaling = parse_scaling(j.at("scaling").get<std::string>());
  m.x_center = centering_from_json(j.at("x_center"));
  m.y_center = centering_from_json(j.at("y_center"));
  m.requested_components = j.at("requested_components").get<int>();
  m.weights = matrix_from_json(j.at("weights"), "weights");
  m.x_loadings = matrix_from_json(j.at("x_loadings"), "x_loadings");
  m.y_loadings = matrix_from_json(j.at("y_loadings"), "y_loadings");
  m.scores = matrix_from_json(j.at("scores"), "scores");
  m.coefficients = matrix_from_json(j.at("coefficients"), "coefficients");

  const auto p = static_cast<Index>(m.x_names.size());
  const auto q = static_cast<Index>(m.y_names.size());
  const Index h = m.weights.cols();
  expect_shape(m.weights, p, h, "weights");
  expect_shape(m.x_loadings, p, h, "x_loadings");
  expect_shape(m.y_loadings, q, h, "y_loadings");
  if (m.scores.cols() != h) corrupt("scores column count");
  expect_shape(m.coefficients, p, q, "coefficients");
  if (m.x_center.means.size() != p || m.y_center.means.size() != q) corrupt("centering length");
  if (h > m.requested_components) corrupt("more components than requested");
  return m;
}

json twoblock_to_json(const TwoblockModel& m) {
  return {{"x_names", m.x_names},
          {"y_names", m.y_names},
          {"scaling", std::string(to_string(m.scaling))},
          {"x_center", centering_to_json(m.x_center)},
          {"y_center", centering_to_json(m.y_center)},
          {"hyper",
           {{"g", m.hyper.g}, {"h", m.hyper.h}, {"kappa", m.hyper.kappa}, {"eta", m.hyper.eta}}},
          {"W", matrix_to_json(m.W)},
          {"V", matrix_to_json(m.V)},
          {"P", matrix_to_json(m.P)},
          {"Q", matrix_to_json(m.Q)},
          {"T", matrix_to_json(m.T)},
          {"U", matrix_to_json(m.U)},
          {"N", matrix_to_json(m.N)},
          {"M", matrix_to_json(m.M)},
          {"B", matrix_to_json(m.B)}};
}

TwoblockModel twoblock_from_json(const json& j) {
  TwoblockModel m;
  m.x_names = j.at("x_names").get<std::vector<std::string>>();
  m.y_names = j.at("y_names").get<std::vector<std::string>>();
  m.scaling = parse_scaling(j.at("scaling").get<std::string>());
  m.x_center = centering_from_json(j.at("x_center"));
  m.y_center = centering_from_json(j.at("y_center"));
  const auto& hy = j.at("hyper");
  m.hyper = {hy.at("g").get<int>(), hy.at("h").get<int>(), hy.at("kappa").get<double>(),
             hy.at("eta").get<double>()};
  m.hyper.validate();
  m.W = matrix_from_json(j.at("W"), "W");
  m.V = matrix_from_json(j.at("V"), "V");
  m.P = matrix_from_json(j.at("P"), "P");
  m.Q = matrix_from_json(j.at("Q"), "Q");
  m.T = matrix_from_json(j.at("T"), "T");
  m.U = matrix_from_json(j.at("U"), "U");
  m.N = matrix_from_json(j.at("N"), "N");
  m.M = matrix_from_json(j.at("M"), "M");
  m.B = matrix_from_json(j.at("B"), "B");

  const auto p = static_cast<Index>(m.x_names.size());
  const auto q = static_cast<Index>(m.y_names.size());
  const Index h = m.W.cols();
  const Index g = m.V.cols();
  if (h > m.hyper.h || g > m.hyper.g) corrupt("more components than requested");
  expect_shape(m.W, p, h, "W");
  expect_shape(m.P, p, h, "P");
  expect_shape(m.N, p, h, "N");
  expect_shape(m.V, q, g, "V");
  expect_shape(m.Q, q, g, "Q");
  expect_shape(m.M, q, g, "M");
  expect_shape(m.B, p, q, "B");
  if (m.T.cols() != h || m.U.cols() != g || m.T.rows() != m.U.rows()) corrupt("score shapes");
  if (m.x_center.means.size() != p || m.y_center.means.size() != q) corrupt("centering length");
  auto is_mask = [](const MatrixXd& mask) {
    return ((mask.array() == 0.0) || (mask.array() == 1.0)).all();
  };
  if (!is_mask(m.N) || !is_mask(m.M)) corrupt("masks must be 0/1");
  return m;
}

}  // namespace

std::string_view estimator_kind(const AnyModel& model) {
  struct {
    std::string_view operator()(const PlsModel&) const { return "pls2"; }
    std::string_view operator()(const Pls1Set&) const { return "pls1-set"; }
    std::string_view operator()(const TwoblockModel&) const { return "twoblock"; }
  } visitor;
  return std::visit(visitor, model);
}

std::string serialize_model(const AnyModel& model) {
  json payload;
  if (const auto* pls = std::get_if<PlsModel>(&model)) {
    payload = pls_to_json(*pls);
  } else if (const auto* set = std::get_if<Pls1Set>(&model)) {
    payload = {{"models", json::array()}};
    for (const auto& m : set->models) payload["models"].push_back(pls_to_json(m));
  } else {
    payload = twoblock_to_json(std::get<TwoblockModel>(model));
  }
  const json doc{{"schema_version", kSchemaVersion},
                 {"estimator_kind", std::string(estimator_kind(model))},
                 {"payload", std::move(payload)}};
  return doc.dump(1) + "\n";
}

AnyModel deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    corrupt(std::string("not a valid JSON document: ") + e.what());
  }
  try {
    if (!doc.is_object()) corrupt("archive root is not an object");
    const auto version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw Error(ErrorCode::schema_mismatch, "archive schema_version " + std::to_string(version) +
                                                  ", this build reads " +
                                                  std::to_string(kSchemaVersion));
    }
    const auto kind = doc.at("estimator_kind").get<std::string>();
    const auto& payload = doc.at("payload");
    if (kind == "pls2") return pls_from_json(payload);
    if (kind == "twoblock") return twoblock_from_json(payload);
    if (kind == "pls1-set") {
      Pls1Set set;
      for (const auto& m : payload.at("models")) set.models.push_back(pls_from_json(m));
      if (set.models.empty()) corrupt("pls1-set without models");
      return set;
    }
    corrupt("unknown estimator_kind '" + kind + "'");
  } catch (const json::exception& e) {
    corrupt(std::string("malformed archive: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::schema_mismatch || e.code() == ErrorCode::corrupt_archive) throw;
    corrupt(e.what());
  }
}

void save_model(const AnyModel& model, const std::filesystem::path& path) {
  const std::string body = serialize_model(model);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_failure, "cannot open " + tmp.string() + " for writing");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::io_failure, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error(ErrorCode::io_failure, "cannot move archive into " + path.string() + ": " + ec.message());
  }
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io_failure, "read failed for " + path.string());
  return deserialize_model(buffer.str());
}

DataMatrix predict(const AnyModel& model, const DataMatrix& x_new) {
  if (const auto* pls = std::get_if<PlsModel>(&model)) return predict_pls(*pls, x_new);
  if (const auto* set = std::get_if<Pls1Set>(&model)) return predict_pls1_set(*set, x_new);
  return predict_twoblock(std::get<TwoblockModel>(model), x_new);
}

const std::vector<std::string>& predictor_names(const AnyModel& model) {
  if (const auto* pls = std::get_if<PlsModel>(&model)) return pls->x_names;
  if (const auto* set = std::get_if<Pls1Set>(&model)) return set->models.at(0).x_names;
  return std::get<TwoblockModel>(model).x_names;
}

}  // namespace stpls
