#include "qsynth/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qsynth::io {

namespace {

double round_sig(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v == 0.0 ? 0.0 : v;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

}  // namespace

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_to_json_sig(const Mat& m, int digits) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(round_sig(m(r, c), digits));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ParseError("expected a matrix (array of arrays)");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) {
      throw ParseError("ragged matrix rows");
    }
    for (int c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ParseError("matrix entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

Mat matrix_from_json(const json& j, int rows, int cols, const std::string& name) {
  const Mat m = matrix_from_json(j);
  if ((rows >= 0 && m.rows() != rows) || (cols >= 0 && m.cols() != cols)) {
    std::ostringstream os;
    os << name << ": expected " << rows << "x" << cols << ", got " << m.rows() << "x" << m.cols();
    throw ParseError(os.str());
  }
  return m;
}

json ito_to_json(const ItoMatrix& f) {
  if (f.is_canonical()) return json("canonical");
  json j;
  j["S"] = matrix_to_json(f.S);
  j["Tim"] = matrix_to_json(f.Tim);
  return j;
}

ItoMatrix ito_from_json(const json& j, int expected_dim, const std::string& name) {
  ItoMatrix f;
  if (j.is_string()) {
    if (j.get<std::string>() != "canonical") throw ParseError(name + ": unknown Ito spec");
    if (expected_dim < 0) throw ParseError(name + ": canonical Ito needs a known dimension");
    return canonical_ito(expected_dim);
  }
  if (!j.is_object() || !j.contains("S") || !j.contains("Tim")) {
    throw ParseError(name + ": Ito spec must be \"canonical\" or {S, Tim}");
  }
  f.S = matrix_from_json(j.at("S"));
  f.Tim = matrix_from_json(j.at("Tim"));
  f.n_w = static_cast<int>(f.S.rows());
  if (f.Tim.rows() != f.n_w || f.Tim.cols() != f.n_w || f.S.cols() != f.n_w) {
    throw ParseError(name + ": S/Tim shape mismatch");
  }
  if (expected_dim >= 0 && f.n_w != expected_dim) {
    throw ParseError(name + ": Ito dimension does not match the input count");
  }
  return f;
}

json theta_to_json(const CommutationMatrix& cm) {
  json j;
  switch (cm.kind) {
    case CommutationMatrix::Kind::kCanonical:
      j["kind"] = "canonical";
      break;
    case CommutationMatrix::Kind::kDegenerate:
      j["kind"] = "degenerate";
      j["nprime"] = cm.nprime;
      break;
    case CommutationMatrix::Kind::kPermutedCanonical:
      j["kind"] = "explicit";
      break;
  }
  // A degenerate matrix in non-standard block order needs the explicit form.
  if (cm.kind == CommutationMatrix::Kind::kDegenerate) {
    Mat standard = Mat::Zero(cm.n, cm.n);
    standard.bottomRightCorner(cm.n - cm.nprime, cm.n - cm.nprime) =
        block_diag_j((cm.n - cm.nprime) / 2);
    if ((cm.theta - standard).cwiseAbs().maxCoeff() > 1e-12) j["kind"] = "explicit";
  }
  if (j["kind"] == "explicit") j["theta"] = matrix_to_json(cm.theta);
  return j;
}

CommutationMatrix theta_from_json(const json& j, int n) {
  if (!j.is_object() || !j.contains("kind")) throw ParseError("theta: missing kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "canonical") return CommutationMatrix::canonical(n);
  if (kind == "degenerate") {
    if (!j.contains("nprime")) throw ParseError("theta: degenerate kind needs nprime");
    return CommutationMatrix::degenerate(n, j.at("nprime").get<int>());
  }
  if (kind == "explicit") {
    return CommutationMatrix::from_matrix(matrix_from_json(j.at("theta"), n, n, "theta"));
  }
  throw ParseError("theta: unknown kind '" + kind + "'");
}

bool looks_like_plant(const json& j) {
  return j.is_object() && j.contains("matrices") && j.at("matrices").contains("B0");
}

json plant_to_json(const Plant& p) {
  json j;
  j["n"] = p.n();
  json m;
  m["A"] = matrix_to_json(p.A);
  m["B0"] = matrix_to_json(p.B0);
  m["B1"] = matrix_to_json(p.B1);
  m["B2"] = matrix_to_json(p.B2);
  m["C1"] = matrix_to_json(p.C1);
  m["D12"] = matrix_to_json(p.D12);
  m["C2"] = matrix_to_json(p.C2);
  m["D20"] = matrix_to_json(p.D20);
  m["D21"] = matrix_to_json(p.D21);
  j["matrices"] = std::move(m);
  j["theta"] = theta_to_json(p.thetaP);
  json ito;
  ito["v"] = ito_to_json(p.Fv);
  ito["w"] = ito_to_json(p.Fw);
  j["ito"] = std::move(ito);
  return j;
}

Plant plant_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("matrices")) {
    throw ParseError("plant: missing n/matrices");
  }
  const int n = j.at("n").get<int>();
  const json& m = j.at("matrices");
  for (const char* key : {"A", "B0", "B1", "B2", "C1", "D12", "C2", "D20", "D21"}) {
    if (!m.contains(key)) throw ParseError(std::string("plant: missing matrix ") + key);
  }
  Plant p;
  p.A = matrix_from_json(m.at("A"), n, n, "A");
  p.B0 = matrix_from_json(m.at("B0"), n, -1, "B0");
  p.B1 = matrix_from_json(m.at("B1"), n, -1, "B1");
  p.B2 = matrix_from_json(m.at("B2"), n, -1, "B2");
  p.C1 = matrix_from_json(m.at("C1"), -1, n, "C1");
  p.C2 = matrix_from_json(m.at("C2"), -1, n, "C2");
  p.D12 = matrix_from_json(m.at("D12"), p.n_z(), p.n_u(), "D12");
  p.D20 = matrix_from_json(m.at("D20"), p.n_y(), p.n_v(), "D20");
  p.D21 = matrix_from_json(m.at("D21"), p.n_y(), p.n_w(), "D21");
  p.thetaP = j.contains("theta") ? theta_from_json(j.at("theta"), n) : CommutationMatrix::canonical(n);
  const json ito = j.contains("ito") ? j.at("ito") : json::object();
  p.Fv = ito.contains("v") ? ito_from_json(ito.at("v"), p.n_v(), "ito.v") : canonical_ito(p.n_v());
  p.Fw = ito.contains("w") ? ito_from_json(ito.at("w"), p.n_w(), "ito.w") : canonical_ito(p.n_w());
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("plant: ") + e.what());
  }
  return p;
}

json qsde_to_json(const LinearQsde& s) {
  json j;
  j["n"] = s.n();
  json m;
  m["A"] = matrix_to_json(s.A);
  m["B"] = matrix_to_json(s.B);
  m["C"] = matrix_to_json(s.C);
  m["D"] = matrix_to_json(s.D);
  j["matrices"] = std::move(m);
  j["theta"] = theta_to_json(s.theta);
  json ito;
  ito["w"] = ito_to_json(s.ito);
  j["ito"] = std::move(ito);
  j["output_channel_offset"] = s.output_channel_offset;
  return j;
}

LinearQsde qsde_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("matrices")) {
    throw ParseError("system: missing n/matrices");
  }
  const int n = j.at("n").get<int>();
  const json& m = j.at("matrices");
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!m.contains(key)) throw ParseError(std::string("system: missing matrix ") + key);
  }
  LinearQsde s;
  s.A = matrix_from_json(m.at("A"), n, n, "A");
  s.B = matrix_from_json(m.at("B"), n, -1, "B");
  s.C = matrix_from_json(m.at("C"), -1, n, "C");
  s.D = matrix_from_json(m.at("D"), s.n_y(), s.n_w(), "D");
  s.theta = j.contains("theta") ? theta_from_json(j.at("theta"), n) : CommutationMatrix::canonical(n);
  const json ito = j.contains("ito") ? j.at("ito") : json::object();
  s.ito = ito.contains("w") ? ito_from_json(ito.at("w"), s.n_w(), "ito.w") : canonical_ito(s.n_w());
  s.output_channel_offset = j.value("output_channel_offset", 0);
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("system: ") + e.what());
  }
  return s;
}

json controller_to_json(const FullController& c) {
  json j;
  j["n_K"] = c.n_K();
  json m;
  m["A_K"] = matrix_to_json(c.A_K);
  m["B_K"] = matrix_to_json(c.B_K);
  m["C_K"] = matrix_to_json(c.C_K);
  m["B_K0"] = matrix_to_json(c.B_K0);
  m["B_K1"] = matrix_to_json(c.B_K1);
  j["matrices"] = std::move(m);
  j["theta_K"] = theta_to_json(c.theta_K);
  json ito;
  ito["vK"] = ito_to_json(c.F_vK);
  j["ito"] = std::move(ito);
  return j;
}

FullController controller_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n_K") || !j.contains("matrices")) {
    throw ParseError("controller: missing n_K/matrices");
  }
  const int nk = j.at("n_K").get<int>();
  const json& m = j.at("matrices");
  for (const char* key : {"A_K", "B_K", "C_K", "B_K0", "B_K1"}) {
    if (!m.contains(key)) throw ParseError(std::string("controller: missing matrix ") + key);
  }
  FullController c;
  c.A_K = matrix_from_json(m.at("A_K"), nk, nk, "A_K");
  c.B_K = matrix_from_json(m.at("B_K"), nk, -1, "B_K");
  c.C_K = matrix_from_json(m.at("C_K"), -1, nk, "C_K");
  c.B_K1 = matrix_from_json(m.at("B_K1"), nk, -1, "B_K1");
  c.B_K0 = matrix_from_json(m.at("B_K0"), c.n_u(), c.n_vK(), "B_K0");
  c.theta_K = j.contains("theta_K") ? theta_from_json(j.at("theta_K"), nk)
                                    : CommutationMatrix::canonical(nk);
  const json ito = j.contains("ito") ? j.at("ito") : json::object();
  c.F_vK = ito.contains("vK") ? ito_from_json(ito.at("vK"), c.n_vK(), "ito.vK")
                              : canonical_ito(c.n_vK());
  return c;
}

InputSignal signal_from_json(const json& j, int dim) {
  if (!j.is_object() || !j.contains("segments") || !j.contains("horizon")) {
    throw ParseError("signal: need segments and horizon");
  }
  std::vector<double> times;
  std::vector<Vec> vals;
  for (const json& seg : j.at("segments")) {
    if (!seg.contains("t") || !seg.contains("value")) throw ParseError("signal: segment needs t/value");
    times.push_back(seg.at("t").get<double>());
    const json& v = seg.at("value");
    if (static_cast<int>(v.size()) != dim) throw ParseError("signal: value dimension mismatch");
    Vec x(dim);
    for (int k = 0; k < dim; ++k) x(k) = v[k].get<double>();
    vals.push_back(x);
  }
  try {
    return InputSignal::steps(std::move(times), std::move(vals), j.at("horizon").get<double>());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("signal: ") + e.what());
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    std::ostringstream os;
    os << path << ": parse error at byte " << e.byte << ": " << e.what();
    throw ParseError(os.str());
  }
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.times.empty()) return;
  const int n = static_cast<int>(traj.means.front().size());
  os << "t";
  for (int i = 0; i < n; ++i) os << ",mean_" << i;
  for (int i = 0; i < n; ++i) {
    for (int k = i; k < n; ++k) os << ",cov_" << i << "_" << k;
  }
  os << ",int_zz,int_xx,int_bwbw,V\n";
  char buf[32];
  const auto emit = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    os << buf;
  };
  for (size_t r = 0; r < traj.times.size(); ++r) {
    emit(traj.times[r]);
    for (int i = 0; i < n; ++i) {
      os << ",";
      emit(traj.means[r](i));
    }
    for (int i = 0; i < n; ++i) {
      for (int k = i; k < n; ++k) {
        os << ",";
        emit(traj.covs[r](i, k));
      }
    }
    os << ",";
    emit(traj.int_zz[r]);
    os << ",";
    emit(traj.int_xx[r]);
    os << ",";
    emit(traj.int_bwbw[r]);
    os << ",";
    emit(traj.V[r]);
    os << "\n";
  }
}

}  // namespace qsynth::io
